"""Result serialization and the experiment runners.

One scenario cell (a scenario at fixed RSU count and density, over one or
more seeds) produces: a samples table (CSV, optional for big matrix runs),
a histogram table (CSV), a summary record (JSON), and a latency-pdf figure
(SVG) with the 20/100-ms requirement lines.  The matrix runner executes the
full RSU-count x density grid across seeds, writes per-cell artifacts plus a
cross-cell trend report, and a grid figure mirroring the per-cell pdfs.

Summaries are regenerable from the samples table: the latency statistics in
summary.json derive purely from rows of samples.csv (post-warm-up,
RSU-sourced), so re-reading the CSV reproduces them bit-identically.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import Engine, RunSummary, SampleTable
from .metrics import (
    Histogram,
    ScenarioSummary,
    TrendReport,
    build_histogram,
    summarize_latencies,
    trend_report,
)
from .scenario import Scenario, serialize_scenario, with_matrix_cell

SAMPLES_HEADER = ["seed", "message_id", "class", "source_id", "source_kind",
                  "receiver_id", "gen_ms", "latency_ms"]
HISTOGRAM_HEADER = ["bin_start_ms", "bin_end_ms", "count", "density_per_ms"]


def write_samples_csv(path: Path, runs: list[tuple[int, SampleTable]]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SAMPLES_HEADER)
        for seed, table in runs:
            msg, cls, src, gen, lat, rx = table.rows()
            for i in range(len(msg)):
                w.writerow([
                    seed, int(msg[i]), table.class_names[cls[i]],
                    table.source_ids[src[i]],
                    "rsu" if table.source_is_rsu[src[i]] else "vehicle",
                    table.receiver_ids[rx[i]], int(gen[i]), int(lat[i]),
                ])


def read_samples_csv(path: Path) -> list[dict]:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    for r in rows:
        r["seed"] = int(r["seed"])
        r["message_id"] = int(r["message_id"])
        r["gen_ms"] = int(r["gen_ms"])
        r["latency_ms"] = float(r["latency_ms"])
    return rows


def write_histogram_csv(path: Path, hist: Histogram) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(HISTOGRAM_HEADER)
        for i in range(len(hist.counts)):
            w.writerow([repr(float(hist.edges[i])), repr(float(hist.edges[i + 1])),
                        int(hist.counts[i]), repr(float(hist.density[i]))])


def read_histogram_csv(path: Path) -> Histogram:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    edges = np.array([float(r["bin_start_ms"]) for r in rows]
                     + [float(rows[-1]["bin_end_ms"])])
    counts = np.array([int(r["count"]) for r in rows])
    density = np.array([float(r["density_per_ms"]) for r in rows])
    total = int(counts.sum())
    bin_ms = float(edges[1] - edges[0])
    return Histogram(bin_ms, edges, counts, total, density, empty=total == 0)


@dataclass
class CellResult:
    rsu_count: int
    lam: int
    seeds: tuple[int, ...]
    per_seed: list[ScenarioSummary]
    pooled: ScenarioSummary
    histogram: Histogram
    run_summaries: list[RunSummary]
    out_dir: Path | None = None
    samples_path: Path | None = None


def metric_mask(table: SampleTable, warmup_ms: int) -> np.ndarray:
    """RSU-to-vehicle samples generated after warm-up: the headline metric."""
    return table.from_rsu & (table.gen_ms >= warmup_ms)


def run_scenario_cell(
    scenario: Scenario,
    seeds: list[int],
    duration_ms: int | None = None,
    bin_ms: float = 1.0,
    out_dir: Path | None = None,
    write_samples: bool = True,
    make_figure: bool = True,
) -> CellResult:
    """Run one scenario over the given seeds and write its artifacts."""
    rsu_count = len(scenario.rsus)
    lam = scenario.density.lambda_per_lane
    warmup = scenario.engine.warmup_ms
    upper = float(scenario.sched.expiry_ms or 1000)

    per_seed: list[ScenarioSummary] = []
    run_summaries: list[RunSummary] = []
    tables: list[tuple[int, SampleTable]] = []
    pooled_lat: list[np.ndarray] = []
    for seed in seeds:
        table, summary = Engine(scenario, seed, duration_ms).run()
        mask = metric_mask(table, warmup)
        lat = table.latencies_ms[mask]
        delivery = summary.delivered / summary.generated if summary.generated else None
        mean_cbr = float(np.mean(summary.cbr_per_channel)) if summary.cbr_per_channel else None
        per_seed.append(summarize_latencies(lat, rsu_count, lam, [seed],
                                            delivery_ratio=delivery, cbr=mean_cbr))
        run_summaries.append(summary)
        tables.append((seed, table))
        pooled_lat.append(lat)

    all_lat = np.concatenate(pooled_lat) if pooled_lat else np.zeros(0)
    deliveries = [s.delivery_ratio for s in per_seed if s.delivery_ratio is not None]
    cbrs = [s.cbr for s in per_seed if s.cbr is not None]
    pooled = summarize_latencies(
        all_lat, rsu_count, lam, seeds,
        delivery_ratio=float(np.mean(deliveries)) if deliveries else None,
        cbr=float(np.mean(cbrs)) if cbrs else None)
    hist = build_histogram(all_lat, bin_ms, upper_ms=upper)

    result = CellResult(rsu_count, lam, tuple(seeds), per_seed, pooled, hist,
                        run_summaries, out_dir)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        if write_samples:
            result.samples_path = out_dir / "samples.csv"
            write_samples_csv(result.samples_path, tables)
        write_histogram_csv(out_dir / "histogram.csv", hist)
        summary_doc = {
            "cell": {"rsu_count": rsu_count, "lambda": lam},
            "seeds": list(seeds),
            "warmup_ms": warmup,
            "latency_stats": pooled.to_dict(),
            "per_seed": [s.to_dict() for s in per_seed],
            "run_counters": [
                {
                    "seed": rs.seed, "duration_ms": rs.duration_ms,
                    "generated": rs.generated, "delivered": rs.delivered,
                    "failed": rs.failed, "expired": rs.expired,
                    "expired_no_receiver": rs.expired_no_receiver,
                    "n_samples": rs.n_samples, "pending_end": rs.pending_end,
                    "configured_admitted": rs.configured_admitted,
                    "configured_fallback": rs.configured_fallback,
                    "cbr_per_channel": list(rs.cbr_per_channel),
                }
                for rs in run_summaries
            ],
        }
        with open(out_dir / "summary.json", "w") as f:
            json.dump(summary_doc, f, indent=2)
        if make_figure:
            from .plots import latency_pdf_figure, save_figure
            title = f"{rsu_count} RSU{'s' if rsu_count != 1 else ''}, {lam} veh/lane"
            save_figure(latency_pdf_figure(hist, title), out_dir / "latency_pdf.svg")
    return result


def _matrix_task(args) -> CellResult:
    base, r, lam, seeds, duration_ms, bin_ms, out_root, write_samples = args
    try:
        sc = with_matrix_cell(base, r, lam)
        out_dir = Path(out_root) / f"cell_r{r}_l{lam}" if out_root else None
        return run_scenario_cell(sc, seeds, duration_ms, bin_ms, out_dir, write_samples)
    except Exception as e:
        raise RuntimeError(f"matrix cell r={r} lambda={lam} failed: {e}") from e


@dataclass
class MatrixResult:
    cells: dict[tuple[int, int], CellResult]
    per_seed_trends: dict[int, TrendReport] = field(default_factory=dict)
    pooled_trend: TrendReport | None = None
    out_dir: Path | None = None

    def seed_pass_counts(self) -> dict[str, int]:
        n = len(self.per_seed_trends)
        return {
            "seeds": n,
            "row_strictly_increasing": sum(
                1 for t in self.per_seed_trends.values() if t.row_strictly_increasing),
            "row_monotone": sum(1 for t in self.per_seed_trends.values() if t.row_monotone),
            "col_monotone": sum(1 for t in self.per_seed_trends.values() if t.col_monotone),
            "tail_exception": sum(1 for t in self.per_seed_trends.values() if t.tail_exception),
        }


def run_matrix(
    base: Scenario,
    rsu_counts: list[int],
    lambdas: list[int],
    seeds: list[int],
    out_dir: Path | None = None,
    duration_ms: int | None = None,
    bin_ms: float = 1.0,
    write_samples: bool = False,
    workers: int | None = None,
) -> MatrixResult:
    """Run the experiment grid; cells fan out over a process pool."""
    if not rsu_counts or not lambdas or not seeds:
        raise ValueError("rsu_counts, lambdas, and seeds must be non-empty")
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "scenario.json", "w") as f:
            f.write(serialize_scenario(base))
    tasks = [(base, r, lam, seeds, duration_ms, bin_ms, out_dir, write_samples)
             for r in rsu_counts for lam in lambdas]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_matrix_task, tasks))
    else:
        results = [_matrix_task(t) for t in tasks]

    cells = {(c.rsu_count, c.lam): c for c in results}
    mr = MatrixResult(cells=cells, out_dir=out_dir)

    for seed in seeds:
        grid = [next(s for s in c.per_seed if s.seeds == (seed,)) for c in results]
        mr.per_seed_trends[seed] = trend_report(grid)
    mr.pooled_trend = trend_report([c.pooled for c in results])

    if out_dir is not None:
        _write_matrix_outputs(mr, rsu_counts, lambdas, out_dir)
    return mr


def _write_matrix_outputs(mr: MatrixResult, rsu_counts: list[int], lambdas: list[int],
                          out_dir: Path) -> None:
    with open(out_dir / "trends.json", "w") as f:
        json.dump({
            "pooled": mr.pooled_trend.to_dict() if mr.pooled_trend else None,
            "per_seed": {str(s): t.to_dict() for s, t in mr.per_seed_trends.items()},
            "seed_pass_counts": mr.seed_pass_counts(),
        }, f, indent=2)

    with open(out_dir / "matrix_summary.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["rsu_count", "lambda", "seed", "n_samples", "mean_ms", "p50_ms",
                    "p95_ms", "p99_ms", "p_exceed_20ms", "p_exceed_100ms",
                    "delivery_ratio", "cbr"])

        def fmt(x):
            return "" if x is None else repr(float(x))

        for (r, lam), cell in sorted(mr.cells.items()):
            for s in cell.per_seed:
                w.writerow([r, lam, s.seeds[0], s.n_samples, fmt(s.mean_ms), fmt(s.p50_ms),
                            fmt(s.p95_ms), fmt(s.p99_ms), fmt(s.p_exceed_20ms),
                            fmt(s.p_exceed_100ms), fmt(s.delivery_ratio), fmt(s.cbr)])
            p = cell.pooled
            w.writerow([r, lam, "pooled", p.n_samples, fmt(p.mean_ms), fmt(p.p50_ms),
                        fmt(p.p95_ms), fmt(p.p99_ms), fmt(p.p_exceed_20ms),
                        fmt(p.p_exceed_100ms), fmt(p.delivery_ratio), fmt(p.cbr)])

    from .plots import matrix_grid_figure, save_figure
    hists = {key: cell.histogram for key, cell in mr.cells.items()}
    save_figure(matrix_grid_figure(hists, sorted(rsu_counts), sorted(lambdas)),
                out_dir / "grid_pdfs.svg")
