"""Latency statistics: histograms (empirical pdfs), delay-budget exceedance,
per-scenario summaries, and cross-scenario trend verdicts.

The headline metric is the distribution of RSU-to-vehicle latency — the time
from message generation at an RSU application to reception by a vehicle —
compared against the 20-ms and 100-ms delay budgets.  Trend verdicts check
the two expected orderings over the canonical 3x3 experiment grid
(RSU count in {1,2,3} x vehicle density in {5,10,20}): latency grows with
density, and the probability of blowing the 100-ms budget shrinks as RSUs
(each owning a full 10-MHz channel) are added, with the single overloaded
1-RSU / 20-per-lane cell as the expected exception.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

RSU_COUNTS = (1, 2, 3)
LAMBDAS = (5, 10, 20)
PDB_THRESHOLDS_MS = (20.0, 100.0)
DEFAULT_BIN_MS = 1.0
DEFAULT_UPPER_MS = 1000.0


def as_latency_array(samples) -> np.ndarray:
    """Accept a SampleTable, an array, or an iterable of samples/floats."""
    if hasattr(samples, "latencies_ms"):
        return np.asarray(samples.latencies_ms, dtype=float)
    arr = list(samples) if not isinstance(samples, np.ndarray) else samples
    if len(arr) and hasattr(arr[0], "latency_ms"):
        return np.array([s.latency_ms for s in arr], dtype=float)
    return np.asarray(arr, dtype=float)


@dataclass(frozen=True)
class Histogram:
    bin_ms: float
    edges: np.ndarray       # len(counts) + 1, covering [0, upper]
    counts: np.ndarray
    total: int
    density: np.ndarray     # counts / (total * bin_ms); zeros when empty
    empty: bool

    def tail_mass(self, threshold_ms: float) -> float:
        """Mass of bins lying entirely above the threshold."""
        if self.empty:
            return 0.0
        above = self.edges[:-1] >= threshold_ms
        return float(self.counts[above].sum()) / self.total


def build_histogram(samples, bin_ms: float = DEFAULT_BIN_MS,
                    upper_ms: float = DEFAULT_UPPER_MS) -> Histogram:
    """Histogram over [0, upper]; the final bin is closed so the boundary
    lands inside it.  An empty input yields a flagged-empty histogram."""
    if bin_ms <= 0:
        raise ValueError("bin width must be positive")
    lat = as_latency_array(samples)
    n_bins = int(np.ceil(upper_ms / bin_ms))
    edges = np.arange(0, n_bins + 1) * bin_ms
    counts, _ = np.histogram(np.clip(lat, 0, upper_ms), bins=edges)
    total = int(len(lat))
    if total == 0:
        return Histogram(bin_ms, edges, counts, 0, np.zeros(n_bins), empty=True)
    density = counts / (total * bin_ms)
    return Histogram(bin_ms, edges, counts, total, density, empty=False)


def exceedance(samples, threshold_ms: float) -> float | None:
    """Fraction of samples strictly above the threshold; None when undefined."""
    if threshold_ms <= 0:
        raise ValueError("threshold must be positive")
    lat = as_latency_array(samples)
    if len(lat) == 0:
        return None
    return float(np.count_nonzero(lat > threshold_ms)) / len(lat)


@dataclass(frozen=True)
class ScenarioSummary:
    rsu_count: int
    lam: int
    seeds: tuple[int, ...]
    n_samples: int
    mean_ms: float | None
    p50_ms: float | None
    p95_ms: float | None
    p99_ms: float | None
    p_exceed_20ms: float | None
    p_exceed_100ms: float | None
    delivery_ratio: float | None
    cbr: float | None

    def to_dict(self) -> dict:
        return {
            "rsu_count": self.rsu_count,
            "lambda": self.lam,
            "seeds": list(self.seeds),
            "n_samples": self.n_samples,
            "mean_ms": self.mean_ms,
            "p50_ms": self.p50_ms,
            "p95_ms": self.p95_ms,
            "p99_ms": self.p99_ms,
            "p_exceed_20ms": self.p_exceed_20ms,
            "p_exceed_100ms": self.p_exceed_100ms,
            "delivery_ratio": self.delivery_ratio,
            "cbr": self.cbr,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSummary":
        return cls(rsu_count=d["rsu_count"], lam=d["lambda"], seeds=tuple(d["seeds"]),
                   n_samples=d["n_samples"], mean_ms=d["mean_ms"], p50_ms=d["p50_ms"],
                   p95_ms=d["p95_ms"], p99_ms=d["p99_ms"],
                   p_exceed_20ms=d["p_exceed_20ms"], p_exceed_100ms=d["p_exceed_100ms"],
                   delivery_ratio=d["delivery_ratio"], cbr=d["cbr"])


def summarize_latencies(
    latencies: np.ndarray,
    rsu_count: int,
    lam: int,
    seeds: Sequence[int],
    delivery_ratio: float | None = None,
    cbr: float | None = None,
) -> ScenarioSummary:
    lat = np.asarray(latencies, dtype=float)
    if len(lat) == 0:
        return ScenarioSummary(rsu_count, lam, tuple(seeds), 0, None, None, None, None,
                               None, None, delivery_ratio, cbr)
    p50, p95, p99 = (float(np.percentile(lat, q)) for q in (50, 95, 99))
    return ScenarioSummary(
        rsu_count=rsu_count, lam=lam, seeds=tuple(seeds), n_samples=int(len(lat)),
        mean_ms=float(np.mean(lat)), p50_ms=p50, p95_ms=p95, p99_ms=p99,
        p_exceed_20ms=exceedance(lat, 20.0), p_exceed_100ms=exceedance(lat, 100.0),
        delivery_ratio=delivery_ratio, cbr=cbr,
    )


@dataclass(frozen=True)
class TrendReport:
    complete: bool
    row_monotone: bool | None = None            # mean latency non-decreasing in density
    row_strictly_increasing: bool | None = None
    col_monotone: bool | None = None            # P(X>100) non-increasing in RSU count
    tail_exception: bool | None = None          # P(X>100) > 0 at (1 RSU, 20/lane)
    missing_cells: tuple[tuple[int, int], ...] = ()

    @property
    def all_pass(self) -> bool:
        return bool(self.complete and self.row_monotone and self.col_monotone
                    and self.tail_exception)

    def to_dict(self) -> dict:
        return {
            "complete": self.complete,
            "row_monotone": self.row_monotone,
            "row_strictly_increasing": self.row_strictly_increasing,
            "col_monotone": self.col_monotone,
            "tail_exception": self.tail_exception,
            "missing_cells": [list(c) for c in self.missing_cells],
        }


def trend_report(summaries: Iterable[ScenarioSummary]) -> TrendReport:
    """Verdicts over the canonical grid; order of arrival is irrelevant."""
    cells: dict[tuple[int, int], ScenarioSummary] = {}
    for s in summaries:
        cells[(s.rsu_count, s.lam)] = s
    missing = tuple((r, l) for r in RSU_COUNTS for l in LAMBDAS if (r, l) not in cells)
    if missing:
        return TrendReport(complete=False, missing_cells=missing)

    def mean(r: int, l: int) -> float:
        m = cells[(r, l)].mean_ms
        return m if m is not None else float("inf")

    def p100(r: int, l: int) -> float:
        p = cells[(r, l)].p_exceed_100ms
        return p if p is not None else 1.0

    row_mono = all(mean(r, 5) <= mean(r, 10) <= mean(r, 20) for r in RSU_COUNTS)
    row_strict = all(mean(r, 5) < mean(r, 10) < mean(r, 20) for r in RSU_COUNTS)
    col_mono = all(p100(1, l) >= p100(2, l) >= p100(3, l) for l in LAMBDAS)
    tail = p100(1, 20) > 0.0
    return TrendReport(complete=True, row_monotone=row_mono,
                       row_strictly_increasing=row_strict, col_monotone=col_mono,
                       tail_exception=tail)
