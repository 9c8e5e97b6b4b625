"""Command-line entry point.

Verbs:
    simulate  run one scenario over one or more seeds and write artifacts
    matrix    run the RSU-count x density grid and write per-cell artifacts
              plus the cross-cell trend report
    validate  parse and validate a scenario file, reporting all violations
    serve     start the interactive do-not-pass bridge

Exit codes: 0 success, 1 validation error, 2 run failure, 3 trend assertion
failure (matrix --assert-trends).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .scenario import ScenarioError, default_scenario, parse_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUN_FAILURE = 2
EXIT_TREND_FAILURE = 3


def parse_int_set(text: str) -> list[int]:
    """'1,2,3' or '0-9' (inclusive) or a mix: '0-3,7'."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty set: {text!r}")
    return out


def load_scenario(path: str | None):
    if path is None:
        return default_scenario()
    return parse_scenario(Path(path).read_text())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cv2xsim", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="verb", required=True)

    def add_common(sp, default_seeds):
        sp.add_argument("--scenario", help="scenario JSON file (defaults apply if omitted)")
        sp.add_argument("--seeds", type=parse_int_set, default=default_seeds,
                        help="seed list: '0,1,2' or '0-9'")
        sp.add_argument("--duration-ms", type=int, default=None,
                        help="run length per seed (default from scenario)")
        sp.add_argument("--bin-ms", type=float, default=1.0, help="histogram bin width")
        sp.add_argument("--out", required=True, help="output directory")

    sim = sub.add_parser("simulate", help="run one scenario")
    add_common(sim, default_seeds=[0])
    sim.add_argument("--no-samples", action="store_true",
                     help="skip writing the samples table")

    mat = sub.add_parser("matrix", help="run the RSU x density experiment grid")
    add_common(mat, default_seeds=list(range(10)))
    mat.add_argument("--rsus", type=parse_int_set, default=[1, 2, 3],
                     help="RSU counts (default 1,2,3)")
    mat.add_argument("--lambda", dest="lambdas", type=parse_int_set, default=[5, 10, 20],
                     help="vehicles per lane (default 5,10,20)")
    mat.add_argument("--write-samples", action="store_true",
                     help="also write per-cell samples.csv (large)")
    mat.add_argument("--assert-trends", action="store_true",
                     help="exit 3 unless the pooled trend verdicts all hold")
    mat.add_argument("--workers", type=int, default=None,
                     help="parallel cell workers (default: cpu count)")

    val = sub.add_parser("validate", help="parse a scenario file")
    val.add_argument("--scenario", required=True)

    srv = sub.add_parser("serve", help="serve the interactive do-not-pass bridge")
    srv.add_argument("--port", type=int, default=8700)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--seed", type=int, default=0)
    srv.add_argument("--tick-hz", type=float, default=50.0)
    return p


def cmd_simulate(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as e:
        for err in e.errors:
            print(f"scenario error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    from .artifacts import run_scenario_cell
    try:
        result = run_scenario_cell(
            sc, args.seeds, duration_ms=args.duration_ms, bin_ms=args.bin_ms,
            out_dir=Path(args.out), write_samples=not args.no_samples)
    except Exception as e:
        print(f"run failed: {e}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    p = result.pooled
    print(f"{p.n_samples} samples; mean {p.mean_ms if p.mean_ms is None else round(p.mean_ms, 3)} ms; "
          f"P(X>20) {p.p_exceed_20ms}; P(X>100) {p.p_exceed_100ms}")
    print(f"artifacts in {args.out}")
    return EXIT_OK


def cmd_matrix(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as e:
        for err in e.errors:
            print(f"scenario error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    from .artifacts import run_matrix
    try:
        mr = run_matrix(sc, args.rsus, args.lambdas, args.seeds, out_dir=Path(args.out),
                        duration_ms=args.duration_ms, bin_ms=args.bin_ms,
                        write_samples=args.write_samples, workers=args.workers)
    except Exception as e:
        print(f"matrix run failed: {e}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    for (r, lam), cell in sorted(mr.cells.items()):
        p = cell.pooled
        print(f"cell r={r} lambda={lam}: n={p.n_samples} mean={0 if p.mean_ms is None else round(p.mean_ms, 3)} ms "
              f"P(X>100)={p.p_exceed_100ms}")
    trend = mr.pooled_trend
    if trend is not None and trend.complete:
        print(f"trends: density-monotone={trend.row_monotone} "
              f"rsu-monotone={trend.col_monotone} overload-tail={trend.tail_exception}")
    else:
        print("trends: incomplete grid, no verdicts")
    if args.assert_trends:
        if trend is None or not trend.all_pass:
            return EXIT_TREND_FAILURE
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        text = Path(args.scenario).read_text()
    except OSError as e:
        print(f"cannot read scenario: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        parse_scenario(text)
    except ScenarioError as e:
        for err in e.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    print("scenario OK")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .drive.bridge import serve_forever
    try:
        serve_forever(host=args.host, port=args.port, seed=args.seed, tick_hz=args.tick_hz)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "simulate": cmd_simulate,
        "matrix": cmd_matrix,
        "validate": cmd_validate,
        "serve": cmd_serve,
    }[args.verb]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
