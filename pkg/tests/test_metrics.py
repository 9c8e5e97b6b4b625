import numpy as np
import pytest

from cv2xsim.metrics import (
    ScenarioSummary,
    build_histogram,
    exceedance,
    summarize_latencies,
    trend_report,
)


def test_point_mass_histogram():
    hist = build_histogram([4.0, 4.0, 4.0], bin_ms=1.0)
    assert hist.total == 3
    nz = hist.counts.nonzero()[0]
    assert list(nz) == [4]
    assert hist.density[4] == pytest.approx(1.0)
    assert not hist.empty


def test_empty_histogram_flagged():
    hist = build_histogram([], bin_ms=1.0)
    assert hist.empty
    assert hist.total == 0
    assert hist.counts.sum() == 0


def test_histogram_density_integrates_to_one():
    rng = np.random.default_rng(2)
    lat = rng.uniform(0, 400, 5000)
    hist = build_histogram(lat, bin_ms=2.0)
    assert hist.counts.sum() == 5000
    assert float(hist.density.sum() * hist.bin_ms) == pytest.approx(1.0)


def test_uniform_law_of_large_numbers():
    rng = np.random.default_rng(4)
    lat = rng.uniform(0, 100, 100_000)
    hist = build_histogram(lat, bin_ms=1.0)
    in_support = hist.density[:100]
    assert np.all(np.abs(in_support - 0.01) < 0.15 * 0.01)


def test_boundary_lands_in_final_bin():
    hist = build_histogram([999.5, 1000.0], bin_ms=1.0, upper_ms=1000.0)
    assert hist.counts[-1] == 2
    assert hist.total == 2


def test_exceedance_basics():
    assert exceedance([10.0, 30.0], 20.0) == pytest.approx(0.5)
    assert exceedance([5.0, 10.0], 20.0) == 0.0
    assert exceedance([], 20.0) is None
    with pytest.raises(ValueError):
        exceedance([1.0], 0.0)


def test_exceedance_strict_at_threshold():
    assert exceedance([20.0], 20.0) == 0.0
    assert exceedance([20.000001], 20.0) == 1.0


def test_exceedance_monotone_in_threshold():
    rng = np.random.default_rng(8)
    for _ in range(50):
        lat = rng.exponential(60, size=200)
        assert exceedance(lat, 20.0) >= exceedance(lat, 100.0)


def test_tail_mass_close_to_exceedance():
    rng = np.random.default_rng(10)
    lat = rng.uniform(0, 200, 10_000)
    hist = build_histogram(lat, bin_ms=1.0)
    for thr in (20.0, 100.0):
        direct = exceedance(lat, thr)
        assert abs(hist.tail_mass(thr) - direct) <= 1.0 / hist.total * hist.counts.max() + 1e-12


def _summary(r, lam, mean, p100):
    return ScenarioSummary(rsu_count=r, lam=lam, seeds=(0,), n_samples=100,
                           mean_ms=mean, p50_ms=mean, p95_ms=mean, p99_ms=mean,
                           p_exceed_20ms=0.0, p_exceed_100ms=p100,
                           delivery_ratio=1.0, cbr=0.2)


def full_grid(means, p100s):
    return [_summary(r, lam, means[(r, lam)], p100s[(r, lam)])
            for r in (1, 2, 3) for lam in (5, 10, 20)]


def test_trend_verdicts_on_expected_pattern():
    means = {(r, lam): 4.0 + lam * 0.1 + (3 - r) * 0.05 for r in (1, 2, 3)
             for lam in (5, 10, 20)}
    means[(1, 20)] = 300.0
    p100s = {(r, lam): 0.0 for r in (1, 2, 3) for lam in (5, 10, 20)}
    p100s[(1, 20)] = 0.08
    report = trend_report(full_grid(means, p100s))
    assert report.complete
    assert report.row_monotone
    assert report.row_strictly_increasing
    assert report.col_monotone
    assert report.tail_exception
    assert report.all_pass


def test_trend_detects_shuffled_means():
    means = {(r, lam): {5: 20.0, 10: 5.0, 20: 10.0}[lam] for r in (1, 2, 3)
             for lam in (5, 10, 20)}
    p100s = {(r, lam): 0.0 for r in (1, 2, 3) for lam in (5, 10, 20)}
    report = trend_report(full_grid(means, p100s))
    assert not report.row_monotone
    assert not report.all_pass


def test_trend_permutation_invariant():
    means = {(r, lam): 4.0 + lam for r in (1, 2, 3) for lam in (5, 10, 20)}
    p100s = {(r, lam): 0.02 if (r, lam) == (1, 20) else 0.0
             for r in (1, 2, 3) for lam in (5, 10, 20)}
    cells = full_grid(means, p100s)
    a = trend_report(cells)
    b = trend_report(list(reversed(cells)))
    assert a == b


def test_trend_incomplete_grid():
    report = trend_report([_summary(1, 5, 4.0, 0.0)])
    assert not report.complete
    assert report.row_monotone is None
    assert len(report.missing_cells) == 8
    assert not report.all_pass


def test_summarize_percentile_ordering():
    rng = np.random.default_rng(12)
    lat = rng.exponential(30, 1000)
    s = summarize_latencies(lat, 1, 5, [0])
    assert s.p50_ms <= s.p95_ms <= s.p99_ms
    assert 0.0 <= s.p_exceed_20ms <= 1.0
    assert s.p_exceed_20ms >= s.p_exceed_100ms


def test_summarize_empty():
    s = summarize_latencies(np.zeros(0), 2, 10, [0, 1])
    assert s.n_samples == 0
    assert s.mean_ms is None
    assert s.p_exceed_100ms is None


def test_summary_round_trips_through_dict():
    s = _summary(2, 10, 5.5, 0.01)
    assert ScenarioSummary.from_dict(s.to_dict()) == s
