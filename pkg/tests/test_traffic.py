import numpy as np
import pytest
from scipy import stats

from cv2xsim.traffic import (
    Arrival,
    MessageClass,
    Stream,
    builtin_class,
    builtin_classes,
    generate,
)

FAMILY_EXPECTED = {
    "critical-V2V": (2, 20),
    "essential-V2V": (5, 100),
    "critical-V2I": (3, 100),
    "essential-V2I": (5, 100),
    "transactional": (6, 100),
    "low-priority": (6, 100),
    "background": (8, 100),
}


def test_bsm_critical_mapping():
    c = builtin_class("BSM-critical")
    assert (c.pppp, c.pdb_ms) == (2, 20)


def test_background_mapping():
    c = builtin_class("background")
    assert (c.pppp, c.pdb_ms) == (8, 100)


def test_all_families_match_table():
    classes = builtin_classes()
    assert len(classes) == 12
    assert {c.family for c in classes} == set(FAMILY_EXPECTED)
    for c in classes:
        assert (c.pppp, c.pdb_ms) == FAMILY_EXPECTED[c.family]
        assert c.pdb_ms >= 20
        assert c.pppp in (2, 3, 5, 6, 8)


def test_periodic_count():
    cls = builtin_class("BSM-essential")
    msgs = generate([Stream("rsu-1", cls)], duration_ms=1000, seed=0)
    assert len(msgs) == 10


def test_zero_duration_empty():
    cls = builtin_class("BSM-essential")
    assert generate([Stream("rsu-1", cls)], duration_ms=0, seed=0) == []


def test_sorted_and_exact_spacing():
    cls = builtin_class("BSM-essential")
    streams = [Stream(f"veh-{i:03d}", cls) for i in range(20)]
    msgs = generate(streams, duration_ms=5000, seed=3)
    times = [m.gen_ms for m in msgs]
    assert times == sorted(times)
    per_source = {}
    for m in msgs:
        per_source.setdefault(m.source_id, []).append(m.gen_ms)
    for ts in per_source.values():
        gaps = {b - a for a, b in zip(ts, ts[1:])}
        assert gaps == {100}


def test_count_and_phase_uniformity():
    cls = builtin_class("BSM-essential")
    streams = [Stream(f"veh-{i:03d}", cls) for i in range(120)]
    msgs = generate(streams, duration_ms=10_000, seed=1)
    assert len(msgs) == 12_000
    phases = sorted({m.source_id: m.gen_ms for m in msgs if m.gen_ms < 100}.values())
    # integer phases on [0, 100); KS against uniform at a loose level
    assert stats.kstest(np.array(phases) / 100.0, "uniform").pvalue > 0.001


def test_keyed_streams_are_stable():
    cls = builtin_class("RSM")
    solo = generate([Stream("rsu-1", cls)], duration_ms=3000, seed=9)
    both = generate([Stream("rsu-1", cls), Stream("rsu-2", cls)],
                    duration_ms=3000, seed=9)
    assert [m.gen_ms for m in solo] == [m.gen_ms for m in both if m.source_id == "rsu-1"]


def test_event_arrivals_poisson_rate():
    cls = MessageClass("evt", "custom", pppp=5, pdb_ms=100,
                       arrival=Arrival("event", rate_hz=50.0))
    msgs = generate([Stream("rsu-1", cls)], duration_ms=60_000, seed=2)
    # 3000 expected; 5 sigma ~ 275
    assert 2700 < len(msgs) < 3300
    times = [m.gen_ms for m in msgs]
    assert times == sorted(times)
    assert all(0 <= t < 60_000 for t in times)


def test_event_zero_rate_empty():
    cls = MessageClass("evt", "custom", pppp=5, pdb_ms=100,
                       arrival=Arrival("event", rate_hz=0.0))
    assert generate([Stream("x", cls)], duration_ms=1000, seed=0) == []


def test_invalid_class_rejected():
    with pytest.raises(ValueError):
        MessageClass("bad", "custom", pppp=0, pdb_ms=100)
    with pytest.raises(ValueError):
        MessageClass("bad", "custom", pppp=3, pdb_ms=100, payload_bytes=0)
    with pytest.raises(ValueError):
        Arrival("periodic", period_ms=0)


def test_message_ids_unique_and_dense():
    cls = builtin_class("BSM-essential")
    msgs = generate([Stream(f"v{i}", cls) for i in range(7)], duration_ms=2000, seed=4)
    assert [m.id for m in msgs] == list(range(len(msgs)))
