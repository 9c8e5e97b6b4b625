import numpy as np
import pytest

from cv2xsim.scheduler import (
    ConfigurationError,
    Grant,
    ResourceGrid,
    SchedRequest,
    configured_grant,
    grid_new,
    harq_step,
    schedule,
)

from oracles import priority_fifo_oracle


def test_grid_10mhz_50rb_one_subchannel():
    grid = grid_new(10.0, 50)
    assert grid.n_subchannels == 1


def test_grid_10mhz_10rb_four_subchannels():
    # floor((10 - 1.25) MHz / 0.18 MHz) = 48 RBs; floor(48/10) = 4
    grid = grid_new(10.0, 10)
    assert grid.n_subchannels == 4


def test_grid_zero_bandwidth_rejected():
    with pytest.raises(ConfigurationError):
        grid_new(0.0, 50)


def test_grid_invalid_rbs_rejected():
    with pytest.raises(ConfigurationError):
        grid_new(10.0, 13)


def test_grid_too_narrow_for_subchannel():
    with pytest.raises(ConfigurationError):
        grid_new(10.0, 100)  # 100 RBs never fit a 48-RB budget


def test_priority_order_same_slot():
    grid = grid_new(10.0, 50)
    reqs = [SchedRequest(0, "a", 5, arrival_slot=0),
            SchedRequest(1, "b", 2, arrival_slot=0)]
    grants, unserved = schedule(reqs, grid, current_slot=0)
    assert not unserved
    by_msg = {g.message_id: g.slot for g in grants}
    assert by_msg[1] < by_msg[0]


def test_empty_pending():
    grid = grid_new(10.0, 50)
    grants, unserved = schedule([], grid, current_slot=0)
    assert grants == [] and unserved == []
    assert grid.occupancy_fraction(0, 100) == 0.0


def test_processing_delay_floor():
    grid = grid_new(10.0, 50)
    grants, _ = schedule([SchedRequest(0, "a", 3, arrival_slot=7)], grid, current_slot=7)
    assert grants[0].slot == 10


def test_schedule_against_exhaustive_oracle():
    rng = np.random.default_rng(123)
    n_instances = 1000
    sizes = rng.integers(1, 9, size=n_instances)
    # cap the permutation budget: plenty of size-8 cases, but not 125 of them
    big = np.flatnonzero(sizes >= 8)
    sizes[big[40:]] = rng.integers(1, 8, size=max(0, len(big) - 40))
    for inst, n in enumerate(sizes):
        reqs = []
        for k in range(int(n)):
            reqs.append(SchedRequest(
                message_id=k,
                tx_id=f"s{rng.integers(0, 4)}",
                pppp=int(rng.integers(1, 9)),
                arrival_slot=int(rng.integers(0, 6)),
            ))
        grid = grid_new(10.0, 50)
        grants, unserved = schedule(list(reqs), grid, current_slot=0)
        assert not unserved
        got = {g.message_id: g.slot for g in grants}
        expect = priority_fifo_oracle(
            [(r.message_id, r.tx_id, r.pppp, r.arrival_slot) for r in reqs],
            current_slot=0, proc_delay=3)
        assert got == expect, f"instance {inst}: {reqs}"


def test_priority_pairwise_invariant():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 12))
        reqs = [SchedRequest(k, f"s{rng.integers(0, 3)}", int(rng.integers(1, 9)),
                             int(rng.integers(0, 10))) for k in range(n)]
        grid = grid_new(10.0, 10)
        grants, _ = schedule(list(reqs), grid, current_slot=0)
        slot_of = {g.message_id: g.slot for g in grants}
        for a in reqs:
            for b in reqs:
                if (a.pppp < b.pppp and a.arrival_slot <= b.arrival_slot
                        and a.message_id in slot_of and b.message_id in slot_of):
                    assert slot_of[a.message_id] <= slot_of[b.message_id]


def test_schedule_deterministic():
    reqs = [SchedRequest(k, f"s{k % 3}", (k * 7) % 8 + 1, k % 5) for k in range(20)]
    a, _ = schedule(list(reqs), grid_new(10.0, 10), 0)
    b, _ = schedule(list(reqs), grid_new(10.0, 10), 0)
    assert [(g.message_id, g.slot, g.subchannel) for g in a] == \
           [(g.message_id, g.slot, g.subchannel) for g in b]


def test_work_conservation_no_free_cell_skipped():
    rng = np.random.default_rng(31)
    reqs = [SchedRequest(k, f"s{rng.integers(0, 5)}", int(rng.integers(1, 9)),
                         int(rng.integers(0, 20))) for k in range(40)]
    grid = grid_new(10.0, 50)
    grants, _ = schedule(list(reqs), grid, current_slot=0)
    for g in grants:
        arrival = next(r.arrival_slot for r in reqs if r.message_id == g.message_id)
        for s in range(arrival + 3, g.slot):
            assert grid.cell_owner(s, 0) != -1, "free earlier cell was skipped"


def test_configured_admission_pigeonhole():
    grid = grid_new(10.0, 50)
    admitted = []
    for k in range(101):
        s = configured_grant(f"v{k:03d}", 100, grid)
        if s is not None:
            admitted.append(s)
    assert len(admitted) == 100
    assert configured_grant("late", 100, grid) is None
    # all series slots congruent modulo the period
    for s in admitted:
        train = s.slots_in(0, 1000)
        assert np.all((train - s.phase_slot) % 100 == 0)


def test_configured_utilization_cap():
    grid = grid_new(10.0, 50)
    admitted = sum(configured_grant(f"v{k}", 100, grid, utilization_cap=0.8) is not None
                   for k in range(120))
    assert admitted == 80


def test_configured_never_collides_with_existing():
    grid = grid_new(10.0, 50)
    grants, _ = schedule([SchedRequest(0, "a", 1, arrival_slot=0)], grid, 0)
    taken = grants[0].slot
    for k in range(99):
        assert configured_grant(f"v{k}", 100, grid, start_slot=taken) is not None
    # the phase holding the dynamic grant is unusable; only 99 fit
    assert configured_grant("last", 100, grid, start_slot=taken) is None


def test_harq_broadcast_never_retransmits():
    grid = grid_new(10.0, 50)
    g = Grant(0, 0, "a", slot=5, subchannel=0, kind="dynamic")
    for fb in ("ack", "nack", "none"):
        assert harq_step(g, fb, grid, cast="broadcast") is None


def test_harq_nack_retransmits_until_exhausted():
    grid = grid_new(10.0, 50)
    g1 = Grant(0, 7, "a", slot=5, subchannel=0, kind="dynamic", attempt=1)
    r = harq_step(g1, "nack", grid, cast="unicast", max_retx=2)
    assert r is not None
    assert r.kind == "retransmission"
    assert r.attempt == 2
    assert r.slot >= g1.slot + 2  # feedback one slot after tx, grant after that
    r2 = harq_step(r, "nack", grid, cast="unicast", max_retx=2)
    assert r2 is not None and r2.attempt == 3
    assert harq_step(r2, "nack", grid, cast="unicast", max_retx=2) is None


def test_harq_ack_stops():
    grid = grid_new(10.0, 50)
    g = Grant(0, 7, "a", slot=5, subchannel=0, kind="dynamic", attempt=1)
    assert harq_step(g, "ack", grid, cast="unicast", max_retx=2) is None


def test_cell_exclusivity_enforced():
    grid = grid_new(10.0, 50)
    grid.occupy(4, 0, grid.new_grant_id())
    with pytest.raises(RuntimeError):
        grid.occupy(4, 0, grid.new_grant_id())


def test_capacity_growth_preserves_series():
    grid = ResourceGrid(channel=0, n_subchannels=1, capacity_slots=256)
    s = configured_grant("v0", 100, grid)
    assert s is not None
    grid.ensure_capacity(1000)
    train = s.slots_in(0, 1000)
    for slot in train:
        assert grid.cell_owner(int(slot), s.subchannel) == s.grant_id
