"""Mode 1 grant machinery: per-channel subchannel-by-slot resource grids,
priority-ordered dynamic grants, periodic configured grants, and HARQ
retransmission grants.

Discipline: dynamic requests are served in strict ascending-priority order
(lower PPPP first), FIFO within equal priority, tie-broken by source id then
message id.  Each request takes the earliest free (slot, subchannel) cell at
or after arrival + processing delay; grants are never preempted or released.
The base station never models its own load: the processing delay is a fixed
configurable number of slots.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

SLOT_MS = 1
RB_KHZ = 180.0
VALID_RBS_PER_SUBCHANNEL = (10, 15, 20, 25, 50, 75, 100)
DEFAULT_GUARD_MHZ = 1.25
DEFAULT_PROC_DELAY_SLOTS = 3
DEFAULT_MAX_RETX = 2
# A subchannel may overhang the RB budget by up to 5%: carriers squeeze one
# 50-RB subchannel into a 10-MHz channel whose post-guard budget is 48 RBs.
SUBCHANNEL_FIT_TOLERANCE = 0.95


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class Grant:
    id: int
    message_id: int
    tx_id: str
    slot: int
    subchannel: int
    kind: str  # "dynamic" | "configured-periodic" | "retransmission"
    attempt: int = 1


@dataclass(frozen=True)
class SchedRequest:
    message_id: int
    tx_id: str
    pppp: int
    arrival_slot: int
    horizon_slot: int | None = None  # latest acceptable grant slot (inclusive)

    def __post_init__(self) -> None:
        if not (1 <= self.pppp <= 8):
            raise ValueError("pppp must be in 1..8")


@dataclass
class ConfiguredSeries:
    """A periodic reservation: one cell every ``period_slots`` for one source."""

    grant_id: int
    tx_id: str
    period_slots: int
    phase_slot: int
    subchannel: int

    def slots_in(self, lo: int, hi: int) -> np.ndarray:
        """Reserved slots in [lo, hi)."""
        if hi <= lo:
            return np.zeros(0, dtype=np.int64)
        first = lo + (self.phase_slot - lo) % self.period_slots
        return np.arange(first, hi, self.period_slots, dtype=np.int64)

    def next_slot(self, at_or_after: int) -> int:
        return at_or_after + (self.phase_slot - at_or_after) % self.period_slots


class ResourceGrid:
    """Occupancy of one 10-MHz channel: owner grant id per (slot, subchannel).

    The grid is single-owner mutable state: the engine's slot loop is the only
    writer.  Cells are -1 while free; occupying a taken cell raises, which
    doubles as the runtime exclusivity check.
    """

    def __init__(self, channel: int, n_subchannels: int, capacity_slots: int = 4096):
        if n_subchannels < 1:
            raise ConfigurationError("grid needs at least one subchannel")
        self.channel = channel
        self.n_subchannels = n_subchannels
        self.slot_ms = SLOT_MS
        self._owner = np.full(capacity_slots * n_subchannels, -1, dtype=np.int64)
        self._next_grant_id = 0
        self.configured_series: list[ConfiguredSeries] = []

    @property
    def capacity_slots(self) -> int:
        return len(self._owner) // self.n_subchannels

    def ensure_capacity(self, slots: int) -> None:
        if slots <= self.capacity_slots:
            return
        old_slots = self.capacity_slots
        new_len = max(slots, old_slots * 2) * self.n_subchannels
        grown = np.full(new_len, -1, dtype=np.int64)
        grown[: len(self._owner)] = self._owner
        self._owner = grown
        # extend configured reservations over the new tail
        for s in self.configured_series:
            tail = s.slots_in(old_slots, self.capacity_slots)
            self._owner[tail * self.n_subchannels + s.subchannel] = s.grant_id

    def new_grant_id(self) -> int:
        gid = self._next_grant_id
        self._next_grant_id += 1
        return gid

    def cell_owner(self, slot: int, subchannel: int) -> int:
        return int(self._owner[slot * self.n_subchannels + subchannel])

    def occupy(self, slot: int, subchannel: int, grant_id: int) -> None:
        self.ensure_capacity(slot + 1)
        idx = slot * self.n_subchannels + subchannel
        if self._owner[idx] != -1:
            raise RuntimeError(
                f"cell (slot {slot}, subchannel {subchannel}) already granted to {self._owner[idx]}"
            )
        self._owner[idx] = grant_id

    def first_free(self, lo_slot: int, hi_slot: int) -> tuple[int, int] | None:
        """Earliest free (slot, subchannel) with lo <= slot <= hi, else None."""
        if hi_slot < lo_slot:
            return None
        self.ensure_capacity(hi_slot + 1)
        window = self._owner[lo_slot * self.n_subchannels : (hi_slot + 1) * self.n_subchannels]
        free = np.flatnonzero(window == -1)
        if free.size == 0:
            return None
        flat = int(free[0]) + lo_slot * self.n_subchannels
        return flat // self.n_subchannels, flat % self.n_subchannels

    def occupancy_fraction(self, lo_slot: int, hi_slot: int) -> float:
        """Fraction of cells granted in [lo, hi)."""
        if hi_slot <= lo_slot:
            return 0.0
        self.ensure_capacity(hi_slot)
        window = self._owner[lo_slot * self.n_subchannels : hi_slot * self.n_subchannels]
        return float(np.count_nonzero(window != -1)) / window.size

    def configured_cells_in_period(self, period_slots: int) -> int:
        return sum(1 for s in self.configured_series if s.period_slots == period_slots)


def grid_new(
    bandwidth_mhz: float,
    rbs_per_subchannel: int,
    channel: int = 0,
    guard_mhz: float = DEFAULT_GUARD_MHZ,
    capacity_slots: int = 4096,
) -> ResourceGrid:
    """Build the resource grid for one channel.

    RB budget = floor((bandwidth - guard) / 180 kHz); subchannels per slot =
    floor(budget / RBs-per-subchannel), with a single subchannel admitted when
    the budget covers at least 95% of it (the 50-RB-in-10-MHz case).
    """
    if rbs_per_subchannel not in VALID_RBS_PER_SUBCHANNEL:
        raise ConfigurationError(
            f"RBs per subchannel must be one of {VALID_RBS_PER_SUBCHANNEL}, got {rbs_per_subchannel}"
        )
    if bandwidth_mhz <= guard_mhz:
        raise ConfigurationError(f"channel bandwidth {bandwidth_mhz} MHz leaves no usable spectrum")
    rb_budget = int((bandwidth_mhz - guard_mhz) * 1000.0 / RB_KHZ)
    n_sub = rb_budget // rbs_per_subchannel
    if n_sub == 0 and rb_budget >= rbs_per_subchannel * SUBCHANNEL_FIT_TOLERANCE:
        n_sub = 1
    if n_sub == 0:
        raise ConfigurationError(
            f"RB budget {rb_budget} cannot fit a {rbs_per_subchannel}-RB subchannel"
        )
    return ResourceGrid(channel=channel, n_subchannels=n_sub, capacity_slots=capacity_slots)


def request_sort_key(r: SchedRequest) -> tuple:
    return (r.pppp, r.arrival_slot, r.tx_id, r.message_id)


def schedule(
    pending: Sequence[SchedRequest],
    grid: ResourceGrid,
    current_slot: int,
    proc_delay_slots: int = DEFAULT_PROC_DELAY_SLOTS,
) -> tuple[list[Grant], list[SchedRequest]]:
    """Grant pending requests; returns (grants, still-pending).

    Non-preemptive and work-conserving: each request takes the earliest free
    cell at or after max(current slot, arrival + processing delay).  Requests
    with no free cell inside their horizon stay pending.
    """
    grants: list[Grant] = []
    unserved: list[SchedRequest] = []
    for req in sorted(pending, key=request_sort_key):
        lo = max(current_slot, req.arrival_slot + proc_delay_slots)
        hi = req.horizon_slot if req.horizon_slot is not None else grid.capacity_slots - 1
        cell = grid.first_free(lo, hi)
        if cell is None:
            unserved.append(req)
            continue
        slot, sub = cell
        gid = grid.new_grant_id()
        grid.occupy(slot, sub, gid)
        grants.append(Grant(id=gid, message_id=req.message_id, tx_id=req.tx_id,
                            slot=slot, subchannel=sub, kind="dynamic"))
    return grants, unserved


def configured_grant(
    tx_id: str,
    period_ms: int,
    grid: ResourceGrid,
    start_slot: int = 0,
    utilization_cap: float = 1.0,
) -> ConfiguredSeries | None:
    """Reserve one cell every period for ``tx_id``; None when admission fails.

    The series starts at the first (phase, subchannel) whose whole slot train
    is free over the grid's capacity.  ``utilization_cap`` bounds the fraction
    of cells per period that configured series may hold, leaving headroom for
    dynamic grants (1.0 = pigeonhole limit).
    """
    if period_ms <= 0 or period_ms % SLOT_MS != 0:
        raise ConfigurationError("period must be a positive multiple of the slot duration")
    period = period_ms // SLOT_MS
    cap_cells = int(utilization_cap * period * grid.n_subchannels)
    if grid.configured_cells_in_period(period) + 1 > cap_cells:
        return None
    for j in range(period):
        phase = (start_slot + j) % period
        for sub in range(grid.n_subchannels):
            train = np.arange(phase, grid.capacity_slots, period, dtype=np.int64)
            idx = train * grid.n_subchannels + sub
            if np.all(grid._owner[idx] == -1):
                gid = grid.new_grant_id()
                grid._owner[idx] = gid
                series = ConfiguredSeries(grant_id=gid, tx_id=tx_id, period_slots=period,
                                          phase_slot=phase, subchannel=sub)
                grid.configured_series.append(series)
                return series
    return None


def harq_step(
    grant: Grant,
    feedback: str,
    grid: ResourceGrid,
    cast: str = "unicast",
    max_retx: int = DEFAULT_MAX_RETX,
    horizon_slot: int | None = None,
) -> Grant | None:
    """Issue a retransmission grant after feedback, or None.

    Feedback arrives one slot after the transmission; broadcast carries no
    feedback channel, so it never retransmits.  A nack with attempts left gets
    the earliest free cell after the feedback slot.
    """
    if feedback not in ("ack", "nack", "none"):
        raise ValueError(f"unknown feedback {feedback!r}")
    if cast == "broadcast" or feedback != "nack":
        return None
    if grant.attempt > max_retx:
        return None
    feedback_slot = grant.slot + 1
    hi = horizon_slot if horizon_slot is not None else grid.capacity_slots - 1
    cell = grid.first_free(feedback_slot + 1, hi)
    if cell is None:
        return None
    slot, sub = cell
    gid = grid.new_grant_id()
    grid.occupy(slot, sub, gid)
    return Grant(id=gid, message_id=grant.message_id, tx_id=grant.tx_id,
                 slot=slot, subchannel=sub, kind="retransmission", attempt=grant.attempt + 1)
