"""Slot-level discrete-event engine binding mobility, traffic, scheduling,
and the radio layer.

Time advances in 1-ms slots grouped into mobility ticks (default 100 ms).
At each tick boundary the world moves, vehicles re-associate with their
nearest RSU, and per-link reception sets are rebuilt; within a tick,
positions are frozen (motion per tick is ~1 m, negligible against a 150-m
range) and the engine only visits slots where something happens: a message
arrival, a grantable free cell, a transmission.  That event-driven sweep
plus vectorized link evaluation keeps a 60-s, 120-vehicle run at a few
seconds of wall time.

Dynamic grants are allocated slot by slot: when a slot with a free cell
comes up, the cell goes to the highest-priority pending request that is
already past its processing delay (strict ascending-PPPP, FIFO within equal
priority).  Cells are never reserved ahead for queued traffic, so a
late-arriving critical message still overtakes a backlog of low-priority
ones.

Message life cycle: generated -> (granted -> transmitted -> delivered |
failed) | expired.  A broadcast message is delivered when at least one
receiver decodes it, failed when it had candidate receivers but none
decoded it, and expired when it could not be granted inside its expiry
horizon or was transmitted with no candidate receiver at all ("expired with
no receiver").  Every successful reception yields one latency sample;
reception completes at the end of the transmission slot, so an unloaded
dynamic grant comes out at processing delay + 1 slot.  Unicast adds HARQ:
a failed attempt triggers a retransmission grant one slot after feedback
until attempts run out.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

import numpy as np

from . import mobility as mob
from . import traffic as tr
from .channel import (
    SHADOW_SIGMA_LOS_DB,
    SHADOW_SIGMA_NLOS_DB,
    noise_floor_dbm,
    path_loss_umi_array,
)
from .geometry import Rsu, segments_blocked_mask
from .scheduler import (
    ConfiguredSeries,
    Grant,
    ResourceGrid,
    configured_grant,
    grid_new,
    harq_step,
)

log = logging.getLogger(__name__)

# message states
_NEW, _GRANTED, _DELIVERED, _FAILED, _EXPIRED = range(5)

# within-slot event ordering
_EV_ARRIVAL = 0
_EV_SCHED = 1
_EV_TX = 2


@dataclass(frozen=True)
class LatencySample:
    message_id: int
    class_name: str
    source_id: str
    source_kind: str  # "rsu" | "vehicle"
    receiver_id: str
    gen_ms: int
    latency_ms: float


class SampleTable:
    """Columnar store of latency samples (one row per successful reception)."""

    def __init__(self, class_names: list[str], source_ids: list[str],
                 source_is_rsu: np.ndarray, receiver_ids: list[str]):
        self.class_names = class_names
        self.source_ids = source_ids
        self.source_is_rsu = source_is_rsu
        self.receiver_ids = receiver_ids
        self._chunks: list[tuple[int, int, int, int, int, np.ndarray]] = []
        self._final: tuple[np.ndarray, ...] | None = None

    def append(self, msg_id: int, cls_idx: int, src_idx: int, gen_ms: int,
               latency_ms: int, rx_idx: np.ndarray) -> None:
        self._final = None
        self._chunks.append((msg_id, cls_idx, src_idx, gen_ms, latency_ms, rx_idx))

    def _arrays(self) -> tuple[np.ndarray, ...]:
        if self._final is None:
            n = sum(len(c[5]) for c in self._chunks)
            msg = np.empty(n, dtype=np.int64)
            cls = np.empty(n, dtype=np.int32)
            src = np.empty(n, dtype=np.int32)
            gen = np.empty(n, dtype=np.int64)
            lat = np.empty(n, dtype=np.int64)
            rx = np.empty(n, dtype=np.int32)
            at = 0
            for m, c, s, g, l, r in self._chunks:
                k = len(r)
                msg[at:at + k] = m
                cls[at:at + k] = c
                src[at:at + k] = s
                gen[at:at + k] = g
                lat[at:at + k] = l
                rx[at:at + k] = r
                at += k
            self._final = (msg, cls, src, gen, lat, rx)
        return self._final

    def __len__(self) -> int:
        return len(self._arrays()[0])

    @property
    def latencies_ms(self) -> np.ndarray:
        return self._arrays()[4].astype(float)

    @property
    def gen_ms(self) -> np.ndarray:
        return self._arrays()[3]

    @property
    def from_rsu(self) -> np.ndarray:
        return self.source_is_rsu[self._arrays()[2]]

    def __iter__(self) -> Iterator[LatencySample]:
        msg, cls, src, gen, lat, rx = self._arrays()
        for i in range(len(msg)):
            yield LatencySample(
                message_id=int(msg[i]),
                class_name=self.class_names[cls[i]],
                source_id=self.source_ids[src[i]],
                source_kind="rsu" if self.source_is_rsu[src[i]] else "vehicle",
                receiver_id=self.receiver_ids[rx[i]],
                gen_ms=int(gen[i]),
                latency_ms=float(lat[i]),
            )

    def rows(self) -> tuple[np.ndarray, ...]:
        """(message_id, class_idx, source_idx, gen_ms, latency_ms, receiver_idx)."""
        return self._arrays()


@dataclass
class RunSummary:
    seed: int
    duration_ms: int
    generated: int = 0
    delivered: int = 0
    failed: int = 0
    expired: int = 0
    expired_no_receiver: int = 0
    n_samples: int = 0
    pending_end: int = 0
    configured_admitted: int = 0
    configured_fallback: int = 0
    cbr_per_channel: tuple[float, ...] = ()
    by_class: dict[str, dict[str, int]] = field(default_factory=dict)

    def conserved(self) -> bool:
        return self.generated == self.delivered + self.failed + self.expired


def cbr(grid: ResourceGrid, window_slots: int, at_slot: int) -> float:
    """Channel busy ratio: occupied fraction of the trailing window."""
    if window_slots < 1:
        raise ValueError("window must be at least one slot")
    lo = max(0, at_slot - window_slots)
    return grid.occupancy_fraction(lo, at_slot) if at_slot > lo else 0.0


@dataclass
class _SeriesRec:
    series: ConfiguredSeries
    veh_idx: int
    cls_idx: int
    channel: int
    id_base: int
    n_occ: int


@dataclass
class _TickCache:
    positions: np.ndarray
    assoc_channel: np.ndarray
    rects: np.ndarray
    rect_owner: np.ndarray  # vehicle index owning each rect, -1 for buildings
    rsu_candidates: list[np.ndarray]
    rsu_receivers: list[np.ndarray]
    adjacency: np.ndarray | None  # (n_veh, n_veh) receivable, same-channel only
    v2v_candidates: np.ndarray | None  # candidate receiver count per vehicle


# position_provider(clock_ms) -> (positions (n,2), truck_rects (m,4), rect owner idx (m,))
PositionProvider = Callable[[int], tuple[np.ndarray, np.ndarray, np.ndarray]]
# reception_hook(msg_id, class_name, source_id, gen_ms, reception_ms, receiver_ids)
ReceptionHook = Callable[[int, str, str, int, int, list[str]], None]


class Engine:
    """One engine instance owns one world and advances it sequentially."""

    def __init__(
        self,
        scenario,
        seed: int,
        duration_ms: int | None = None,
        position_provider: PositionProvider | None = None,
        reception_hook: ReceptionHook | None = None,
    ):
        self.sc = scenario
        self.seed = seed
        self.duration_ms = int(duration_ms if duration_ms is not None
                               else scenario.engine.default_duration_ms)
        self.position_provider = position_provider
        self.reception_hook = reception_hook
        self.clock_ms = 0
        self._last_step_ms = 0
        self._seq = 0
        self._sample_count = 0
        self._no_rx_expired = 0

        self.rsus: list[Rsu] = list(scenario.rsus)
        rng_place = np.random.default_rng([seed, 1])
        self.vehicles = mob.place_vehicles(
            scenario.roads, scenario.space, scenario.density, scenario.mobility, rng_place)
        self.roads_by_id = {r.id: r for r in scenario.roads}
        self._rng_shadow = np.random.default_rng([seed, 2])

        self.n_channels = max((r.channel for r in self.rsus), default=0) + 1
        expiry = scenario.sched.expiry_ms
        capacity = self.duration_ms + (expiry if expiry is not None else self.duration_ms) + 256
        self.grids = [
            grid_new(scenario.sched.channel_bandwidth_mhz, scenario.sched.rbs_per_subchannel,
                     channel=c, guard_mhz=scenario.sched.guard_mhz, capacity_slots=capacity)
            for c in range(self.n_channels)
        ]

        self._static_rects = np.array(
            [o.rect.as_array() for o in scenario.obstacles], dtype=float
        ).reshape(-1, 4)
        self._budget_dbm = scenario.radio.tx_power_dbm - noise_floor_dbm(scenario.radio)

        self._build_traffic()
        self._cache: _TickCache | None = None
        self._events: list[tuple] = []  # (slot, order, seq, payload)
        self._arrival_ptr = 0
        # per-channel priority queues of (pppp, arrival, tx_id, msg_idx)
        self._pending: list[list[tuple]] = [[] for _ in range(self.n_channels)]
        # earliest outstanding sched event per channel; stale duplicates are
        # skipped at pop time so each channel carries exactly one live chain
        self._next_sched: list[int | None] = [None] * self.n_channels
        self._max_horizon: list[int] = [0] * self.n_channels
        self._unicast_target: dict[int, int] = {}
        self._finalized: RunSummary | None = None

        src_is_rsu = np.zeros(len(self.source_ids), dtype=bool)
        src_is_rsu[: len(self.rsus)] = True
        self.samples = SampleTable(self.class_list_names, self.source_ids, src_is_rsu,
                                   [v.id for v in self.vehicles])
        self._counts = {name: {"generated": 0, "delivered": 0, "failed": 0, "expired": 0}
                        for name in self.class_list_names}
        for rec in self._series:
            self._counts[self.class_list_names[rec.cls_idx]]["generated"] += rec.n_occ
        for i in range(len(self.dm_gen)):
            self._counts[self.class_list_names[self.dm_cls[i]]]["generated"] += 1

    # ------------------------------------------------------------------
    # construction

    def _resolved_classes(self) -> dict[str, tr.MessageClass]:
        """Built-in classes with the scenario's payload/cast/period applied,
        shadowed by any custom class definitions."""
        cfg = self.sc.traffic
        table: dict[str, tr.MessageClass] = {}
        for cls in tr.builtin_classes():
            table[cls.name] = replace(
                cls,
                payload_bytes=cfg.payload_bytes,
                cast=cfg.cast,
                arrival=tr.Arrival("periodic", cfg.period_ms),
            )
        for cls in cfg.classes:
            table[cls.name] = cls
        return table

    def _build_traffic(self) -> None:
        cfg = self.sc.traffic
        classes = self._resolved_classes()
        self.source_ids = [r.id for r in self.rsus] + [v.id for v in self.vehicles]

        class_names: list[str] = []

        def cls_index(c: tr.MessageClass) -> int:
            if c.name not in class_names:
                class_names.append(c.name)
            return class_names.index(c.name)

        builtin_names = {c.name for c in tr.builtin_classes()}
        streams: list[tr.Stream] = []
        for r in self.rsus:
            for name in cfg.rsu_classes:
                cls = classes[name]
                if cfg.rsu_poisson and name in builtin_names:
                    cls = replace(cls, arrival=tr.Arrival("event",
                                                          rate_hz=1000.0 / cfg.period_ms))
                streams.append(tr.Stream(r.id, cls))

        # Periodic vehicle BSMs ride configured grants, admitted in vehicle-id
        # order on the channel of the t=0 association; sources the utilization
        # cap rejects fall back to dynamic grants.
        self._series: list[_SeriesRec] = []
        fallback = 0
        if cfg.vehicle_class is not None and self.vehicles:
            vcls = classes[cfg.vehicle_class]
            if vcls.arrival.kind != "periodic":
                raise ValueError("the vehicle BSM stream must be periodic")
            pos0 = self._positions_now()
            assoc0 = mob.associate_nearest_rsu(pos0, self.rsus)
            admitted_on = [0] * self.n_channels
            for i, v in enumerate(self.vehicles):
                ch = self.rsus[assoc0[i]].channel if self.rsus else 0
                # low-discrepancy phase offsets spread the reservations over
                # the period so free cells stay interleaved for dynamic grants
                offset = (admitted_on[ch] * 61) % (vcls.arrival.period_ms or 100)
                series = configured_grant(v.id, vcls.arrival.period_ms, self.grids[ch],
                                          start_slot=offset,
                                          utilization_cap=self.sc.sched.configured_cap)
                if series is not None:
                    admitted_on[ch] += 1
                    n_occ = len(range(series.phase_slot, self.duration_ms, series.period_slots))
                    self._series.append(
                        _SeriesRec(series, i, cls_index(vcls), ch, id_base=0, n_occ=n_occ))
                else:
                    fallback += 1
                    streams.append(tr.Stream(v.id, vcls))

        msgs = tr.generate(streams, self.duration_ms, self.seed)
        n_dyn = len(msgs)
        src_index = {s: i for i, s in enumerate(self.source_ids)}
        self.dm_gen = np.fromiter((m.gen_ms for m in msgs), dtype=np.int64, count=n_dyn)
        self.dm_src = np.fromiter((src_index[m.source_id] for m in msgs), dtype=np.int32,
                                  count=n_dyn)
        self.dm_cls = np.fromiter((cls_index(m.cls) for m in msgs), dtype=np.int32,
                                  count=n_dyn)
        self.dm_pppp = np.fromiter((m.cls.pppp for m in msgs), dtype=np.int8, count=n_dyn)
        self.dm_status = np.full(n_dyn, _NEW, dtype=np.int8)

        self.class_list_names = class_names
        self.class_list: list[tr.MessageClass | None] = [None] * len(class_names)
        for c in classes.values():
            if c.name in class_names:
                self.class_list[class_names.index(c.name)] = c

        base = n_dyn
        for rec in self._series:
            rec.id_base = base
            base += rec.n_occ
        self.generated_total = base
        self.configured_admitted = len(self._series)
        self.configured_fallback = fallback
        self._needs_adj = cfg.vehicle_class is not None and len(self.vehicles) > 1

    # ------------------------------------------------------------------
    # world / link caches

    def _positions_now(self) -> np.ndarray:
        if self.position_provider is not None:
            return self.position_provider(self.clock_ms)[0]
        return mob.world_positions(self.vehicles, self.roads_by_id, self.sc.space)

    def _rebuild_tick_caches(self) -> None:
        if self.position_provider is not None:
            pos, truck_rects, truck_owner = self.position_provider(self.clock_ms)
        else:
            if self.clock_ms > self._last_step_ms:
                dt = (self.clock_ms - self._last_step_ms) / 1000.0
                self.vehicles = mob.step(self.vehicles, self.roads_by_id, self.sc.space, dt)
                self._last_step_ms = self.clock_ms
            pos = mob.world_positions(self.vehicles, self.roads_by_id, self.sc.space)
            bodies = [mob.truck_body(v, self.roads_by_id, self.sc.space)
                      for v in self.vehicles if v.kind == "truck"]
            owners = [i for i, v in enumerate(self.vehicles) if v.kind == "truck"]
            truck_rects = np.array([b.rect.as_array() for b in bodies]).reshape(-1, 4)
            truck_owner = np.array(owners, dtype=np.int64)

        if truck_rects.size:
            rects = np.vstack([self._static_rects, truck_rects])
            rect_owner = np.concatenate([
                np.full(len(self._static_rects), -1, dtype=np.int64), truck_owner])
        else:
            rects = self._static_rects
            rect_owner = np.full(len(self._static_rects), -1, dtype=np.int64)

        assoc = mob.associate_nearest_rsu(pos, self.rsus)
        if self.rsus:
            channel_of = np.array([r.channel for r in self.rsus], dtype=np.int64)
            assoc_channel = channel_of[assoc]
        else:
            assoc_channel = np.zeros(len(pos), dtype=np.int64)

        radio = self.sc.radio
        rsu_cand: list[np.ndarray] = []
        rsu_rx: list[np.ndarray] = []
        for r in self.rsus:
            cand_mask, rx_mask = self._receivable_from(
                np.array(r.position), pos, radio.rsu_height_m, radio.vehicle_height_m,
                r.range_m, rects, rect_owner, tx_owner=-1)
            on_channel = assoc_channel == r.channel
            rsu_cand.append(np.flatnonzero(cand_mask & on_channel))
            rsu_rx.append(np.flatnonzero(rx_mask & on_channel))

        adjacency = None
        v2v_cand = None
        if self._needs_adj:
            adjacency, v2v_cand = self._v2v_adjacency(pos, assoc_channel, rects, rect_owner)

        self._cache = _TickCache(pos, assoc_channel, rects, rect_owner,
                                 rsu_cand, rsu_rx, adjacency, v2v_cand)

    def _link_budget_ok(self, d2d: np.ndarray, los: bool, h_bs: float, h_ut: float,
                        shadow: np.ndarray | None) -> np.ndarray:
        pl = path_loss_umi_array(d2d, self.sc.radio, los, h_bs, h_ut)
        if shadow is not None:
            pl = pl + shadow
        return self._budget_dbm - pl >= self.sc.radio.snr_threshold_db

    def _receivable_from(
        self,
        tx_pos: np.ndarray,
        rx_pos: np.ndarray,
        h_tx: float,
        h_rx: float,
        reach_m: float,
        rects: np.ndarray,
        rect_owner: np.ndarray,
        tx_owner: int,
    ) -> tuple[np.ndarray, np.ndarray]:
        """(candidate mask, receivable mask) for one transmitter vs all vehicles.

        Blockage geometry is only tested where the LOS and NLOS budgets
        disagree; everywhere else the LOS outcome cannot change receivability.
        """
        d = np.hypot(rx_pos[:, 0] - tx_pos[0], rx_pos[:, 1] - tx_pos[1])
        cand = d <= reach_m
        n = len(rx_pos)
        recv = np.zeros(n, dtype=bool)
        idx = np.flatnonzero(cand)
        if idx.size == 0:
            return cand, recv
        dd = d[idx]
        shadow_los = shadow_nlos = None
        if self.sc.radio.shadowing:
            shadow_los = self._rng_shadow.normal(0.0, SHADOW_SIGMA_LOS_DB, size=idx.size)
            shadow_nlos = self._rng_shadow.normal(0.0, SHADOW_SIGMA_NLOS_DB, size=idx.size)
        ok_los = self._link_budget_ok(dd, True, h_tx, h_rx, shadow_los)
        ok_nlos = self._link_budget_ok(dd, False, h_tx, h_rx, shadow_nlos)
        need = ok_los != ok_nlos
        result = ok_nlos.copy()
        if np.any(need):
            sel = idx[need]
            p1 = np.broadcast_to(tx_pos, (sel.size, 2))
            p2 = rx_pos[sel]
            owner_ok = rect_owner[None, :] != sel[:, None]
            if tx_owner >= 0:
                owner_ok = owner_ok & (rect_owner[None, :] != tx_owner)
            blocked = segments_blocked_mask(p1, p2, rects, owner_ok)
            result[need] = np.where(blocked, ok_nlos[need], ok_los[need])
        recv[idx] = result
        return cand, recv

    def _v2v_adjacency(self, pos: np.ndarray, assoc_channel: np.ndarray,
                       rects: np.ndarray, rect_owner: np.ndarray):
        n = len(pos)
        radio = self.sc.radio
        d = np.hypot(pos[:, None, 0] - pos[None, :, 0], pos[:, None, 1] - pos[None, :, 1])
        same_ch = assoc_channel[:, None] == assoc_channel[None, :]
        cand = (d <= radio.sensing_range_m) & same_ch
        np.fill_diagonal(cand, False)
        ii, jj = np.nonzero(np.triu(cand, 1))
        recv = np.zeros((n, n), dtype=bool)
        if ii.size:
            dd = d[ii, jj]
            h = radio.vehicle_height_m
            shadow_los = shadow_nlos = None
            if radio.shadowing:
                shadow_los = self._rng_shadow.normal(0.0, SHADOW_SIGMA_LOS_DB, size=ii.size)
                shadow_nlos = self._rng_shadow.normal(0.0, SHADOW_SIGMA_NLOS_DB, size=ii.size)
            ok_los = self._link_budget_ok(dd, True, h, h, shadow_los)
            ok_nlos = self._link_budget_ok(dd, False, h, h, shadow_nlos)
            need = ok_los != ok_nlos
            res = ok_nlos.copy()
            if np.any(need):
                si, sj = ii[need], jj[need]
                owner_ok = (rect_owner[None, :] != si[:, None]) & (rect_owner[None, :] != sj[:, None])
                blocked = segments_blocked_mask(pos[si], pos[sj], rects, owner_ok)
                res[need] = np.where(blocked, ok_nlos[need], ok_los[need])
            recv[ii, jj] = res
            recv[jj, ii] = res
        return recv, cand.sum(axis=1)

    # ------------------------------------------------------------------
    # event sweep

    def _push(self, slot: int, order: int, payload: tuple) -> None:
        heapq.heappush(self._events, (slot, order, self._seq, payload))
        self._seq += 1

    def advance(self, until_ms: int) -> None:
        """Process everything strictly before ``until_ms`` (capped at run end)."""
        until_ms = min(until_ms, self.duration_ms)
        tick = self.sc.mobility.tick_ms
        while self.clock_ms < until_ms:
            if self._cache is None or self.clock_ms % tick == 0:
                self._rebuild_tick_caches()
            window_end = min(until_ms, (self.clock_ms // tick + 1) * tick)
            self._enqueue_window(self.clock_ms, window_end)
            self._drain_until(window_end)
            self.clock_ms = window_end

    def _enqueue_window(self, lo: int, hi: int) -> None:
        while self._arrival_ptr < len(self.dm_gen) and self.dm_gen[self._arrival_ptr] < hi:
            i = self._arrival_ptr
            self._push(int(self.dm_gen[i]), _EV_ARRIVAL, ("arr", i))
            self._arrival_ptr += 1
        for rec in self._series:
            for slot in rec.series.slots_in(lo, min(hi, self.duration_ms)):
                k = (int(slot) - rec.series.phase_slot) // rec.series.period_slots
                self._push(int(slot), _EV_TX, ("ctx", rec, k))

    def _drain_until(self, hi: int) -> None:
        while self._events and self._events[0][0] < hi:
            slot, order, _, payload = heapq.heappop(self._events)
            if order == _EV_ARRIVAL:
                batch = [payload[1]]
                while (self._events and self._events[0][0] == slot
                       and self._events[0][1] == _EV_ARRIVAL):
                    batch.append(heapq.heappop(self._events)[3][1])
                self._handle_arrivals(batch, slot)
            elif order == _EV_SCHED:
                ch = payload[1]
                if self._next_sched[ch] != slot:
                    continue  # superseded by an earlier request
                self._next_sched[ch] = None
                self._sched_event(ch, slot)
            elif payload[0] == "ctx":
                self._transmit_configured(payload[1], payload[2], slot)
            else:
                self._transmit_dynamic(payload[1], slot)

    def _horizon(self, i: int) -> int | None:
        expiry = self.sc.sched.expiry_ms
        return int(self.dm_gen[i]) + expiry - 1 if expiry is not None else None

    def _channel_of_source(self, src_idx: int) -> int:
        if src_idx < len(self.rsus):
            return self.rsus[src_idx].channel
        if not self.rsus:
            return 0
        cache = self._cache
        assert cache is not None
        return int(cache.assoc_channel[src_idx - len(self.rsus)])

    def _handle_arrivals(self, batch: list[int], slot: int) -> None:
        proc = self.sc.sched.proc_delay_slots
        for i in batch:
            ch = self._channel_of_source(int(self.dm_src[i]))
            horizon = self._horizon(i)
            hi = horizon if horizon is not None else self.grids[ch].capacity_slots - 1
            cell = self.grids[ch].first_free(slot + proc, hi)
            if cell is None:
                # occupancy only ever grows, so an already-full horizon is final
                self._expire(i)
                continue
            heapq.heappush(self._pending[ch],
                           (int(self.dm_pppp[i]), slot, self.source_ids[self.dm_src[i]], i))
            self._max_horizon[ch] = max(self._max_horizon[ch], hi)
            self._request_sched(ch, cell[0])

    def _sched_event(self, ch: int, slot: int) -> None:
        """Hand this slot's free cells to the best eligible pending requests."""
        pending = self._pending[ch]
        if not pending:
            return
        grid = self.grids[ch]
        proc = self.sc.sched.proc_delay_slots
        free_subs = [s for s in range(grid.n_subchannels)
                     if grid.cell_owner(slot, s) == -1]
        stash: list[tuple] = []
        for sub in free_subs:
            granted = False
            while pending and not granted:
                pppp, arrival, tx_id, i = heapq.heappop(pending)
                if self.dm_status[i] != _NEW:
                    continue
                horizon = self._horizon(i)
                if horizon is not None and slot > horizon:
                    self._expire(i)
                    continue
                if slot < arrival + proc:
                    stash.append((pppp, arrival, tx_id, i))
                    continue
                gid = grid.new_grant_id()
                grid.occupy(slot, sub, gid)
                grant = Grant(id=gid, message_id=i, tx_id=tx_id, slot=slot,
                              subchannel=sub, kind="dynamic")
                self.dm_status[i] = _GRANTED
                self._push(slot, _EV_TX, ("dtx", (grant, ch)))
                granted = True
            if not pending and not granted:
                break
        for item in stash:
            heapq.heappush(pending, item)
        self._ensure_next_sched(ch, slot)

    def _request_sched(self, ch: int, slot: int) -> None:
        if self._next_sched[ch] is None or slot < self._next_sched[ch]:
            self._next_sched[ch] = slot
            self._push(slot, _EV_SCHED, ("sched", ch))

    def _ensure_next_sched(self, ch: int, after_slot: int) -> None:
        """Keep the event chain alive while requests are pending.

        The next event sits at the earliest free cell after ``after_slot``;
        requests still inside their processing delay simply pass on that
        event and catch a later one, so no free cell an eligible request
        could use is ever skipped.
        """
        pending = self._pending[ch]
        grid = self.grids[ch]
        while pending and self.dm_status[pending[0][3]] != _NEW:
            heapq.heappop(pending)
        if not pending:
            return
        cell = grid.first_free(after_slot + 1, self._max_horizon[ch])
        if cell is None:
            # no free cell inside any pending request's horizon, ever
            while pending:
                _, _, _, i = heapq.heappop(pending)
                if self.dm_status[i] == _NEW:
                    self._expire(i)
            return
        self._request_sched(ch, cell[0])

    def _expire(self, i: int, no_receiver: bool = False) -> None:
        self.dm_status[i] = _EXPIRED
        self._counts[self.class_list_names[self.dm_cls[i]]]["expired"] += 1
        if no_receiver:
            self._no_rx_expired += 1

    def _candidate_count(self, src_idx: int) -> int:
        cache = self._cache
        assert cache is not None
        if src_idx < len(self.rsus):
            return int(len(cache.rsu_candidates[src_idx]))
        v = src_idx - len(self.rsus)
        if cache.v2v_candidates is None:
            return 0
        return int(cache.v2v_candidates[v])

    # ------------------------------------------------------------------
    # transmissions

    def _receivers_of(self, src_idx: int) -> np.ndarray:
        cache = self._cache
        assert cache is not None
        if src_idx < len(self.rsus):
            return cache.rsu_receivers[src_idx]
        v = src_idx - len(self.rsus)
        if cache.adjacency is None:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(cache.adjacency[v])

    def _record_reception(self, msg_id: int, cls_idx: int, src_idx: int, gen: int,
                          slot: int, rx: np.ndarray) -> None:
        latency = slot + 1 - gen
        if self.source_is_rsu_idx(src_idx) or self.sc.traffic.record_vehicle_samples:
            self.samples.append(msg_id, cls_idx, src_idx, gen, latency, rx.astype(np.int32))
        self._sample_count += len(rx)
        if self.reception_hook is not None:
            self.reception_hook(msg_id, self.class_list_names[cls_idx],
                                self.source_ids[src_idx], gen, slot + 1,
                                [self.vehicles[j].id for j in rx])

    def source_is_rsu_idx(self, src_idx: int) -> bool:
        return src_idx < len(self.rsus)

    def _transmit_configured(self, rec: _SeriesRec, k: int, slot: int) -> None:
        src_idx = len(self.rsus) + rec.veh_idx
        rx = self._receivers_of(src_idx)
        name = self.class_list_names[rec.cls_idx]
        if len(rx) > 0:
            self._counts[name]["delivered"] += 1
            self._record_reception(rec.id_base + k, rec.cls_idx, src_idx, slot, slot, rx)
        elif self._candidate_count(src_idx) > 0:
            self._counts[name]["failed"] += 1
        else:
            self._counts[name]["expired"] += 1
            self._no_rx_expired += 1

    def _transmit_dynamic(self, payload: tuple, slot: int) -> None:
        grant, ch = payload
        i = grant.message_id
        cls = self.class_list[self.dm_cls[i]]
        assert cls is not None
        if cls.cast in ("unicast", "groupcast"):
            self._transmit_with_feedback(i, grant, ch, slot, cls.cast)
            return
        src_idx = int(self.dm_src[i])
        rx = self._receivers_of(src_idx)
        if len(rx) > 0:
            self.dm_status[i] = _DELIVERED
            self._counts[cls.name]["delivered"] += 1
            self._record_reception(i, int(self.dm_cls[i]), src_idx, int(self.dm_gen[i]),
                                   slot, rx)
        elif self._candidate_count(src_idx) > 0:
            self.dm_status[i] = _FAILED
            self._counts[cls.name]["failed"] += 1
        else:
            self._expire(i, no_receiver=True)

    def _transmit_with_feedback(self, i: int, grant: Grant, ch: int, slot: int,
                                cast: str) -> None:
        """Unicast/groupcast attempt: deliver or retransmit on (implicit) nack."""
        cache = self._cache
        assert cache is not None
        src_idx = int(self.dm_src[i])
        name = self.class_list_names[self.dm_cls[i]]
        if self._candidate_count(src_idx) == 0 and self._unicast_target.get(i) is None:
            self._expire(i, no_receiver=True)
            return
        if cast == "unicast":
            target = self._unicast_target.get(i)
            if target is None:
                cand = (cache.rsu_candidates[src_idx] if src_idx < len(self.rsus)
                        else np.flatnonzero(cache.adjacency[src_idx - len(self.rsus)])
                        if cache.adjacency is not None else np.zeros(0, dtype=np.int64))
                if len(cand) == 0:
                    self._expire(i, no_receiver=True)
                    return
                tx_pos = (np.array(self.rsus[src_idx].position) if src_idx < len(self.rsus)
                          else cache.positions[src_idx - len(self.rsus)])
                d = np.hypot(cache.positions[cand, 0] - tx_pos[0],
                             cache.positions[cand, 1] - tx_pos[1])
                target = int(cand[int(np.argmin(d))])
                self._unicast_target[i] = target
            got = np.array([target]) if target in self._receivers_of(src_idx) \
                else np.zeros(0, dtype=np.int64)
        else:
            got = self._receivers_of(src_idx)
        if len(got) > 0:
            self.dm_status[i] = _DELIVERED
            self._counts[name]["delivered"] += 1
            self._record_reception(i, int(self.dm_cls[i]), src_idx, int(self.dm_gen[i]),
                                   slot, got)
            return
        horizon = self._horizon(i)
        retx = harq_step(grant, "nack", self.grids[ch], cast=cast,
                         max_retx=self.sc.sched.max_retx, horizon_slot=horizon)
        if retx is None:
            self.dm_status[i] = _FAILED
            self._counts[name]["failed"] += 1
        else:
            self._push(retx.slot, _EV_TX, ("dtx", (retx, ch)))

    # ------------------------------------------------------------------

    def run(self) -> tuple[SampleTable, RunSummary]:
        self.advance(self.duration_ms)
        return self.samples, self.finalize()

    def finalize(self) -> RunSummary:
        if self._finalized is not None:
            return self._finalized
        pending = 0
        for i in range(len(self.dm_status)):
            if self.dm_status[i] in (_NEW, _GRANTED):
                pending += 1
                self._expire(i)
        delivered = sum(c["delivered"] for c in self._counts.values())
        failed = sum(c["failed"] for c in self._counts.values())
        expired = sum(c["expired"] for c in self._counts.values())
        cbrs = tuple(g.occupancy_fraction(0, self.duration_ms) for g in self.grids)
        summary = RunSummary(
            seed=self.seed,
            duration_ms=self.duration_ms,
            generated=self.generated_total,
            delivered=delivered,
            failed=failed,
            expired=expired,
            expired_no_receiver=self._no_rx_expired,
            n_samples=self._sample_count,
            pending_end=pending,
            configured_admitted=self.configured_admitted,
            configured_fallback=self.configured_fallback,
            cbr_per_channel=cbrs,
            by_class=self._counts,
        )
        self._finalized = summary
        return summary

    def current_cbr(self, window_slots: int = 100) -> list[float]:
        return [cbr(g, window_slots, self.clock_ms) for g in self.grids]


def run(scenario, duration_ms: int | None = None, seed: int = 0) -> tuple[SampleTable, RunSummary]:
    """Build and run one engine; returns (samples, summary)."""
    return Engine(scenario, seed, duration_ms).run()
