"""Scenario files: a single JSON document describing the world, radio,
traffic, and scheduler configuration.

Every section is optional — an empty document yields the default scenario
(the two-junction urban layout with a third mid-block RSU site, 40-byte
payloads, 100-ms inter-broadcast interval, 10-MHz channels with 50-RB
subchannels).  Unknown keys are rejected, every numeric field is
range-checked, and validation reports all violations at once rather than
stopping at the first.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

from .channel import RadioConfig
from .geometry import Lane, Obstacle, Point, Rect, Road, Rsu, SpaceSpec
from .mobility import DensityConfig, MobilityConfig
from .scheduler import VALID_RBS_PER_SUBCHANNEL
from .traffic import Arrival, MessageClass, builtin_classes


class ScenarioError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


@dataclass(frozen=True)
class TrafficConfig:
    payload_bytes: int = 40
    period_ms: int = 100
    cast: str = "broadcast"
    rsu_classes: tuple[str, ...] = ("RSM", "MAP", "SPaT", "RTCM", "SSM", "SRM",
                                    "TIM", "RWM", "background")
    # RSU application messages arrive as Poisson streams at the mean rate of
    # one per period (signal requests, map pushes etc. are event-driven);
    # vehicle BSMs stay strictly periodic.
    rsu_poisson: bool = True
    vehicle_class: str | None = "BSM-essential"
    record_vehicle_samples: bool = False
    classes: tuple[MessageClass, ...] = ()


@dataclass(frozen=True)
class SchedConfig:
    channel_bandwidth_mhz: float = 10.0
    rbs_per_subchannel: int = 50
    guard_mhz: float = 1.25
    proc_delay_slots: int = 3
    max_retx: int = 2
    expiry_ms: int | None = 1000
    configured_cap: float = 0.8


@dataclass(frozen=True)
class EngineConfig:
    warmup_ms: int = 1000
    default_duration_ms: int = 60000


@dataclass(frozen=True)
class Scenario:
    space: SpaceSpec
    roads: tuple[Road, ...]
    rsus: tuple[Rsu, ...]
    obstacles: tuple[Obstacle, ...]
    density: DensityConfig
    mobility: MobilityConfig
    radio: RadioConfig
    traffic: TrafficConfig
    sched: SchedConfig
    engine: EngineConfig
    seed: int = 0


def default_scenario() -> Scenario:
    """Two junctions on a 520 x 240 m space, one RSU each plus a mid-block
    third site, four 60 x 60 m corner buildings, six lanes total."""
    space = SpaceSpec(520.0, 240.0)
    roads = (
        Road("main", "horizontal", 120.0, (
            Lane("main-east", -2.0, 1),
            Lane("main-west", 2.0, -1),
        )),
        Road("cross-west", "vertical", 170.0, (
            Lane("cross-west-north", 2.0, 1),
            Lane("cross-west-south", -2.0, -1),
        )),
        Road("cross-east", "vertical", 350.0, (
            Lane("cross-east-north", 2.0, 1),
            Lane("cross-east-south", -2.0, -1),
        )),
    )
    rsus = (
        Rsu("rsu-west", (170.0, 120.0), 150.0, channel=0),
        Rsu("rsu-east", (350.0, 120.0), 150.0, channel=1),
        Rsu("rsu-mid", (260.0, 120.0), 150.0, channel=2),
    )
    obstacles = (
        Obstacle("bldg-nw", "building", Rect(100.0, 130.0, 160.0, 190.0)),
        Obstacle("bldg-se", "building", Rect(180.0, 50.0, 240.0, 110.0)),
        Obstacle("bldg-ne", "building", Rect(360.0, 130.0, 420.0, 190.0)),
        Obstacle("bldg-sw", "building", Rect(280.0, 50.0, 340.0, 110.0)),
    )
    return Scenario(
        space=space, roads=roads, rsus=rsus, obstacles=obstacles,
        density=DensityConfig(), mobility=MobilityConfig(), radio=RadioConfig(),
        traffic=TrafficConfig(), sched=SchedConfig(), engine=EngineConfig(),
    )


def with_matrix_cell(sc: Scenario, rsu_count: int, lam: int) -> Scenario:
    """Specialize a base scenario to one experiment cell."""
    if rsu_count > len(sc.rsus):
        raise ScenarioError([f"scenario defines {len(sc.rsus)} RSU sites, cannot run {rsu_count}"])
    return replace(sc, rsus=sc.rsus[:rsu_count],
                   density=replace(sc.density, lambda_per_lane=lam))


# ---------------------------------------------------------------------------
# parsing


def _check_keys(d: dict, allowed: set[str], path: str, errors: list[str]) -> None:
    for k in d:
        if k not in allowed:
            errors.append(f"{path}: unknown key {k!r}")


def _num(d: dict, key: str, default, errors: list[str], path: str,
         lo=None, hi=None, integer=False):
    v = d.get(key, default)
    if v is None:
        return v
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errors.append(f"{path}.{key}: expected a number, got {v!r}")
        return default
    if integer and int(v) != v:
        errors.append(f"{path}.{key}: expected an integer, got {v!r}")
        return default
    if lo is not None and v < lo:
        errors.append(f"{path}.{key}: {v} below minimum {lo}")
        return default
    if hi is not None and v > hi:
        errors.append(f"{path}.{key}: {v} above maximum {hi}")
        return default
    return int(v) if integer else float(v)


def _parse_space(d: dict, errors: list[str]) -> SpaceSpec:
    _check_keys(d, {"width_m", "height_m"}, "space", errors)
    w = _num(d, "width_m", 520.0, errors, "space", lo=1e-9)
    h = _num(d, "height_m", 240.0, errors, "space", lo=1e-9)
    try:
        return SpaceSpec(w, h)
    except ValueError as e:
        errors.append(f"space: {e}")
        return SpaceSpec(520.0, 240.0)


def _parse_roads(items: Any, space: SpaceSpec, errors: list[str]) -> tuple[Road, ...]:
    if not isinstance(items, list):
        errors.append("roads: expected a list")
        return default_scenario().roads
    roads: list[Road] = []
    lane_ids: set[str] = set()
    for n, rd in enumerate(items):
        path = f"roads[{n}]"
        if not isinstance(rd, dict):
            errors.append(f"{path}: expected an object")
            continue
        _check_keys(rd, {"id", "axis", "centerline_m", "lanes"}, path, errors)
        rid = rd.get("id", f"road-{n}")
        axis = rd.get("axis", "horizontal")
        if axis not in ("horizontal", "vertical"):
            errors.append(f"{path}.axis: must be 'horizontal' or 'vertical'")
            axis = "horizontal"
        span = space.height_m if axis == "horizontal" else space.width_m
        center = _num(rd, "centerline_m", span / 2, errors, path)
        lanes: list[Lane] = []
        for m, ln in enumerate(rd.get("lanes", [])):
            lpath = f"{path}.lanes[{m}]"
            if not isinstance(ln, dict):
                errors.append(f"{lpath}: expected an object")
                continue
            _check_keys(ln, {"id", "offset_m", "direction"}, lpath, errors)
            lid = ln.get("id", f"{rid}-lane-{m}")
            if lid in lane_ids:
                errors.append(f"{lpath}: duplicate lane id {lid!r}")
            lane_ids.add(lid)
            off = _num(ln, "offset_m", 0.0, errors, lpath)
            direction = ln.get("direction", 1)
            if direction not in (1, -1):
                errors.append(f"{lpath}.direction: must be 1 or -1")
                direction = 1
            lateral = center + off
            if not (0 <= lateral <= span):
                errors.append(f"{lpath}: lane lies outside the space (lateral {lateral} m)")
            lanes.append(Lane(lid, off, direction))
        if not lanes:
            errors.append(f"{path}: road needs at least one lane")
            lanes = [Lane(f"{rid}-lane-0", 0.0, 1)]
        roads.append(Road(rid, axis, center, tuple(lanes)))
    return tuple(roads)


def _parse_rsus(items: Any, space: SpaceSpec, errors: list[str]) -> tuple[Rsu, ...]:
    if not isinstance(items, list):
        errors.append("rsus: expected a list")
        return ()
    rsus: list[Rsu] = []
    channels: set[int] = set()
    for n, rs in enumerate(items):
        path = f"rsus[{n}]"
        if not isinstance(rs, dict):
            errors.append(f"{path}: expected an object")
            continue
        _check_keys(rs, {"id", "position", "range_m", "channel"}, path, errors)
        rid = rs.get("id", f"rsu-{n}")
        pos = rs.get("position", [0.0, 0.0])
        if (not isinstance(pos, list) or len(pos) != 2
                or not all(isinstance(c, (int, float)) for c in pos)):
            errors.append(f"{path}.position: expected [x, y]")
            pos = [0.0, 0.0]
        p: Point = (float(pos[0]), float(pos[1]))
        if not space.contains(p):
            errors.append(f"{path}: position {p} outside space "
                          f"{space.width_m} x {space.height_m}")
        rng = _num(rs, "range_m", 150.0, errors, path, lo=1e-9)
        ch = _num(rs, "channel", n, errors, path, lo=0, integer=True)
        if ch in channels:
            errors.append(f"{path}: duplicate channel index {ch}")
        channels.add(ch)
        rsus.append(Rsu(rid, p, rng, int(ch)))
    return tuple(rsus)


def _parse_obstacles(items: Any, space: SpaceSpec, errors: list[str]) -> tuple[Obstacle, ...]:
    if not isinstance(items, list):
        errors.append("obstacles: expected a list")
        return ()
    out: list[Obstacle] = []
    for n, ob in enumerate(items):
        path = f"obstacles[{n}]"
        if not isinstance(ob, dict):
            errors.append(f"{path}: expected an object")
            continue
        _check_keys(ob, {"id", "kind", "rect"}, path, errors)
        oid = ob.get("id", f"obstacle-{n}")
        kind = ob.get("kind", "building")
        if kind != "building":
            errors.append(f"{path}.kind: only static 'building' obstacles belong in the "
                          "scenario file (trucks are placed by density)")
            kind = "building"
        rect = ob.get("rect", None)
        if (not isinstance(rect, list) or len(rect) != 4
                or not all(isinstance(c, (int, float)) for c in rect)):
            errors.append(f"{path}.rect: expected [x_min, y_min, x_max, y_max]")
            continue
        x0, y0, x1, y1 = (float(c) for c in rect)
        if x1 <= x0 or y1 <= y0:
            errors.append(f"{path}.rect: must have positive area")
            continue
        if not (space.contains((x0, y0)) and space.contains((x1, y1))):
            errors.append(f"{path}.rect: outside space")
        out.append(Obstacle(oid, kind, Rect(x0, y0, x1, y1)))
    return tuple(out)


def _parse_classes(items: Any, errors: list[str]) -> tuple[MessageClass, ...]:
    if not isinstance(items, list):
        errors.append("traffic.classes: expected a list")
        return ()
    out: list[MessageClass] = []
    for n, c in enumerate(items):
        path = f"traffic.classes[{n}]"
        if not isinstance(c, dict):
            errors.append(f"{path}: expected an object")
            continue
        _check_keys(c, {"name", "family", "pppp", "pdb_ms", "payload_bytes",
                        "arrival", "cast"}, path, errors)
        name = c.get("name")
        if not isinstance(name, str) or not name:
            errors.append(f"{path}.name: required string")
            continue
        pppp = _num(c, "pppp", 5, errors, path, lo=1, hi=8, integer=True)
        pdb = _num(c, "pdb_ms", 100, errors, path, lo=1, integer=True)
        payload = _num(c, "payload_bytes", 40, errors, path, lo=1, integer=True)
        cast = c.get("cast", "broadcast")
        arr_d = c.get("arrival", {"kind": "periodic", "period_ms": 100})
        arrival = Arrival("periodic", 100)
        if isinstance(arr_d, dict):
            _check_keys(arr_d, {"kind", "period_ms", "rate_hz"}, f"{path}.arrival", errors)
            kind = arr_d.get("kind", "periodic")
            try:
                if kind == "periodic":
                    arrival = Arrival("periodic",
                                      _num(arr_d, "period_ms", 100, errors,
                                           f"{path}.arrival", lo=1, integer=True))
                else:
                    arrival = Arrival("event", rate_hz=_num(arr_d, "rate_hz", 1.0, errors,
                                                            f"{path}.arrival", lo=0))
            except ValueError as e:
                errors.append(f"{path}.arrival: {e}")
        else:
            errors.append(f"{path}.arrival: expected an object")
        try:
            out.append(MessageClass(name=name, family=c.get("family", "custom"),
                                    pppp=int(pppp), pdb_ms=int(pdb),
                                    payload_bytes=int(payload), arrival=arrival, cast=cast))
        except ValueError as e:
            errors.append(f"{path}: {e}")
    return tuple(out)


def _parse_traffic(d: dict, errors: list[str]) -> TrafficConfig:
    _check_keys(d, {"payload_bytes", "period_ms", "cast", "rsu_classes", "rsu_poisson",
                    "vehicle_class", "record_vehicle_samples", "classes"},
                "traffic", errors)
    base = TrafficConfig()
    payload = _num(d, "payload_bytes", base.payload_bytes, errors, "traffic", lo=1, integer=True)
    period = _num(d, "period_ms", base.period_ms, errors, "traffic", lo=1, integer=True)
    cast = d.get("cast", base.cast)
    if cast not in ("broadcast", "unicast", "groupcast"):
        errors.append(f"traffic.cast: unknown cast mode {cast!r}")
        cast = base.cast
    custom = _parse_classes(d.get("classes", []), errors) if "classes" in d else ()
    known = {c.name for c in builtin_classes()} | {c.name for c in custom}
    rsu_classes = d.get("rsu_classes", list(base.rsu_classes))
    if not isinstance(rsu_classes, list) or not all(isinstance(s, str) for s in rsu_classes):
        errors.append("traffic.rsu_classes: expected a list of class names")
        rsu_classes = list(base.rsu_classes)
    for s in rsu_classes:
        if s not in known:
            errors.append(f"traffic.rsu_classes: unknown class {s!r}")
    vehicle_class = d.get("vehicle_class", base.vehicle_class)
    if vehicle_class is not None:
        if not isinstance(vehicle_class, str):
            errors.append("traffic.vehicle_class: expected a class name or null")
            vehicle_class = base.vehicle_class
        elif vehicle_class not in known:
            errors.append(f"traffic.vehicle_class: unknown class {vehicle_class!r}")
    record = d.get("record_vehicle_samples", base.record_vehicle_samples)
    if not isinstance(record, bool):
        errors.append("traffic.record_vehicle_samples: expected a boolean")
        record = base.record_vehicle_samples
    poisson = d.get("rsu_poisson", base.rsu_poisson)
    if not isinstance(poisson, bool):
        errors.append("traffic.rsu_poisson: expected a boolean")
        poisson = base.rsu_poisson
    return TrafficConfig(payload_bytes=int(payload), period_ms=int(period), cast=cast,
                         rsu_classes=tuple(rsu_classes), rsu_poisson=poisson,
                         vehicle_class=vehicle_class,
                         record_vehicle_samples=record, classes=custom)


def _parse_density(d: dict, errors: list[str]) -> DensityConfig:
    _check_keys(d, {"lambda_per_lane", "trucks_per_road"}, "density", errors)
    lam = _num(d, "lambda_per_lane", 5, errors, "density", lo=0, integer=True)
    theta = _num(d, "trucks_per_road", 1, errors, "density", lo=0, integer=True)
    return DensityConfig(int(lam), int(theta))


def _parse_mobility(d: dict, errors: list[str]) -> MobilityConfig:
    _check_keys(d, {"car_speed_mps", "truck_speed_mps", "tick_ms"}, "mobility", errors)
    car = _num(d, "car_speed_mps", 14.0, errors, "mobility", lo=0)
    truck = _num(d, "truck_speed_mps", 11.0, errors, "mobility", lo=0)
    tick = _num(d, "tick_ms", 100, errors, "mobility", lo=1, integer=True)
    return MobilityConfig(car, truck, int(tick))


def _parse_radio(d: dict, errors: list[str]) -> RadioConfig:
    allowed = {"carrier_ghz", "tx_power_dbm", "rsu_height_m", "vehicle_height_m",
               "noise_figure_db", "occupied_bandwidth_hz", "snr_threshold_db",
               "sensing_range_m", "shadowing"}
    _check_keys(d, allowed, "radio", errors)
    base = RadioConfig()
    kwargs = {}
    kwargs["carrier_ghz"] = _num(d, "carrier_ghz", base.carrier_ghz, errors, "radio",
                                 lo=0.5, hi=100.0)
    kwargs["tx_power_dbm"] = _num(d, "tx_power_dbm", base.tx_power_dbm, errors, "radio")
    kwargs["rsu_height_m"] = _num(d, "rsu_height_m", base.rsu_height_m, errors, "radio", lo=1.0)
    kwargs["vehicle_height_m"] = _num(d, "vehicle_height_m", base.vehicle_height_m,
                                      errors, "radio", lo=1.0)
    kwargs["noise_figure_db"] = _num(d, "noise_figure_db", base.noise_figure_db, errors, "radio")
    kwargs["occupied_bandwidth_hz"] = _num(d, "occupied_bandwidth_hz",
                                           base.occupied_bandwidth_hz, errors, "radio", lo=1.0)
    kwargs["snr_threshold_db"] = _num(d, "snr_threshold_db", base.snr_threshold_db,
                                      errors, "radio")
    kwargs["sensing_range_m"] = _num(d, "sensing_range_m", base.sensing_range_m,
                                     errors, "radio", lo=1e-9)
    shadowing = d.get("shadowing", base.shadowing)
    if not isinstance(shadowing, bool):
        errors.append("radio.shadowing: expected a boolean")
        shadowing = base.shadowing
    kwargs["shadowing"] = shadowing
    try:
        return RadioConfig(**kwargs)
    except ValueError as e:
        errors.append(f"radio: {e}")
        return base


def _parse_sched(d: dict, errors: list[str]) -> SchedConfig:
    allowed = {"channel_bandwidth_mhz", "rbs_per_subchannel", "guard_mhz",
               "proc_delay_slots", "max_retx", "expiry_ms", "configured_cap"}
    _check_keys(d, allowed, "sched", errors)
    base = SchedConfig()
    bw = _num(d, "channel_bandwidth_mhz", base.channel_bandwidth_mhz, errors, "sched", lo=1e-9)
    rbs = _num(d, "rbs_per_subchannel", base.rbs_per_subchannel, errors, "sched", integer=True)
    if rbs not in VALID_RBS_PER_SUBCHANNEL:
        errors.append(f"sched.rbs_per_subchannel: must be one of {VALID_RBS_PER_SUBCHANNEL}")
        rbs = base.rbs_per_subchannel
    guard = _num(d, "guard_mhz", base.guard_mhz, errors, "sched", lo=0.0)
    proc = _num(d, "proc_delay_slots", base.proc_delay_slots, errors, "sched", lo=0, integer=True)
    retx = _num(d, "max_retx", base.max_retx, errors, "sched", lo=0, integer=True)
    expiry = d.get("expiry_ms", base.expiry_ms)
    if expiry is not None:
        expiry = _num(d, "expiry_ms", base.expiry_ms, errors, "sched", lo=1, integer=True)
    cap = _num(d, "configured_cap", base.configured_cap, errors, "sched", lo=0.0, hi=1.0)
    return SchedConfig(channel_bandwidth_mhz=bw, rbs_per_subchannel=int(rbs),
                       guard_mhz=guard, proc_delay_slots=int(proc), max_retx=int(retx),
                       expiry_ms=None if expiry is None else int(expiry),
                       configured_cap=cap)


def _parse_engine(d: dict, errors: list[str]) -> EngineConfig:
    _check_keys(d, {"warmup_ms", "default_duration_ms"}, "engine", errors)
    warm = _num(d, "warmup_ms", 1000, errors, "engine", lo=0, integer=True)
    dur = _num(d, "default_duration_ms", 60000, errors, "engine", lo=1, integer=True)
    return EngineConfig(int(warm), int(dur))


_TOP_KEYS = {"space", "roads", "rsus", "obstacles", "density", "mobility",
             "radio", "traffic", "sched", "engine", "seed"}


def scenario_from_dict(doc: dict) -> Scenario:
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise ScenarioError(["top level: expected a JSON object"])
    _check_keys(doc, _TOP_KEYS, "top level", errors)
    defaults = default_scenario()

    space = _parse_space(doc.get("space", {}), errors) if "space" in doc else defaults.space
    roads = _parse_roads(doc["roads"], space, errors) if "roads" in doc else defaults.roads
    rsus = _parse_rsus(doc["rsus"], space, errors) if "rsus" in doc else defaults.rsus
    obstacles = (_parse_obstacles(doc["obstacles"], space, errors)
                 if "obstacles" in doc else defaults.obstacles)
    density = (_parse_density(doc.get("density", {}), errors)
               if "density" in doc else defaults.density)
    mobility = (_parse_mobility(doc.get("mobility", {}), errors)
                if "mobility" in doc else defaults.mobility)
    radio = _parse_radio(doc.get("radio", {}), errors) if "radio" in doc else defaults.radio
    traffic = (_parse_traffic(doc.get("traffic", {}), errors)
               if "traffic" in doc else defaults.traffic)
    sched = _parse_sched(doc.get("sched", {}), errors) if "sched" in doc else defaults.sched
    engine = _parse_engine(doc.get("engine", {}), errors) if "engine" in doc else defaults.engine
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        errors.append("seed: expected a non-negative integer")
        seed = 0

    if "space" in doc and "roads" not in doc:
        # the default road net is tied to the default space
        for road in roads:
            span = space.height_m if road.axis == "horizontal" else space.width_m
            for lane in road.lanes:
                if not (0 <= road.centerline_m + lane.offset_m <= span):
                    errors.append(f"roads: default layout does not fit the custom space; "
                                  f"lane {lane.id} falls outside")
                    break

    if errors:
        raise ScenarioError(errors)
    return Scenario(space=space, roads=roads, rsus=rsus, obstacles=obstacles,
                    density=density, mobility=mobility, radio=radio, traffic=traffic,
                    sched=sched, engine=engine, seed=seed)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; empty input means defaults."""
    if not text.strip():
        return default_scenario()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError([f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"])
    return scenario_from_dict(doc)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "space": {"width_m": sc.space.width_m, "height_m": sc.space.height_m},
        "roads": [
            {"id": r.id, "axis": r.axis, "centerline_m": r.centerline_m,
             "lanes": [{"id": l.id, "offset_m": l.offset_m, "direction": l.direction}
                       for l in r.lanes]}
            for r in sc.roads
        ],
        "rsus": [
            {"id": r.id, "position": [r.position[0], r.position[1]],
             "range_m": r.range_m, "channel": r.channel}
            for r in sc.rsus
        ],
        "obstacles": [
            {"id": o.id, "kind": o.kind,
             "rect": [o.rect.x_min, o.rect.y_min, o.rect.x_max, o.rect.y_max]}
            for o in sc.obstacles
        ],
        "density": {"lambda_per_lane": sc.density.lambda_per_lane,
                    "trucks_per_road": sc.density.trucks_per_road},
        "mobility": {"car_speed_mps": sc.mobility.car_speed_mps,
                     "truck_speed_mps": sc.mobility.truck_speed_mps,
                     "tick_ms": sc.mobility.tick_ms},
        "radio": {
            "carrier_ghz": sc.radio.carrier_ghz,
            "tx_power_dbm": sc.radio.tx_power_dbm,
            "rsu_height_m": sc.radio.rsu_height_m,
            "vehicle_height_m": sc.radio.vehicle_height_m,
            "noise_figure_db": sc.radio.noise_figure_db,
            "occupied_bandwidth_hz": sc.radio.occupied_bandwidth_hz,
            "snr_threshold_db": sc.radio.snr_threshold_db,
            "sensing_range_m": sc.radio.sensing_range_m,
            "shadowing": sc.radio.shadowing,
        },
        "traffic": {
            "payload_bytes": sc.traffic.payload_bytes,
            "period_ms": sc.traffic.period_ms,
            "cast": sc.traffic.cast,
            "rsu_classes": list(sc.traffic.rsu_classes),
            "rsu_poisson": sc.traffic.rsu_poisson,
            "vehicle_class": sc.traffic.vehicle_class,
            "record_vehicle_samples": sc.traffic.record_vehicle_samples,
            "classes": [
                {"name": c.name, "family": c.family, "pppp": c.pppp, "pdb_ms": c.pdb_ms,
                 "payload_bytes": c.payload_bytes, "cast": c.cast,
                 "arrival": ({"kind": "periodic", "period_ms": c.arrival.period_ms}
                             if c.arrival.kind == "periodic"
                             else {"kind": "event", "rate_hz": c.arrival.rate_hz})}
                for c in sc.traffic.classes
            ],
        },
        "sched": {
            "channel_bandwidth_mhz": sc.sched.channel_bandwidth_mhz,
            "rbs_per_subchannel": sc.sched.rbs_per_subchannel,
            "guard_mhz": sc.sched.guard_mhz,
            "proc_delay_slots": sc.sched.proc_delay_slots,
            "max_retx": sc.sched.max_retx,
            "expiry_ms": sc.sched.expiry_ms,
            "configured_cap": sc.sched.configured_cap,
        },
        "engine": {"warmup_ms": sc.engine.warmup_ms,
                   "default_duration_ms": sc.engine.default_duration_ms},
        "seed": sc.seed,
    }


def serialize_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"
