"""Application-layer message taxonomy and arrival processes.

The built-in classes map the seven V2X traffic families to per-packet
priorities (1 = highest .. 8 = lowest) and delay budgets:

    critical V2V   (BSM-critical, EVA)  priority 2, budget  20 ms
    essential V2V  (BSM-essential)      priority 5, budget 100 ms
    critical V2I   (RSM, MAP)           priority 3, budget 100 ms
    essential V2I  (SPaT, RTCM)         priority 5, budget 100 ms
    transactional  (SSM, SRM)           priority 6, budget 100 ms
    low-priority   (TIM, RWM)           priority 6, budget 100 ms
    background     (background)         priority 8, budget 100 ms

Periodic classes emit one message per source per period with a per-source
random phase (whole milliseconds, so generation lands on slot boundaries);
event classes draw Poisson arrivals.  Generation is a pure function of
(config, seed): each source/class pair owns a keyed rng substream, so adding
or removing other streams never perturbs an existing one.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_PAYLOAD_BYTES = 40
DEFAULT_PERIOD_MS = 100

_TRAFFIC_STREAM_TAG = 0x7261  # rng substream domain separator


@dataclass(frozen=True)
class Arrival:
    kind: str  # "periodic" | "event"
    period_ms: int | None = None
    rate_hz: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "periodic":
            if not self.period_ms or self.period_ms <= 0:
                raise ValueError("periodic arrival needs a positive period")
        elif self.kind == "event":
            if self.rate_hz is None or self.rate_hz < 0:
                raise ValueError("event arrival needs a non-negative rate")
        else:
            raise ValueError(f"unknown arrival kind {self.kind!r}")


@dataclass(frozen=True)
class MessageClass:
    name: str
    family: str
    pppp: int
    pdb_ms: int
    payload_bytes: int = DEFAULT_PAYLOAD_BYTES
    arrival: Arrival = field(default_factory=lambda: Arrival("periodic", DEFAULT_PERIOD_MS))
    cast: str = "broadcast"  # "broadcast" | "unicast" | "groupcast"

    def __post_init__(self) -> None:
        if not (1 <= self.pppp <= 8):
            raise ValueError(f"{self.name}: pppp must be in 1..8")
        if self.payload_bytes <= 0:
            raise ValueError(f"{self.name}: payload must be positive")
        if self.cast not in ("broadcast", "unicast", "groupcast"):
            raise ValueError(f"{self.name}: unknown cast mode {self.cast!r}")


@dataclass(frozen=True)
class Message:
    id: int
    cls: MessageClass
    source_id: str
    gen_ms: int
    payload_bytes: int
    cast: str


_FAMILY_TABLE = {
    # family: (pppp, pdb_ms)
    "critical-V2V": (2, 20),
    "essential-V2V": (5, 100),
    "critical-V2I": (3, 100),
    "essential-V2I": (5, 100),
    "transactional": (6, 100),
    "low-priority": (6, 100),
    "background": (8, 100),
}

_BUILTIN_MEMBERS = [
    ("BSM-critical", "critical-V2V"),
    ("EVA", "critical-V2V"),
    ("BSM-essential", "essential-V2V"),
    ("RSM", "critical-V2I"),
    ("MAP", "critical-V2I"),
    ("SPaT", "essential-V2I"),
    ("RTCM", "essential-V2I"),
    ("SSM", "transactional"),
    ("SRM", "transactional"),
    ("TIM", "low-priority"),
    ("RWM", "low-priority"),
    ("background", "background"),
]


def builtin_classes() -> list[MessageClass]:
    """The built-in message classes with the family priority/budget mapping."""
    out = []
    for name, family in _BUILTIN_MEMBERS:
        pppp, pdb = _FAMILY_TABLE[family]
        out.append(MessageClass(name=name, family=family, pppp=pppp, pdb_ms=pdb))
    return out


def builtin_class(name: str) -> MessageClass:
    for cls in builtin_classes():
        if cls.name == name:
            return cls
    raise KeyError(f"no built-in message class {name!r}")


@dataclass(frozen=True)
class Stream:
    """One (source, class) arrival process."""

    source_id: str
    cls: MessageClass


def stream_rng(seed: int, source_id: str, class_name: str) -> np.random.Generator:
    """Keyed substream so each (source, class) pair draws independently."""
    return np.random.default_rng(
        [seed, _TRAFFIC_STREAM_TAG, zlib.crc32(source_id.encode()), zlib.crc32(class_name.encode())]
    )


def stream_phase_ms(seed: int, stream: Stream) -> int:
    """Slot-aligned phase offset in [0, period) for a periodic stream."""
    period = stream.cls.arrival.period_ms
    assert period is not None
    return int(stream_rng(seed, stream.source_id, stream.cls.name).integers(0, period))


def generation_times_ms(stream: Stream, duration_ms: int, seed: int,
                        phase_ms: int | None = None) -> np.ndarray:
    """Generation timestamps (whole ms, ascending) for one stream."""
    arr = stream.cls.arrival
    if arr.kind == "periodic":
        phase = stream_phase_ms(seed, stream) if phase_ms is None else phase_ms
        return np.arange(phase, duration_ms, arr.period_ms, dtype=np.int64)
    rate = arr.rate_hz or 0.0
    if rate == 0.0 or duration_ms == 0:
        return np.zeros(0, dtype=np.int64)
    rng = stream_rng(seed, stream.source_id, stream.cls.name)
    # oversample exponential gaps, then truncate to the horizon
    n_guess = max(8, int(rate * duration_ms / 1000.0 * 2 + 10))
    gaps = rng.exponential(1000.0 / rate, size=n_guess)
    times = np.cumsum(gaps)
    while times[-1] < duration_ms:
        gaps = rng.exponential(1000.0 / rate, size=n_guess)
        times = np.concatenate([times, times[-1] + np.cumsum(gaps)])
    return np.floor(times[times < duration_ms]).astype(np.int64)


def generate(streams: Sequence[Stream], duration_ms: int, seed: int) -> list[Message]:
    """All messages from all streams, sorted by generation time.

    Ties sort by source then class name so the output is fully deterministic.
    """
    if duration_ms < 0:
        raise ValueError("duration must be non-negative")
    rows: list[tuple[int, str, str, Stream]] = []
    for s in streams:
        for t in generation_times_ms(s, duration_ms, seed):
            rows.append((int(t), s.source_id, s.cls.name, s))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return [
        Message(id=i, cls=s.cls, source_id=s.source_id, gen_ms=t,
                payload_bytes=s.cls.payload_bytes, cast=s.cls.cast)
        for i, (t, _, _, s) in enumerate(rows)
    ]
