"""Realtime bridge: one driver client steers the do-not-pass world over a
WebSocket, the server owns all physics.

The world advances on a fixed wall-clock tick (default 50 Hz) using the
latest input frame (zero-order hold); a snapshot goes out after every tick.
Input older than 500 ms triggers a full-brake failsafe.  Snapshot fan-out
never blocks the tick: when the client's socket buffer backs up, frames are
dropped.  A {"cmd": "restart"} frame resets the episode (same seed, fresh
world); malformed frames are ignored and the session continues.

Client -> server: {"t": ms, "steer": f, "throttle": f, "brake": f}
                  {"cmd": "restart"}
Server -> client: {"tick": n, "voi": {...}, "vtc": {...}, "truck": {...},
                   "warning": bool, "outcome": "none|near_crash|crash",
                   "bsm_age_ms": n}
"""
from __future__ import annotations

import asyncio
import json
import logging
import time
from dataclasses import dataclass

from .world import (
    ControlInput,
    DriveConfig,
    DriveSession,
    NEUTRAL,
    OUTCOME_CRASH,
    OUTCOME_NEAR_CRASH,
)
from . import ws

log = logging.getLogger(__name__)

STALE_INPUT_MS = 500
WRITE_BUFFER_LIMIT = 256 * 1024

WIRE_OUTCOME = {None: "none", "no-incident": "none", OUTCOME_NEAR_CRASH: "near_crash",
                OUTCOME_CRASH: "crash"}


def _entity(k, length: float) -> dict:
    return {"x": round(k.x, 3), "y": round(k.y, 3), "speed": round(k.speed, 3),
            "length": length}


def snapshot_doc(tick: int, session: DriveSession) -> dict:
    from ..mobility import TRUCK_LENGTH_M
    from .world import CAR_LENGTH_M

    outcome = session.outcome
    if outcome == "no-incident":
        # the wire enum only distinguishes incidents
        wire = "none"
    else:
        wire = WIRE_OUTCOME.get(outcome, "none")
    age = session.bsm_age_ms
    return {
        "tick": tick,
        "voi": _entity(session.voi, CAR_LENGTH_M),
        "vtc": _entity(session.vtc, CAR_LENGTH_M),
        "truck": _entity(session.truck, TRUCK_LENGTH_M),
        "warning": bool(session.warning),
        "outcome": wire,
        "bsm_age_ms": None if age is None else int(age),
    }


def parse_input_frame(text: str) -> ControlInput | str | None:
    """ControlInput, the string "restart", or None for a malformed frame."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return None
    if not isinstance(doc, dict):
        return None
    if doc.get("cmd") == "restart":
        return "restart"
    try:
        t = doc["t"]
        steer = float(doc["steer"])
        throttle = float(doc["throttle"])
        brake = float(doc["brake"])
        if not isinstance(t, (int, float)):
            return None
        return ControlInput(t_ms=int(t),
                            steer=max(-1.0, min(1.0, steer)),
                            throttle=max(0.0, min(1.0, throttle)),
                            brake=max(0.0, min(1.0, brake)))
    except (KeyError, TypeError, ValueError):
        return None


@dataclass
class _Mailbox:
    control: ControlInput = NEUTRAL
    received_at: float = -1.0  # wall clock, seconds
    restart: bool = False


class Bridge:
    def __init__(self, seed: int = 0, tick_hz: float = 50.0,
                 cfg: DriveConfig | None = None, bsm_enabled: bool = True):
        self.seed = seed
        self.tick_hz = tick_hz
        self.cfg = cfg or DriveConfig()
        self.bsm_enabled = bsm_enabled
        self._busy = False

    async def handle(self, reader: asyncio.StreamReader,
                     writer: asyncio.StreamWriter) -> None:
        try:
            await ws.server_handshake(reader, writer)
        except (ws.WsError, asyncio.IncompleteReadError, ConnectionError):
            writer.close()
            return
        conn = ws.WsConnection(reader, writer, mask=False)
        if self._busy:
            log.info("second client rejected: session in progress")
            conn.close()
            return
        self._busy = True
        try:
            await self._session(conn)
        finally:
            self._busy = False
            conn.close()

    async def _session(self, conn: ws.WsConnection) -> None:
        mailbox = _Mailbox()
        reader_task = asyncio.create_task(self._read_inputs(conn, mailbox))
        try:
            await self._tick_loop(conn, mailbox)
        except ConnectionError:
            log.info("client connection lost; episode aborted")
        finally:
            reader_task.cancel()

    async def _read_inputs(self, conn: ws.WsConnection, mailbox: _Mailbox) -> None:
        while True:
            text = await conn.recv_text()
            if text is None:
                mailbox.restart = False
                return
            frame = parse_input_frame(text)
            if frame is None:
                log.debug("malformed input frame ignored: %r", text[:80])
                continue
            if frame == "restart":
                mailbox.restart = True
            else:
                mailbox.control = frame
                mailbox.received_at = time.monotonic()

    async def _tick_loop(self, conn: ws.WsConnection, mailbox: _Mailbox) -> None:
        dt = 1.0 / self.tick_hz
        session = DriveSession(self.seed, cfg=self.cfg, bsm_enabled=self.bsm_enabled)
        tick = 0
        next_deadline = time.monotonic() + dt
        while not conn.closed:
            now = time.monotonic()
            delay = next_deadline - now
            if delay > 0:
                await asyncio.sleep(delay)
            next_deadline += dt

            if mailbox.restart:
                mailbox.restart = False
                session = DriveSession(self.seed, cfg=self.cfg,
                                       bsm_enabled=self.bsm_enabled)
                tick = 0

            control = mailbox.control
            stale = (mailbox.received_at < 0
                     or (time.monotonic() - mailbox.received_at) * 1000 > STALE_INPUT_MS)
            if stale:
                control = ControlInput(t_ms=session.time_ms, brake=1.0)
            if not session.done:
                session.step(control, dt)
            tick += 1

            doc = snapshot_doc(tick, session)
            transport = conn.writer.transport
            if transport.get_write_buffer_size() < WRITE_BUFFER_LIMIT:
                conn.send_text(json.dumps(doc))
                try:
                    await asyncio.wait_for(conn.drain(), timeout=dt)
                except (asyncio.TimeoutError, ConnectionError):
                    pass
            if conn.reader.at_eof():
                return


async def serve(host: str = "127.0.0.1", port: int = 8700, seed: int = 0,
                tick_hz: float = 50.0, cfg: DriveConfig | None = None,
                bsm_enabled: bool = True, ready: asyncio.Event | None = None):
    bridge = Bridge(seed=seed, tick_hz=tick_hz, cfg=cfg, bsm_enabled=bsm_enabled)
    server = await asyncio.start_server(bridge.handle, host, port)
    log.info("drive bridge listening on ws://%s:%d", host, port)
    if ready is not None:
        ready.set()
    async with server:
        await server.serve_forever()


def serve_forever(host: str = "127.0.0.1", port: int = 8700, seed: int = 0,
                  tick_hz: float = 50.0) -> None:
    print(f"drive bridge on ws://{host}:{port} (seed {seed}, {tick_hz:.0f} Hz); "
          "Ctrl-C to stop")
    asyncio.run(serve(host=host, port=port, seed=seed, tick_hz=tick_hz))
