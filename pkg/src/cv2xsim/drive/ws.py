"""Minimal WebSocket (RFC 6455) framing over asyncio streams.

Just enough protocol for the drive bridge: the HTTP upgrade handshake, text
and close/ping/pong frames, client-side masking, and continuation-frame
reassembly.  Each text frame carries one UTF-8 JSON object; the WS framing
layer supplies the length prefix.
"""
from __future__ import annotations

import asyncio
import base64
import hashlib
import os
import struct

GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WsError(Exception):
    pass


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + GUID).encode()).digest()
    return base64.b64encode(digest).decode()


async def server_handshake(reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter) -> dict[str, str]:
    """Read the HTTP upgrade request and answer 101; returns the headers."""
    request = await reader.readuntil(b"\r\n\r\n")
    lines = request.decode("latin-1").split("\r\n")
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    key = headers.get("sec-websocket-key")
    if not key or "websocket" not in headers.get("upgrade", "").lower():
        writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        await writer.drain()
        raise WsError("not a websocket upgrade request")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
        "\r\n"
    )
    writer.write(response.encode("latin-1"))
    await writer.drain()
    return headers


async def client_handshake(reader: asyncio.StreamReader, writer: asyncio.StreamWriter,
                           host: str, port: int, path: str = "/") -> None:
    key = base64.b64encode(os.urandom(16)).decode()
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}:{port}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n"
        "\r\n"
    )
    writer.write(request.encode("latin-1"))
    await writer.drain()
    response = await reader.readuntil(b"\r\n\r\n")
    head = response.decode("latin-1")
    if "101" not in head.split("\r\n")[0]:
        raise WsError(f"handshake rejected: {head.splitlines()[0]}")
    expected = accept_key(key)
    if expected not in head:
        raise WsError("bad Sec-WebSocket-Accept")


def encode_frame(opcode: int, payload: bytes, mask: bool) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0
    if n < 126:
        head.append(mask_bit | n)
    elif n < 1 << 16:
        head.append(mask_bit | 126)
        head += struct.pack(">H", n)
    else:
        head.append(mask_bit | 127)
        head += struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        head += key
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return bytes(head) + payload


async def read_frame(reader: asyncio.StreamReader) -> tuple[int, bytes]:
    """One complete message: (opcode, payload); continuations reassembled."""
    opcode = None
    buf = bytearray()
    while True:
        b0, b1 = await reader.readexactly(2)
        fin = b0 & 0x80
        op = b0 & 0x0F
        masked = b1 & 0x80
        n = b1 & 0x7F
        if n == 126:
            (n,) = struct.unpack(">H", await reader.readexactly(2))
        elif n == 127:
            (n,) = struct.unpack(">Q", await reader.readexactly(8))
        key = await reader.readexactly(4) if masked else None
        payload = await reader.readexactly(n)
        if key:
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        if op in (OP_CLOSE, OP_PING, OP_PONG):
            return op, payload  # control frames are never fragmented
        if opcode is None:
            if op == OP_CONT:
                raise WsError("continuation frame without a start")
            opcode = op
        elif op != OP_CONT:
            raise WsError("interleaved message start")
        buf += payload
        if fin:
            return opcode, bytes(buf)


class WsConnection:
    """Thin duplex wrapper; ``mask`` is True on the client side."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter,
                 mask: bool):
        self.reader = reader
        self.writer = writer
        self.mask = mask
        self.closed = False

    def send_text(self, text: str) -> None:
        self.writer.write(encode_frame(OP_TEXT, text.encode(), self.mask))

    async def drain(self) -> None:
        await self.writer.drain()

    async def recv_text(self) -> str | None:
        """Next text payload; None once the peer closes."""
        while True:
            try:
                op, payload = await read_frame(self.reader)
            except (asyncio.IncompleteReadError, ConnectionResetError):
                self.closed = True
                return None
            if op == OP_CLOSE:
                self.closed = True
                try:
                    self.writer.write(encode_frame(OP_CLOSE, payload, self.mask))
                    await self.writer.drain()
                except ConnectionError:
                    pass
                return None
            if op == OP_PING:
                self.writer.write(encode_frame(OP_PONG, payload, self.mask))
                continue
            if op == OP_PONG:
                continue
            return payload.decode("utf-8", errors="replace")

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            try:
                self.writer.write(encode_frame(OP_CLOSE, b"", self.mask))
            except ConnectionError:
                pass
        try:
            self.writer.close()
        except ConnectionError:
            pass


async def connect(host: str, port: int, path: str = "/") -> WsConnection:
    reader, writer = await asyncio.open_connection(host, port)
    await client_handshake(reader, writer, host, port, path)
    return WsConnection(reader, writer, mask=True)
