"""Live session server: newline-delimited JSON over TCP, protocol v1.

One session at a time. Every `input` message advances exactly one tick
(the server never free-runs), a `snapshot` goes out every second tick,
and all engine events are forwarded as they happen, so a live session is
fully replayable from its recorded input trajectory.

Browsers cannot open raw TCP sockets, so the listener also accepts a
WebSocket upgrade on the same port: each text frame carries one protocol
line. Message content is identical on both transports.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import struct
from pathlib import Path

from .hand_model import HandFrame
from .metrics import compute_metrics
from .pointer_input import ORIENTATION_PRESETS, PALM_DOWN_FORWARD, hand_from_pointer
from .scenarios import PROTOCOL_VERSION, SCENARIO_NAMES, SessionEngine
from . import smart_objects as so

SNAPSHOT_EVERY = 2  # ticks per snapshot (30 Hz logical at a 60 Hz tick)

_WS_MAGIC = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def catalog_summary() -> list[dict]:
    out = []
    for obj in so.catalog():
        out.append(
            {
                "kind": obj.kind,
                "mass": None if obj.anchored else obj.mass,
                "hardness": obj.hardness,
                "graspable": obj.graspable,
            }
        )
    return out


# --- line transports ---------------------------------------------------------------


class TcpLineTransport:
    def __init__(self, conn: socket.socket, first_chunk: bytes = b""):
        self.conn = conn
        self.buffer = first_chunk

    def recv_line(self) -> str | None:
        while b"\n" not in self.buffer:
            chunk = self.conn.recv(65536)
            if not chunk:
                return None
            self.buffer += chunk
        line, self.buffer = self.buffer.split(b"\n", 1)
        return line.decode("utf-8", errors="replace").rstrip("\r")

    def send_line(self, line: str) -> None:
        self.conn.sendall(line.encode("utf-8") + b"\n")

    def close(self) -> None:
        self.conn.close()


def ws_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _WS_MAGIC).encode()).digest()
    return base64.b64encode(digest).decode()


def ws_encode_text(payload: str) -> bytes:
    data = payload.encode("utf-8")
    header = b"\x81"  # FIN + text
    n = len(data)
    if n < 126:
        header += struct.pack("!B", n)
    elif n < 65536:
        header += struct.pack("!BH", 126, n)
    else:
        header += struct.pack("!BQ", 127, n)
    return header + data


def ws_decode_frame(buf: bytes) -> tuple[int, bytes, int] | None:
    """Returns (opcode, payload, bytes_consumed) or None if incomplete."""
    if len(buf) < 2:
        return None
    opcode = buf[0] & 0x0F
    masked = bool(buf[1] & 0x80)
    length = buf[1] & 0x7F
    offset = 2
    if length == 126:
        if len(buf) < 4:
            return None
        length = struct.unpack("!H", buf[2:4])[0]
        offset = 4
    elif length == 127:
        if len(buf) < 10:
            return None
        length = struct.unpack("!Q", buf[2:10])[0]
        offset = 10
    mask = b""
    if masked:
        if len(buf) < offset + 4:
            return None
        mask = buf[offset:offset + 4]
        offset += 4
    if len(buf) < offset + length:
        return None
    payload = buf[offset:offset + length]
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return opcode, payload, offset + length


class WebSocketLineTransport:
    """One protocol line per WebSocket text frame."""

    def __init__(self, conn: socket.socket, request_head: bytes):
        self.conn = conn
        self.buffer = b""
        headers = {}
        for raw in request_head.split(b"\r\n")[1:]:
            if b":" in raw:
                k, v = raw.split(b":", 1)
                headers[k.strip().lower().decode()] = v.strip().decode()
        key = headers.get("sec-websocket-key", "")
        response = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {ws_accept_key(key)}\r\n\r\n"
        )
        conn.sendall(response.encode())

    def recv_line(self) -> str | None:
        while True:
            frame = ws_decode_frame(self.buffer)
            if frame is not None:
                opcode, payload, consumed = frame
                self.buffer = self.buffer[consumed:]
                if opcode == 0x8:  # close
                    return None
                if opcode == 0x9:  # ping -> pong
                    self.conn.sendall(b"\x8a" + bytes([len(payload)]) + payload)
                    continue
                if opcode in (0x1, 0x2):
                    return payload.decode("utf-8", errors="replace")
                continue
            chunk = self.conn.recv(65536)
            if not chunk:
                return None
            self.buffer += chunk

    def send_line(self, line: str) -> None:
        self.conn.sendall(ws_encode_text(line))

    def close(self) -> None:
        try:
            self.conn.sendall(b"\x88\x00")
        except OSError:
            pass
        self.conn.close()


# --- session handling ----------------------------------------------------------------


class SessionError(Exception):
    pass


class OmgServer:
    def __init__(self, port: int = 7321, host: str = "127.0.0.1",
                 out_dir: str | Path | None = None):
        self.listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self.listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self.listener.bind((host, port))
        self.listener.listen(1)
        self.port = self.listener.getsockname()[1]
        self.out_dir = Path(out_dir) if out_dir else None
        self.session_counter = 0
        self._stop = False

    def serve_forever(self, max_sessions: int | None = None) -> None:
        served = 0
        while not self._stop:
            conn, _ = self.listener.accept()
            try:
                self.handle_connection(conn)
            finally:
                conn.close()
            served += 1
            if max_sessions is not None and served >= max_sessions:
                break
        self.listener.close()

    def close(self) -> None:
        self._stop = True
        self.listener.close()

    # one connection == at most one live session at a time
    def handle_connection(self, conn: socket.socket) -> None:
        first = conn.recv(65536)
        if not first:
            return
        if first.startswith(b"GET "):
            while b"\r\n\r\n" not in first:
                more = conn.recv(65536)
                if not more:
                    return
                first += more
            head, rest = first.split(b"\r\n\r\n", 1)
            transport = WebSocketLineTransport(conn, head)
            transport.buffer = rest
        else:
            transport = TcpLineTransport(conn, first)
        try:
            self._run_session(transport)
        finally:
            transport.close()

    def _send(self, transport, obj: dict) -> None:
        transport.send_line(json.dumps(obj, separators=(", ", ": ")))

    def _run_session(self, transport) -> None:
        engine: SessionEngine | None = None
        orientation = PALM_DOWN_FORWARD
        greeted = False
        while True:
            line = transport.recv_line()
            if line is None:
                break
            line = line.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
                if not isinstance(msg, dict) or "type" not in msg:
                    raise ValueError("message must be an object with a 'type' field")
            except ValueError as exc:
                self._send(transport, {"type": "error", "message": f"bad message: {exc}"})
                continue

            mtype = msg["type"]
            try:
                if mtype == "hello":
                    if int(msg.get("version", -1)) != PROTOCOL_VERSION:
                        self._send(transport, {
                            "type": "error",
                            "message": f"unsupported protocol version {msg.get('version')}",
                        })
                        return
                    greeted = True
                    self._send(transport, {
                        "type": "welcome",
                        "version": PROTOCOL_VERSION,
                        "catalog": catalog_summary(),
                        "scenarios": list(SCENARIO_NAMES),
                    })
                elif mtype == "command":
                    if not greeted:
                        raise SessionError("hello required before commands")
                    action = msg.get("action")
                    if action in ("start", "reset"):
                        if engine is not None:
                            self._flush_session(engine)
                        scenario = msg.get("scenario", "panel")
                        seed = int(msg.get("seed", 0))
                        engine = SessionEngine(scenario, seed=seed)
                        orientation = ORIENTATION_PRESETS.get(scenario, PALM_DOWN_FORWARD)
                        for ev in engine.log.events:
                            self._send(transport, {"type": "event", "event": {
                                "tick": ev.tick, "t": ev.t, "type": ev.type, "data": ev.data,
                            }})
                        self._send_snapshot(transport, engine)
                    else:
                        raise SessionError(f"unknown command action {action!r}")
                elif mtype == "input":
                    if engine is None:
                        raise SessionError("no scenario started")
                    expected = engine.world.tick + 1
                    got = int(msg.get("tick", -1))
                    if got != expected:
                        raise SessionError(f"input tick {got} != expected {expected}")
                    frames = self._parse_hands(msg.get("hands", []), engine, orientation)
                    events = engine.tick(frames)
                    for ev in events:
                        self._send(transport, {"type": "event", "event": {
                            "tick": ev.tick, "t": ev.t, "type": ev.type, "data": ev.data,
                        }})
                    if engine.world.tick % SNAPSHOT_EVERY == 0:
                        self._send_snapshot(transport, engine)
                    if any(e.type == "scenario_completed" for e in events):
                        report = compute_metrics(engine.log.events)
                        self._send(transport, {"type": "metric", "report": report.to_dict()})
                else:
                    raise SessionError(f"unknown message type {mtype!r}")
            except SessionError as exc:
                self._send(transport, {"type": "error", "message": str(exc)})
        if engine is not None:
            self._flush_session(engine)

    def _parse_hands(self, hands, engine: SessionEngine, orientation) -> list[HandFrame]:
        frames = []
        t = engine.world.time + engine.world.dt
        for h in hands:
            side = h.get("side", "right")
            if "landmarks" in h:
                frames.append(HandFrame(
                    side=side,
                    landmarks=tuple(tuple(p) for p in h["landmarks"]),
                    confidence=tuple(h.get("confidence", [1.0] * 21)),
                    timestamp=t,
                ))
            else:
                frames.append(hand_from_pointer(
                    side=side,
                    position=tuple(h["position"]),
                    aperture=float(h.get("aperture", 1.0)),
                    timestamp=t,
                    drop_pose=bool(h.get("drop_pose", False)),
                    orientation=orientation,
                ))
        return frames

    def _send_snapshot(self, transport, engine: SessionEngine) -> None:
        snap = engine.world.snapshot()
        snap["type"] = "snapshot"
        snap["tasks"] = engine.checklist()
        snap["completed"] = engine.completed
        self._send(transport, snap)

    def _flush_session(self, engine: SessionEngine) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.session_counter += 1
        stem = f"session-{self.session_counter:03d}-{engine.scenario}"
        engine.log.write(self.out_dir / f"{stem}.log.jsonl")
        engine.log.write_inputs(self.out_dir / f"{stem}.inputs.jsonl")


def serve(port: int = 7321, host: str = "127.0.0.1",
          out_dir: str | Path | None = None,
          max_sessions: int | None = None) -> None:
    server = OmgServer(port=port, host=host, out_dir=out_dir)
    print(f"listening on {host}:{server.port} (protocol v{PROTOCOL_VERSION})")
    server.serve_forever(max_sessions=max_sessions)
