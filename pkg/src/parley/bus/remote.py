"""Remoting: length-prefixed JSON frames over TCP.

Every frame is a 4-byte big-endian unsigned length followed by that many
bytes of UTF-8 JSON.  A host announces its services in a "hello" frame as
soon as a client connects; the central dialog system then drives it with
"invoke" and "lifecycle" frames and receives "result", "ack" and unsolicited
"publish" frames back.  Sequence numbers carried in publish frames are the
sender's local counters; the central bus always assigns the authoritative
seq when it republishes.
"""

from __future__ import annotations

import json
import socket
import struct
import threading
import time

from .errors import (
    ConnectTimeout,
    EndTimeout,
    ProtocolVersionMismatch,
    StartTimeout,
)
from .topics import MessageEnvelope, Remote, ServiceDescriptor, SubscriptionMode

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 64 * 1024 * 1024
_HEADER = struct.Struct(">I")


def send_frame(sock: socket.socket, obj: dict):
    data = json.dumps(obj).encode("utf-8")
    sock.sendall(_HEADER.pack(len(data)) + data)


def recv_frame(sock: socket.socket) -> dict:
    header = _recv_exact(sock, _HEADER.size)
    (length,) = _HEADER.unpack(header)
    if length > MAX_FRAME_BYTES:
        raise ConnectionError(f"frame of {length} bytes exceeds limit")
    return json.loads(_recv_exact(sock, length).decode("utf-8"))


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    chunks = []
    while n > 0:
        chunk = sock.recv(n)
        if not chunk:
            raise ConnectionError("connection closed mid-frame")
        chunks.append(chunk)
        n -= len(chunk)
    return b"".join(chunks)


def _parse_address(address: str) -> tuple[str, int]:
    host, _, port = address.rpartition(":")
    return host or "127.0.0.1", int(port)


class RemoteLink:
    """Client side of one connection to a remote service host."""

    def __init__(self, sock, address, descriptors, publish_cb):
        self._sock = sock
        self._lock = threading.Lock()
        self.address = address
        self.descriptors = descriptors
        self._publish_cb = publish_cb

    @classmethod
    def connect(cls, address: str, timeout_ms: int, publish_cb) -> "RemoteLink":
        host, port = _parse_address(address)
        timeout = timeout_ms / 1000.0
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
            sock.settimeout(timeout)
            hello = recv_frame(sock)
        except (OSError, ConnectionError) as exc:
            raise ConnectTimeout(address) from exc
        if hello.get("type") != "hello":
            sock.close()
            raise ConnectTimeout(address)
        if hello.get("version") != PROTOCOL_VERSION:
            sock.close()
            raise ProtocolVersionMismatch(PROTOCOL_VERSION, hello.get("version"))
        descriptors = [
            ServiceDescriptor.from_dict(d, location=Remote(address))
            for d in hello["services"]
        ]
        return cls(sock, address, descriptors, publish_cb)

    def make_handler(self, service_name: str):
        def handler(inputs):
            wire_inputs = {}
            for topic, value in inputs.items():
                if isinstance(value, list):
                    wire_inputs[topic] = [e.to_dict() for e in value]
                else:
                    wire_inputs[topic] = value.to_dict()
            return self._request(
                {"type": "invoke", "service": service_name, "inputs": wire_inputs},
                expect="result",
                timeout_s=60.0,
            )
        return handler

    def lifecycle(self, event: str, timeout_ms: int):
        try:
            self._request(
                {"type": "lifecycle", "event": event},
                expect="ack",
                timeout_s=timeout_ms / 1000.0,
            )
        except (OSError, ConnectionError, TimeoutError) as exc:
            names = ",".join(d.name for d in self.descriptors)
            err = StartTimeout(names) if event == "start" else EndTimeout(names)
            raise err from exc

    def _request(self, frame: dict, expect: str, timeout_s: float):
        """Send one frame and read until its reply, relaying publish frames."""
        with self._lock:
            self._sock.settimeout(timeout_s)
            send_frame(self._sock, frame)
            while True:
                reply = recv_frame(self._sock)
                kind = reply.get("type")
                if kind == "publish":
                    self._publish_cb(reply["topic"], reply["payload"])
                elif kind == expect == "result":
                    if reply.get("error"):
                        raise RuntimeError(
                            f"remote service {reply.get('service')!r} failed: "
                            f"{reply['error']}"
                        )
                    return reply.get("outputs") or {}
                elif kind == expect:
                    return reply
                else:
                    raise ConnectionError(f"unexpected frame {kind!r}")

    def close(self):
        try:
            self._sock.close()
        except OSError:
            pass


class RemoteServiceHost:
    """Server side: exports local service objects over the wire protocol.

    Service objects carry .descriptor, are callable with the usual
    topic-to-envelope input map, and may define on_dialog_start/on_dialog_end
    hooks, exactly as when registered on a local bus.
    """

    def __init__(self, services, host="127.0.0.1", port=0):
        self._services = {s.descriptor.name: s for s in services}
        self._host = host
        self._port = port
        self._listener = None
        self._running = False
        self._seq = {}
        self._conns = []
        self._conns_lock = threading.Lock()

    @property
    def address(self) -> str:
        return f"{self._host}:{self._port}"

    def start(self) -> str:
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((self._host, self._port))
        self._port = self._listener.getsockname()[1]
        self._listener.listen()
        self._running = True
        threading.Thread(target=self._accept_loop, daemon=True).start()
        return self.address

    def stop(self):
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        with self._conns_lock:
            for conn in self._conns:
                try:
                    conn.close()
                except OSError:
                    pass
            self._conns = []

    def publish(self, topic, payload):
        """Push a source-style publication to every connected dialog system."""
        rendered = str(topic)
        seq = self._seq.get(rendered, 0)
        self._seq[rendered] = seq + 1
        frame = {
            "type": "publish",
            "topic": rendered,
            "seq": seq,
            "wall_time": int(time.time() * 1000),
            "payload": payload,
        }
        with self._conns_lock:
            conns = list(self._conns)
        for conn in conns:
            try:
                send_frame(conn, frame)
            except OSError:
                pass

    def _accept_loop(self):
        while self._running:
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            with self._conns_lock:
                self._conns.append(conn)
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: socket.socket):
        try:
            send_frame(conn, {
                "type": "hello",
                "version": PROTOCOL_VERSION,
                "services": [s.descriptor.to_dict() for s in self._services.values()],
            })
            while True:
                frame = recv_frame(conn)
                kind = frame.get("type")
                if kind == "invoke":
                    send_frame(conn, self._handle_invoke(frame))
                elif kind == "lifecycle":
                    self._handle_lifecycle(frame.get("event"))
                    send_frame(conn, {"type": "ack", "event": frame.get("event")})
                else:
                    raise ConnectionError(f"unexpected frame {kind!r}")
        except (ConnectionError, OSError):
            pass
        finally:
            with self._conns_lock:
                if conn in self._conns:
                    self._conns.remove(conn)
            try:
                conn.close()
            except OSError:
                pass

    def _handle_invoke(self, frame: dict) -> dict:
        name = frame["service"]
        service = self._services[name]
        modes = {s.topic.render(): s.mode for s in service.descriptor.subscriptions}
        inputs = {}
        for topic, value in frame.get("inputs", {}).items():
            if modes.get(topic) is SubscriptionMode.COLLECT:
                inputs[topic] = [MessageEnvelope.from_dict(e) for e in value]
            else:
                inputs[topic] = MessageEnvelope.from_dict(value)
        try:
            outputs = service(inputs) or {}
        except Exception as exc:
            return {"type": "result", "service": name, "outputs": {}, "error": repr(exc)}
        return {"type": "result", "service": name, "outputs": dict(outputs)}

    def _handle_lifecycle(self, event: str):
        hook_name = {"start": "on_dialog_start", "end": "on_dialog_end"}.get(event)
        if hook_name is None:
            return
        for service in self._services.values():
            hook = getattr(service, hook_name, None)
            if hook is not None:
                hook()
