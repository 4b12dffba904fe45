"""Run one party per process over TCP.

Wire format per protocol message: a 4-byte big-endian bit count, then the
value as a big-endian integer padded to whole bytes. Before the protocol
starts, the two sides swap one JSON hello (4-byte byte count, then UTF-8)
to agree on public parameters; the hello is setup, not protocol traffic,
so it is not charged to the transcript.
"""

from __future__ import annotations

import json
import socket
import struct
import time
from dataclasses import asdict

from lzcomm.factorize import Factorization, factorize_lzn
from lzcomm.fingerprint import CoinStream
from lzcomm.protocol import parties
from lzcomm.protocol.engine import (
    HammingOutcome,
    LcpOutcome,
    ProtocolConfig,
    _canonical_text,
    _error_bound,
    assemble_hamming,
)
from lzcomm.protocol.messages import Kind, ProtocolError, PublicParams, Speaker, Transcript, TransportError
from lzcomm.symbols import alphabet_bound, wrap_sentinels

_HEADER = struct.Struct(">I")
HELLO_VERSION = 1


def _recv_exact(sock: socket.socket, size: int) -> bytes:
    chunks = bytearray()
    while len(chunks) < size:
        try:
            chunk = sock.recv(size - len(chunks))
        except OSError as exc:
            raise TransportError(f"receive failed: {exc}") from exc
        if not chunk:
            raise TransportError(f"connection closed after {len(chunks)} of {size} bytes")
        chunks.extend(chunk)
    return bytes(chunks)


def _send_all(sock: socket.socket, data: bytes) -> None:
    try:
        sock.sendall(data)
    except OSError as exc:
        raise TransportError(f"send failed: {exc}") from exc


def send_frame(sock: socket.socket, value: int, bits: int) -> None:
    if value < 0 or value.bit_length() > bits:
        raise TransportError(f"value {value} does not fit in {bits} bits")
    _send_all(sock, _HEADER.pack(bits) + value.to_bytes((bits + 7) // 8, "big"))


def recv_frame(sock: socket.socket, expected_bits: int) -> int:
    (bits,) = _HEADER.unpack(_recv_exact(sock, _HEADER.size))
    if bits != expected_bits:
        raise TransportError(f"frame carries {bits} bits, expected {expected_bits}")
    value = int.from_bytes(_recv_exact(sock, (bits + 7) // 8), "big")
    if value.bit_length() > bits:
        raise TransportError(f"frame value exceeds its declared {bits} bits")
    return value


def send_hello(sock: socket.socket, hello: dict) -> None:
    data = json.dumps(hello, sort_keys=True).encode()
    _send_all(sock, _HEADER.pack(len(data)) + data)


def recv_hello(sock: socket.socket) -> dict:
    (size,) = _HEADER.unpack(_recv_exact(sock, _HEADER.size))
    if size > 1 << 16:
        raise TransportError(f"hello of {size} bytes is implausibly large")
    try:
        return json.loads(_recv_exact(sock, size))
    except ValueError as exc:
        raise TransportError("malformed hello") from exc


def drive(gen, me: Speaker, sock: socket.socket, transcript: Transcript):
    """Run one party's generator against a socket, logging both directions."""
    params = transcript.params
    try:
        req = next(gen)
        while True:
            if isinstance(req, parties.Send):
                transcript.record(me, req.kind, req.value)
                send_frame(sock, params.pack(req.kind, req.value), params.bits(req.kind))
                req = gen.send(None)
            else:
                raw = recv_frame(sock, params.bits(req.kind))
                value = params.unpack(req.kind, raw)
                transcript.record(me.other, req.kind, value)
                req = gen.send(value)
    except StopIteration as stop:
        return stop.value


def listen(port: int, host: str = "127.0.0.1", on_ready=None, timeout: float = 60.0) -> socket.socket:
    """Accept exactly one peer; ``on_ready(port)`` fires once the socket is bound."""
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        server.bind((host, port))
        server.listen(1)
        if on_ready is not None:
            on_ready(server.getsockname()[1])
        server.settimeout(timeout)
        try:
            conn, _ = server.accept()
        except OSError as exc:
            raise TransportError(f"no peer connected: {exc}") from exc
    finally:
        server.close()
    conn.settimeout(timeout)
    conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return conn


def connect(host: str, port: int, timeout: float = 10.0) -> socket.socket:
    """Connect, retrying until the listener is up or ``timeout`` passes."""
    deadline = time.monotonic() + timeout
    while True:
        try:
            conn = socket.create_connection((host, port), timeout=timeout)
            break
        except OSError as exc:
            if time.monotonic() >= deadline:
                raise TransportError(f"cannot reach {host}:{port}: {exc}") from exc
            time.sleep(0.05)
    conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return conn


def _handshake(sock, kind: str, me: Speaker, config: ProtocolConfig, length: int, sigma: int) -> dict:
    mine = {"version": HELLO_VERSION, "kind": kind, "role": me.value, "config": asdict(config),
            "length": length if me is Speaker.ALICE else None, "sigma": sigma}
    send_hello(sock, mine)
    theirs = recv_hello(sock)
    for key in ("version", "kind", "config"):
        if theirs.get(key) != mine[key]:
            raise ProtocolError(f"peer disagrees on {key}: {theirs.get(key)!r} vs {mine[key]!r}")
    if theirs.get("role") != me.other.value:
        raise ProtocolError(f"both sides claim the role {me.value}")
    alice = mine if me is Speaker.ALICE else theirs
    return {"n": int(alice["length"]), "sigma": max(sigma, int(theirs["sigma"]))}


def run_lcp_party(me: Speaker, fact: Factorization, sock: socket.socket,
                  config: ProtocolConfig = ProtocolConfig()) -> LcpOutcome:
    text = _canonical_text(fact, me.value.capitalize())
    shared = _handshake(sock, "lcp", me, config, len(text), alphabet_bound(text))
    params = PublicParams(shared["n"], shared["sigma"], config.width)
    transcript = Transcript(params)
    coins = CoinStream(config.seed)
    if me is Speaker.ALICE:
        gen = parties.lcp_alice(fact, len(text), params, coins, config.verify)
    else:
        gen = parties.lcp_bob(fact, text, params, coins, config.verify)
    res = drive(gen, me, sock, transcript)
    comparisons = sum(1 for m in transcript.messages if m.kind is Kind.FINGERPRINT)
    return LcpOutcome(res.lcp, res.matched, factorize_lzn(text[: res.lcp]).size, transcript,
                      alice_factor_count=res.factor_count if me is Speaker.ALICE else 0,
                      error_bound=_error_bound(comparisons, res.factor_count, config.width))


def run_hamming_party(me: Speaker, fact: Factorization, sock: socket.socket,
                      config: ProtocolConfig = ProtocolConfig()) -> HammingOutcome:
    text = _canonical_text(fact, me.value.capitalize())
    first, offset = fact, 0
    if config.sentinel:
        wrapped = wrap_sentinels(text, text)
        text = wrapped[0] if me is Speaker.ALICE else wrapped[1]
        first, offset = None, 2
    shared = _handshake(sock, "hamming", me, config, len(text), alphabet_bound(text))
    params = PublicParams(shared["n"], shared["sigma"], config.width)
    transcript = Transcript(params)
    coins = CoinStream(config.seed)
    party = parties.hamming_alice if me is Speaker.ALICE else parties.hamming_bob
    res = drive(party(text, first, params, coins, config.verify, offset), me, sock, transcript)
    return assemble_hamming(res, transcript, config)
