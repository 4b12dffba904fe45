"""Message kinds, their bit-exact encodings, and transcripts.

Widths are fixed by public parameters both parties know up front:

=============  ==========================================
fingerprint    ``width`` bits
boolean        1 bit
length         ``ceil(log2(n + 2))`` bits
triple         ``2 * ceil(log2(n + 2)) + ceil(log2(sigma + 3))``
control        2 bits
=============  ==========================================

One message is one round.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from lzcomm.symbols import SENTINEL_DOLLAR, SENTINEL_HASH


class Speaker(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def other(self) -> "Speaker":
        return Speaker.BOB if self is Speaker.ALICE else Speaker.ALICE


class Kind(str, enum.Enum):
    FINGERPRINT = "fingerprint"
    BOOLEAN = "boolean"
    LENGTH = "length"
    TRIPLE = "triple"
    CONTROL = "control"


class Control(enum.IntEnum):
    OK = 1
    ABORT = 2


class ProtocolError(RuntimeError):
    """The two parties disagree or a message is malformed."""


class TransportError(ProtocolError):
    """The channel failed (closed, short read, wrong frame size)."""


def length_bits(n: int) -> int:
    """``ceil(log2(n + 2))``: enough for any value in ``0..n+1``."""
    return (n + 1).bit_length()


def symbol_bits(sigma: int) -> int:
    return (sigma + 2).bit_length()


@dataclass(frozen=True)
class PublicParams:
    """What both parties know before the first message."""

    n: int
    sigma: int
    width: int = 64

    def bits(self, kind: Kind) -> int:
        kind = Kind(kind)
        if kind is Kind.FINGERPRINT:
            return self.width
        if kind is Kind.BOOLEAN:
            return 1
        if kind is Kind.LENGTH:
            return length_bits(self.n)
        if kind is Kind.TRIPLE:
            return 2 * length_bits(self.n) + symbol_bits(self.sigma)
        return 2

    # -- symbols inside triples: alphabet ids, then '#', '$', end-of-list
    def symbol_index(self, symbol: int) -> int:
        if symbol == SENTINEL_HASH:
            return self.sigma
        if symbol == SENTINEL_DOLLAR:
            return self.sigma + 1
        if not 0 <= symbol < self.sigma:
            raise ProtocolError(f"symbol {symbol} outside the shared alphabet of size {self.sigma}")
        return symbol

    def symbol_from_index(self, index: int) -> int:
        if index == self.sigma:
            return SENTINEL_HASH
        if index == self.sigma + 1:
            return SENTINEL_DOLLAR
        return index

    @property
    def end_index(self) -> int:
        return self.sigma + 2

    # -- integer packing for the wire
    def pack(self, kind: Kind, value) -> int:
        kind = Kind(kind)
        if kind is Kind.TRIPLE:
            src, length, sym = value
            lb, sb = length_bits(self.n), symbol_bits(self.sigma)
            return (src << (lb + sb)) | (length << sb) | sym
        return int(value)

    def unpack(self, kind: Kind, raw: int):
        kind = Kind(kind)
        if kind is Kind.TRIPLE:
            lb, sb = length_bits(self.n), symbol_bits(self.sigma)
            return (raw >> (lb + sb), (raw >> sb) & ((1 << lb) - 1), raw & ((1 << sb) - 1))
        if kind is Kind.BOOLEAN:
            return bool(raw)
        return raw

    def fits(self, kind: Kind, value) -> bool:
        try:
            packed = self.pack(kind, value)
        except (TypeError, ValueError):
            return False
        if Kind(kind) is Kind.TRIPLE:
            lb, sb = length_bits(self.n), symbol_bits(self.sigma)
            src, length, sym = value
            return 0 <= src < (1 << lb) and 0 <= length < (1 << lb) and 0 <= sym < (1 << sb)
        return 0 <= packed < (1 << self.bits(kind))


@dataclass(frozen=True)
class Message:
    speaker: Speaker
    kind: Kind
    bits: int
    value: object

    def to_json(self) -> dict:
        value = list(self.value) if isinstance(self.value, tuple) else self.value
        if isinstance(value, bool):
            value = int(value)
        return {"speaker": self.speaker.value, "kind": self.kind.value, "bits": self.bits,
                "value": value}


@dataclass
class Transcript:
    params: PublicParams
    messages: list[Message] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.messages)

    @property
    def total_bits(self) -> int:
        return sum(m.bits for m in self.messages)

    def record(self, speaker: Speaker, kind: Kind, value) -> Message:
        msg = Message(Speaker(speaker), Kind(kind), self.params.bits(kind), value)
        self.messages.append(msg)
        return msg

    def slice(self, start: int, stop: int) -> "Transcript":
        return Transcript(self.params, self.messages[start:stop])

    def to_jsonl(self) -> str:
        lines = [json.dumps(m.to_json(), sort_keys=True) for m in self.messages]
        summary = {"summary": True, "rounds": self.rounds, "bits": self.total_bits,
                   "n": self.params.n, "sigma": self.params.sigma, "width": self.params.width}
        lines.append(json.dumps(summary, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> tuple["Transcript", dict | None]:
        """Parse without validating; returns the transcript and the summary record."""
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        summary = None
        if records and records[-1].get("summary"):
            summary = records.pop()
        params = PublicParams(summary["n"], summary["sigma"], summary["width"]) if summary \
            else PublicParams(0, 0)
        messages = []
        for rec in records:
            value = rec.get("value")
            if isinstance(value, list):
                value = tuple(value)
            messages.append(Message(Speaker(rec["speaker"]), Kind(rec["kind"]), int(rec["bits"]),
                                    value))
        return cls(params, messages), summary


@dataclass
class ReplayReport:
    ok: bool
    violations: list[str]
    rounds: int
    bits: int


def replay(transcript: Transcript, summary: dict | None = None) -> ReplayReport:
    """Re-derive every message width and the totals from the logged payloads."""
    violations = []
    params = transcript.params
    prev = None
    for i, m in enumerate(transcript.messages):
        expected = params.bits(m.kind)
        if m.bits != expected:
            violations.append(f"message {i}: {m.kind.value} declares {m.bits} bits, encoding needs {expected}")
        if m.value is not None and not params.fits(m.kind, m.value):
            violations.append(f"message {i}: value {m.value!r} does not fit a {m.kind.value}")
        if prev is not None and m.speaker == prev:
            violations.append(f"message {i}: {m.speaker.value} speaks twice in a row")
        prev = m.speaker
    rounds = transcript.rounds
    bits = sum(params.bits(m.kind) for m in transcript.messages)
    if summary is not None:
        if summary.get("rounds") != rounds:
            violations.append(f"summary rounds {summary.get('rounds')} != {rounds} messages")
        if summary.get("bits") != bits:
            violations.append(f"summary bits {summary.get('bits')} != recomputed {bits}")
    return ReplayReport(not violations, violations, rounds, bits)
