"""Protocol entry points and the deterministic in-process driver."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from lzcomm.factorize import Factorization, MalformedFactorization, Mode, check, decompress, factorize_lzn
from lzcomm.fingerprint import DEFAULT_WIDTH, CoinStream, MODULUS
from lzcomm.protocol import parties
from lzcomm.protocol.messages import Kind, ProtocolError, PublicParams, Speaker, Transcript
from lzcomm.symbols import alphabet_bound, wrap_sentinels


@dataclass(frozen=True)
class ProtocolConfig:
    seed: int = 0
    width: int = DEFAULT_WIDTH
    epsilon: float = 2.0 ** -20
    sentinel: bool = True
    verify: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ValueError("error budget must satisfy 0 < epsilon < 1/2")
        if self.width < 1:
            raise ValueError("fingerprint width must be positive")


class NonCanonicalInput(ProtocolError):
    """Input is not the canonical (greedy, leftmost) LZN factorization of its string."""


@dataclass
class LcpOutcome:
    lcp_length: int
    matching_factor_count: int
    z_ell: int | None
    transcript: Transcript
    alice_factor_count: int = 0
    error_bound: float = 0.0

    @property
    def rounds(self) -> int:
        return self.transcript.rounds

    @property
    def bits(self) -> int:
        return self.transcript.total_bits


@dataclass
class HammingOutcome:
    distance: int
    raw_distance: int
    mismatch_positions: list[int]
    gap_max: int
    jumps: list[LcpOutcome]
    transcript: Transcript
    suffix_factor_counts: list[int] = field(default_factory=list)
    error_bound: float = 0.0

    @property
    def rounds(self) -> int:
        return self.transcript.rounds

    @property
    def bits(self) -> int:
        return self.transcript.total_bits

    @property
    def lcp_invocations(self) -> int:
        return len(self.jumps)


def run_inprocess(alice, bob, transcript: Transcript):
    """Alternate the two generators on one thread, logging every message."""
    gens = {Speaker.ALICE: alice, Speaker.BOB: bob}
    inbox = {Speaker.ALICE: deque(), Speaker.BOB: deque()}
    pending = {who: next(gen) for who, gen in gens.items()}
    results = {}

    def advance(who, value):
        try:
            pending[who] = gens[who].send(value)
        except StopIteration as stop:
            results[who] = stop.value
            pending[who] = None

    while len(results) < 2:
        progressed = False
        for who in (Speaker.ALICE, Speaker.BOB):
            while who not in results:
                req = pending[who]
                if isinstance(req, parties.Send):
                    transcript.record(who, req.kind, req.value)
                    inbox[who.other].append((req.kind, req.value))
                    advance(who, None)
                elif inbox[who]:
                    kind, value = inbox[who].popleft()
                    if kind != req.kind:
                        raise ProtocolError(f"{who.value} expected {req.kind.value}, got {kind.value}")
                    advance(who, value)
                else:
                    break
                progressed = True
        if not progressed:
            raise ProtocolError("parties desynchronized: both wait or one finished early")
    if inbox[Speaker.ALICE] or inbox[Speaker.BOB]:
        raise ProtocolError("parties finished with undelivered messages")
    return results[Speaker.ALICE], results[Speaker.BOB]


def _canonical_text(fact: Factorization, who: str):
    if fact.mode is not Mode.LZN:
        raise NonCanonicalInput(f"{who}'s input is {fact.mode.value}, expected LZN")
    if fact.canonical:
        return decompress(fact)
    try:
        check(fact)
    except MalformedFactorization as exc:
        raise NonCanonicalInput(f"{who}'s input: {exc}") from exc
    text = decompress(fact)
    if factorize_lzn(text) != fact:
        raise NonCanonicalInput(f"{who}'s input is not the greedy leftmost LZN factorization")
    return text


def _error_bound(comparisons: int, k: int, width: int) -> float:
    per = 3 * (k + 1) / (MODULUS - 3) + (2.0 ** -width if width < 61 else 0.0)
    return min(1.0, comparisons * per)


def lcp_protocol(alice_input: Factorization, bob_input: Factorization,
                 config: ProtocolConfig = ProtocolConfig(), channel=run_inprocess) -> LcpOutcome:
    """Both parties learn ``lcp(A, B)`` from their LZN factorizations."""
    a = _canonical_text(alice_input, "Alice")
    b = _canonical_text(bob_input, "Bob")
    params = PublicParams(len(a), alphabet_bound(a, b), config.width)
    transcript = Transcript(params)
    ra, rb = channel(
        parties.lcp_alice(alice_input, len(a), params, CoinStream(config.seed), config.verify),
        parties.lcp_bob(bob_input, b, params, CoinStream(config.seed), config.verify),
        transcript,
    )
    if ra.lcp != rb.lcp:
        raise ProtocolError(f"parties disagree: Alice {ra.lcp}, Bob {rb.lcp}")
    comparisons = sum(1 for m in transcript.messages if m.kind is Kind.FINGERPRINT)
    return LcpOutcome(ra.lcp, ra.matched, factorize_lzn(a[: ra.lcp]).size, transcript,
                      alice_factor_count=ra.factor_count,
                      error_bound=_error_bound(comparisons, ra.factor_count, config.width))


def gap_max(positions: list[int], n: int) -> int:
    """Largest ``i_k - i_{k-1} + 1``; ``n`` when there is no mismatch, ``i_1`` for one."""
    if not positions:
        return n
    if len(positions) == 1:
        return positions[0]
    return max(q - p + 1 for p, q in zip(positions, positions[1:]))


def hamming_protocol(alice_input: Factorization, bob_input: Factorization,
                     config: ProtocolConfig = ProtocolConfig(), channel=run_inprocess) -> HammingOutcome:
    """Both parties learn ``d_H(A, B)`` by repeated LCP queries."""
    a = _canonical_text(alice_input, "Alice")
    b = _canonical_text(bob_input, "Bob")
    if len(a) != len(b):
        raise ValueError(f"Hamming distance needs equal lengths, got {len(a)} and {len(b)}")
    first_a, first_b = alice_input, bob_input
    offset = 0
    if config.sentinel:
        a, b = wrap_sentinels(a, b)
        first_a = first_b = None
        offset = 2
    params = PublicParams(len(a), alphabet_bound(a, b), config.width)
    transcript = Transcript(params)
    ra, rb = channel(
        parties.hamming_alice(a, first_a, params, CoinStream(config.seed), config.verify, offset),
        parties.hamming_bob(b, first_b, params, CoinStream(config.seed), config.verify, offset),
        transcript,
    )
    if ra.raw_positions != rb.raw_positions:
        raise ProtocolError("parties disagree on mismatch positions")
    return assemble_hamming(ra, transcript, config)


def assemble_hamming(ra: parties.HammingResult, transcript: Transcript,
                     config: ProtocolConfig) -> HammingOutcome:
    """Build the outcome from Alice's view of a finished run."""
    n = ra.length
    raw = ra.raw_positions
    if config.sentinel:
        positions = [p - 1 for p in raw if 1 < p < n]
        n_reported = n - 2
    else:
        positions = list(raw)
        n_reported = n
    jumps = []
    cursor = 2  # length announcement and its acknowledgement
    total_bound = 0.0
    for _, res in ra.jumps:
        part = transcript.slice(cursor, cursor + res.messages)
        cursor += res.messages
        comparisons = sum(1 for m in part.messages if m.kind is Kind.FINGERPRINT)
        bound = _error_bound(comparisons, res.factor_count, config.width)
        total_bound += bound
        jumps.append(LcpOutcome(res.lcp, res.matched, None, part, res.factor_count, bound))
    return HammingOutcome(
        distance=len(raw) - (2 if config.sentinel else 0),
        raw_distance=len(raw),
        mismatch_positions=positions,
        gap_max=gap_max(positions, n_reported),
        jumps=jumps,
        transcript=transcript,
        suffix_factor_counts=[res.factor_count for _, res in ra.jumps],
        error_bound=min(1.0, total_bound),
    )
