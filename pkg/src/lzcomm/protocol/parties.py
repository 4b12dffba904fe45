"""Party state machines written as generators.

A party yields :class:`Send` to speak and :class:`Recv` to wait; the driver
(in-process or socket) feeds received values back through ``send``. Both
parties hold only their own string and the public parameters.

LCP schedule, over factor lists extended with an end marker:

1. doubling: Alice sends the fingerprint of her first ``m`` items,
   ``m = 1, 2, 4, ...``; Bob answers one bit (equal or not). A match that
   already covers a whole list ends the search: the strings are equal.
2. binary search between the last match and the first mismatch.
3. Alice sends her first unmatched item; Bob expands it against the common
   prefix, computes the lcp and sends it back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lzcomm.factorize import Factorization, factorize_lzn
from lzcomm.fingerprint import CoinStream, FingerprintScheme, encode_factors
from lzcomm.protocol.messages import Control, Kind, ProtocolError, PublicParams
from lzcomm.symbols import lcp as string_lcp

_END_ELEMS = np.ones(3, dtype=np.uint64)


@dataclass(frozen=True)
class Send:
    kind: Kind
    value: object


@dataclass(frozen=True)
class Recv:
    kind: Kind


@dataclass
class LcpResult:
    lcp: int
    matched: int  # equal leading factors
    factor_count: int  # this party's factor count for the compared string
    messages: int
    retries: int = 0


@dataclass
class HammingResult:
    raw_positions: list[int]
    jumps: list[tuple[int, LcpResult]] = field(default_factory=list)  # (offset, result)
    length: int = 0


class _PrefixOracle:
    """Truncated fingerprints of ``items[:m]`` for the list plus end marker."""

    def __init__(self, fact: Factorization, scheme: FingerprintScheme):
        elems = np.concatenate([encode_factors(fact.sources, fact.lengths, fact.lasts), _END_ELEMS])
        self.table = scheme.prefix_table(elems)
        self.total = fact.size + 1
        self.scheme = scheme

    def __call__(self, m: int) -> int:
        return self.scheme.truncate(int(self.table[min(m, self.total)]))


def _schemes(coins: CoinStream, width: int, verify: bool):
    main = FingerprintScheme.from_coins(coins, width)
    check = FingerprintScheme.from_coins(coins, width) if verify else None
    return main, check


def lcp_alice(fact: Factorization, length: int, params: PublicParams, coins: CoinStream,
              verify: bool = False):
    """Alice's side; ``length`` is the length of her string."""
    messages = 0
    retries = 0
    while True:
        scheme, check_scheme = _schemes(coins, params.width, verify)
        fp = _PrefixOracle(fact, scheme)
        good, m = 0, 1
        while True:
            yield Send(Kind.FINGERPRINT, fp(m))
            equal = yield Recv(Kind.BOOLEAN)
            messages += 2
            if not equal:
                bad = m
                break
            if m >= fp.total:
                return LcpResult(length, fact.size, fact.size, messages, retries)
            good, m = m, 2 * m
        while bad - good > 1:
            mid = (good + bad) // 2
            yield Send(Kind.FINGERPRINT, fp(mid))
            equal = yield Recv(Kind.BOOLEAN)
            messages += 2
            if equal:
                good = mid
            else:
                bad = mid
        if check_scheme is not None and good > 0:
            yield Send(Kind.FINGERPRINT, _PrefixOracle(fact, check_scheme)(good))
            confirmed = yield Recv(Kind.BOOLEAN)
            messages += 2
            if not confirmed:
                retries += 1
                continue
        break
    k = good
    if k < fact.size:
        f = fact[k]
        triple = (f.source, f.length, params.symbol_index(f.last))
    else:
        triple = (0, 0, params.end_index)
    yield Send(Kind.TRIPLE, triple)
    ell = yield Recv(Kind.LENGTH)
    messages += 2
    return LcpResult(ell, k, fact.size, messages, retries)


def lcp_bob(fact: Factorization, text: np.ndarray, params: PublicParams, coins: CoinStream,
            verify: bool = False):
    """Bob's side; he also needs his decompressed ``text`` for the final expansion."""
    messages = 0
    retries = 0
    while True:
        scheme, check_scheme = _schemes(coins, params.width, verify)
        fp = _PrefixOracle(fact, scheme)
        good, m = 0, 1
        while True:
            theirs = yield Recv(Kind.FINGERPRINT)
            equal = theirs == fp(m)
            yield Send(Kind.BOOLEAN, equal)
            messages += 2
            if not equal:
                bad = m
                break
            if m >= fp.total:
                return LcpResult(len(text), fact.size, fact.size, messages, retries)
            good, m = m, 2 * m
        while bad - good > 1:
            mid = (good + bad) // 2
            theirs = yield Recv(Kind.FINGERPRINT)
            equal = theirs == fp(mid)
            yield Send(Kind.BOOLEAN, equal)
            messages += 2
            if equal:
                good = mid
            else:
                bad = mid
        if check_scheme is not None and good > 0:
            theirs = yield Recv(Kind.FINGERPRINT)
            confirmed = theirs == _PrefixOracle(fact, check_scheme)(good)
            yield Send(Kind.BOOLEAN, confirmed)
            messages += 2
            if not confirmed:
                retries += 1
                continue
        break
    k = min(good, fact.size)
    common = int(fact.lengths[:k].sum())
    src, length, sym = yield Recv(Kind.TRIPLE)
    ell = common
    if length > 0:
        last = params.symbol_from_index(sym)
        if src == 0:
            piece = np.array([last], dtype=np.uint32)
        else:
            a, b = src - 1, src - 1 + length - 1
            # a valid first-mismatch factor only references the common prefix
            piece = np.concatenate([text[a:b], [last]]).astype(np.uint32) if b <= common else None
        if piece is not None:
            ell = common + string_lcp(piece, text[common:])
    yield Send(Kind.LENGTH, ell)
    messages += 2
    return LcpResult(ell, k, fact.size, messages, retries)


def hamming_alice(text: np.ndarray, first: Factorization | None, params: PublicParams,
                  coins: CoinStream, verify: bool = False, reported_offset: int = 0):
    """Kangaroo jumps over LCP queries; ``first`` may reuse an existing LZN of ``text``.

    ``reported_offset`` is subtracted from the echoed distance (2 with sentinels).
    """
    n = len(text)
    yield Send(Kind.LENGTH, n)
    reply = yield Recv(Kind.CONTROL)
    if reply != Control.OK:
        raise ProtocolError(f"Bob rejected length {n}")
    result = HammingResult([], length=n)
    offset = 0
    while True:
        suffix = text[offset:]
        fact = first if (offset == 0 and first is not None) else factorize_lzn(suffix)
        res = yield from lcp_alice(fact, len(suffix), params, coins, verify)
        result.jumps.append((offset, res))
        if offset + res.lcp >= n:
            break
        result.raw_positions.append(offset + res.lcp + 1)
        offset += res.lcp + 1
    yield Send(Kind.LENGTH, len(result.raw_positions) - reported_offset)
    return result


def hamming_bob(text: np.ndarray, first: Factorization | None, params: PublicParams,
                coins: CoinStream, verify: bool = False, reported_offset: int = 0):
    n = len(text)
    theirs = yield Recv(Kind.LENGTH)
    if theirs != n:
        yield Send(Kind.CONTROL, int(Control.ABORT))
        raise ProtocolError(f"length mismatch: Alice has {theirs}, Bob has {n}")
    yield Send(Kind.CONTROL, int(Control.OK))
    result = HammingResult([], length=n)
    offset = 0
    while True:
        suffix = text[offset:]
        fact = first if (offset == 0 and first is not None) else factorize_lzn(suffix)
        res = yield from lcp_bob(fact, suffix, params, coins, verify)
        result.jumps.append((offset, res))
        if offset + res.lcp >= n:
            break
        result.raw_positions.append(offset + res.lcp + 1)
        offset += res.lcp + 1
    echoed = yield Recv(Kind.LENGTH)
    if echoed != len(result.raw_positions) - reported_offset:
        raise ProtocolError(f"echoed distance {echoed} disagrees with Bob's count")
    return result
