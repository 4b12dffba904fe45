"""Greedy LZ77-family factorizations (LZN, LZS, CN) and their inverse.

A factor is stored as ``(source, length, last)``: ``source`` is the 1-based
leftmost start of the referenced previous occurrence (0 for a fresh letter),
``length`` the total factor length and ``last`` its final symbol. Decoding
copies ``length - 1`` symbols from ``source`` and appends ``last``.

When the greedy match runs into the end of the string there is no symbol to
append; the final factor is then the match itself and the factorization is
flagged ``truncated``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from lzcomm import _backend
from lzcomm.symbols import as_symbols


class Mode(str, enum.Enum):
    LZN = "LZN"
    LZS = "LZS"
    CN = "CN"


class Factor(NamedTuple):
    source: int
    length: int
    last: int


class MalformedFactorization(ValueError):
    """A factor references text it may not reference under its mode."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"factor {index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass(frozen=True, eq=False)
class Factorization:
    mode: Mode
    sources: np.ndarray
    lengths: np.ndarray
    lasts: np.ndarray
    truncated: bool = False
    starts: np.ndarray = field(init=False, repr=False)
    # set only by this module's factorizers: the greedy leftmost parse of its expansion
    canonical: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name, dtype in (("sources", np.int64), ("lengths", np.int64), ("lasts", np.uint32)):
            arr = np.ascontiguousarray(getattr(self, name), dtype=dtype)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (len(self.sources) == len(self.lengths) == len(self.lasts)):
            raise ValueError("factor columns differ in length")
        starts = np.ones(len(self.lengths), dtype=np.int64)
        if len(self.lengths) > 1:
            starts[1:] += np.cumsum(self.lengths[:-1])
        starts.flags.writeable = False
        object.__setattr__(self, "starts", starts)

    @classmethod
    def from_factors(cls, mode, factors, truncated=False) -> "Factorization":
        factors = [tuple(f) for f in factors]
        cols = list(zip(*factors)) if factors else ([], [], [])
        return cls(mode, np.array(cols[0], dtype=np.int64), np.array(cols[1], dtype=np.int64),
                   np.array(cols[2], dtype=np.uint32), truncated)

    @property
    def size(self) -> int:
        return len(self.lengths)

    @property
    def original_length(self) -> int:
        return int(self.lengths.sum())

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Factor]:
        for s, l, c in zip(self.sources.tolist(), self.lengths.tolist(), self.lasts.tolist()):
            yield Factor(s, l, c)

    def __getitem__(self, i) -> Factor:
        return Factor(int(self.sources[i]), int(self.lengths[i]), int(self.lasts[i]))

    def __eq__(self, other):
        if not isinstance(other, Factorization):
            return NotImplemented
        return (self.mode == other.mode and self.truncated == other.truncated
                and np.array_equal(self.sources, other.sources)
                and np.array_equal(self.lengths, other.lengths)
                and np.array_equal(self.lasts, other.lasts))

    __hash__ = None

    def triples(self) -> list[tuple[int, int, int]]:
        return [tuple(f) for f in self]

    def copy_triples(self, as_text: bool = True) -> list[tuple]:
        """Triples with fresh letters written ``(0, 0, c)``."""
        out = []
        for s, l, c in self:
            c = chr(c) if as_text else c
            out.append((0, 0, c) if s == 0 else (s, l, c))
        return out


def _assemble(mode, s, sources, lengths, truncated) -> Factorization:
    ends = np.cumsum(lengths) - 1
    lasts = s[ends] if len(lengths) else np.zeros(0, dtype=np.uint32)
    return Factorization(mode, sources, lengths, lasts, truncated, canonical=True)


def factorize_lzn(s) -> Factorization:
    """Non-self-referencing LZ77: each reference ends before its factor starts."""
    s = as_symbols(s)
    sources, lengths, truncated = _backend.kernels.lzn_factorize(_backend.dense_codes(s), False)
    return _assemble(Mode.LZN, s, sources, lengths, truncated)


def factorize_cn(s) -> Factorization:
    """Non-self-referencing C-factorization: longest previous factor, nothing appended."""
    s = as_symbols(s)
    sources, lengths, _ = _backend.kernels.lzn_factorize(_backend.dense_codes(s), True)
    return _assemble(Mode.CN, s, sources, lengths, False)


def factorize_lzs(s) -> Factorization:
    """Self-referencing LZ77: the reference may overlap its factor."""
    s = as_symbols(s)
    codes = _backend.dense_codes(s)
    sa = _backend.suffix_array(codes)
    sources, lengths, truncated = _backend.kernels.lzs_factorize(codes, sa)
    return _assemble(Mode.LZS, s, sources, lengths, truncated)


def factorize(s, mode="LZN") -> Factorization:
    return _FACTORIZERS[Mode(mode)](s)


_FACTORIZERS = {Mode.LZN: factorize_lzn, Mode.LZS: factorize_lzs, Mode.CN: factorize_cn}


def suffix_sizes(s, starts=None, mode="LZN") -> np.ndarray:
    """Factor counts of ``s[i:]`` for each 0-based ``i`` in ``starts`` (default: all).

    Counts only; no factorization objects are built, which keeps suffix
    scans cheap.
    """
    mode = Mode(mode)
    s = as_symbols(s)
    starts = np.arange(len(s) + 1, dtype=np.int64) if starts is None \
        else np.ascontiguousarray(starts, dtype=np.int64)
    if mode is Mode.LZS:
        return np.array([factorize_lzs(s[i:]).size for i in starts.tolist()], dtype=np.int64)
    return _backend.kernels.suffix_sizes(_backend.dense_codes(s), starts, mode is Mode.CN)


def check(f: Factorization) -> None:
    """Raise :class:`MalformedFactorization` on the first factor breaking its mode's rules."""
    src, length, start = f.sources, f.lengths, f.starts
    fresh = src == 0
    # furthest 1-based position a copy may read, per factor
    if f.mode is Mode.LZS:
        limit = start - 1
        span_end = src
        overlap_msg = "source not before its factor"
    else:
        limit = start - 1
        span_end = src + length - 2
        if f.mode is Mode.CN:
            span_end = src + length - 1
        elif f.truncated and f.size:
            span_end = span_end.copy()
            span_end[-1] += 1
        overlap_msg = "reference overlaps its factor"
    problems = [
        (length < 1, "length < 1"),
        (fresh & (length != 1), "fresh letter with length != 1"),
        (src < 0, "negative source"),
        (~fresh & (span_end > limit), overlap_msg),
    ]
    first = None
    for mask, reason in problems:
        hits = np.flatnonzero(mask)
        if len(hits) and (first is None or hits[0] < first[0]):
            first = (int(hits[0]), reason)
    if first is not None:
        i, reason = first
        raise MalformedFactorization(i, f"{reason} (source {int(src[i])}, length {int(length[i])}, "
                                        f"start {int(start[i])})")


def decompress(f: Factorization) -> np.ndarray:
    """Rebuild the string; overlapping copies self-extend as if copied left to right.

    Every copied position points at an earlier one, so repeated pointer
    jumping reaches a literal within ``log2(n) + 1`` passes.
    """
    check(f)
    n = f.original_length
    if n == 0:
        return as_symbols(np.zeros(0, dtype=np.uint32))
    lengths = f.lengths
    begin = np.repeat(f.starts - 1, lengths)
    offset = np.arange(n, dtype=np.int64) - begin
    src = np.repeat(f.sources, lengths)
    copied = (src > 0) & (offset < np.repeat(lengths, lengths) - 1)
    parent = np.arange(n, dtype=np.int64)
    parent[copied] = src[copied] - 1 + offset[copied]
    while True:
        nxt = parent[parent]
        if np.array_equal(nxt, parent):
            break
        parent = nxt
    values = np.zeros(n, dtype=np.uint32)
    values[np.cumsum(lengths) - 1] = f.lasts
    return as_symbols(values[parent])


# -- text format ---------------------------------------------------------------

def dumps(f: Factorization) -> str:
    """``#mode=<M> n=<len>`` header, then ``source<TAB>length<TAB>last`` per line.

    A truncated final factor carries a fourth column ``T``.
    """
    lines = [f"#mode={f.mode.value} n={f.original_length}"]
    for i, (s, l, c) in enumerate(f):
        row = f"{s}\t{l}\t{c}"
        if f.truncated and i == f.size - 1:
            row += "\tT"
        lines.append(row)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Factorization:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing '#mode=... n=...' header")
    header = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    rows, truncated = [], False
    for lineno, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) == 4 and cols[3] == "T" and lineno == len(lines):
            truncated = True
            cols = cols[:3]
        if len(cols) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated columns")
        rows.append(tuple(int(c) for c in cols))
    f = Factorization.from_factors(header["mode"], rows, truncated)
    if "n" in header and int(header["n"]) != f.original_length:
        raise ValueError(f"header n={header['n']} but factors cover {f.original_length}")
    return f
