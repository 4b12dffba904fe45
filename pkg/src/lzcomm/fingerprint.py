"""Public coins and Karp-Rabin fingerprints of factor sequences.

Both parties build a :class:`CoinStream` from the same seed and therefore
draw the same bases. A factor ``(source, length, last)`` is encoded as the
three field elements ``source+1, length+1, last+1`` (all non-zero), and a
sequence ``e_0 e_1 ...`` hashes to ``sum(e_j * base**(j+1)) mod 2**61-1``.
Non-zero coefficients make sequences of different length differ as
polynomials, so unequal prefixes collide with probability at most
``3k / (modulus - 3)`` over the base.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from lzcomm import _backend

MODULUS = (1 << 61) - 1
DEFAULT_WIDTH = 64
SEED_ENV = "LZCOMM_SEED"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0")) & _MASK64


class CoinStream:
    """splitmix64 over a 64-bit counter; bit-exact on every platform."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        z = (self.seed + self.counter * _GAMMA) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def advance(self, n: int) -> "CoinStream":
        if n < 0:
            raise ValueError("cannot rewind a coin stream")
        self.counter += n
        return self


def draw_base(coins: CoinStream) -> int:
    """Uniform field element in ``[2, MODULUS - 2]`` by rejection on 61-bit draws."""
    span = MODULUS - 3
    while True:
        v = coins.next_u64() >> 3
        if v < span:
            return v + 2


def advance(coins: CoinStream, n: int) -> CoinStream:
    return coins.advance(n)


@dataclass(frozen=True)
class FingerprintScheme:
    base: int
    width: int = DEFAULT_WIDTH
    modulus: int = MODULUS

    def __post_init__(self):
        if not 2 <= self.base <= self.modulus - 2:
            raise ValueError(f"base {self.base} outside [2, modulus-2]")
        if self.width < 1:
            raise ValueError("fingerprint width must be positive")

    @classmethod
    def from_coins(cls, coins: CoinStream, width: int = DEFAULT_WIDTH) -> "FingerprintScheme":
        return cls(draw_base(coins), width)

    def truncate(self, value: int) -> int:
        """The ``width`` low bits that actually go over the wire."""
        return value if self.width >= 61 else value & ((1 << self.width) - 1)

    def prefix_table(self, elems: np.ndarray) -> np.ndarray:
        """Fingerprints of every prefix of a factor sequence (``table[k]`` covers k factors)."""
        elems = np.ascontiguousarray(elems, dtype=np.uint64)
        return _backend.kernels.poly_prefix_table(elems, self.base, 3)

    def collision_bound(self, k: int) -> float:
        bound = 3 * k / (self.modulus - 3)
        if self.width < 61:
            bound += 2.0 ** -self.width
        return min(1.0, bound)


def encode_factors(sources, lengths, lasts) -> np.ndarray:
    """Interleave ``source+1, length+1, last+1`` into one ``uint64`` vector."""
    k = len(lengths)
    out = np.empty(3 * k, dtype=np.uint64)
    out[0::3] = np.asarray(sources, dtype=np.uint64) + 1
    out[1::3] = np.asarray(lengths, dtype=np.uint64) + 1
    out[2::3] = np.asarray(lasts, dtype=np.uint64) + 1
    return out


def fp_of_prefix(seq, k: int, scheme: FingerprintScheme) -> int:
    """Fingerprint of the first ``k`` factors of ``seq`` (a Factorization or triple list)."""
    if hasattr(seq, "sources"):
        elems = encode_factors(seq.sources, seq.lengths, seq.lasts)
    else:
        triples = np.asarray(list(seq), dtype=np.uint64).reshape(-1, 3)
        elems = encode_factors(triples[:, 0], triples[:, 1], triples[:, 2])
    if not 0 <= k <= len(elems) // 3:
        raise ValueError(f"prefix length {k} out of range [0, {len(elems) // 3}]")
    return int(scheme.prefix_table(elems[: 3 * k])[k])
