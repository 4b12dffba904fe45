"""LZ77-family factorizations, AVL-grammars and a two-party Hamming-distance protocol."""

from lzcomm._backend import BACKEND
from lzcomm.factorize import (
    Factor,
    Factorization,
    MalformedFactorization,
    Mode,
    decompress,
    factorize,
    factorize_cn,
    factorize_lzn,
    factorize_lzs,
    suffix_sizes,
)
from lzcomm.oracle import oracle_factorize
from lzcomm.symbols import as_symbols, hamming_oracle, lcp, wrap_sentinels

__all__ = [
    "BACKEND",
    "Factor",
    "Factorization",
    "MalformedFactorization",
    "Mode",
    "as_symbols",
    "decompress",
    "factorize",
    "factorize_cn",
    "factorize_lzn",
    "factorize_lzs",
    "hamming_oracle",
    "lcp",
    "oracle_factorize",
    "suffix_sizes",
    "wrap_sentinels",
]
