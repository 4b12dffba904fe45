"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``LZCOMM_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from lzcomm import _pykernels

kernels = _pykernels
if not os.environ.get("LZCOMM_PURE_PYTHON"):
    try:
        from lzcomm import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

BACKEND = kernels.NAME

_TABLE_LIMIT = 1 << 20  # below this, rank symbols through a lookup table


def dense_codes(symbols):
    """Map symbol ids to ``0..k-1`` preserving order; returns contiguous int32."""
    symbols = np.asarray(symbols)
    if len(symbols) == 0:
        return np.zeros(0, dtype=np.int32)
    big = symbols >= _TABLE_LIMIT
    small = symbols if not big.any() else np.where(big, 0, symbols)
    present = np.zeros(int(small.max()) + 1, dtype=np.int32)
    present[small[~big]] = 1
    rank = np.cumsum(present, dtype=np.int32) - 1
    codes = rank[small]
    if big.any():
        # large ids (sentinels, wide alphabets) rank after every small one
        _, inverse = np.unique(symbols[big], return_inverse=True)
        codes[big] = int(present.sum()) + inverse.reshape(-1)
    return np.ascontiguousarray(codes, dtype=np.int32)


def suffix_array(codes):
    """Prefix-doubling suffix array; shorter suffixes sort first on ties."""
    n = len(codes)
    if n == 0:
        return np.zeros(0, dtype=np.int32)
    rank = np.asarray(codes, dtype=np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        order = np.lexsort((second, rank))
        r, s = rank[order], second[order]
        boundary = np.empty(n, dtype=bool)
        boundary[0] = True
        boundary[1:] = (r[1:] != r[:-1]) | (s[1:] != s[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[order] = np.cumsum(boundary) - 1
        rank = new_rank
        if boundary.all():
            return np.ascontiguousarray(order, dtype=np.int32)
        k <<= 1
