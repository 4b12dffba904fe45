"""Brute-force reference factorizers used to check the fast paths.

Nothing here touches the kernels: each factor is found by trying every
match length and scanning the allowed window for the pattern with
``str.find`` (leftmost hit).
"""

from __future__ import annotations

from lzcomm.factorize import Factorization, Mode
from lzcomm.symbols import as_symbols


def _as_str(s) -> tuple[str, list[int]]:
    symbols = as_symbols(s).tolist()
    rank = {v: i for i, v in enumerate(sorted(set(symbols)))}
    return "".join(chr(rank[v]) for v in symbols), symbols


def _longest_previous(t: str, u: int, overlap: bool) -> tuple[int, int]:
    best_len, best_src = 0, -1
    length = 1
    while u + length <= len(t):
        # occurrence must start before u; without overlap it must also end before u
        window_end = u + length - 1 if overlap else u
        j = t.find(t[u:u + length], 0, window_end)
        if j < 0:
            break
        best_len, best_src = length, j
        length += 1
    return best_len, best_src


def oracle_factorize(s, mode="LZN") -> Factorization:
    mode = Mode(mode)
    t, symbols = _as_str(s)
    n = len(t)
    factors = []
    truncated = False
    u = 0
    while u < n:
        L, j = _longest_previous(t, u, overlap=mode is Mode.LZS)
        if L == 0:
            factors.append((0, 1, symbols[u]))
            u += 1
        elif mode is Mode.CN:
            factors.append((j + 1, L, symbols[u + L - 1]))
            u += L
        elif u + L == n:
            factors.append((j + 1, L, symbols[n - 1]))
            truncated = True
            u = n
        else:
            factors.append((j + 1, L + 1, symbols[u + L]))
            u += L + 1
    return Factorization.from_factors(mode, factors, truncated)
