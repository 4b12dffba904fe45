"""Symbol strings: read-only ``uint32`` arrays shared by texts and integer strings."""

from __future__ import annotations

import numpy as np

SYMBOL_DTYPE = np.uint32

# Reserved ids, never produced by ingestion.
SENTINEL_HASH = 0xFFFFFFFE  # '#'
SENTINEL_DOLLAR = 0xFFFFFFFF  # '$'
RESERVED = (SENTINEL_HASH, SENTINEL_DOLLAR)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=SYMBOL_DTYPE)
    arr.flags.writeable = False
    return arr


def as_symbols(value) -> np.ndarray:
    """Coerce a ``str``, a sequence of ints, or an array to a symbol string.

    Strings map each character to its code point.
    """
    if isinstance(value, np.ndarray) and value.dtype == SYMBOL_DTYPE and not value.flags.writeable:
        return value
    if isinstance(value, str):
        return from_text(value)
    arr = np.asarray(value)
    if arr.size == 0:
        return _freeze(np.zeros(0, dtype=SYMBOL_DTYPE))
    if arr.ndim != 1:
        raise ValueError("symbol string must be one-dimensional")
    if arr.dtype.kind not in "iu":
        raise TypeError(f"symbols must be integers, got {arr.dtype}")
    if arr.min() < 0 or arr.max() > 0xFFFFFFFF:
        raise ValueError("symbol ids must fit in 32 bits")
    return _freeze(arr)


def from_text(text: str) -> np.ndarray:
    return _freeze(np.frombuffer(text.encode("utf-32-le"), dtype="<u4"))


def from_ints(text: str) -> np.ndarray:
    """Parse whitespace-separated decimal ids."""
    values = [int(tok) for tok in text.split()]
    if any(v < 0 or v >= SENTINEL_HASH for v in values):
        raise ValueError("integer symbols must lie in [0, 2**32 - 2)")
    return _freeze(np.array(values, dtype=np.int64))


def to_text(s) -> str:
    out = []
    for v in np.asarray(s).tolist():
        if v == SENTINEL_HASH:
            out.append("#")
        elif v == SENTINEL_DOLLAR:
            out.append("$")
        else:
            out.append(chr(v))
    return "".join(out)


def to_ints(s) -> str:
    return " ".join(str(v) for v in np.asarray(s).tolist())


def parse(text: str, fmt: str = "text") -> np.ndarray:
    if fmt == "text":
        return from_text(text)
    if fmt == "ints":
        return from_ints(text)
    raise ValueError(f"unknown format {fmt!r}")


def render(s, fmt: str = "text") -> str:
    return to_text(s) if fmt == "text" else to_ints(s)


def alphabet_bound(*strings) -> int:
    """Smallest sigma with every non-reserved symbol below it."""
    sigma = 0
    for s in strings:
        s = as_symbols(s)
        plain = s[(s != SENTINEL_HASH) & (s != SENTINEL_DOLLAR)]
        if plain.size:
            sigma = max(sigma, int(plain.max()) + 1)
    return sigma


def lcp(x, y) -> int:
    """Length of the longest common prefix."""
    x, y = as_symbols(x), as_symbols(y)
    m = min(len(x), len(y))
    diff = np.flatnonzero(x[:m] != y[:m])
    return int(diff[0]) if diff.size else m


def hamming_oracle(x, y) -> tuple[int, list[int]]:
    """Positionwise scan; returns the distance and 1-based mismatch positions."""
    x, y = as_symbols(x), as_symbols(y)
    if len(x) != len(y):
        raise ValueError(f"Hamming distance needs equal lengths, got {len(x)} and {len(y)}")
    positions = (np.flatnonzero(x != y) + 1).tolist()
    return len(positions), positions


def wrap_sentinels(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Frame ``a`` as ``#a$`` and ``b`` as ``$b#`` so both ends mismatch."""
    a, b = as_symbols(a), as_symbols(b)
    wa = np.concatenate(([SENTINEL_HASH], a, [SENTINEL_DOLLAR]))
    wb = np.concatenate(([SENTINEL_DOLLAR], b, [SENTINEL_HASH]))
    return _freeze(wa), _freeze(wb)
