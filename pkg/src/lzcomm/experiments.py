"""Generators, suffix scans and protocol benchmarks that emit CSV rows.

Every routine is deterministic given its parameters and seed; rows come out
sorted by their natural key.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from lzcomm import avl
from lzcomm.constants import CONSTANTS, GrammarConstants, log_ceil
from lzcomm.factorize import Mode, factorize_lzn, suffix_sizes
from lzcomm.protocol import ProtocolConfig, hamming_protocol, lcp_protocol
from lzcomm.symbols import SYMBOL_DTYPE, as_symbols, hamming_oracle, lcp


# -- lower-bound family -------------------------------------------------------

@dataclass(frozen=True)
class FamilyParams:
    sigma: int
    h: int = 1

    def __post_init__(self):
        if self.sigma < 4 or self.sigma % 2:
            raise ValueError(f"sigma must be even and at least 4, got {self.sigma}")
        if not 1 <= self.h <= self.sigma:
            raise ValueError(f"run length h must lie in [1, sigma], got {self.h}")


def gen_family(sigma: int, h: int = 1) -> np.ndarray:
    """``(0 1 .. sigma)`` then ``(0 1 .. 2k, 2k+2)`` for ``k = 1 .. sigma/2 - 1``; each 0 becomes ``0^h``."""
    p = FamilyParams(sigma, h)
    zeros = [0] * p.h
    out = zeros + list(range(1, p.sigma + 1))
    for k in range(1, p.sigma // 2):
        out += zeros + list(range(1, 2 * k + 1)) + [2 * k + 2]
    return np.asarray(out, dtype=SYMBOL_DTYPE)


def family_length(sigma: int, h: int = 1) -> int:
    """Closed form of ``len(gen_family(sigma, h))``."""
    half = sigma // 2
    return (sigma + 1) + sum(2 * k + 2 for k in range(1, half)) + (h - 1) * half


def verify_lower_bound(sigmas: Iterable[int]) -> list[dict]:
    """Check ``zn(S) = 3σ/2`` and ``zn(S[2..]) = 2σ-2``; mismatches become ``ok=False`` rows."""
    rows = []
    for sigma in sorted(set(sigmas)):
        s = gen_family(sigma)
        zn, zn_suffix = suffix_sizes(s, [0, 1]).tolist()
        expect_zn, expect_suffix = 3 * sigma // 2, 2 * sigma - 2
        rows.append({
            "sigma": sigma,
            "n": len(s),
            "zn": zn,
            "zn_suffix": zn_suffix,
            "ratio": zn_suffix / zn,
            "ratio_exact": str(Fraction(zn_suffix, zn)),
            "expected_zn": expect_zn,
            "expected_zn_suffix": expect_suffix,
            "ok": zn == expect_zn and zn_suffix == expect_suffix,
        })
    return rows


def ratio_floor(sigma: int) -> float:
    """``(2σ-2) / (3σ/2) = 4/3 - 4/(3σ)``."""
    return 4 / 3 - 4 / (3 * sigma)


def verify_run_variant(sigmas: Iterable[int], hs=None) -> list[dict]:
    """Ratio ``zn(S[h+1..]) / zn(S)`` when every 0 of the family becomes ``0^h``.

    ``hs`` maps σ to the run lengths to try; by default ``{2, σ/2, σ}``.
    """
    rows = []
    for sigma in sorted(set(sigmas)):
        choices = sorted(set(hs(sigma) if hs else (2, sigma // 2, sigma)))
        for h in choices:
            s = gen_family(sigma, h)
            zn, zn_suffix = suffix_sizes(s, [0, h]).tolist()
            floor = ratio_floor(sigma)
            rows.append({
                "sigma": sigma,
                "h": h,
                "n": len(s),
                "zn": zn,
                "zn_suffix": zn_suffix,
                "ratio": zn_suffix / zn,
                "floor": floor,
                "ok": zn_suffix / zn >= floor,
            })
    return rows


# -- suffix scans -------------------------------------------------------------

def all_strings(alphabet: int, max_len: int, min_len: int = 1) -> Iterator[np.ndarray]:
    """Every string over ``0..alphabet-1`` with length in ``[min_len, max_len]``."""
    for n in range(min_len, max_len + 1):
        for t in itertools.product(range(alphabet), repeat=n):
            yield np.asarray(t, dtype=SYMBOL_DTYPE)


def random_strings(count: int, max_len: int, alphabets=(2, 4, 8), seed: int = 0,
                   min_len: int = 1) -> Iterator[np.ndarray]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(min_len, max_len + 1))
        sigma = int(rng.choice(alphabets))
        yield rng.integers(0, sigma, size=n, dtype=np.int64).astype(SYMBOL_DTYPE)


@dataclass
class ZetaScanReport:
    mode: Mode
    rows: list[dict] = field(default_factory=list)
    strings: int = 0
    witnesses: int = 0  # strings with some suffix ratio > 1
    bound_violations: int = 0

    @property
    def max_row(self) -> dict | None:
        return max(self.rows, key=lambda r: (r["ratio"], -r["n"]), default=None)

    @property
    def max_ratio(self) -> float:
        row = self.max_row
        return row["ratio"] if row else 0.0


def zeta_scan(strings: Iterable, mode="LZN", with_zs: bool = False,
              constants: GrammarConstants = CONSTANTS, labels: Iterable[str] | None = None) -> ZetaScanReport:
    """For each string, the suffix with the largest ``z(S[i..]) / z(S)`` over ``1 < i <= n``.

    One row per string; ties keep the smallest ``i``. With ``with_zs`` the
    self-referencing counts of the same suffix are reported alongside.
    """
    mode = Mode(mode)
    if mode is Mode.CN:
        raise ValueError("zeta scans use LZN or LZS")
    report = ZetaScanReport(mode)
    labels = iter(labels) if labels is not None else None
    for s in strings:
        s = as_symbols(s)
        n = len(s)
        label = next(labels) if labels is not None else ""
        if n < 2:
            continue
        sizes = suffix_sizes(s, None, mode)[:n]
        whole = int(sizes[0])
        best = 1 + int(np.argmax(sizes[1:]))
        ratio = float(sizes[best] / whole)
        row = {"label": label, "n": n, "i": best + 1, "z": whole, "z_suffix": int(sizes[best]),
               "ratio": ratio, "bound": constants.zeta_bound(n)}
        if with_zs:
            zs = suffix_sizes(s, [0, best], Mode.LZS).tolist()
            row["zs"], row["zs_suffix"] = zs
            row["zs_ratio"] = zs[1] / zs[0]
        report.rows.append(row)
        report.strings += 1
        report.witnesses += ratio > 1
        report.bound_violations += ratio > row["bound"]
    report.rows.sort(key=lambda r: (r["n"], r["label"], -r["ratio"]))
    return report


# -- grammar chain -------------------------------------------------------------

@dataclass
class ChainReport:
    rows: list[dict] = field(default_factory=list)
    strings: int = 0
    chain_violations: int = 0
    balance_violations: list[str] = field(default_factory=list)
    worst_build: float = 0.0
    worst_split: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.chain_violations and not self.balance_violations


def _sample_positions(n: int, samples: int, rng: random.Random) -> list[int]:
    candidates = range(2, n + 1)
    if len(candidates) <= samples:
        return list(candidates)
    return sorted(rng.sample(candidates, samples))


def avl_chain_scan(strings: Iterable, samples: int = 50, seed: int = 0, keep_rows: bool = True,
                   constants: GrammarConstants = CONSTANTS) -> ChainReport:
    """Check ``zn(S') <= cn(S') <= avl(S')`` for sampled suffixes ``S' = S[i..]``.

    Every production minted along the way is validated exactly once, so the
    balance check covers the result of every build and split.
    """
    rng = random.Random(seed)
    report = ChainReport()
    for s in strings:
        s = as_symbols(s)
        n = len(s)
        if n == 0:
            continue
        pool = avl.Pool()
        g = avl.build(s, pool)
        report.balance_violations += avl.validate_pool(pool, 0)
        watermark = len(pool)
        whole = g.size
        cn_whole = int(suffix_sizes(s, [0], Mode.CN)[0])
        report.worst_build = max(report.worst_build,
                                 whole / (cn_whole * math.ceil(math.log2(n + 1))))
        positions = _sample_positions(n, samples, rng)
        starts = np.asarray(positions, dtype=np.int64) - 1
        zn = suffix_sizes(s, starts, Mode.LZN).tolist()
        cn = suffix_sizes(s, starts, Mode.CN).tolist()
        for i, z, c in zip(positions, zn, cn):
            prefix, suffix = avl.split(g, i)
            report.balance_violations += avl.validate_pool(pool, watermark)
            watermark = len(pool)
            for part in (prefix, suffix):
                if not part.is_empty and part.height > avl.avl_height_bound(part.length):
                    report.balance_violations.append(
                        f"n={n} i={i}: height {part.height} over the AVL bound")
            size = suffix.size
            growth = (size - whole) / log_ceil(n)
            report.worst_split = max(report.worst_split, growth)
            ok = z <= c <= size
            report.chain_violations += not ok
            if keep_rows:
                report.rows.append({"n": n, "i": i, "zn_suffix": z, "cn_suffix": c,
                                    "avl_suffix": size, "avl": whole, "growth": growth,
                                    "c_split": constants.c_split, "ok": ok})
        report.strings += 1
    return report


# -- protocol benchmark ------------------------------------------------------------

def random_text(rng: np.random.Generator, n: int, sigma: int) -> np.ndarray:
    return rng.integers(0, sigma, size=n, dtype=np.int64).astype(SYMBOL_DTYPE)


def plant_mismatches(rng: np.random.Generator, a: np.ndarray, d: int, sigma: int) -> np.ndarray:
    """Copy of ``a`` differing in exactly ``d`` random positions."""
    b = np.array(a, dtype=SYMBOL_DTYPE)
    if d == 0:
        return b
    positions = rng.choice(len(a), size=d, replace=False)
    shift = rng.integers(1, max(sigma, 2), size=d)
    b[positions] = (b[positions].astype(np.int64) + shift) % max(sigma, 2)
    return b


def diverging_pair(rng: np.random.Generator, n_max: int, sigma: int):
    """Two strings sharing a random-length prefix, then differing (or one ending)."""
    n = int(rng.integers(1, n_max + 1))
    a = random_text(rng, n, sigma)
    p = int(rng.integers(0, n + 1))
    tail_len = int(rng.integers(0, n_max - p + 1))
    tail = random_text(rng, tail_len, sigma)
    if p < n and tail_len:
        tail[0] = (int(a[p]) + 1 + int(rng.integers(0, sigma - 1))) % sigma
    return a, np.concatenate([a[:p], tail]).astype(SYMBOL_DTYPE)


def lcp_round_bound(k: int) -> int:
    return 4 * math.ceil(math.log2(k + 2)) + 2


def hamming_round_bound(suffix_sizes_: Iterable[int]) -> int:
    return sum(4 * math.ceil(math.log2(z + 2)) + 2 for z in suffix_sizes_)


def protocol_bench(n: int = 1 << 14, ds=(0, 1, 2, 5, 16, 32), trials: int = 10, sigma: int = 4,
                   seed: int = 0, width: int = 64, family_sigma: int | None = None) -> dict:
    """Hamming runs on planted-mismatch pairs; rows plus a least-squares slope.

    The slope is of rounds against ``sum_k log2(zn(suffix_k) + 2)`` over all
    rows and is reported only.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for d in ds:
        for t in range(trials):
            if family_sigma:
                base = gen_family(family_sigma)
                a = np.resize(base, n).astype(SYMBOL_DTYPE)
                alph = family_sigma + 1
            else:
                a = random_text(rng, n, sigma)
                alph = sigma
            b = plant_mismatches(rng, a, d, alph)
            cfg = ProtocolConfig(seed=seed * 1_000_003 + t, width=width)
            out = hamming_protocol(factorize_lzn(a), factorize_lzn(b), cfg)
            truth, positions = hamming_oracle(a, b)
            errors = int(out.distance != truth or out.mismatch_positions != positions)
            log_sum = sum(math.log2(z + 2) for z in out.suffix_factor_counts)
            rows.append({
                "n": n, "z": int(out.suffix_factor_counts[0]) if out.suffix_factor_counts else 0,
                "d": d, "l_max": out.gap_max, "rounds": out.rounds, "bits": out.bits,
                "errors": errors, "lcp_invocations": out.lcp_invocations,
                "round_bound": hamming_round_bound(out.suffix_factor_counts),
                "log_sum": log_sum, "trial": t,
            })
    rows.sort(key=lambda r: (r["d"], r["trial"]))
    x = np.array([r["log_sum"] for r in rows])
    y = np.array([r["rounds"] for r in rows])
    slope, intercept = (np.polyfit(x, y, 1).tolist() if len(rows) > 1 and np.ptp(x) > 0
                        else (float("nan"), float("nan")))
    return {"rows": rows, "slope": slope, "intercept": intercept}


def lcp_bench(trials: int = 100, n_max: int = 1 << 10, sigma: int = 4, seed: int = 0,
              width: int = 64) -> list[dict]:
    """LCP runs on diverging pairs, with the oracle answer and the round bound."""
    rng = np.random.default_rng(seed)
    rows = []
    for t in range(trials):
        a, b = diverging_pair(rng, n_max, sigma)
        out = lcp_protocol(factorize_lzn(a), factorize_lzn(b),
                           ProtocolConfig(seed=seed * 1_000_003 + t, width=width))
        truth = lcp(a, b)
        rows.append({"trial": t, "n_a": len(a), "n_b": len(b), "lcp": out.lcp_length,
                     "oracle": truth, "k": out.matching_factor_count, "z_ell": out.z_ell,
                     "rounds": out.rounds, "bits": out.bits,
                     "round_bound": lcp_round_bound(out.matching_factor_count),
                     "errors": int(out.lcp_length != truth)})
    return rows


# -- output ---------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return f"{v:.6f}"
    return v


def to_csv(rows: list[dict], fieldnames: list[str] | None = None) -> str:
    buf = io.StringIO()
    if not rows and not fieldnames:
        return ""
    fieldnames = fieldnames or list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k, "")) for k in fieldnames})
    return buf.getvalue()
