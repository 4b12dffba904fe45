"""Measured grammar constants pinned in ``constants.json``.

They were taken as the worst ratios seen over the regression corpus and
rounded up; the test-suite fails if a change pushes any ratio past them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class GrammarConstants:
    c_build: float  # size <= c_build * cn * ceil(log2(n+1))
    c_cat: float  # size growth of concat <= c_cat * (1 + max height)
    c_split: float  # suffix size growth <= c_split * ceil(log2 n)

    def build_bound(self, cn: int, n: int) -> float:
        return self.c_build * cn * math.ceil(math.log2(n + 1))

    def concat_bound(self, size1: int, size2: int, h1: int, h2: int) -> float:
        return size1 + size2 + self.c_cat * (1 + max(h1, h2))

    def split_bound(self, size: int, n: int) -> float:
        return size + self.c_split * log_ceil(n)

    def zeta_bound(self, n: int) -> float:
        """Ceiling on ``zn(S[i..]) / zn(S)`` implied by the grammar chain.

        ``zn(S') <= avl(S') <= avl(S) + c_split*L <= c_build*cn(S)*L' + c_split*L``
        with ``cn <= 2 zn`` and ``zn >= 1``.
        """
        return 2 * self.c_build * math.ceil(math.log2(n + 1)) + self.c_split * log_ceil(n)


def log_ceil(n: int) -> int:
    """``ceil(log2 n)``, floored at 1 so it can divide."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def load() -> GrammarConstants:
    data = json.loads(resources.files("lzcomm").joinpath("constants.json").read_text())
    return GrammarConstants(float(data["c_build"]), float(data["c_cat"]), float(data["c_split"]))


CONSTANTS = load()
