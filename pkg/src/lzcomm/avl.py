"""Height-balanced straight-line programs with concatenate and split.

Productions live in an append-only :class:`Pool` shared by every grammar
derived from it. Children always carry smaller ids than their parent, so
operations never disturb existing grammars: they only mint new ids.
Identical productions are hash-consed, and a grammar's size is the number
of productions reachable from its root.

Terminals have height 1; a binary production's height is one more than its
taller child, and the two children differ in height by at most one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from lzcomm.factorize import factorize_cn
from lzcomm.symbols import SYMBOL_DTYPE, as_symbols

EMPTY = -1


class GrammarError(ValueError):
    """Malformed grammar input or an out-of-range request."""


class Pool:
    """Append-only production store."""

    def __init__(self):
        self.sym: list[int] = []  # terminal symbol, or -1 for a binary production
        self.left: list[int] = []
        self.right: list[int] = []
        self.length: list[int] = []
        self.height: list[int] = []
        self._terms: dict[int, int] = {}
        self._pairs: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self.sym)

    def terminal(self, symbol: int) -> int:
        symbol = int(symbol)
        pid = self._terms.get(symbol)
        if pid is None:
            pid = len(self.sym)
            self.sym.append(symbol)
            self.left.append(EMPTY)
            self.right.append(EMPTY)
            self.length.append(1)
            self.height.append(1)
            self._terms[symbol] = pid
        return pid

    def pair(self, l: int, r: int) -> int:
        """Mint (or reuse) ``X -> l r``; balance is the caller's responsibility."""
        pid = self._pairs.get((l, r))
        if pid is None:
            pid = len(self.sym)
            self.sym.append(-1)
            self.left.append(l)
            self.right.append(r)
            self.length.append(self.length[l] + self.length[r])
            self.height.append(1 + max(self.height[l], self.height[r]))
            self._pairs[(l, r)] = pid
        return pid

    def h(self, t: int) -> int:
        return 0 if t == EMPTY else self.height[t]

    def size_of(self, t: int) -> int:
        return 0 if t == EMPTY else self.length[t]

    # -- balanced joins -------------------------------------------------
    def _rebalance(self, l: int, r: int) -> int:
        """Join two balanced trees whose heights differ by at most two."""
        hl, hr = self.height[l], self.height[r]
        if hr - hl == 2:
            rl, rr = self.left[r], self.right[r]
            if self.height[rr] >= self.height[rl]:
                return self.pair(self.pair(l, rl), rr)
            x, y = self.left[rl], self.right[rl]
            return self.pair(self.pair(l, x), self.pair(y, rr))
        if hl - hr == 2:
            ll, lr = self.left[l], self.right[l]
            if self.height[ll] >= self.height[lr]:
                return self.pair(ll, self.pair(lr, r))
            x, y = self.left[lr], self.right[lr]
            return self.pair(self.pair(ll, x), self.pair(y, r))
        return self.pair(l, r)

    def join(self, a: int, b: int) -> int:
        """Balanced tree expanding to ``expand(a) + expand(b)``."""
        if a == EMPTY:
            return b
        if b == EMPTY:
            return a
        ha, hb = self.height[a], self.height[b]
        if ha > hb + 1:
            return self._rebalance(self.left[a], self.join(self.right[a], b))
        if hb > ha + 1:
            return self._rebalance(self.join(a, self.left[b]), self.right[b])
        return self.pair(a, b)

    def split(self, t: int, i: int) -> tuple[int, int]:
        """Split after the first ``i`` symbols."""
        if i <= 0:
            return EMPTY, t
        if i >= self.size_of(t):
            return t, EMPTY
        l, r = self.left[t], self.right[t]
        ll = self.length[l]
        if i <= ll:
            a, b = self.split(l, i)
            return a, self.join(b, r)
        a, b = self.split(r, i - ll)
        return self.join(l, a), b

    def cover(self, t: int, i: int, j: int) -> int:
        """Balanced tree for the 0-based half-open range ``[i, j)`` of ``t``.

        The range is decomposed into maximal subtrees; pieces hanging off the
        left boundary grow in height left to right and those off the right
        boundary shrink, so each side is joined from its small end.
        """
        if i >= j:
            return EMPTY
        rising: list[int] = []
        falling: list[int] = []
        node, lo = t, 0
        # descend while the whole node is not inside the range and it is split by it
        while True:
            hi = lo + self.length[node]
            if i <= lo and hi <= j:
                rising.append(node)
                break
            l = self.left[node]
            mid = lo + self.length[l]
            if j <= mid:
                node = l
            elif i >= mid:
                node, lo = self.right[node], mid
            else:
                self._left_edge(l, lo, i, rising)
                self._right_edge(self.right[node], mid, j, falling)
                break
        acc = EMPTY
        for piece in rising:
            acc = self.join(acc, piece)
        tail = EMPTY
        for piece in reversed(falling):
            tail = self.join(piece, tail)
        return self.join(acc, tail)

    def _left_edge(self, node: int, lo: int, i: int, out: list[int]) -> None:
        # collect maximal subtrees of ``node`` covering [i, end), smallest first
        stack = []
        while lo < i:
            l = self.left[node]
            mid = lo + self.length[l]
            if i < mid:
                stack.append(self.right[node])
                node = l
            else:
                node, lo = self.right[node], mid
        stack.append(node)
        out.extend(reversed(stack))

    def _right_edge(self, node: int, lo: int, j: int, out: list[int]) -> None:
        # maximal subtrees of ``node`` covering [start, j), left to right
        while lo + self.length[node] > j:
            l = self.left[node]
            mid = lo + self.length[l]
            if j > mid:
                out.append(l)
                node, lo = self.right[node], mid
            else:
                node = l
        out.append(node)


@dataclass(frozen=True)
class AvlGrammar:
    """A root inside a shared pool; ``root == EMPTY`` is the empty marker."""

    pool: Pool = field(repr=False, compare=False)
    root: int

    @property
    def is_empty(self) -> bool:
        return self.root == EMPTY

    @property
    def length(self) -> int:
        return self.pool.size_of(self.root)

    @property
    def height(self) -> int:
        return self.pool.h(self.root)

    @property
    def size(self) -> int:
        return len(self.reachable())

    def reachable(self) -> set[int]:
        seen: set[int] = set()
        if self.root == EMPTY:
            return seen
        left, right = self.pool.left, self.pool.right
        stack = [self.root]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if left[v] != EMPTY:
                stack.append(left[v])
                stack.append(right[v])
        return seen

    def __len__(self) -> int:
        return self.length


def build(s, pool: Pool | None = None) -> AvlGrammar:
    """Fold the C-factorization of ``s`` into one balanced grammar."""
    s = as_symbols(s)
    if len(s) == 0:
        raise GrammarError("cannot build a grammar for the empty string")
    pool = Pool() if pool is None else pool
    f = factorize_cn(s)
    t = EMPTY
    for src, length, last in zip(f.sources.tolist(), f.lengths.tolist(), f.lasts.tolist()):
        if src == 0:
            piece = pool.terminal(last)
        else:
            piece = pool.cover(t, src - 1, src - 1 + length)
        t = pool.join(t, piece)
    return AvlGrammar(pool, t)


def _same_pool(g1: AvlGrammar, g2: AvlGrammar) -> tuple[Pool, int, int]:
    if g1.pool is g2.pool:
        return g1.pool, g1.root, g2.root
    # import the second grammar into the first pool
    return g1.pool, g1.root, _import(g1.pool, g2)


def _import(pool: Pool, g: AvlGrammar) -> int:
    if g.root == EMPTY:
        return EMPTY
    src = g.pool
    mapping: dict[int, int] = {}
    for v in sorted(g.reachable()):
        if src.left[v] == EMPTY:
            mapping[v] = pool.terminal(src.sym[v])
        else:
            mapping[v] = pool.pair(mapping[src.left[v]], mapping[src.right[v]])
    return mapping[g.root]


def concat(g1: AvlGrammar, g2: AvlGrammar) -> AvlGrammar:
    pool, a, b = _same_pool(g1, g2)
    return AvlGrammar(pool, pool.join(a, b))


def split(g: AvlGrammar, i: int) -> tuple[AvlGrammar, AvlGrammar]:
    """Prefix ``S[1..i-1]`` and suffix ``S[i..]`` (1-based ``i``)."""
    n = g.length
    if not 1 <= i <= n:
        raise GrammarError(f"split position {i} outside [1, {n}]")
    a, b = g.pool.split(g.root, i - 1)
    return AvlGrammar(g.pool, a), AvlGrammar(g.pool, b)


def expand(g: AvlGrammar) -> np.ndarray:
    if g.root == EMPTY:
        return np.zeros(0, dtype=SYMBOL_DTYPE)
    return expand_range(g, 1, g.length)


def expand_range(g: AvlGrammar, i: int, j: int) -> np.ndarray:
    """Symbols ``S[i..j]``, 1-based and inclusive."""
    n = g.length
    if not (1 <= i and j <= n and i <= j + 1):
        raise GrammarError(f"range [{i}, {j}] outside [1, {n}]")
    pool = g.pool
    out: list[int] = []
    lo0, hi0 = i - 1, j
    # iterative descent restricted to the requested window
    stack = [(g.root, 0)] if lo0 < hi0 else []
    while stack:
        v, lo = stack.pop()
        l = pool.left[v]
        if l == EMPTY:
            out.append(pool.sym[v])
            continue
        mid = lo + pool.length[l]
        hi = lo + pool.length[v]
        if mid < hi0 and hi > lo0:
            stack.append((pool.right[v], mid))
        if lo < hi0 and mid > lo0:
            stack.append((l, lo))
    return np.asarray(out, dtype=SYMBOL_DTYPE)


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]
    size: int
    height: int
    length: int

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "size": self.size,
                "height": self.height, "length": self.length}


def avl_height_bound(length: int) -> float:
    return 1.45 * math.log2(length + 2) + 2


def _check_production(pool: Pool, v: int) -> list[str]:
    l, r = pool.left[v], pool.right[v]
    if l == EMPTY:
        out = []
        if pool.length[v] != 1:
            out.append(f"production {v}: terminal with cached length {pool.length[v]}")
        if pool.height[v] != 1:
            out.append(f"production {v}: terminal with cached height {pool.height[v]}")
        return out
    if not (0 <= l < v and 0 <= r < v):
        return [f"production {v}: child id not older than parent (cycle risk)"]
    out = []
    if pool.length[v] != pool.length[l] + pool.length[r]:
        out.append(f"production {v}: cached length {pool.length[v]} != "
                   f"{pool.length[l]} + {pool.length[r]}")
    expected_h = 1 + max(pool.height[l], pool.height[r])
    if pool.height[v] != expected_h:
        out.append(f"production {v}: cached height {pool.height[v]} != {expected_h}")
    if abs(pool.height[l] - pool.height[r]) > 1:
        out.append(f"production {v}: unbalanced children (heights "
                   f"{pool.height[l]}, {pool.height[r]})")
    return out


def validate_pool(pool: Pool, start: int = 0) -> list[str]:
    """Check every production with id ``>= start``, reachable or not.

    Productions never change after minting, so a caller can validate each
    id once and advance ``start`` past it.
    """
    violations = []
    for v in range(start, len(pool)):
        violations.extend(_check_production(pool, v))
    return violations


def validate(g: AvlGrammar, trusted_below: int = 0) -> ValidationReport:
    """Recheck cached lengths and heights, balance, acyclicity and the height bound.

    Reachable productions with id below ``trusted_below`` are skipped; pass a
    watermark only if :func:`validate_pool` already covered every id under it.
    """
    pool = g.pool
    violations = []
    reach = g.reachable()
    for v in sorted(reach):
        if v >= trusted_below:
            violations.extend(_check_production(pool, v))
    if g.root != EMPTY and g.height > avl_height_bound(g.length):
        violations.append(f"root height {g.height} exceeds the AVL bound for length {g.length}")
    return ValidationReport(not violations, violations, len(reach), g.height, g.length)


def _postorder(pool: Pool, root: int) -> list[int]:
    """Distinct productions under ``root``, left child first, each after its children."""
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        v, expanded = stack.pop()
        if v in seen:
            continue
        if expanded or pool.left[v] == EMPTY:
            seen.add(v)
            order.append(v)
        else:
            stack += [(v, True), (pool.right[v], False), (pool.left[v], False)]
    return order


def dumps(g: AvlGrammar) -> str:
    """One production per line, numbered from 0 in left-first postorder.

    The numbering depends only on the grammar's shape, so equal grammars
    dump identically whatever pool they live in.
    """
    if g.root == EMPTY:
        return "root empty\n"
    pool = g.pool
    order = _postorder(pool, g.root)
    new = {v: k for k, v in enumerate(order)}
    lines = []
    for v in order:
        if pool.left[v] == EMPTY:
            lines.append(f"{new[v]} T {pool.sym[v]}")
        else:
            lines.append(f"{new[v]} B {new[pool.left[v]]} {new[pool.right[v]]}")
    lines.append(f"root {new[g.root]}")
    return "\n".join(lines) + "\n"


def loads(text: str, pool: Pool | None = None) -> AvlGrammar:
    """Parse a dump; structure errors raise, balance errors are left to :func:`validate`."""
    prods: dict[int, tuple] = {}
    root = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "root":
                root = EMPTY if parts[1] == "empty" else int(parts[1])
                continue
            pid, kind = int(parts[0]), parts[1]
            if pid in prods:
                raise GrammarError(f"line {lineno}: duplicate production id {pid}")
            if kind == "T" and len(parts) == 3:
                prods[pid] = (int(parts[2]),)
            elif kind == "B" and len(parts) == 4:
                prods[pid] = (int(parts[2]), int(parts[3]))
            else:
                raise GrammarError(f"line {lineno}: expected 'id T sym' or 'id B left right'")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, GrammarError):
                raise
            raise GrammarError(f"line {lineno}: cannot parse {raw!r}") from exc
    if root is None:
        raise GrammarError("missing root line")
    pool = Pool() if pool is None else pool
    if root == EMPTY:
        return AvlGrammar(pool, EMPTY)
    if root not in prods:
        raise GrammarError(f"root {root} is not a defined production")
    mapping: dict[int, int] = {}
    state: dict[int, int] = {}  # 1 = on the stack, 2 = done
    stack = [root]
    while stack:
        v = stack[-1]
        if v not in prods:
            raise GrammarError(f"reference to undefined production {v}")
        if state.get(v) == 2:
            stack.pop()
            continue
        body = prods[v]
        if len(body) == 1:
            mapping[v] = pool.terminal(body[0])
            state[v] = 2
            stack.pop()
            continue
        pending = [c for c in body if state.get(c) != 2]
        if not pending:
            mapping[v] = pool.pair(mapping[body[0]], mapping[body[1]])
            state[v] = 2
            stack.pop()
            continue
        if state.get(v) == 1:
            raise GrammarError(f"cycle through production {v}")
        state[v] = 1
        for c in reversed(pending):
            if state.get(c) == 1:
                raise GrammarError(f"cycle through production {c}")
            stack.append(c)
    return AvlGrammar(pool, mapping[root])
