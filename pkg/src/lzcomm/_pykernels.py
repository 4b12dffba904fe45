"""Pure-Python versions of the compiled kernels (same signatures, same output)."""

import numpy as np

NAME = "python"

MERSENNE61 = (1 << 61) - 1


def lzn_factorize(codes, longest_prefix_only=False):
    """Non-overlapping greedy parse driven by an online suffix automaton.

    The automaton always holds exactly the text before the current factor,
    so every match it reports is a non-overlapping previous occurrence and
    ``firstpos - L + 1`` is the leftmost one.
    """
    codes = codes.tolist() if hasattr(codes, "tolist") else list(codes)
    n = len(codes)
    nxt = [{}]
    link = [-1]
    length = [0]
    firstpos = [-1]
    last = 0

    def extend(c, pos):
        nonlocal last
        cur = len(nxt)
        nxt.append({})
        link.append(0)
        length.append(length[last] + 1)
        firstpos.append(pos)
        p = last
        while p != -1 and c not in nxt[p]:
            nxt[p][c] = cur
            p = link[p]
        if p != -1:
            q = nxt[p][c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(nxt)
                nxt.append(dict(nxt[q]))
                link.append(link[q])
                length.append(length[p] + 1)
                firstpos.append(firstpos[q])
                while p != -1 and nxt[p].get(c) == q:
                    nxt[p][c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur

    sources, lengths = [], []
    truncated = False
    u = 0
    while u < n:
        st, L = 0, 0
        while u + L < n:
            st2 = nxt[st].get(codes[u + L])
            if st2 is None:
                break
            st = st2
            L += 1
        if L == 0:
            sources.append(0)
            take = 1
        else:
            sources.append(firstpos[st] - L + 2)
            if longest_prefix_only:
                take = L
            elif u + L == n:
                take = L
                truncated = True
            else:
                take = L + 1
        lengths.append(take)
        for k in range(u, u + take):
            extend(codes[k], k)
        u += take
    return np.array(sources, dtype=np.int64), np.array(lengths, dtype=np.int64), truncated


def suffix_sizes(codes, starts, longest_prefix_only=False):
    """Factor counts of ``codes[s:]`` for every ``s`` in ``starts`` (0-based)."""
    codes = codes.tolist() if hasattr(codes, "tolist") else list(codes)
    n = len(codes)
    out = []
    for s in (starts.tolist() if hasattr(starts, "tolist") else starts):
        if not 0 <= s <= n:
            raise IndexError(f"suffix start {s} outside [0, {n}]")
        out.append(len(lzn_factorize(codes[s:], longest_prefix_only)[1]))
    return np.array(out, dtype=np.int64)


def lzs_factorize(codes, sa):
    """Self-referencing greedy parse by narrowing suffix-array intervals."""
    codes = codes.tolist() if hasattr(codes, "tolist") else list(codes)
    sa = sa.tolist() if hasattr(sa, "tolist") else list(sa)
    n = len(codes)
    sources, lengths = [], []
    truncated = False
    if n == 0:
        return np.array(sources, dtype=np.int64), np.array(lengths, dtype=np.int64), False

    # sparse table of suffix-array minima
    table = [sa]
    j = 1
    while (1 << j) <= n:
        prev = table[-1]
        half = 1 << (j - 1)
        table.append([min(prev[i], prev[i + half]) for i in range(n - (1 << j) + 1)])
        j += 1

    def range_min(lo, hi):
        lvl = (hi - lo).bit_length() - 1
        row = table[lvl]
        return min(row[lo], row[hi - (1 << lvl)])

    def key(idx, depth):
        p = sa[idx] + depth
        return codes[p] if p < n else -1

    u = 0
    while u < n:
        lo, hi, L, best = 0, n, 0, -1
        while u + L < n:
            c = codes[u + L]
            a, b = lo, hi
            while a < b:
                mid = (a + b) >> 1
                if key(mid, L) < c:
                    a = mid + 1
                else:
                    b = mid
            nlo = a
            b = hi
            while a < b:
                mid = (a + b) >> 1
                if key(mid, L) <= c:
                    a = mid + 1
                else:
                    b = mid
            nhi = a
            if nlo >= nhi:
                break
            mn = range_min(nlo, nhi)
            if mn >= u:
                break
            lo, hi, best = nlo, nhi, mn
            L += 1
        if L == 0:
            sources.append(0)
            lengths.append(1)
            u += 1
        elif u + L == n:
            sources.append(best + 1)
            lengths.append(L)
            truncated = True
            u = n
        else:
            sources.append(best + 1)
            lengths.append(L + 1)
            u += L + 1
    return np.array(sources, dtype=np.int64), np.array(lengths, dtype=np.int64), truncated


def poly_prefix_table(elems, base, group):
    """``out[k] = sum(elems[j] * base**(j+1) for j < group*k) mod 2**61-1``."""
    elems = elems.tolist() if hasattr(elems, "tolist") else list(elems)
    m = len(elems) // group
    out = [0] * (m + 1)
    acc, power = 0, 1
    for k in range(m):
        for j in range(k * group, (k + 1) * group):
            power = power * base % MERSENNE61
            acc = (acc + (elems[j] % MERSENNE61) * power) % MERSENNE61
        out[k + 1] = acc
    return np.array(out, dtype=np.uint64)
