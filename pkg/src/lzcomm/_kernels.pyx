# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: greedy factorizers and polynomial prefix hashing.

Every function here has a line-for-line counterpart in ``_pykernels`` with
the same signature and output; ``lzcomm._backend`` picks one at import.
Inputs are dense symbol codes (``int32``, values ``0..k-1``).
"""

from libc.stdlib cimport free, malloc

import numpy as np

NAME = "cython"

ctypedef unsigned long long u64

cdef extern from *:
    """
    static inline unsigned long long lzc_mulmod61(unsigned long long a, unsigned long long b) {
        const unsigned long long p = (1ULL << 61) - 1;
        unsigned __int128 r = (unsigned __int128)a * b;
        unsigned long long s = (unsigned long long)(r & p) + (unsigned long long)(r >> 61);
        return s >= p ? s - p : s;
    }
    """
    u64 lzc_mulmod61(u64 a, u64 b) noexcept nogil

cdef u64 MERSENNE61 = (1ULL << 61) - 1


cdef struct SAM:
    int *length
    int *link
    int *firstpos
    int *head
    int *esym
    int *eto
    int *enext
    int *dense  # k transitions per state when the alphabet is small, else NULL
    int k
    int nstates
    int nedges
    int last


# alphabets up to this size use a dense transition table
cdef enum:
    DENSE_ALPHABET = 32


cdef inline int sam_get(SAM *a, int p, int c) noexcept nogil:
    if a.dense != NULL:
        return a.dense[<Py_ssize_t>p * a.k + c]
    cdef int e = a.head[p]
    while e != -1:
        if a.esym[e] == c:
            return a.eto[e]
        e = a.enext[e]
    return -1


cdef inline void sam_set(SAM *a, int p, int c, int target) noexcept nogil:
    """Add or redirect the ``c`` transition of ``p``."""
    if a.dense != NULL:
        a.dense[<Py_ssize_t>p * a.k + c] = target
        return
    cdef int e = a.head[p]
    while e != -1:
        if a.esym[e] == c:
            a.eto[e] = target
            return
        e = a.enext[e]
    e = a.nedges
    a.nedges += 1
    a.esym[e] = c
    a.eto[e] = target
    a.enext[e] = a.head[p]
    a.head[p] = e


cdef inline void sam_new_state(SAM *a, int st) noexcept nogil:
    cdef int c
    a.head[st] = -1
    if a.dense != NULL:
        for c in range(a.k):
            a.dense[<Py_ssize_t>st * a.k + c] = -1


cdef inline void sam_copy_edges(SAM *a, int src, int dst) noexcept nogil:
    cdef int c, e
    if a.dense != NULL:
        for c in range(a.k):
            a.dense[<Py_ssize_t>dst * a.k + c] = a.dense[<Py_ssize_t>src * a.k + c]
        return
    e = a.head[src]
    while e != -1:
        sam_set(a, dst, a.esym[e], a.eto[e])
        e = a.enext[e]


cdef void sam_extend(SAM *a, int c, int pos) noexcept nogil:
    cdef int cur = a.nstates
    cdef int p, q, clone
    a.nstates += 1
    a.length[cur] = a.length[a.last] + 1
    a.firstpos[cur] = pos
    sam_new_state(a, cur)
    p = a.last
    while p != -1 and sam_get(a, p, c) == -1:
        sam_set(a, p, c, cur)
        p = a.link[p]
    if p == -1:
        a.link[cur] = 0
    else:
        q = sam_get(a, p, c)
        if a.length[p] + 1 == a.length[q]:
            a.link[cur] = q
        else:
            clone = a.nstates
            a.nstates += 1
            a.length[clone] = a.length[p] + 1
            a.link[clone] = a.link[q]
            a.firstpos[clone] = a.firstpos[q]
            sam_new_state(a, clone)
            sam_copy_edges(a, q, clone)
            while p != -1 and sam_get(a, p, c) == q:
                sam_set(a, p, c, clone)
                p = a.link[p]
            a.link[q] = clone
            a.link[cur] = clone
    a.last = cur


cdef int sam_alloc(SAM *a, Py_ssize_t n, int k) noexcept nogil:
    cdef Py_ssize_t cap_states = 2 * n + 2
    cdef Py_ssize_t cap_edges = 3 * n + 8
    a.k = k
    a.dense = NULL
    a.length = <int *>malloc(cap_states * sizeof(int))
    a.link = <int *>malloc(cap_states * sizeof(int))
    a.firstpos = <int *>malloc(cap_states * sizeof(int))
    a.head = <int *>malloc(cap_states * sizeof(int))
    if k <= DENSE_ALPHABET:
        a.esym = NULL
        a.eto = NULL
        a.enext = NULL
        a.dense = <int *>malloc(cap_states * k * sizeof(int))
        if a.length == NULL or a.link == NULL or a.firstpos == NULL or a.head == NULL \
                or a.dense == NULL:
            sam_free(a)
            return -1
        return 0
    a.esym = <int *>malloc(cap_edges * sizeof(int))
    a.eto = <int *>malloc(cap_edges * sizeof(int))
    a.enext = <int *>malloc(cap_edges * sizeof(int))
    if (a.length == NULL or a.link == NULL or a.firstpos == NULL or a.head == NULL
            or a.esym == NULL or a.eto == NULL or a.enext == NULL):
        sam_free(a)
        return -1
    return 0


cdef void sam_free(SAM *a) noexcept nogil:
    free(a.length); free(a.link); free(a.firstpos); free(a.head)
    free(a.esym); free(a.eto); free(a.enext); free(a.dense)
    a.length = NULL; a.link = NULL; a.firstpos = NULL; a.head = NULL
    a.esym = NULL; a.eto = NULL; a.enext = NULL; a.dense = NULL


cdef Py_ssize_t greedy_parse(SAM *a, const int *codes, Py_ssize_t n, bint longest_prefix_only,
                             long long *src, long long *lens, bint *truncated) noexcept nogil:
    """Parse ``codes[:n]``; ``src``/``lens`` may be NULL to only count factors."""
    cdef Py_ssize_t u = 0, L, k, nf = 0, take
    cdef int st, nxt
    a.nstates = 1
    a.nedges = 0
    a.last = 0
    a.length[0] = 0
    a.link[0] = -1
    a.firstpos[0] = -1
    sam_new_state(a, 0)
    truncated[0] = False
    while u < n:
        st = 0
        L = 0
        while u + L < n:
            nxt = sam_get(a, st, codes[u + L])
            if nxt == -1:
                break
            st = nxt
            L += 1
        if L == 0:
            take = 1
        elif longest_prefix_only:
            take = L
        elif u + L == n:
            take = L
            truncated[0] = True
        else:
            take = L + 1
        if src != NULL:
            src[nf] = 0 if L == 0 else a.firstpos[st] - L + 2
            lens[nf] = take
        nf += 1
        for k in range(u, u + take):
            sam_extend(a, codes[k], <int>k)
        u += take
    return nf


cdef int alphabet_size(const int[::1] codes) noexcept nogil:
    cdef int top = -1
    cdef Py_ssize_t i
    for i in range(codes.shape[0]):
        if codes[i] > top:
            top = codes[i]
    return top + 1


def lzn_factorize(const int[::1] codes, bint longest_prefix_only=False):
    """Non-overlapping greedy parse over ``codes``.

    Returns ``(sources, lengths, truncated)`` with 1-based sources (0 for a
    fresh letter). With ``longest_prefix_only`` the parse is the
    C-factorization: no symbol is appended after the match.
    """
    cdef Py_ssize_t n = codes.shape[0]
    cdef SAM a
    cdef Py_ssize_t nf = 0
    cdef bint truncated = False
    src_arr = np.empty(max(n, 1), dtype=np.int64)
    len_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef long long[::1] src = src_arr
    cdef long long[::1] lens = len_arr
    if n == 0:
        return src_arr[:0].copy(), len_arr[:0].copy(), False
    if sam_alloc(&a, n, alphabet_size(codes)) != 0:
        raise MemoryError()
    with nogil:
        nf = greedy_parse(&a, &codes[0], n, longest_prefix_only, &src[0], &lens[0], &truncated)
    sam_free(&a)
    return src_arr[:nf].copy(), len_arr[:nf].copy(), bool(truncated)


def suffix_sizes(const int[::1] codes, const long long[::1] starts, bint longest_prefix_only=False):
    """Factor counts of ``codes[s:]`` for every ``s`` in ``starts`` (0-based)."""
    cdef Py_ssize_t n = codes.shape[0], m = starts.shape[0], i, s
    cdef SAM a
    cdef bint truncated
    out_arr = np.zeros(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    if n == 0 or m == 0:
        return out_arr
    for i in range(m):
        if not 0 <= starts[i] <= n:
            raise IndexError(f"suffix start {starts[i]} outside [0, {n}]")
    if sam_alloc(&a, n, alphabet_size(codes)) != 0:
        raise MemoryError()
    with nogil:
        for i in range(m):
            s = starts[i]
            if s < n:
                out[i] = greedy_parse(&a, &codes[s], n - s, longest_prefix_only, NULL, NULL,
                                      &truncated)
    sam_free(&a)
    return out_arr


cdef inline int _key(const int[::1] codes, const int[::1] sa, Py_ssize_t n,
                     Py_ssize_t idx, Py_ssize_t depth) noexcept nogil:
    cdef Py_ssize_t p = sa[idx] + depth
    if p < n:
        return codes[p]
    return -1


def lzs_factorize(const int[::1] codes, const int[::1] sa):
    """Self-referencing greedy parse using suffix-array interval narrowing.

    ``sa`` is the suffix array of ``codes``. Returns the same triple layout
    as :func:`lzn_factorize`.
    """
    cdef Py_ssize_t n = codes.shape[0]
    cdef Py_ssize_t levels = 1, j, i, half
    cdef Py_ssize_t u = 0, L, lo, hi, nlo, nhi, a, b, mid, nf = 0, lvl
    cdef int c, mn, best, x, y
    cdef bint truncated = False
    cdef int *table
    src_arr = np.empty(n, dtype=np.int64)
    len_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] src = src_arr
    cdef long long[::1] lens = len_arr
    if n == 0:
        return src_arr, len_arr, False
    while (1 << levels) <= n:
        levels += 1
    table = <int *>malloc(levels * n * sizeof(int))
    if table == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                table[i] = sa[i]
            for j in range(1, levels):
                half = 1 << (j - 1)
                for i in range(n - (1 << j) + 1):
                    x = table[(j - 1) * n + i]
                    y = table[(j - 1) * n + i + half]
                    table[j * n + i] = x if x < y else y
            while u < n:
                lo = 0
                hi = n
                L = 0
                best = -1
                while u + L < n:
                    c = codes[u + L]
                    a = lo
                    b = hi
                    while a < b:
                        mid = (a + b) >> 1
                        if _key(codes, sa, n, mid, L) < c:
                            a = mid + 1
                        else:
                            b = mid
                    nlo = a
                    b = hi
                    while a < b:
                        mid = (a + b) >> 1
                        if _key(codes, sa, n, mid, L) <= c:
                            a = mid + 1
                        else:
                            b = mid
                    nhi = a
                    if nlo >= nhi:
                        break
                    lvl = 0
                    while (2 << lvl) <= nhi - nlo:
                        lvl += 1
                    x = table[lvl * n + nlo]
                    y = table[lvl * n + nhi - (1 << lvl)]
                    mn = x if x < y else y
                    if mn >= u:
                        break
                    lo = nlo
                    hi = nhi
                    best = mn
                    L += 1
                if L == 0:
                    src[nf] = 0
                    lens[nf] = 1
                    u += 1
                elif u + L == n:
                    src[nf] = best + 1
                    lens[nf] = L
                    truncated = True
                    u = n
                else:
                    src[nf] = best + 1
                    lens[nf] = L + 1
                    u += L + 1
                nf += 1
    finally:
        free(table)
    return src_arr[:nf].copy(), len_arr[:nf].copy(), bool(truncated)


def poly_prefix_table(const unsigned long long[::1] elems, unsigned long long base,
                      Py_ssize_t group):
    """``out[k] = sum(elems[j] * base**(j+1) for j < group*k) mod 2**61-1``."""
    cdef Py_ssize_t m = elems.shape[0] // group
    cdef Py_ssize_t k, j
    cdef u64 acc = 0, power = 1
    out_arr = np.zeros(m + 1, dtype=np.uint64)
    cdef u64[::1] out = out_arr
    with nogil:
        for k in range(m):
            for j in range(k * group, (k + 1) * group):
                power = lzc_mulmod61(power, base)
                acc += lzc_mulmod61(elems[j] % MERSENNE61, power)
                if acc >= MERSENNE61:
                    acc -= MERSENNE61
            out[k + 1] = acc
    return out_arr
