"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 1024,4096,16384] [--repeat 3]

Both backends get identical inputs; their outputs are compared before any
timing is reported.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from lzcomm import _backend, _pykernels

try:
    from lzcomm import _kernels
except ImportError:
    _kernels = None


def _inputs(n: int, sigma: int, seed: int):
    rng = np.random.default_rng(seed)
    codes = _backend.dense_codes(rng.integers(0, sigma, size=n).astype(np.uint32))
    sa = _backend.suffix_array(codes)
    elems = rng.integers(1, 1 << 40, size=3 * max(1, n // 8)).astype(np.uint64)
    return codes, sa, elems


def _cases(codes, sa, elems):
    starts = np.arange(0, len(codes) + 1, max(1, len(codes) // 16), dtype=np.int64)
    base = 0x1234567
    return {
        "lzn": lambda k: k.lzn_factorize(codes, False),
        "cn": lambda k: k.lzn_factorize(codes, True),
        "lzs": lambda k: k.lzs_factorize(codes, sa),
        "suffix_sizes": lambda k: k.suffix_sizes(codes, starts, False),
        "fingerprints": lambda k: k.poly_prefix_table(elems, base, 3),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1024,4096,16384")
    parser.add_argument("--sigma", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the Python backend is available")
        return 1
    print(f"{'kernel':<14}{'n':>8}{'cython ms':>12}{'python ms':>12}{'speedup':>10}")
    for n in (int(x) for x in args.sizes.split(",")):
        cases = _cases(*_inputs(n, args.sigma, args.seed))
        for name, run in cases.items():
            if not _same(run(_kernels), run(_pykernels)):
                print(f"{name:<14}{n:>8}  OUTPUT MISMATCH")
                return 2
            fast = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat))
            slow = min(timeit.repeat(lambda: run(_pykernels), number=1, repeat=args.repeat))
            print(f"{name:<14}{n:>8}{fast * 1e3:>12.3f}{slow * 1e3:>12.3f}{slow / fast:>10.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
