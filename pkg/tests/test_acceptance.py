"""The acceptance gate: one test per criterion, each recording PASS or FAIL.

A summary with one line per criterion is printed at the end of the run.
Tolerances and time limits are the contract's; nothing here is loosened.
"""

import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE, EXAMPLE_STRING
from lzcomm import avl, factorize, factorize_cn, factorize_lzn, factorize_lzs, oracle_factorize
from lzcomm import experiments as E
from lzcomm.constants import CONSTANTS
from lzcomm.factorize import suffix_sizes
from lzcomm.protocol import ProtocolConfig, hamming_protocol, lcp_protocol
from lzcomm.symbols import hamming_oracle, lcp
from test_cli import CASES, GOLDEN, run_cli

MODES = ("LZN", "LZS", "CN")


def record(number, ok, detail, part=None):
    """Merge a (possibly partial) verdict for a criterion; any FAIL sticks."""
    verdict = "PASS" if ok else "FAIL"
    label = f"[{part}] {detail}" if part else detail
    if number in ACCEPTANCE:
        old_verdict, old_detail = ACCEPTANCE[number]
        verdict = "FAIL" if "FAIL" in (old_verdict, verdict) else "PASS"
        label = f"{old_detail}; {label}"
    ACCEPTANCE[number] = (verdict, label)
    return ok


def shared_corpus():
    """Exhaustive binary strings up to length 16 plus 10^4 random strings."""
    yield from E.all_strings(2, 16)
    yield from E.random_strings(10_000, 512, alphabets=(2, 4, 8), seed=2024)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_worked_example():
    factorize_lzn("warm up the kernels")
    with Timer() as t:
        zn, zs, cn = factorize_lzn(EXAMPLE_STRING), factorize_lzs(EXAMPLE_STRING), factorize_cn(EXAMPLE_STRING)
    expected = [(0, 0, "a"), (0, 0, "b"), (1, 2, "a"), (2, 3, "b"), (3, 5, "a"), (7, 7, "b"),
                (3, 4, "b")]
    ok = (zn.size, zs.size, cn.size) == (7, 6, 8) and zn.copy_triples() == expected
    ok = record(1, ok and t.elapsed < 1e-3,
                f"zn={zn.size} zs={zs.size} cn={cn.size} triples_match={zn.copy_triples() == expected} "
                f"time={t.elapsed * 1e3:.3f}ms")
    assert ok


def test_criterion_2_lower_bound_family_exact_counts():
    with Timer() as t:
        rows = E.verify_lower_bound(range(4, 129, 2))
    bad = [r["sigma"] for r in rows if not r["ok"]]
    top = rows[-1]
    ok = not bad and top["sigma"] == 128 and top["ratio"] >= 1.32
    ok = record(2, ok and t.elapsed < 10,
                f"exact 3s/2 and 2s-2 for {len(rows)} sigmas, mismatches={bad}, "
                f"ratio@128={top['ratio']:.4f} time={t.elapsed:.2f}s", part="counts")
    assert ok


@pytest.mark.xfail(strict=True, reason="run-length variant stays below 4/3 - 4/(3 sigma); see README")
def test_criterion_2_run_length_variant():
    with Timer() as t:
        rows = E.verify_run_variant(range(4, 129, 2))
    bad = [r for r in rows if not r["ok"]]
    worst = min(rows, key=lambda r: r["ratio"] - r["floor"])
    ok = record(2, not bad and t.elapsed < 10,
                f"{len(bad)}/{len(rows)} (sigma,h) cases under the floor, worst sigma={worst['sigma']} "
                f"h={worst['h']} margin={worst['ratio'] - worst['floor']:+.4f} time={t.elapsed:.2f}s",
                part="run variant")
    assert ok


def test_criterion_3_sandwich():
    with Timer() as t:
        strings = violations = 0
        for s in shared_corpus():
            zn, cn = factorize_lzn(s).size, factorize_cn(s).size
            violations += not zn <= cn <= 2 * zn
            strings += 1
    ok = record(3, violations == 0 and t.elapsed < 120,
                f"{strings} strings, violations={violations} time={t.elapsed:.1f}s")
    assert ok


def test_criterion_4_avl_chain():
    family = [E.gen_family(sigma) for sigma in range(4, 253, 2)]  # up to n = 16253
    with Timer() as t:
        report = E.avl_chain_scan(iter_chain(family), samples=50, seed=7, keep_rows=False)
    ok = report.ok and report.worst_split <= CONSTANTS.c_split
    ok = record(4, ok and t.elapsed < 300,
                f"{report.strings} strings, chain violations={report.chain_violations}, "
                f"balance violations={len(report.balance_violations)}, "
                f"worst split growth={report.worst_split:.4f} (C_split={CONSTANTS.c_split}) "
                f"time={t.elapsed:.1f}s")
    assert ok


def iter_chain(family):
    yield from shared_corpus()
    yield from family


def test_criterion_5_lcp_protocol():
    rng = np.random.default_rng(5)
    errors = over_bound = 0
    with Timer() as t:
        for trial in range(10_000):
            a, b = E.diverging_pair(rng, 1 << 14, 4)
            out = lcp_protocol(factorize_lzn(a), factorize_lzn(b), ProtocolConfig(seed=trial))
            errors += out.lcp_length != lcp(a, b)
            over_bound += out.rounds > E.lcp_round_bound(out.matching_factor_count)
    ok = record(5, errors == 0 and over_bound == 0 and t.elapsed < 180,
                f"10000 pairs, errors={errors}, round-bound violations={over_bound} "
                f"time={t.elapsed:.1f}s")
    assert ok


def test_criterion_6_hamming_protocol():
    rng = np.random.default_rng(6)
    n = 1 << 14
    errors = bad_invocations = over_bound = 0
    with Timer() as t:
        for d in (0, 1, 2, 5, 16, 32):
            for trial in range(1000):
                a = E.random_text(rng, n, 4)
                b = E.plant_mismatches(rng, a, d, 4)
                out = hamming_protocol(factorize_lzn(a), factorize_lzn(b),
                                       ProtocolConfig(seed=d * 1000 + trial))
                errors += (out.distance, out.mismatch_positions) != hamming_oracle(a, b)
                bad_invocations += out.lcp_invocations != out.raw_distance + 1
                over_bound += out.rounds > E.hamming_round_bound(out.suffix_factor_counts)
    ok = errors == 0 and bad_invocations == 0 and over_bound == 0
    ok = record(6, ok and t.elapsed < 300,
                f"6000 pairs, errors={errors}, invocation mismatches={bad_invocations}, "
                f"round-bound violations={over_bound} time={t.elapsed:.1f}s")
    assert ok


def socket_transcripts(kind, a, b, seed, tmp_path):
    env = {k: v for k, v in os.environ.items() if k != "LZCOMM_SEED"}
    logs = [tmp_path / f"{kind}{seed}-{who}.jsonl" for who in ("alice", "bob", "local")]
    common = ["protocol", kind, "--literal", "--seed", str(seed)]
    listener = subprocess.Popen([sys.executable, "-m", "lzcomm", *common, "--listen", "0",
                                 "--transcript", str(logs[0]), a],
                                stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True, env=env)
    try:
        port = json.loads(listener.stderr.readline())["listening"]
        run_cli([*common, "--connect", f"127.0.0.1:{port}", "--transcript", str(logs[1]), b])
        listener.communicate(timeout=30)
    finally:
        listener.kill()
    run_cli([*common, "--transcript", str(logs[2]), a, b])
    return [p.read_bytes() if p.exists() else None for p in logs]


def test_criterion_7_transport_fidelity(tmp_path):
    rng = np.random.default_rng(7)
    mismatches = 0
    with Timer() as t:
        for i in range(10):
            a = "".join(rng.choice(list("abc"), int(rng.integers(1, 200))))
            b = a[: int(rng.integers(0, len(a)))] + "".join(rng.choice(list("abc"), 20))
            if i % 2:
                kind, b = "hamming", "".join(c if rng.random() > 0.05 else "c" for c in a)
            else:
                kind = "lcp"
            alice, bob, local = socket_transcripts(kind, a, b, i, tmp_path)
            mismatches += local is None or not (alice == bob == local)
    ok = record(7, mismatches == 0 and t.elapsed < 30,
                f"10 instances, transcript mismatches={mismatches} time={t.elapsed:.1f}s")
    assert ok


def test_criterion_8_oracle_equivalence():
    with Timer() as t:
        strings = mismatches = 0
        for s in shared_corpus():
            for mode in MODES:
                mismatches += factorize(s, mode) != oracle_factorize(s, mode)
            strings += 1
    ok = record(8, mismatches == 0 and t.elapsed < 180,
                f"{strings} strings x 3 modes, mismatches={mismatches} time={t.elapsed:.1f}s")
    assert ok


def test_criterion_9_determinism(tmp_path):
    failures = []
    for name, args in sorted(CASES.items()):
        first, second = run_cli(args), run_cli(args)
        golden = (GOLDEN / f"{name}.out").read_text()
        if first.returncode or first.stdout != second.stdout or first.stdout != golden:
            failures.append(name)
    # file-based commands not covered by a golden
    source = tmp_path / "s.txt"
    source.write_text(EXAMPLE_STRING)
    steps = [
        ["factorize", str(source), "--out", str(tmp_path / "s.lz")],
        ["decompress", str(tmp_path / "s.lz")],
        ["grammar", "build", str(source), "--out", str(tmp_path / "g.avl")],
        ["grammar", "split", str(tmp_path / "g.avl"), "7", "--out", str(tmp_path / "p")],
        ["grammar", "concat", str(tmp_path / "p.prefix"), str(tmp_path / "p.suffix")],
        ["grammar", "validate", str(tmp_path / "g.avl")],
        ["grammar", "expand", str(tmp_path / "g.avl")],
    ]
    for args in steps:
        first, second = run_cli(args), run_cli(args)
        if first.returncode or first.stdout != second.stdout:
            failures.append(" ".join(args[:2]))
    checked = len(CASES) + len(steps)
    ok = record(9, not failures, f"{checked} commands repeated, differing={failures}")
    assert ok
