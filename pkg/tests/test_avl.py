import math
import random

import numpy as np
import pytest

from lzcomm import avl, factorize_cn
from lzcomm.constants import CONSTANTS, log_ceil


def text(g):
    return "".join(map(chr, avl.expand(g).tolist()))


def test_build_expands_to_input(example_string):
    g = avl.build(example_string)
    assert text(g) == example_string
    assert g.length == 23
    assert avl.validate(g).ok


def test_build_of_single_symbol():
    g = avl.build("a")
    assert (g.size, g.height, g.length) == (1, 1, 1)


def test_build_rejects_empty():
    with pytest.raises(avl.GrammarError):
        avl.build("")


def test_unary_string_stays_logarithmic():
    g = avl.build("a" * 1000)
    assert g.height <= avl.avl_height_bound(1000)
    assert g.size <= 3 * math.ceil(math.log2(1000))


def test_split_and_concat_round_trip(example_string):
    g = avl.build(example_string)
    for i in range(1, len(example_string) + 1):
        prefix, suffix = avl.split(g, i)
        assert text(prefix) == example_string[: i - 1]
        assert text(suffix) == example_string[i - 1:]
        assert text(avl.concat(prefix, suffix)) == example_string


def test_split_at_one_gives_empty_prefix():
    g = avl.build("abc")
    prefix, suffix = avl.split(g, 1)
    assert prefix.is_empty and prefix.length == 0
    assert suffix.root == g.root


@pytest.mark.parametrize("i", [0, 4, -1])
def test_split_out_of_range(i):
    with pytest.raises(avl.GrammarError):
        avl.split(avl.build("abc"), i)


def test_expand_range():
    g = avl.build("abcdefgh")
    assert "".join(map(chr, avl.expand_range(g, 3, 5).tolist())) == "cde"
    assert avl.expand_range(g, 4, 3).tolist() == []
    with pytest.raises(avl.GrammarError):
        avl.expand_range(g, 0, 2)
    with pytest.raises(avl.GrammarError):
        avl.expand_range(g, 2, 9)


def test_concat_across_pools():
    g1, g2 = avl.build("abab"), avl.build("baba")
    assert g1.pool is not g2.pool
    g = avl.concat(g1, g2)
    assert text(g) == "ababbaba"
    assert avl.validate(g).ok


def test_concat_with_empty_side():
    g = avl.build("xy")
    empty, _ = avl.split(g, 1)
    assert text(avl.concat(empty, g)) == "xy"
    assert text(avl.concat(g, empty)) == "xy"


def test_size_bounds_hold_with_pinned_constants():
    rng = np.random.default_rng(1)
    for _ in range(200):
        n = int(rng.integers(2, 300))
        s = rng.integers(0, int(rng.choice([2, 4, 8])), n)
        g = avl.build(s)
        cn = factorize_cn(s).size
        assert cn <= g.size <= CONSTANTS.build_bound(cn, n)
        i = int(rng.integers(2, n + 1))
        _, suffix = avl.split(g, i)
        assert suffix.size <= CONSTANTS.split_bound(g.size, n)
        h = avl.build(rng.integers(0, 4, int(rng.integers(1, 100))))
        joined = avl.concat(g, h)
        assert joined.size <= CONSTANTS.concat_bound(g.size, h.size, g.height, h.height)


def test_zeta_bound_formula():
    assert CONSTANTS.zeta_bound(1023) == 2 * CONSTANTS.c_build * 10 + CONSTANTS.c_split * 10
    assert log_ceil(1) == 1 and log_ceil(2) == 1 and log_ceil(5) == 3


def test_random_operation_sequences():
    rnd = random.Random(7)
    for _ in range(100):
        pool = avl.Pool()
        current = "".join(rnd.choice("ab") for _ in range(rnd.randint(1, 60)))
        g = avl.build(current, pool)
        watermark = 0
        for _ in range(10):
            if rnd.random() < 0.5 and g.length > 1:
                i = rnd.randint(1, g.length)
                prefix, suffix = avl.split(g, i)
                g, current = (suffix, current[i - 1:]) if rnd.random() < 0.5 or prefix.is_empty \
                    else (prefix, current[: i - 1])
            else:
                extra = "".join(rnd.choice("abc") for _ in range(rnd.randint(1, 30)))
                g = avl.concat(g, avl.build(extra, pool))
                current += extra
            assert avl.validate_pool(pool, watermark) == []
            watermark = len(pool)
            assert text(g) == current
            assert g.height <= avl.avl_height_bound(g.length)


def test_validator_catches_a_corrupted_height():
    g = avl.build("abaababaabaabaab")
    top = g.root
    g.pool.height[top] += 1
    report = avl.validate(g)
    assert not report.ok
    assert any("cached height" in v for v in report.violations)


def test_validator_catches_imbalance():
    pool = avl.Pool()
    a = pool.terminal(97)
    deep = pool.pair(pool.pair(a, a), pool.pair(a, a))
    lopsided = pool.pair(deep, a)
    report = avl.validate(avl.AvlGrammar(pool, lopsided))
    assert any("unbalanced" in v for v in report.violations)
    assert avl.validate_pool(pool)


def test_dump_and_load(example_string):
    g = avl.build(example_string)
    dumped = avl.dumps(g)
    assert dumped.splitlines()[-1].startswith("root ")
    back = avl.loads(dumped)
    assert text(back) == example_string
    assert avl.dumps(back) == dumped
    assert avl.validate(back).ok


def test_dump_of_empty_grammar():
    empty, _ = avl.split(avl.build("ab"), 1)
    assert avl.dumps(empty) == "root empty\n"
    assert avl.loads("root empty\n").is_empty


@pytest.mark.parametrize("dump", [
    "0 B 1 1\n1 B 0 0\nroot 0\n",       # cycle
    "0 T 97\n1 B 0 5\nroot 1\n",         # undefined child
    "0 T 97\n",                          # no root
    "0 T 97\n0 T 98\nroot 0\n",          # duplicate id
    "0 X 1\nroot 0\n",                   # unknown production kind
])
def test_load_rejects_malformed_dumps(dump):
    with pytest.raises(avl.GrammarError):
        avl.loads(dump)


def test_loaded_imbalance_is_reported_not_raised():
    dump = "0 T 97\n1 B 0 0\n2 B 1 1\n3 B 2 0\nroot 3\n"
    g = avl.loads(dump)
    assert text(g) == "aaaaa"
    assert not avl.validate(g).ok


def test_dump_does_not_depend_on_pool_history():
    busy = avl.Pool()
    avl.build("zyxwzyxw", busy)
    assert avl.dumps(avl.build("abaab", busy)) == avl.dumps(avl.build("abaab"))


def test_split_growth_witness_sits_on_the_pinned_constant():
    s = [int(c) for c in "0010010000100100"]
    g = avl.build(s)
    _, suffix = avl.split(g, 2)
    assert (g.size, suffix.size) == (7, 11)
    assert (suffix.size - g.size) / log_ceil(len(s)) == CONSTANTS.c_split
