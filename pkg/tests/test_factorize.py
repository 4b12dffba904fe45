import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lzcomm import (
    Factorization,
    MalformedFactorization,
    decompress,
    factorize,
    factorize_cn,
    factorize_lzn,
    factorize_lzs,
    oracle_factorize,
    suffix_sizes,
)
from lzcomm.factorize import check, dumps, loads

MODES = ("LZN", "LZS", "CN")
strings = st.lists(st.integers(0, 3), max_size=80)


def test_lzn_worked_example(example_string):
    f = factorize_lzn(example_string)
    assert f.size == 7
    assert f.copy_triples() == [(0, 0, "a"), (0, 0, "b"), (1, 2, "a"), (2, 3, "b"),
                                (3, 5, "a"), (7, 7, "b"), (3, 4, "b")]
    assert f.triples()[0] == (0, 1, ord("a"))
    assert not f.truncated


def test_lzs_worked_example(example_string):
    f = factorize_lzs(example_string)
    assert f.size == 6
    assert f.copy_triples()[-2:] == [(3, 5, "a"), (7, 11, "b")]


def test_cn_worked_example_boundaries(example_string):
    f = factorize_cn(example_string)
    assert f.size == 8
    # frozen from the brute-force oracle
    assert f.triples() == [(0, 1, 97), (0, 1, 98), (1, 1, 97), (1, 3, 97), (2, 5, 97),
                           (1, 6, 97), (1, 5, 98), (2, 1, 98)]


def test_empty_string_has_no_factors():
    for mode in MODES:
        f = factorize("", mode)
        assert f.size == 0
        assert decompress(f).tolist() == []


def test_cn_of_single_symbol():
    assert factorize_cn("z").size == 1


def test_lzn_truncates_final_factor():
    f = factorize_lzn("aaaa")
    assert f.triples() == [(0, 1, 97), (1, 2, 97), (1, 1, 97)]
    assert f.truncated


def test_lzs_run_is_one_overlapping_factor():
    f = factorize_lzs("aaaaaaaa")
    assert f.triples() == [(0, 1, 97), (1, 7, 97)]


def test_decompress_worked_example(example_string):
    f = Factorization.from_factors("LZN", [(0, 1, 97), (0, 1, 98), (1, 2, 97), (2, 3, 98),
                                           (3, 5, 97), (7, 7, 98), (3, 4, 98)])
    assert "".join(map(chr, decompress(f).tolist())) == example_string


@pytest.mark.parametrize("mode, factors, index", [
    ("LZN", [(0, 1, 97), (2, 2, 97)], 1),
    ("LZN", [(0, 1, 97), (0, 1, 98), (2, 3, 97)], 2),
    ("LZS", [(0, 1, 97), (2, 3, 97)], 1),
    ("CN", [(0, 1, 97), (1, 2, 97)], 1),
    ("LZN", [(0, 2, 97)], 0),
    ("LZN", [(0, 1, 97), (1, 0, 97)], 1),
])
def test_malformed_reference_names_the_factor(mode, factors, index):
    f = Factorization.from_factors(mode, factors)
    with pytest.raises(MalformedFactorization) as exc:
        decompress(f)
    assert exc.value.index == index


def test_oracle_matches_fast_paths_on_all_short_binary_strings(backend):
    for n in range(0, 11):
        for t in itertools.product("ab", repeat=n):
            s = "".join(t)
            for mode in MODES:
                assert factorize(s, mode) == oracle_factorize(s, mode), (s, mode)


def test_oracle_matches_on_random_strings(backend):
    rng = np.random.default_rng(11)
    for _ in range(300):
        n = int(rng.integers(0, 200))
        s = rng.integers(0, int(rng.integers(1, 9)), n)
        for mode in MODES:
            assert factorize(s, mode) == oracle_factorize(s, mode)


def test_large_and_sparse_symbol_ids():
    s = [0, 70000, 2**32 - 3, 0, 70000, 2**32 - 3, 5]
    for mode in MODES:
        assert factorize(s, mode) == oracle_factorize(s, mode)
        assert decompress(factorize(s, mode)).tolist() == s


@settings(max_examples=200, deadline=None)
@given(strings)
def test_round_trip(s):
    for mode in MODES:
        assert decompress(factorize(s, mode)).tolist() == s


@settings(max_examples=200, deadline=None)
@given(strings)
def test_size_relations(s):
    zn, zs, cn = (factorize(s, m).size for m in MODES)
    assert zn <= cn <= 2 * zn
    assert zs <= zn


@settings(max_examples=100, deadline=None)
@given(strings)
def test_prefix_monotonicity(s):
    whole = factorize_lzn(s).size
    assert all(factorize_lzn(s[:j]).size <= whole for j in range(len(s) + 1))


@settings(max_examples=100, deadline=None)
@given(strings)
def test_factorizations_pass_their_own_checks(s):
    for mode in MODES:
        check(factorize(s, mode))


def test_factorization_is_deterministic(example_string):
    assert factorize_lzn(example_string) == factorize_lzn(list(map(ord, example_string)))


def test_suffix_sizes_agree_with_full_parses(backend):
    rng = np.random.default_rng(2)
    for _ in range(50):
        s = rng.integers(0, 3, int(rng.integers(0, 60)))
        for mode in MODES:
            expect = [factorize(s[i:], mode).size for i in range(len(s) + 1)]
            assert suffix_sizes(s, None, mode).tolist() == expect


def test_text_format_round_trip():
    f = factorize_lzn("aaaa")
    text = dumps(f)
    assert text.splitlines()[0] == "#mode=LZN n=4"
    assert text.splitlines()[-1].endswith("\tT")
    assert loads(text) == f
    assert not loads(text).canonical


def test_text_format_rejects_bad_header():
    with pytest.raises(ValueError):
        loads("0\t1\t97\n")
    with pytest.raises(ValueError):
        loads("#mode=LZN n=5\n0\t1\t97\n")
