import numpy as np
import pytest

from lzcomm.symbols import (
    SENTINEL_DOLLAR,
    SENTINEL_HASH,
    alphabet_bound,
    as_symbols,
    from_ints,
    from_text,
    hamming_oracle,
    lcp,
    parse,
    render,
    to_text,
    wrap_sentinels,
)


def test_text_round_trip_keeps_code_points():
    s = from_text("héllo✓")
    assert s.dtype == np.uint32
    assert to_text(s) == "héllo✓"


def test_ints_parse_and_render():
    s = parse("0 1 2\n3 4", "ints")
    assert s.tolist() == [0, 1, 2, 3, 4]
    assert render(s, "ints") == "0 1 2 3 4"


def test_reserved_ids_are_rejected_on_ingestion():
    with pytest.raises(ValueError):
        from_ints(str(SENTINEL_HASH))
    with pytest.raises(ValueError):
        from_ints("-1")


def test_symbol_strings_are_read_only():
    s = as_symbols("abc")
    with pytest.raises(ValueError):
        s[0] = 1


@pytest.mark.parametrize("x, y, expected", [("abc", "abd", 2), ("", "xyz", 0),
                                            ("abc", "abc", 3), ("ab", "abc", 2)])
def test_lcp(x, y, expected):
    assert lcp(x, y) == expected


def test_hamming_oracle_positions_are_one_based():
    assert hamming_oracle("abc", "abc") == (0, [])
    assert hamming_oracle("abc", "abd") == (1, [3])
    assert hamming_oracle("xbcx", "abca") == (2, [1, 4])


def test_hamming_oracle_rejects_unequal_lengths():
    with pytest.raises(ValueError):
        hamming_oracle("ab", "abc")


def test_wrap_sentinels_on_empty_strings():
    a, b = wrap_sentinels("", "")
    assert a.tolist() == [SENTINEL_HASH, SENTINEL_DOLLAR]
    assert b.tolist() == [SENTINEL_DOLLAR, SENTINEL_HASH]
    assert hamming_oracle(a, b)[0] == 2
    assert to_text(a) == "#$"


def test_wrap_sentinels_adds_exactly_two_mismatches():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(0, 40))
        x = rng.integers(0, 3, n)
        y = rng.integers(0, 3, n)
        wa, wb = wrap_sentinels(x, y)
        assert hamming_oracle(wa, wb)[0] == hamming_oracle(x, y)[0] + 2


def test_alphabet_bound_ignores_sentinels():
    a, b = wrap_sentinels([0, 5], [2, 1])
    assert alphabet_bound(a, b) == 6
    assert alphabet_bound("") == 0
