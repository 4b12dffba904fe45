import numpy as np
import pytest

from lzcomm import experiments as E
from lzcomm import factorize_lzn


def test_family_for_four_symbols():
    assert E.gen_family(4).tolist() == [0, 1, 2, 3, 4, 0, 1, 2, 4]
    row, = E.verify_lower_bound([4])
    assert (row["zn"], row["zn_suffix"], row["ok"]) == (6, 6, True)


def test_run_variant_doubles_every_zero():
    assert E.gen_family(4, 2).tolist() == [0, 0, 1, 2, 3, 4, 0, 0, 1, 2, 4]


@pytest.mark.parametrize("sigma", [4, 6, 8, 20, 64])
def test_family_length_is_quadratic(sigma):
    n = sigma * sigma // 4 + 3 * sigma // 2 - 1
    assert len(E.gen_family(sigma)) == E.family_length(sigma) == n
    for h in (2, sigma):
        assert len(E.gen_family(sigma, h)) == E.family_length(sigma, h)


@pytest.mark.parametrize("sigma, h", [(3, 1), (2, 1), (8, 0), (8, 9)])
def test_family_parameters_are_checked(sigma, h):
    with pytest.raises(ValueError):
        E.gen_family(sigma, h)


def test_eight_symbol_family_witnesses_seven_sixths():
    row, = E.verify_lower_bound([8])
    assert row["ratio_exact"] == "7/6"
    s = E.gen_family(8)
    assert factorize_lzn(s[1:]).size * 6 == factorize_lzn(s).size * 7


def test_ratio_floor():
    assert E.ratio_floor(4) == pytest.approx(1.0)
    assert E.ratio_floor(128) == pytest.approx(254 / 192)


def test_unary_suffixes_never_grow():
    report = E.zeta_scan(np.zeros(n, dtype=np.uint32) for n in range(1, 200))
    assert report.max_ratio <= 1
    assert report.witnesses == 0


def test_zeta_scan_rows():
    report = E.zeta_scan(E.all_strings(2, 8), with_zs=True)
    assert report.strings == sum(2 ** n for n in range(2, 9))
    assert report.bound_violations == 0
    row = report.max_row
    assert row["ratio"] == row["z_suffix"] / row["z"]
    assert {"zs", "zs_suffix", "zs_ratio"} <= set(row)
    with pytest.raises(ValueError):
        E.zeta_scan([], mode="CN")


def test_all_strings_counts():
    assert sum(1 for _ in E.all_strings(2, 4)) == 2 + 4 + 8 + 16
    assert sum(1 for _ in E.all_strings(3, 2, min_len=2)) == 9


def test_chain_scan_small_corpus():
    report = E.avl_chain_scan(E.random_strings(50, 100, seed=3), samples=10)
    assert report.ok
    assert report.strings == 50
    assert all(r["zn_suffix"] <= r["cn_suffix"] <= r["avl_suffix"] for r in report.rows)


def test_plant_mismatches_plants_exactly_d():
    rng = np.random.default_rng(0)
    a = E.random_text(rng, 500, 4)
    for d in (0, 1, 7, 32):
        b = E.plant_mismatches(rng, a, d, 4)
        assert int(np.sum(a != b)) == d


def test_diverging_pair_shape():
    rng = np.random.default_rng(1)
    for _ in range(100):
        a, b = E.diverging_pair(rng, 64, 3)
        assert 1 <= len(a) <= 64 and len(b) <= 64


def test_round_bounds():
    assert E.lcp_round_bound(0) == 6
    assert E.lcp_round_bound(2) == 10
    assert E.hamming_round_bound([0, 2]) == 16


def test_bench_csv_is_deterministic():
    runs = [E.to_csv(E.protocol_bench(n=256, ds=(0, 3), trials=2, seed=4)["rows"])
            for _ in range(2)]
    assert runs[0] == runs[1]
    header, *lines = runs[0].splitlines()
    assert header.startswith("n,z,d,l_max,rounds,bits,errors")
    assert len(lines) == 4 and all(line.split(",")[6] == "0" for line in lines)


def test_bench_slope_is_reported():
    out = E.protocol_bench(n=512, ds=(0, 4, 16), trials=2, seed=1)
    assert np.isfinite(out["slope"]) and out["slope"] > 0


def test_lcp_bench_has_no_errors():
    rows = E.lcp_bench(trials=30, n_max=300, seed=2)
    assert all(r["errors"] == 0 and r["rounds"] <= r["round_bound"] for r in rows)


def test_csv_formatting():
    assert E.to_csv([{"a": 1.5, "b": True}]) == "a,b\n1.500000,1\n"
    assert E.to_csv([]) == ""
