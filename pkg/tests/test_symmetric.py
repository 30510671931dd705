import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydist.errors import DomainError
from polydist.field import PrimeFieldCtx, popcount
from polydist.poly import symmetric_poly, truth_table
from polydist.rng import stream
from polydist.symmetric import (Partition, b6_histogram, bilinear_B, bilinear_B_double_sum,
                                is_monochromatic, lucas_binomial, mod8_profile, moebius,
                                moebius_derivative_identity_check, moebius_sum_below,
                                partitions_and_moebius, quartic_derivative_identity_check,
                                sd_factorization, set_partitions, simultaneous_ramsey,
                                symmetric_correlation, symmetric_correlation_table,
                                variety_identity_check, weight_profile)


def _B(a, b):
    return (popcount(a) * popcount(b) - popcount(a & b)) & 1


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 8), data=st.data())
def test_bilinear_fast_path_matches_double_sum(n, data):
    a = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    assert bilinear_B(tuple(a), tuple(b)) == bilinear_B_double_sum(a, b) % 2


def test_bilinear_requires_f2():
    with pytest.raises(DomainError):
        bilinear_B((1, 0), (0, 1), p=3)


def test_quartic_identity():
    for n in (1, 2, 3, 4):
        r = quartic_derivative_identity_check(n)
        assert r.exhaustive and r.ok
    r = quartic_derivative_identity_check(10, trials=5000, seed=1)
    assert not r.exhaustive and r.ok and r.checked == 5000


def test_b6_histogram_matches_bruteforce_n4():
    N = 16
    a, b, c, d = (v.ravel() for v in np.meshgrid(*[np.arange(N)] * 4, indexing="ij"))
    cells = (_B(a, b) | _B(a, c) << 1 | _B(a, d) << 2 | _B(b, c) << 3 | _B(b, d) << 4 | _B(c, d) << 5)
    golden = np.bincount(cells, minlength=64)
    h = b6_histogram(4)
    assert h["exhaustive"] and h["counts"] == golden.tolist() and sum(h["counts"]) == 2**16
    assert h["counts"][:4] == [3376, 1200, 1200, 1200]


def test_b6_degenerate_and_sampled():
    assert b6_histogram(1)["counts"][0] == 16
    s = b6_histogram(20, trials=200_000, seed=3)
    assert not s["exhaustive"] and s["max_deviation"] <= 5e-3
    assert s == b6_histogram(20, trials=200_000, seed=3)


def test_mod8_examples():
    assert mod8_profile(3).counts == [1, 3, 3, 1, 0, 0, 0, 0]
    assert mod8_profile(8).counts[0] == 2
    assert mod8_profile(200).multisection_ok


@settings(max_examples=50, deadline=None)
@given(n=st.integers(0, 300), m=st.sampled_from([2, 4, 8, 16]))
def test_weight_profile_sums(n, m):
    w = weight_profile(n, m)
    assert sum(w) == 2**n
    assert w == [sum(math.comb(n, j) for j in range(a, n + 1, m)) for a in range(m)]


@settings(max_examples=200, deadline=None)
@given(a=st.integers(0, 200), b=st.integers(0, 200), p=st.sampled_from([2, 3, 5, 7]))
def test_lucas_matches_binomial(a, b, p):
    assert lucas_binomial(a, b, p) == math.comb(a, b) % p


def test_lucas_examples():
    assert lucas_binomial(5, 4, 2) == 1
    assert lucas_binomial(3, 5, 2) == 0
    assert lucas_binomial(6, 2, 2) == 1


def _correlation_bruteforce(n, d, coeffs):
    ctx = PrimeFieldCtx(2, n)
    e = truth_table(symmetric_poly(ctx, d)).values.astype(np.int64)
    for i, c in enumerate(coeffs):
        if c:
            e = e + truth_table(symmetric_poly(ctx, i, allow_zero=True)).values
    return Fraction(int((1 - 2 * (e % 2)).sum()), 2**n)


def test_correlation_table_n8_against_truth_tables():
    rows = symmetric_correlation_table(8, 4)
    assert len(rows) == 16
    for c, v in rows:
        assert v == _correlation_bruteforce(8, 4, c)
    assert max(abs(v) for _, v in rows) == Fraction(41, 64)


def test_correlation_examples():
    assert all(symmetric_correlation(n, 1, [0]) == 0 for n in range(1, 30))
    # exact value at n=16 with all c=0
    assert symmetric_correlation(16, 4, [0, 0, 0, 0]) == Fraction(9232, 65536)
    assert max(abs(v) for _, v in symmetric_correlation_table(64, 4)) <= Fraction(1, 50)


def test_factorization_examples():
    r = sd_factorization(6, 7)
    assert (r["d1"], r["d2"], r["verified"]) == (2, 4, True)
    assert (sd_factorization(3)["d1"], sd_factorization(3)["d2"]) == (1, 2)
    assert sd_factorization(4)["power_of_two"]


def test_moebius_examples():
    assert [(str(pi), mu) for pi, mu in partitions_and_moebius(1)["partitions"]] == [("{{1}}", 1)]
    d2 = dict((str(pi), mu) for pi, mu in partitions_and_moebius(2)["partitions"])
    assert d2 == {"{{1,2}}": -1, "{{1}, {2}}": 1}
    r4 = partitions_and_moebius(4)
    assert r4["count"] == 15 and r4["inversion_ok"]
    top = Partition.of([[1, 2, 3, 4]])
    assert moebius_sum_below(top) == 0


def test_bell_numbers_and_inversion():
    bell = [1, 2, 5, 15, 52, 203, 877]
    for d, b in zip(range(1, 8), bell):
        parts = set_partitions(d)
        assert len(parts) == b and len(set(parts)) == b
        assert partitions_and_moebius(d)["inversion_ok"]
    for pi in set_partitions(5):
        assert moebius_sum_below(pi) == (1 if len(pi.blocks) == 5 else 0)


def test_unshifted_sign_breaks_inversion_for_odd_d():
    assert not partitions_and_moebius(3, sign="unshifted")["inversion_ok"]
    assert moebius(Partition.of([[1], [2], [3]]), sign="unshifted") == -1


@pytest.mark.parametrize("d,p,n", [(1, 3, 3), (2, 3, 2), (3, 2, 4), (4, 2, 6), (3, 5, 3)])
def test_symmetric_derivative_identity(d, p, n):
    assert moebius_derivative_identity_check(d, n, p, trials=1000, seed=5).ok


def test_symmetric_derivative_identity_fails_with_unshifted_sign():
    assert not moebius_derivative_identity_check(2, 2, 3, sign="unshifted").ok


def test_variety_examples():
    r4 = variety_identity_check(2, 4, 8, trials=2000, seed=1)
    assert r4["V_size"] == 72 and r4["ok"] and r4["cubes_inside_V"] > 0
    assert variety_identity_check(2, 3, 8, trials=2000, seed=2)["ok"]
    with pytest.raises(DomainError):
        variety_identity_check(3, 3, 3, trials=10, seed=1)


def test_ramsey_examples():
    r = simultaneous_ramsey(16, [], [])
    assert r["monochromatic"] and r["size"] >= 3
    E2 = list(itertools.combinations(range(1, 9), 2))
    E3 = list(itertools.combinations(range(1, 9), 3))
    full = simultaneous_ramsey(8, E2, E3)
    assert full["monochromatic"] and full["size"] >= 7


@settings(max_examples=20, deadline=None)
@given(s=st.integers(0, 2**32), n=st.integers(3, 40))
def test_ramsey_output_is_monochromatic(s, n):
    g = stream(s, 0)
    E2 = [e for e in itertools.combinations(range(1, n + 1), 2) if g.random() < 0.5]
    E3 = [e for e in itertools.combinations(range(1, n + 1), 3) if g.random() < 0.5]
    r = simultaneous_ramsey(n, E2, E3)
    assert is_monochromatic(r["I"], E2, E3) and r["monochromatic"]
    assert set(r["I"]) <= set(r["sequence"])
