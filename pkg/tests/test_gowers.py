from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydist.errors import DomainError, ResourceError
from polydist.field import Limits, PrimeFieldCtx, popcount
from polydist.gowers import (bias, correlate_with, exact_bias_f2, gowers_norm_exact,
                             gowers_norm_mc, gowers_norm_nested, gowers_norm_table,
                             inverse_probe, weak_norm_exhaustive)
from polydist.poly import Poly, parse_poly, random_poly, symmetric_poly, truth_table
from polydist.rng import stream

V4_GOLDEN = {4: Fraction(197, 512), 6: Fraction(1577, 8192)}


def _B(a, b):
    return (popcount(a) * popcount(b) - popcount(a & b)) & 1


def v4_bruteforce(n):
    """E over all (a,b,c,d) of (-1)^{B(a,b)B(c,d)+B(a,c)B(b,d)+B(a,d)B(b,c)}."""
    N = 1 << n
    a, b, c, d = np.meshgrid(*[np.arange(N)] * 4, indexing="ij")
    e = (_B(a, b) & _B(c, d)) ^ (_B(a, c) & _B(b, d)) ^ (_B(a, d) & _B(b, c))
    return Fraction(int((1 - 2 * e).sum()), N**4)


def test_bias_examples():
    assert bias(symmetric_poly(PrimeFieldCtx(2, 2), 2)) == pytest.approx(0.5)
    for p in (2, 3, 5):
        assert abs(bias(parse_poly("x1", PrimeFieldCtx(p, 1)))) < 1e-12
    assert abs(bias(parse_poly("x1^2", PrimeFieldCtx(3, 1)))) == pytest.approx(3**-0.5)
    assert exact_bias_f2(parse_poly("x1*x2 + x3*x4", PrimeFieldCtx(2, 10))) == Fraction(1, 4)


def test_v4_golden_matches_bruteforce_at_n4():
    assert v4_bruteforce(4) == V4_GOLDEN[4]
    r = gowers_norm_exact(symmetric_poly(PrimeFieldCtx(2, 4), 4), 4)
    assert r.exact == V4_GOLDEN[4]
    assert r.norm == pytest.approx(float(V4_GOLDEN[4]) ** (1 / 16))


def test_v4_golden_n6():
    assert gowers_norm_exact(symmetric_poly(PrimeFieldCtx(2, 6), 4), 4).exact == V4_GOLDEN[6]


def test_low_degree_phase_has_norm_one():
    ctx = PrimeFieldCtx(3, 3)
    Q = random_poly(ctx, 2, stream(5, 0))
    assert gowers_norm_exact(Q, 3).power_mean == pytest.approx(1.0)
    r = gowers_norm_mc(Q, 3, 2000, seed=1)
    assert r.power_mean == 1.0 and r.stderr == 0.0


def test_u1_of_mean_zero_phase():
    assert gowers_norm_exact(parse_poly("x1", PrimeFieldCtx(2, 1)), 1).norm == 0.0


def test_exact_cap_is_resource_error():
    with pytest.raises(ResourceError):
        gowers_norm_exact(symmetric_poly(PrimeFieldCtx(2, 12), 4), 4, Limits(max_cube_bits=34))
    with pytest.raises(DomainError):
        gowers_norm_exact(parse_poly("x1", PrimeFieldCtx(2, 2)), 0)


@settings(max_examples=25, deadline=None)
@given(p=st.sampled_from([2, 3]), n=st.integers(1, 2), order=st.integers(1, 3),
       d=st.integers(0, 3), s=st.integers(0, 2**32))
def test_exact_matches_nested_and_dense(p, n, order, d, s):
    ctx = PrimeFieldCtx(p, n)
    P = random_poly(ctx, d, stream(s, 0))
    ex = gowers_norm_exact(P, order)
    dense = gowers_norm_table(np.exp(2j * np.pi * truth_table(P).values / p), ctx, order)
    assert ex.power_mean == pytest.approx(dense.power_mean, abs=1e-9)
    if ctx.size ** (order + 1) <= 1 << 16:
        assert ex.power_mean == pytest.approx(gowers_norm_nested(P, order), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(p=st.sampled_from([2, 3]), n=st.integers(1, 3), d=st.integers(1, 3), s=st.integers(0, 2**32))
def test_norms_are_monotone_in_order(p, n, d, s):
    P = random_poly(PrimeFieldCtx(p, n), d, stream(s, 0))
    norms = [gowers_norm_exact(P, k).norm for k in (1, 2, 3)]
    assert norms[0] <= norms[1] + 1e-9 <= norms[2] + 2e-9


def test_mc_agrees_with_exact_and_is_deterministic():
    P = symmetric_poly(PrimeFieldCtx(2, 6), 4)
    a = gowers_norm_mc(P, 4, 100_000, seed=3, threads=1)
    b = gowers_norm_mc(P, 4, 100_000, seed=3, threads=4)
    assert a == b
    assert abs(a.power_mean - float(V4_GOLDEN[6])) < 4 * a.stderr
    with pytest.raises(DomainError):
        gowers_norm_mc(P, 4, 100, seed=None)


def test_weak_norm_golden():
    r = weak_norm_exhaustive(symmetric_poly(PrimeFieldCtx(2, 4), 4), 4)
    assert (r.exact, str(r.witness), r.search_size) == (Fraction(7, 8), "0", 2**14)
    assert r.to_dict() == weak_norm_exhaustive(symmetric_poly(PrimeFieldCtx(2, 4), 4), 4).to_dict()


def test_weak_norm_recovers_low_degree_phase():
    ctx = PrimeFieldCtx(3, 2)
    Q = parse_poly("x1*x2 + 2*x1 + 1", ctx)
    r = weak_norm_exhaustive(Q, 3)
    assert r.best_value == pytest.approx(1.0)
    assert r.witness == Q - Poly.constant(ctx, Q.constant_term())


def test_weak_norm_of_S3_lower_bound():
    assert weak_norm_exhaustive(symmetric_poly(PrimeFieldCtx(2, 4), 3), 3).best_value >= 0.25


def test_correlation_examples():
    ctx = PrimeFieldCtx(2, 2)
    P = parse_poly("x1*x2", ctx)
    assert correlate_with(P, Poly.zero(ctx)) == pytest.approx(0.5)
    assert correlate_with(P, P) == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(p=st.sampled_from([2, 3]), n=st.integers(1, 2), d=st.integers(0, 3), s=st.integers(0, 2**32))
def test_weak_norm_never_exceeds_gowers_norm(p, n, d, s):
    P = random_poly(PrimeFieldCtx(p, n), d, stream(s, 0))
    for order in (1, 2, 3):
        U, u = inverse_probe(P, order)
        assert u.best_value <= U.norm + 1e-9
        if P.degree < order:
            assert U.norm == pytest.approx(1.0) and u.best_value == pytest.approx(1.0)
