from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydist.approx import (BVApproximant, agreement, bv_approximate, chebyshev_regime_check,
                             default_sample_count, derived_measures, measurability_replay)
from polydist.errors import DomainError
from polydist.field import PrimeFieldCtx
from polydist.poly import Poly, parse_poly, random_poly
from polydist.rng import stream


def test_measure_examples():
    c = PrimeFieldCtx(2, 3)
    r = derived_measures(Poly.constant(c, 1))
    assert [m.weights for m in r.measures] == [(0, 1), (1, 0)]
    assert r.min_distance == 2
    u = derived_measures(parse_poly("x1", PrimeFieldCtx(2, 1)))
    assert u.min_distance == 0 and u.separated is None
    q = derived_measures(parse_poly("x1*x2", PrimeFieldCtx(2, 2)))
    assert q.measures[0].weights == (Fraction(3, 4), Fraction(1, 4))
    assert q.measures[1].weights == (Fraction(1, 4), Fraction(3, 4))
    assert q.min_distance == 1 and q.separated


def test_constant_polynomial_is_reproduced():
    for c in (0, 1):
        P = Poly.constant(PrimeFieldCtx(2, 4), c)
        a = bv_approximate(P, 7, seed=2)
        assert set(a.table().tolist()) == {c}
        assert agreement(P, a) == 1


def test_tie_breaks_to_zero():
    ctx = PrimeFieldCtx(2, 2)
    a = BVApproximant(parse_poly("x1*x2", ctx), [(1, 0), (0, 1)])
    # observed histogram (1,1) is equidistant from mu_0 and mu_1
    assert a.decide(np.array([[0, 1]]))[0] == 0


def test_bv_agreement_on_quadratic():
    ctx = PrimeFieldCtx(2, 8)
    P = parse_poly("x1*x2", ctx)
    good = sum(agreement(P, bv_approximate(P, 101, seed=s)) >= Fraction(9, 10) for s in range(100))
    assert good >= 95


def test_k1_goldens():
    ctx = PrimeFieldCtx(2, 4)
    P = parse_poly("x1*x2 + x3*x4", ctx)
    assert [agreement(P, bv_approximate(P, 1, seed=s)) for s in range(3)] == [Fraction(5, 8)] * 3
    Q = parse_poly("x1^2 + x2*x3", PrimeFieldCtx(3, 3))
    assert [agreement(Q, bv_approximate(Q, 5, seed=s)) for s in range(5)] == \
        [Fraction(16, 27)] * 3 + [Fraction(14, 27), Fraction(16, 27)]


def test_pointwise_and_table_paths_agree():
    ctx = PrimeFieldCtx(3, 3)
    P = parse_poly("x1^2 + x2*x3", ctx)
    a = bv_approximate(P, 9, seed=4)
    tab = a.table()
    for r in range(ctx.size):
        assert a.evaluate_point(ctx.unrank(r)) == tab[r]


def test_measurability_replay():
    P = parse_poly("x1*x2 + x3*x4", PrimeFieldCtx(2, 6))
    rep = measurability_replay(P, bv_approximate(P, 21, seed=0), 2000, seed=0)
    assert rep["ok"] and rep["failures"] == 0


def test_majority_vote_matches_decoder_for_positive_bias():
    ctx = PrimeFieldCtx(2, 6)
    P = parse_poly("x1*x2 + x3*x4", ctx)
    a = bv_approximate(P, 51, seed=9)
    dt = a.derivative_table()
    assert np.array_equal(a.decide(dt), a.majority_vote(dt))


def test_chebyshev_regime():
    P = parse_poly("x1*x2", PrimeFieldCtx(2, 8))
    assert chebyshev_regime_check(P, 101, 0.1, 5000, seed=1)["ok"]


def test_sample_count_and_errors():
    assert default_sample_count(2, 0.5, 0.5) == 128
    with pytest.raises(DomainError):
        default_sample_count(2, 0, 0.5)
    with pytest.raises(DomainError):
        bv_approximate(Poly.zero(PrimeFieldCtx(2, 2)), 0, seed=1)
    with pytest.raises(DomainError):
        bv_approximate(Poly.zero(PrimeFieldCtx(2, 2)), 3, seed=None)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([2, 3]), n=st.integers(1, 4), k=st.integers(1, 9), s=st.integers(0, 2**32))
def test_approximant_is_function_of_derivatives(p, n, k, s):
    ctx = PrimeFieldCtx(p, n)
    P = random_poly(ctx, 2, stream(s, 0))
    a = bv_approximate(P, k, seed=s)
    dt, out = a.derivative_table(), a.table()
    seen = {}
    for row, v in zip(map(tuple, dt.tolist()), out.tolist()):
        assert seen.setdefault(row, v) == v
    assert a.to_dict() == bv_approximate(P, k, seed=s).to_dict()
    m = derived_measures(P)
    assert sum(m.measures[0].weights) == 1
    if m.separated is not None:
        assert m.separated
