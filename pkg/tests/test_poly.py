import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydist.errors import DomainError, ResourceError
from polydist.field import Limits, PrimeFieldCtx, add_points, enumerate_points, weight
from polydist.poly import (Poly, PolyParseError, additive_derivative, coeffs_in_basis,
                           dim_poly_space, evaluate, evaluate_ranks, iterated_derivative,
                           monomial_basis, multilinear_coefficients, multilinear_cube_extension_check,
                           multilinear_evaluate, parse_poly, poly_from_coeffs, random_poly,
                           resolve_poly, symmetric_poly, truth_table)
from polydist.rng import stream
from polydist.symmetric import bilinear_B, quartic_form


def test_parse_examples():
    assert parse_poly("x1*x2 + x3", PrimeFieldCtx(2, 3)).terms == {(1, 1, 0): 1, (0, 0, 1): 1}
    assert parse_poly("x1^3", PrimeFieldCtx(3, 1)).terms == {(1,): 1}
    assert parse_poly("2*x1 + x1", PrimeFieldCtx(3, 1)).is_zero()


@pytest.mark.parametrize("text,pos", [("x1+", 3), ("x1 $ x2", 3), ("x4", 0), ("*x1", 0), ("x1^", 3)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(PolyParseError) as err:
        parse_poly(text, PrimeFieldCtx(2, 3))
    assert err.value.position == pos


def test_printing_is_graded_lex():
    ctx = PrimeFieldCtx(3, 2)
    assert str(parse_poly("x2 + 2 + x1*x2^2 + x1^2", ctx)) == "x1*x2^2 + x1^2 + x2 + 2"
    assert str(Poly.zero(ctx)) == "0"


def test_evaluate_examples():
    ctx = PrimeFieldCtx(2, 2)
    assert evaluate(parse_poly("x1*x2", ctx), (1, 1)) == 1
    assert evaluate(Poly.zero(ctx), (1, 0)) == 0
    S4 = symmetric_poly(PrimeFieldCtx(2, 6), 4)
    assert evaluate(S4, (1, 1, 1, 1, 1, 0)) == 1


def test_derivative_examples():
    ctx = PrimeFieldCtx(2, 2)
    assert str(additive_derivative(parse_poly("x1*x2", ctx), (1, 0))) == "x2"
    c5 = PrimeFieldCtx(5, 1)
    assert additive_derivative(parse_poly("x1", c5), (3,)) == Poly.constant(c5, 3)
    c3 = PrimeFieldCtx(2, 3)
    S2 = symmetric_poly(c3, 2)
    D = additive_derivative(S2, (1, 0, 0))
    assert str(D) == "x2 + x3"
    for x in enumerate_points(c3):
        assert evaluate(D, x) == (evaluate(S2, add_points(c3, x, (1, 0, 0))) - evaluate(S2, x)) % 2


def test_iterated_derivative_of_S4_is_quartic_form_constant():
    ctx = PrimeFieldCtx(2, 5)
    g = stream(11, 0)
    for _ in range(20):
        hs = [ctx.unrank(int(r)) for r in g.integers(0, ctx.size, 4)]
        D = iterated_derivative(symmetric_poly(ctx, 4), hs)
        assert D.degree <= 0
        assert D.constant_term() == quartic_form(*hs)
    assert iterated_derivative(symmetric_poly(ctx, 4), []) == symmetric_poly(ctx, 4)


def test_symmetric_examples():
    assert symmetric_poly(PrimeFieldCtx(2, 3), 0) == Poly.constant(PrimeFieldCtx(2, 3), 1)
    assert str(symmetric_poly(PrimeFieldCtx(2, 3), 1)) == "x1 + x2 + x3"
    assert len(symmetric_poly(PrimeFieldCtx(2, 6), 4).terms) == 15
    with pytest.raises(DomainError):
        symmetric_poly(PrimeFieldCtx(2, 3), 4)


def test_truth_tables():
    c = PrimeFieldCtx(2, 2)
    assert list(truth_table(symmetric_poly(c, 1)).values) == [0, 1, 1, 0]
    assert list(truth_table(symmetric_poly(c, 2)).values) == [0, 0, 0, 1]
    c8 = PrimeFieldCtx(2, 8)
    t = truth_table(symmetric_poly(c8, 4)).values
    w = np.array([weight(x) for x in enumerate_points(c8)])
    for r in range(8):
        assert len(set(t[w % 8 == r])) <= 1
    assert [int(t[w == k][0]) for k in range(8)] == [math.comb(k, 4) % 2 for k in range(8)]


def test_truth_table_cap():
    with pytest.raises(ResourceError):
        truth_table(parse_poly("x1", PrimeFieldCtx(2, 30)), Limits(max_table_bits=20))


def test_multilinear_examples():
    assert list(multilinear_coefficients([0, 0, 0, 0], 2)) == [0, 0, 0, 0]
    assert list(multilinear_coefficients([0, 0, 0, 1], 2)) == [0, 0, 0, 1]
    g = stream(3, 0)
    vals = g.integers(0, 3, 8)
    coeffs = multilinear_coefficients(vals, 3)
    assert list(multilinear_evaluate(coeffs, 3)) == list(vals)
    assert multilinear_cube_extension_check(vals, 3)


def test_basis_dimension():
    # dim P_d(F_p^n) counts exponent vectors with entries < p and total <= d
    for p, n, d in [(2, 4, 2), (3, 3, 4), (5, 2, 3)]:
        ctx = PrimeFieldCtx(p, n)
        brute = sum(1 for e in itertools.product(range(p), repeat=n) if sum(e) <= d)
        assert dim_poly_space(ctx, d) == brute == len(monomial_basis(ctx, d))


def test_alias():
    ctx = PrimeFieldCtx(2, 5)
    assert resolve_poly("S3", ctx) == symmetric_poly(ctx, 3)
    assert resolve_poly("x1", ctx) == Poly.variable(ctx, 1)


polys = st.builds(
    lambda p, n, d, s: (PrimeFieldCtx(p, n), d, s),
    st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(0, 4), st.integers(0, 2**32))


@settings(max_examples=60, deadline=None)
@given(polys)
def test_print_parse_roundtrip(args):
    ctx, d, s = args
    P = random_poly(ctx, d, stream(s, 0))
    assert parse_poly(str(P), ctx) == P
    assert parse_poly(str(parse_poly(str(P), ctx)), ctx) == P


@settings(max_examples=60, deadline=None)
@given(polys)
def test_table_paths_agree(args):
    ctx, d, s = args
    P = random_poly(ctx, d, stream(s, 0))
    ref = np.array([evaluate(P, x) for x in enumerate_points(ctx)])
    assert np.array_equal(truth_table(P).values, ref)
    assert np.array_equal(truth_table(P, fast=False).values, ref)
    assert np.array_equal(evaluate_ranks(P, np.arange(ctx.size)), ref)


@settings(max_examples=60, deadline=None)
@given(polys, st.data())
def test_derivative_lowers_degree_and_matches_table(args, data):
    ctx, d, s = args
    P = random_poly(ctx, d, stream(s, 0))
    h = ctx.unrank(data.draw(st.integers(0, ctx.size - 1)))
    D = additive_derivative(P, h)
    assert D.degree <= max(P.degree - 1, -1) or D.is_zero()
    for x in enumerate_points(ctx):
        assert evaluate(D, x) == (evaluate(P, add_points(ctx, x, h)) - evaluate(P, x)) % ctx.p


@settings(max_examples=40, deadline=None)
@given(polys, st.data())
def test_degree_d_killed_by_d_plus_1_derivatives(args, data):
    ctx, d, s = args
    P = random_poly(ctx, d, stream(s, 0))
    hs = [ctx.unrank(data.draw(st.integers(0, ctx.size - 1))) for _ in range(d + 1)]
    assert iterated_derivative(P, hs).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys)
def test_ring_laws_pointwise(args):
    ctx, d, s = args
    g = stream(s, 1)
    P, Q = random_poly(ctx, d, g), random_poly(ctx, 2, g)
    for x in enumerate_points(ctx):
        assert evaluate(P * Q, x) == evaluate(P, x) * evaluate(Q, x) % ctx.p
        assert evaluate(P + Q, x) == (evaluate(P, x) + evaluate(Q, x)) % ctx.p
        assert evaluate(P - Q, x) == (evaluate(P, x) - evaluate(Q, x)) % ctx.p
    basis = monomial_basis(ctx, d)
    assert poly_from_coeffs(ctx, basis, coeffs_in_basis(P, basis)) == P


def test_bilinear_examples():
    assert bilinear_B((1, 0, 0), (1, 0, 0)) == 0
    assert bilinear_B((1, 0, 0), (0, 1, 0)) == 1
    assert bilinear_B((1, 1, 0), (1, 1, 1)) == 0
