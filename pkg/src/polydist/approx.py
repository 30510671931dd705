"""Approximating a biased polynomial by a function of a few of its derivatives.

For shifts h_1..h_k the derivative values D_{h_i}P(x) = P(x + h_i) - P(x)
are samples from mu_{P(x)}, where mu_r(t) = P_y(P(y) = t + r).  The
approximant guesses P(x) as the r whose mu_r is L1-closest to the observed
histogram, so it only ever looks at the k derivative values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .field import Limits
from .gowers import bias
from .poly import Poly, additive_derivative, evaluate, evaluate_ranks, truth_table
from .rng import check_seed, stream


@dataclass(frozen=True)
class DerivedMeasure:
    r: int
    weights: tuple  # Fractions, weights[t] = P_x(P(x) = t + r)

    def l1(self, other: "DerivedMeasure") -> Fraction:
        return sum((abs(a - b) for a, b in zip(self.weights, other.weights)), Fraction(0))

    def to_dict(self):
        return {"r": self.r, "weights": [str(w) for w in self.weights]}


@dataclass
class MeasureReport:
    measures: list
    min_distance: Fraction
    bias_magnitude: float
    separated: bool | None  # None when the bias is zero and separation is vacuous

    def to_dict(self):
        return {"measures": [m.to_dict() for m in self.measures],
                "min_distance": str(self.min_distance),
                "min_distance_float": float(self.min_distance),
                "bias_magnitude": self.bias_magnitude,
                "separation_bound": 4 * self.bias_magnitude / len(self.measures),
                "separated": self.separated}


def _value_counts(P: Poly, limits=None) -> np.ndarray:
    return truth_table(P, limits).histogram()


def derived_measures(P: Poly, limits: Limits | None = None) -> MeasureReport:
    p, N = P.ctx.p, P.ctx.size
    c = _value_counts(P, limits)
    ms = [DerivedMeasure(r, tuple(Fraction(int(c[(t + r) % p]), N) for t in range(p)))
          for r in range(p)]
    dmin = min((a.l1(b) for i, a in enumerate(ms) for b in ms[i + 1:]), default=Fraction(0))
    b = abs(bias(P, limits))
    separated = None if b < 1e-12 else bool(float(dmin) >= 4 * b / p - 1e-12)
    return MeasureReport(ms, dmin, b, separated)


class BVApproximant:
    """Nearest-derived-measure decoder built from k sampled shifts."""

    def __init__(self, P: Poly, shifts: Sequence[tuple], limits: Limits | None = None):
        if not shifts:
            raise DomainError("at least one shift is required")
        self.P = P
        self.ctx = P.ctx
        self.shifts = [tuple(h) for h in shifts]
        self.derivative_polys = [additive_derivative(P, h) for h in self.shifts]
        self.counts = _value_counts(P, limits).astype(np.int64)
        self.measures = derived_measures(P, limits).measures
        self._limits = limits

    @property
    def k(self) -> int:
        return len(self.shifts)

    def decide(self, derivative_values) -> np.ndarray:
        """Decision rule applied to rows of derivative values (shape (..., k))."""
        v = np.asarray(derivative_values, dtype=np.int64)
        p, N, k = self.ctx.p, self.ctx.size, v.shape[-1]
        obs = np.stack([(v == t).sum(axis=-1) for t in range(p)], axis=-1)
        # k*N times the L1 distance, in exact integers
        dist = np.stack([np.abs(obs * N - k * np.roll(self.counts, -r)).sum(axis=-1)
                         for r in range(p)], axis=-1)
        return np.argmin(dist, axis=-1).astype(np.uint8)

    def derivative_table(self) -> np.ndarray:
        """(p^n, k) derivative values at every point."""
        return np.stack([truth_table(D, self._limits).values for D in self.derivative_polys], axis=1)

    def table(self) -> np.ndarray:
        return self.decide(self.derivative_table())

    def evaluate_point(self, x: Sequence[int]) -> int:
        vals = [evaluate(D, x) for D in self.derivative_polys]
        return int(self.decide(np.array(vals)[None, :])[0])

    def majority_vote(self, derivative_values) -> np.ndarray:
        """p = 2 only: 1 iff strictly more than half the derivative values are 1."""
        v = np.asarray(derivative_values, dtype=np.int64)
        return (2 * v.sum(axis=-1) > v.shape[-1]).astype(np.uint8)

    def to_dict(self):
        return {"k": self.k, "shifts": [list(h) for h in self.shifts],
                "derivative_polys": [str(D) for D in self.derivative_polys],
                "measures": [m.to_dict() for m in self.measures]}


def bv_approximate(P: Poly, k: int, seed: int, limits: Limits | None = None) -> BVApproximant:
    """Sample k uniform shifts (deterministic in seed) and build the approximant."""
    if not isinstance(k, int) or k < 1:
        raise DomainError("k must be a positive integer")
    seed = check_seed(seed)
    ranks = stream(seed, 0).integers(0, P.ctx.size, size=k, dtype=np.int64)
    return BVApproximant(P, [P.ctx.unrank(int(r)) for r in ranks], limits)


def agreement(P: Poly, approx: BVApproximant, limits: Limits | None = None) -> Fraction:
    """|{x : P(x) = approx(x)}| / p^n."""
    if P.ctx != approx.ctx:
        raise DomainError("context mismatch")
    pv = truth_table(P, limits).values
    return Fraction(int((pv == approx.table()).sum()), P.ctx.size)


def default_sample_count(p: int, sigma: float, delta: float) -> int:
    """k = ceil(p^5 / (2 sigma delta^2))."""
    if not (0 < sigma <= 1 and 0 < delta <= 1):
        raise DomainError("sigma and delta must lie in (0, 1]")
    return math.ceil(p**5 / (2 * sigma * delta**2))


def chebyshev_regime_check(P: Poly, k: int, eta: float, samples: int, seed: int,
                           limits: Limits | None = None) -> dict:
    """Empirical rate of |observed frequency - mu_{P(x)}(t)| >= eta over fresh (x, h) draws.

    Chebyshev bounds the rate for each residue t by 1/(4 k eta^2).
    """
    if eta <= 0:
        raise DomainError("eta must be positive")
    seed = check_seed(seed)
    ctx = P.ctx
    p, N = ctx.p, ctx.size
    pv = truth_table(P, limits).values.astype(np.int64)
    counts = np.bincount(pv, minlength=p)
    g = stream(seed, 1)
    xs = g.integers(0, N, size=samples, dtype=np.int64)
    hs = g.integers(0, N, size=(samples, k), dtype=np.int64)
    ys = ctx.add_ranks(xs[:, None], hs)
    dv = (pv[ys] - pv[xs][:, None]) % p
    rates = []
    for t in range(p):
        freq = (dv == t).mean(axis=1)
        mu = counts[(t + pv[xs]) % p] / N
        rates.append(float((np.abs(freq - mu) >= eta).mean()))
    bound = 1 / (4 * k * eta * eta)
    sd = math.sqrt(min(bound, 1.0) * (1 - min(bound, 1.0)) / samples)
    worst = max(rates)
    return {"rates": rates, "worst_rate": worst, "bound": bound,
            "allowance": bound + 3 * sd, "ok": worst <= bound + 3 * sd}


def measurability_replay(P: Poly, approx: BVApproximant, samples: int, seed: int,
                         limits: Limits | None = None) -> dict:
    """Check the approximant is a function of its k derivative values.

    A lookup from derivative-value vectors to outputs is built from the full
    table; sampled points are then re-evaluated pointwise through the
    symbolic derivative polynomials and compared against the lookup.
    """
    seed = check_seed(seed)
    ctx = approx.ctx
    dt = approx.derivative_table()
    out = approx.table()
    keys, first, inv = np.unique(dt, axis=0, return_index=True, return_inverse=True)
    inv = inv.ravel()
    constant_on_fibers = bool(np.array_equal(out[first][inv], out))
    lookup = {tuple(int(v) for v in kk): int(out[i]) for kk, i in zip(keys, first)}
    xs = stream(seed, 2).integers(0, ctx.size, size=samples, dtype=np.int64)
    # pointwise path: evaluate the symbolic derivatives directly at the sampled ranks
    vals = np.stack([evaluate_ranks(D, xs, limits) for D in approx.derivative_polys], axis=1)
    direct = approx.decide(vals)
    looked = np.array([lookup.get(tuple(row), -1) for row in vals.tolist()])
    failures = int((looked != direct).sum())
    return {"samples": samples, "failures": failures, "fibers": len(lookup),
            "witnesses": approx.k, "constant_on_fibers": constant_on_fibers,
            "ok": failures == 0 and constant_on_fibers}
