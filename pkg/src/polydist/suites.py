"""Runnable checks of exact inequalities on small random instances."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DomainError
from .field import Limits, PrimeFieldCtx
from .gowers import gowers_norm_exact, weak_norm_exhaustive
from .poly import random_poly, symmetric_poly, truth_table
from .rng import check_seed, stream


def suite_nonvanishing(p: int, d: int, n: int, trials: int, seed: int,
                       limits: Limits | None = None) -> dict:
    """A nonzero P of degree <= d vanishes on at most a 1 - 2^-d fraction of points."""
    seed = check_seed(seed)
    ctx = PrimeFieldCtx(p, n)
    if d < 0 or d > n * (p - 1):
        raise DomainError("degree out of range")
    bound = 1 - Fraction(1, 2**d)
    rows, violations, equalities = [], 0, 0
    for t in range(trials):
        P = random_poly(ctx, d, stream(seed, t), nonzero=True)
        zeros = int((truth_table(P, limits).values == 0).sum())
        frac = Fraction(zeros, ctx.size)
        bad = frac > bound
        violations += bad
        equalities += frac == bound
        rows.append({"trial": t, "poly": str(P), "vanishing_fraction": str(frac), "violation": bool(bad)})
    return {"suite": "nonvanishing", "p": p, "d": d, "n": n, "trials": trials,
            "bound": str(bound), "violations": int(violations),
            "equality_witnesses": int(equalities),
            "max_fraction": max((r["vanishing_fraction"] for r in rows), key=Fraction, default=None),
            "table": rows}


def suite_recurrence(p: int, d: int, k: int, n: int, trials: int, seed: int,
                     limits: Limits | None = None) -> dict:
    """P(P_i(x) = P_i(x0) for all i) >= 2^-((p-1) k d) for P_1..P_k of degree <= d."""
    seed = check_seed(seed)
    ctx = PrimeFieldCtx(p, n)
    bound = Fraction(1, 2 ** ((p - 1) * k * d))
    rows, violations = [], 0
    for t in range(trials):
        g = stream(seed, t)
        polys = [random_poly(ctx, d, g) for _ in range(k)]
        x0 = int(g.integers(0, ctx.size))
        same = np.ones(ctx.size, dtype=bool)
        for P in polys:
            v = truth_table(P, limits).values
            same &= v == v[x0]
        prob = Fraction(int(same.sum()), ctx.size)
        bad = prob < bound
        violations += bad
        rows.append({"trial": t, "polys": [str(P) for P in polys], "x0": list(ctx.unrank(x0)),
                     "probability": str(prob), "violation": bool(bad)})
    return {"suite": "recurrence", "p": p, "d": d, "k": k, "n": n, "trials": trials,
            "bound": str(bound), "violations": int(violations),
            "min_probability": min((r["probability"] for r in rows), key=Fraction, default=None),
            "table": rows}


def suite_inverse_smallcase(p: int, d: int, n: int, trials: int, seed: int,
                            limits: Limits | None = None, threads: int | None = None) -> dict:
    """(U^{d+1}, u^{d+1}) for random phases of degree d + 1; u <= U must always hold."""
    seed = check_seed(seed)
    ctx = PrimeFieldCtx(p, n)
    order = d + 1
    rows, violations = [], 0

    def record(label, P):
        nonlocal violations
        U = gowers_norm_exact(P, order, limits, threads)
        u = weak_norm_exhaustive(P, order, limits)
        bad = u.best_value > U.norm + 1e-9
        violations += bad
        rows.append({"trial": label, "poly": str(P), "U": U.norm, "u": u.best_value,
                     "U_power_mean": U.power_mean, "violation": bool(bad)})

    for t in range(trials):
        record(t, random_poly(ctx, order, stream(seed, t)))
    out = {"suite": "inverse", "p": p, "d_plus_1": order, "n": n, "trials": trials,
           "violations": int(violations), "table": rows}
    if p == 2 and order == 4 and n >= 4:
        record("S4", symmetric_poly(ctx, 4))
        out["counterexample"] = rows[-1]
    return out
