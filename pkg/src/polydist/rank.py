"""How few lower-degree polynomials a polynomial can be written through."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IntractableError
from .field import DEFAULT_LIMITS, Limits
from .gowers import bias
from .linalg import nullspace_mod_p, rank_mod_p, row_reduce, solve_mod_p
from .poly import Poly, monomial_basis, poly_from_coeffs, truth_table


@dataclass
class BilinearData:
    matrix: np.ndarray
    linear: np.ndarray
    constant: int
    sym_rank: int
    p: int

    @property
    def form_matrix(self) -> np.ndarray:
        """Symmetrized matrix (p odd) or symplectic matrix A + A^T (p = 2)."""
        if self.p == 2:
            return (self.matrix + self.matrix.T) % 2
        return self.matrix

    def evaluate(self, x) -> int:
        x = np.asarray(x, dtype=np.int64)
        return int((x @ self.matrix @ x + self.linear @ x + self.constant) % self.p)

    def to_dict(self) -> dict:
        return {"matrix": self.matrix.tolist(), "linear": self.linear.tolist(),
                "constant": self.constant, "sym_rank": self.sym_rank}


def quadratic_decompose(P: Poly) -> BilinearData:
    """Write P(x) = x^T M x + L.x + c and compute the rank of its bilinear part."""
    if P.degree > 2:
        raise DomainError(f"quadratic_decompose needs degree <= 2, got {P.degree}")
    ctx = P.ctx
    p, n = ctx.p, ctx.n
    A = np.zeros((n, n), dtype=np.int64)
    L = np.zeros(n, dtype=np.int64)
    for exps, c in P.terms.items():
        idx = [i for i, e in enumerate(exps) if e]
        deg = sum(exps)
        if deg == 1:
            L[idx[0]] = c
        elif deg == 2 and len(idx) == 2:
            A[idx[0], idx[1]] = c
        elif deg == 2:
            A[idx[0], idx[0]] = c
    if p == 2:
        M = A
        rank = rank_mod_p((A + A.T) % 2, 2)
    else:
        half = pow(2, -1, p)
        M = np.diag(np.diag(A)) + (np.triu(A, 1) + np.triu(A, 1).T) * half
        M %= p
        rank = rank_mod_p(M, p)
    return BilinearData(M, L, P.constant_term(), rank, p)


@dataclass
class GaussLawReport:
    bias_magnitude: float
    sym_rank: int
    consistent: bool

    def to_dict(self):
        return {"bias_magnitude": self.bias_magnitude, "sym_rank": self.sym_rank,
                "consistent": self.consistent}


def gauss_law_check(P: Poly, limits: Limits | None = None, tol: float = 1e-9) -> GaussLawReport:
    """The bias of a quadratic phase has magnitude 0 or p^(-rank/2)."""
    data = quadratic_decompose(P)
    mag = abs(bias(P, limits))
    target = P.ctx.p ** (-data.sym_rank / 2)
    ok = mag <= tol or abs(mag - target) <= tol
    return GaussLawReport(mag, data.sym_rank, bool(ok))


def analytic_rank_proxy(P: Poly, limits: Limits | None = None) -> float:
    """-log_p |bias(P)|; infinite for unbiased P."""
    b = abs(bias(P, limits))
    if b < 1e-12:
        return math.inf
    return max(0.0, -math.log(b, P.ctx.p))


# -- measurability --------------------------------------------------------------

@dataclass
class Measurability:
    measurable: bool
    lookup: dict = field(default_factory=dict)
    witness_points: tuple | None = None


def is_measurable(P: Poly, Qs: list, limits: Limits | None = None) -> Measurability:
    """Whether P is constant on every fiber of x -> (Q_1(x), ..., Q_k(x))."""
    for Q in Qs:
        if Q.ctx != P.ctx:
            raise DomainError("context mismatch")
    ctx = P.ctx
    pv = truth_table(P, limits).values
    if Qs:
        qv = np.stack([truth_table(Q, limits).values for Q in Qs], axis=1)
    else:
        qv = np.zeros((ctx.size, 0), dtype=np.uint8)
    keys, first, inverse = np.unique(qv, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    expected = pv[first][inverse]
    bad = np.nonzero(expected != pv)[0]
    if bad.size:
        r = int(bad[0])
        return Measurability(False, {}, (ctx.unrank(int(first[inverse[r]])), ctx.unrank(r)))
    lookup = {tuple(int(v) for v in k): int(pv[i]) for k, i in zip(keys, first)}
    return Measurability(True, lookup)


@dataclass
class RankCertificate:
    d: int
    k: float
    witnesses: list
    lookup: dict

    def replay(self, P: Poly, limits: Limits | None = None) -> bool:
        """Recompute B(Q_1(x), ..., Q_k(x)) at every x and compare with P."""
        if self.k == math.inf:
            return False
        if any(Q.degree > self.d for Q in self.witnesses):
            return False
        ctx = P.ctx
        pv = truth_table(P, limits).values
        tabs = [truth_table(Q, limits).values for Q in self.witnesses]
        for r in range(ctx.size):
            key = tuple(int(t[r]) for t in tabs)
            if self.lookup.get(key) != int(pv[r]):
                return False
        return True

    def to_dict(self):
        return {"d": self.d, "k": None if self.k == math.inf else self.k,
                "witnesses": [str(Q) for Q in self.witnesses],
                "lookup": [{"values": list(k), "output": v} for k, v in sorted(self.lookup.items())]}


def brute_rank(P: Poly, d: int, limits: Limits | None = None) -> RankCertificate:
    """Least k with P = B(Q_1..Q_k), deg Q_i <= d, by exhaustive search (tiny F_2 cases only)."""
    ctx = P.ctx
    if ctx.p != 2 or ctx.n > 3 or not 0 <= d <= 2:
        raise IntractableError(
            f"brute_rank is limited to p = 2, n <= 3, 0 <= d <= 2 (got p={ctx.p}, n={ctx.n}, d={d})"
        )
    if P.degree <= 0:
        return RankCertificate(d, 0, [], {(): P.constant_term()})
    basis = monomial_basis(ctx, d, min_degree=1)
    if not basis:
        return RankCertificate(d, math.inf, [], {})
    # nonconstant witnesses with zero constant term, in lex order of coefficient vectors
    cands = [poly_from_coeffs(ctx, basis, c)
             for c in itertools.product(range(ctx.p), repeat=len(basis)) if any(c)]
    tabs = [truth_table(Q, limits).values for Q in cands]
    pv = truth_table(P, limits).values
    for k in range(1, ctx.n + 1):
        for combo in itertools.combinations(range(len(cands)), k):
            key = np.zeros(ctx.size, dtype=np.int64)
            for j in combo:
                key = key * 2 + tabs[j]
            seen = {}
            ok = True
            for kv, v in zip(key.tolist(), pv.tolist()):
                if seen.setdefault(kv, v) != v:
                    ok = False
                    break
            if ok:
                Qs = [cands[j] for j in combo]
                m = is_measurable(P, Qs, limits)
                return RankCertificate(d, k, Qs, m.lookup)
    raise AssertionError("coordinate functions always give a representation")


def quadratic_witnesses(P: Poly) -> list:
    """Linear forms through which a polynomial of degree <= 2 factors.

    The quadratic part only depends on the rows of its form matrix; the
    residual dependence along the kernel is linear and is captured by one
    extra form when it is not already in that row space.
    """
    ctx = P.ctx
    p, n = ctx.p, ctx.n
    data = quadratic_decompose(P)
    S = data.form_matrix
    red, piv = row_reduce(S, p)
    rows = [red[i] for i in range(len(piv))]
    K = nullspace_mod_p(S, p)
    if K.shape[0]:
        base = P(ctx.zero())
        phi = np.array([(P(tuple(int(v) for v in k)) - base) % p for k in K], dtype=np.int64)
        ell = solve_mod_p(K, phi, p)
        if ell is not None and ell.any():
            stacked = np.array(rows + [ell]) if rows else ell[None, :]
            if rank_mod_p(stacked, p) > len(rows):
                rows.append(ell)
    return [Poly.linear(ctx, [int(v) for v in r]) for r in rows]
