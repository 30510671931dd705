"""Gowers uniformity norms of polynomial phases, plus their weak (correlation) counterparts.

The exact norm uses the identity ``E_{x,h} e(g(x+h) - g(x)) = |E_x e(g(x))|^2``
for the last derivative, so after d derivative layers only a per-table
residue histogram is needed.  The squared magnitude of a character sum with
residue counts ``c`` is ``sum_s H[s] e(s/p)`` where ``H`` is the cyclic
autocorrelation of ``c``; accumulating ``H`` keeps everything in integers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ResourceError
from .field import (DEFAULT_LIMITS, CycloSum, Limits, PrimeFieldCtx, cube_signs,
                    cube_vertex_ranks)
from .poly import (PhaseTable, Poly, evaluate_ranks, monomial_basis, poly_from_coeffs,
                   truth_table)
from .rng import check_seed, default_threads, map_chunks, stream

BATCH_ELEMENTS = 1 << 22


@dataclass
class GowersResult:
    d_plus_1: int
    power_mean: float
    norm: float
    method: str
    stderr: float = 0.0
    samples: int = 0
    exact: Fraction | None = None
    imag: float = 0.0

    def to_dict(self) -> dict:
        out = {
            "d_plus_1": self.d_plus_1,
            "power_mean": self.power_mean,
            "norm": self.norm,
            "method": self.method,
            "stderr": self.stderr,
            "samples": self.samples,
            "imag": self.imag,
        }
        if self.exact is not None:
            key = "sample_mean_exact" if self.method == "monte_carlo" else "exact"
            out[key] = f"{self.exact.numerator}/{self.exact.denominator}"
        return out


@dataclass
class WeakNormResult:
    d_plus_1: int
    best_value: float
    witness: Poly
    search_size: int
    exact: Fraction | None = None

    def to_dict(self) -> dict:
        out = {
            "d_plus_1": self.d_plus_1,
            "best_value": self.best_value,
            "witness": str(self.witness),
            "search_size": self.search_size,
        }
        if self.exact is not None:
            out["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        return out


def _norm_from_power(power_mean: float, order: int) -> float:
    return max(power_mean, 0.0) ** (1.0 / 2**order)


def phase_table(f, limits: Limits | None = None) -> PhaseTable:
    if isinstance(f, PhaseTable):
        return f
    if isinstance(f, Poly):
        return truth_table(f, limits)
    raise DomainError("expected a Poly or PhaseTable phase")


def _check_order(order: int):
    if not isinstance(order, int) or order < 1:
        raise DomainError("norm order d+1 must be a positive integer")


# -- bias and correlation -------------------------------------------------------

def bias_sum(f, limits: Limits | None = None) -> CycloSum:
    t = phase_table(f, limits)
    return CycloSum(t.ctx.p, tuple(int(c) for c in t.histogram()))


def bias(f, limits: Limits | None = None) -> complex:
    """E_x e_F(P(x))."""
    return bias_sum(f, limits).mean()


def exact_bias_f2(f, limits: Limits | None = None) -> Fraction:
    s = bias_sum(f, limits)
    return Fraction(s.integer_value(), s.mass)


def correlate_with(f, Q: Poly, limits: Limits | None = None) -> complex:
    """E_x f(x) e_F(-Q(x)) for a phase f."""
    t = phase_table(f, limits)
    if Q.ctx != t.ctx:
        raise DomainError("context mismatch between f and Q")
    q = truth_table(Q, limits).values
    p = t.ctx.p
    diff = (t.values.astype(np.int16) - q) % p
    return CycloSum.from_residues(p, diff).mean()


# -- exact norm -------------------------------------------------------------------

def _squared_sum_autocorrelation(rows: np.ndarray, p: int) -> np.ndarray:
    """Sum over rows of the cyclic autocorrelation of each row's residue histogram."""
    if p == 2:
        ones = np.count_nonzero(rows, axis=1).astype(np.int64)
        zeros = rows.shape[1] - ones
        diff = zeros - ones
        total = int((diff * diff).sum())
        return np.array([total, 0], dtype=object)
    counts = np.stack([np.count_nonzero(rows == t, axis=1) for t in range(p)], axis=1)
    counts = counts.astype(np.int64)
    out = np.zeros(p, dtype=object)
    for s in range(p):
        out[s] = int((counts * np.roll(counts, -s, axis=1)).sum())
    return out


def _derive_all(tables: np.ndarray, addtab: np.ndarray, p: int) -> np.ndarray:
    """Stack of D_h g for every table g in ``tables`` and every shift h."""
    shifted = tables[:, addtab]  # [b, h, x] = g_b(x + h)
    if p == 2:
        out = shifted ^ tables[:, None, :]
    else:
        out = ((shifted.astype(np.int16) - tables[:, None, :]) % p).astype(np.uint8)
    return out.reshape(-1, tables.shape[1])


def _layered_sum(tables: np.ndarray, layers: int, addtab: np.ndarray, p: int) -> np.ndarray:
    if layers == 0:
        return _squared_sum_autocorrelation(tables, p)
    N = tables.shape[1]
    batch = max(1, BATCH_ELEMENTS // (N * N))
    total = np.zeros(p, dtype=object)
    for start in range(0, tables.shape[0], batch):
        derived = _derive_all(tables[start:start + batch], addtab, p)
        total = total + _layered_sum(derived, layers - 1, addtab, p)
    return total


def _autocorrelation_value(H, p: int) -> float:
    return math.fsum(int(H[s]) * math.cos(2 * math.pi * s / p) for s in range(p))


def gowers_norm_exact(f, d_plus_1: int, limits: Limits | None = None,
                      threads: int | None = None) -> GowersResult:
    """Exact U^{d+1} power mean by exhaustive derivative layers."""
    _check_order(d_plus_1)
    limits = limits or DEFAULT_LIMITS
    t = phase_table(f, limits)
    ctx = t.ctx
    cube_bits = ctx.table_bits * d_plus_1
    if cube_bits > limits.max_cube_bits + 1e-9:
        raise ResourceError(
            f"exact U^{d_plus_1} needs p^(n*{d_plus_1}) = 2^{cube_bits:.1f} cube evaluations, "
            f"above the cap 2^{limits.max_cube_bits} (max_cube_bits); use the monte_carlo method"
        )
    p, N = ctx.p, ctx.size
    addtab = ctx.addition_table() if d_plus_1 > 1 else None
    base = t.values[None, :]
    layers = d_plus_1 - 1
    if layers == 0:
        H = _squared_sum_autocorrelation(base, p)
    else:
        first = _derive_all(base, addtab, p)
        threads = threads or default_threads()
        parts = np.array_split(np.arange(first.shape[0]), min(threads, first.shape[0]))

        def work(idx):
            return _layered_sum(first[idx], layers - 1, addtab, p)

        if threads == 1 or len(parts) == 1:
            results = [work(idx) for idx in parts]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(work, parts))
        H = np.zeros(p, dtype=object)
        for r in results:
            H = H + r
    denom = N ** (d_plus_1 + 1)
    if p == 2:
        exact = Fraction(int(H[0]), denom)
        pm = float(exact)
    else:
        exact = None
        pm = _autocorrelation_value(H, p) / denom
    return GowersResult(d_plus_1, pm, _norm_from_power(pm, d_plus_1), "exact", exact=exact)


def gowers_norm_table(values, ctx: PrimeFieldCtx, d_plus_1: int) -> GowersResult:
    """U^{d+1} power mean for a dense complex-valued table (small instances)."""
    _check_order(d_plus_1)
    f = np.asarray(values, dtype=np.complex128)
    if f.shape != (ctx.size,):
        raise DomainError("table length must be p^n")
    addtab = ctx.addition_table()
    tables = f[None, :]
    for _ in range(d_plus_1 - 1):
        tables = (tables[:, addtab] * np.conj(tables)[:, None, :]).reshape(-1, ctx.size)
    means = tables.mean(axis=1)
    pm = float(np.mean(np.abs(means) ** 2))
    return GowersResult(d_plus_1, pm, _norm_from_power(pm, d_plus_1), "exact")


def gowers_norm_nested(f, d_plus_1: int) -> float:
    """Direct nested sum over (x, h_1..h_{d+1}); reference for tiny instances."""
    t = phase_table(f)
    ctx = t.ctx
    N = ctx.size
    if N ** (d_plus_1 + 1) > 1 << 22:
        raise ResourceError("nested reference limited to 2^22 terms")
    grids = np.meshgrid(*[np.arange(N)] * (d_plus_1 + 1), indexing="ij")
    x = grids[0].ravel()
    hs = np.stack([g.ravel() for g in grids[1:]])
    verts = cube_vertex_ranks(ctx, x, hs)
    signs = cube_signs(d_plus_1)
    res = (signs[:, None] * t.values[verts].astype(np.int64)).sum(axis=0) % ctx.p
    return CycloSum.from_residues(ctx.p, res).mean().real


# -- Monte Carlo ------------------------------------------------------------------

def _evaluator(f, limits):
    if isinstance(f, PhaseTable):
        vals = f.values
        return f.ctx, lambda r: vals[r]
    if isinstance(f, Poly):
        return f.ctx, lambda r: evaluate_ranks(f, r, limits)
    raise DomainError("expected a Poly or PhaseTable phase")


def gowers_norm_mc(f, d_plus_1: int, samples: int, seed: int, threads: int | None = None,
                   limits: Limits | None = None) -> GowersResult:
    """Monte Carlo estimate of the U^{d+1} power mean, reproducible for a given seed."""
    _check_order(d_plus_1)
    if not isinstance(samples, int) or samples < 1:
        raise DomainError("samples must be a positive integer")
    seed = check_seed(seed)
    ctx, ev = _evaluator(f, limits)
    p, N = ctx.p, ctx.size
    signs = cube_signs(d_plus_1)

    def chunk(index: int, m: int) -> np.ndarray:
        g = stream(seed, index)
        pts = g.integers(0, N, size=(d_plus_1 + 1, m), dtype=np.int64)
        verts = cube_vertex_ranks(ctx, pts[0], pts[1:])
        vals = ev(verts).astype(np.int64)
        res = (signs[:, None] * vals).sum(axis=0) % p
        return np.bincount(res, minlength=p).astype(np.int64)

    counts = sum(map_chunks(chunk, samples, threads), np.zeros(p, dtype=np.int64))
    cs = CycloSum(p, tuple(int(c) for c in counts))
    mean = cs.mean()
    cos = np.cos(2 * np.pi * np.arange(p) / p)
    second = float(np.dot(counts, cos * cos)) / samples
    var = max(second - mean.real**2, 0.0)
    if samples > 1:
        var *= samples / (samples - 1)
    stderr = math.sqrt(var / samples)
    pm = mean.real
    exact = Fraction(cs.integer_value(), samples) if p == 2 else None
    return GowersResult(d_plus_1, pm, _norm_from_power(pm, d_plus_1), "monte_carlo",
                        stderr=stderr, samples=samples, exact=exact, imag=mean.imag)


# -- weak norm ----------------------------------------------------------------------

def _walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized WHT along the last axis (length a power of two)."""
    a = a.astype(np.int64, copy=True)
    N = a.shape[-1]
    h = 1
    lead = a.shape[:-1]
    while h < N:
        v = a.reshape(lead + (-1, 2, h))
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] = x + y
        v[..., 1, :] = x - y
        h *= 2
    return a


def weak_norm_exhaustive(f, d_plus_1: int, limits: Limits | None = None) -> WeakNormResult:
    """max over Q of degree <= d of |E_x f(x) e_F(-Q(x))|, with the smallest maximizer.

    Canonical order: coefficient vectors over the graded monomial basis
    (constant, x1..xn, then higher degrees) compared lexicographically.  The
    constant coefficient never changes the magnitude and is fixed to 0.
    """
    _check_order(d_plus_1)
    limits = limits or DEFAULT_LIMITS
    t = phase_table(f, limits)
    ctx = t.ctx
    p, n, N = ctx.p, ctx.n, ctx.size
    d = d_plus_1 - 1
    basis = monomial_basis(ctx, d)
    if len(basis) * math.log2(p) > limits.max_search_bits + 1e-9:
        raise ResourceError(
            f"exhaustive weak norm searches p^{len(basis)} polynomials, above the cap "
            f"2^{limits.max_search_bits} (max_search_bits); use correlate_with on a "
            "chosen family such as the symmetric polynomials"
        )
    high = [e for e in basis if sum(e) >= 2]
    n_high = len(high)
    high_tables = np.stack([truth_table(Poly(ctx, {e: 1}), limits).values.astype(np.int64)
                            for e in high]) if high else np.zeros((0, N), dtype=np.int64)
    total_high = p**n_high
    batch = max(1, BATCH_ELEMENTS // N)
    weights = p ** np.arange(n_high - 1, -1, -1, dtype=np.int64)
    fvals = t.values.astype(np.int64)
    xi_digits = ctx.digits(np.arange(N))
    # lex key of xi = (xi_1, ..., xi_n) with xi_1 most significant
    xi_lex = (xi_digits * (p ** np.arange(n - 1, -1, -1, dtype=np.int64))).sum(axis=1)

    best_mag = -1.0
    best_key = None
    tol = 1e-9
    for start in range(0, total_high, batch):
        idx = np.arange(start, min(start + batch, total_high), dtype=np.int64)
        coeffs = (idx[:, None] // weights[None, :]) % p if n_high else np.zeros((idx.size, 0), np.int64)
        g = (fvals[None, :] - coeffs @ high_tables) % p
        if p == 2:
            W = _walsh_hadamard(1 - 2 * g)
            mags = np.abs(W) / N
        else:
            phase = np.exp(2j * np.pi * g / p).reshape((idx.size,) + (p,) * n)
            F = np.fft.fftn(phase, axes=tuple(range(1, n + 1))).reshape(idx.size, N)
            mags = np.abs(F) / N
        m = float(mags.max())
        if m > best_mag + tol:
            best_mag, best_key = m, None
        if m >= best_mag - tol:
            rows, cols = np.nonzero(mags >= best_mag - tol)
            key = min(zip(xi_lex[cols].tolist(), (idx[rows]).tolist(), cols.tolist()))
            if best_key is None or key < best_key:
                best_key = key
    _, hidx, xi_rank = best_key
    lin = ctx.unrank(int(xi_rank))
    hcoef = [(hidx // int(w)) % p for w in weights] if n_high else []
    full = [0] + list(lin) + hcoef
    witness = poly_from_coeffs(ctx, basis, full)
    diff = (fvals - truth_table(witness, limits).values) % p
    cs = CycloSum.from_residues(p, diff)
    value = abs(cs.mean())
    best_exact = Fraction(abs(cs.integer_value()), N) if p == 2 else None
    return WeakNormResult(d_plus_1, value, witness, p ** (len(basis) - 1), exact=best_exact)


def inverse_probe(P, d_plus_1: int, limits: Limits | None = None, threads: int | None = None):
    """(U^{d+1} result, u^{d+1} result) for the phase of P."""
    return (gowers_norm_exact(P, d_plus_1, limits, threads),
            weak_norm_exhaustive(P, d_plus_1, limits))
