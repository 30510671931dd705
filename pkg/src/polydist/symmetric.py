"""Symmetric polynomials: the S_4 counterexample machinery, partition calculus,
the variety identity and a greedy simultaneous Ramsey extraction."""
from __future__ import annotations

import cmath
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .field import DEFAULT_LIMITS, Limits, PrimeFieldCtx, cube_signs, cube_vertex_ranks, popcount
from .poly import evaluate_ranks, iterated_derivative, symmetric_poly, truth_table
from .rng import check_seed, stream

EXHAUSTIVE_BITS = 24


def _require_f2(p: int):
    if p != 2:
        raise DomainError("this operation is defined over F_2 only")


# -- B(a, b) and the quartic identity -----------------------------------------------

def bilinear_B(a, b, p: int = 2):
    """sum over i != j of a_i b_j mod 2, i.e. |a||b| + |a & b| mod 2.

    Accepts two points (coordinate sequences) or two arrays of bit-mask ranks.
    """
    _require_f2(p)
    if isinstance(a, (tuple, list)) and isinstance(b, (tuple, list)):
        if len(a) != len(b):
            raise DomainError("dimension mismatch")
        wa, wb = sum(a), sum(b)
        dot = sum(x * y for x, y in zip(a, b))
        return (wa * wb + dot) % 2
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return ((popcount(a) * popcount(b) + popcount(a & b)) % 2).astype(np.int64)


def bilinear_B_double_sum(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(a[i] * b[j] for i in range(len(a)) for j in range(len(b)) if i != j) % 2


def quartic_form(a, b, c, d):
    """B(a,b)B(c,d) + B(a,c)B(b,d) + B(a,d)B(b,c) mod 2 on rank arrays."""
    B = bilinear_B
    return (B(a, b) * B(c, d) + B(a, c) * B(b, d) + B(a, d) * B(b, c)) % 2


def _s_cube_derivative_f2(d: int, x, hs) -> np.ndarray:
    """D_{h_1}..D_{h_k} S_d(x) over F_2 from Lucas on vertex weights."""
    verts = cube_vertex_ranks(_F2Adder(), x, hs)
    vals = ((popcount(verts) & d) == d).astype(np.int64)
    return vals.sum(axis=0) % 2


class _F2Adder:
    """Minimal stand-in for a context: bit-mask addition is XOR."""

    @staticmethod
    def add_ranks(a, b):
        return np.asarray(a) ^ np.asarray(b)


@dataclass
class IdentityReport:
    name: str
    checked: int
    failures: int
    exhaustive: bool
    example_failure: list | None = None
    extra: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self):
        out = {"name": self.name, "checked": self.checked, "failures": self.failures,
               "exhaustive": self.exhaustive, "ok": self.ok}
        if self.example_failure is not None:
            out["example_failure"] = self.example_failure
        if self.extra:
            out.update(self.extra)
        return out


def quartic_derivative_identity_check(n: int, trials: int = 0, seed: int | None = None,
                                      chunk: int = 1 << 16) -> IdentityReport:
    """D_aD_bD_cD_d S_4 = B(a,b)B(c,d) + B(a,c)B(b,d) + B(a,d)B(b,c) over F_2^n.

    Exhaustive over all quadruples (with x = 0) when n <= 4, otherwise on
    ``trials`` random (x, a, b, c, d).
    """
    if n < 1 or n > 62:
        raise DomainError("n must lie in 1..62")
    failures, checked, example = 0, 0, None
    if n <= 4:
        N = 1 << n
        grid = np.arange(N**4, dtype=np.int64)
        a, b, c, d = [(grid >> (n * i)) & (N - 1) for i in range(4)]
        x = np.zeros_like(a)
        lhs = _s_cube_derivative_f2(4, x, np.stack([a, b, c, d]))
        rhs = quartic_form(a, b, c, d)
        bad = np.nonzero(lhs != rhs)[0]
        failures, checked = int(bad.size), int(grid.size)
        if bad.size:
            i = bad[0]
            example = [int(a[i]), int(b[i]), int(c[i]), int(d[i])]
        return IdentityReport("qident", checked, failures, True, example)
    seed = check_seed(seed)
    done = 0
    idx = 0
    while done < trials:
        m = min(chunk, trials - done)
        g = stream(seed, idx)
        pts = g.integers(0, 1 << n, size=(5, m), dtype=np.int64)
        lhs = _s_cube_derivative_f2(4, pts[0], pts[1:])
        rhs = quartic_form(pts[1], pts[2], pts[3], pts[4])
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size and example is None:
            example = [int(v) for v in pts[:, bad[0]]]
        failures += int(bad.size)
        done += m
        idx += 1
    return IdentityReport("qident", done, failures, False, example)


# -- B6 ----------------------------------------------------------------------------

B6_CELLS = ("ab", "ac", "ad", "bc", "bd", "cd")


def _b6_codes(a, b, c, d) -> np.ndarray:
    B = bilinear_B
    parts = [B(a, b), B(a, c), B(a, d), B(b, c), B(b, d), B(c, d)]
    code = np.zeros(np.shape(a), dtype=np.int64)
    for bit, v in enumerate(parts):
        code |= v << bit
    return code


def b6_histogram(n: int, trials: int = 0, seed: int | None = None,
                 exhaustive_bits: int = EXHAUSTIVE_BITS) -> dict:
    """Distribution of (B(a,b), B(a,c), B(a,d), B(b,c), B(b,d), B(c,d)).

    Cell index packs the six bits with B(a,b) as bit 0 through B(c,d) as bit 5.
    """
    if n < 1 or n > 62:
        raise DomainError("n must lie in 1..62")
    counts = np.zeros(64, dtype=np.int64)
    if 4 * n <= exhaustive_bits:
        N = 1 << n
        total = N**4
        step = 1 << 20
        for start in range(0, total, step):
            grid = np.arange(start, min(start + step, total), dtype=np.int64)
            q = [(grid >> (n * i)) & (N - 1) for i in range(4)]
            counts += np.bincount(_b6_codes(*q), minlength=64)
        exhaustive = True
    else:
        seed = check_seed(seed)
        if trials < 1:
            raise DomainError("sampling needs trials >= 1")
        done, idx = 0, 0
        while done < trials:
            m = min(1 << 16, trials - done)
            q = stream(seed, idx).integers(0, 1 << n, size=(4, m), dtype=np.int64)
            counts += np.bincount(_b6_codes(*q), minlength=64)
            done += m
            idx += 1
        total = trials
        exhaustive = False
    dev = float(np.max(np.abs(counts / total - 1 / 64)))
    return {"n": n, "counts": [int(c) for c in counts], "total": int(total),
            "exhaustive": exhaustive, "max_deviation": dev, "cells": list(B6_CELLS)}


# -- weight profiles ---------------------------------------------------------------

@dataclass
class Mod8Profile:
    n: int
    counts: list
    multisection_max_error: float

    @property
    def multisection_ok(self) -> bool:
        return self.multisection_max_error <= 8e-10

    def to_dict(self):
        return {"n": self.n, "counts": [int(c) for c in self.counts],
                "multisection_max_error": self.multisection_max_error,
                "multisection_ok": self.multisection_ok}


def weight_profile(n: int, modulus: int) -> list:
    """counts[a] = #{x in F_2^n : |x| = a mod modulus}, exactly, by Pascal's rule."""
    if n < 0 or modulus < 1:
        raise DomainError("need n >= 0 and modulus >= 1")
    row = [1] + [0] * (modulus - 1)
    for _ in range(n):
        row = [row[a] + row[a - 1] for a in range(modulus)] if modulus > 1 else [2 * row[0]]
    return row


def multisection_fractions(n: int, modulus: int = 8) -> list:
    """(1/m) sum_r e^{-2 pi i r a/m} ((1 + e^{2 pi i r/m})/2)^n for each residue a."""
    out = []
    for a in range(modulus):
        s = 0j
        for r in range(modulus):
            z = (1 + cmath.exp(2j * math.pi * r / modulus)) / 2
            s += cmath.exp(-2j * math.pi * r * a / modulus) * z**n
        out.append((s / modulus).real)
    return out


def mod8_profile(n: int) -> Mod8Profile:
    if n > 10**4:
        raise DomainError("mod8_profile supports n <= 10^4")
    counts = weight_profile(n, 8)
    approx = multisection_fractions(n, 8)
    err = max(abs(float(Fraction(c, 2**n)) - v) for c, v in zip(counts, approx))
    return Mod8Profile(n, counts, err)


def lucas_binomial(a: int, b: int, p: int) -> int:
    """C(a, b) mod p as a product of digit binomials."""
    if a < 0 or b < 0:
        raise DomainError("arguments must be nonnegative")
    out = 1
    while a or b:
        ai, bi = a % p, b % p
        if bi > ai:
            return 0
        out = out * math.comb(ai, bi) % p
        a //= p
        b //= p
    return out % p


def symmetric_correlation(n: int, target_d: int, coeffs: Sequence[int]) -> Fraction:
    """E_x (-1)^{S_target(x) + sum_i c_i S_i(x)} over F_2^n, exactly.

    Every S_i with i <= target_d depends only on |x| mod 2^bitlen(target_d),
    so a weight profile for that modulus suffices.
    """
    if not 1 <= target_d <= 8:
        raise DomainError("target_d must lie in 1..8")
    if len(coeffs) != target_d:
        raise DomainError(f"expected {target_d} coefficients c_0..c_{target_d - 1}")
    modulus = 1 << target_d.bit_length()
    prof = weight_profile(n, modulus)
    total = 0
    for a, cnt in enumerate(prof):
        e = lucas_binomial(a, target_d, 2)
        e += sum(int(c) * lucas_binomial(a, i, 2) for i, c in enumerate(coeffs))
        total += cnt if e % 2 == 0 else -cnt
    return Fraction(total, 2**n)


def symmetric_correlation_table(n: int, target_d: int = 4) -> list:
    """Correlation for every coefficient vector, in itertools.product order."""
    return [(c, symmetric_correlation(n, target_d, c))
            for c in itertools.product((0, 1), repeat=target_d)]


def sd_factorization(d: int, n: int | None = None, limits: Limits | None = None) -> dict:
    """Split S_d = S_{d1} S_{d2} over F_2 when d is not a power of two."""
    if d < 1:
        raise DomainError("d must be positive")
    if d & (d - 1) == 0:
        return {"d": d, "power_of_two": True}
    d1 = d & -d
    d2 = d - d1
    out = {"d": d, "power_of_two": False, "d1": d1, "d2": d2}
    if n is not None:
        if n > 16:
            raise DomainError("table verification is limited to n <= 16")
        ctx = PrimeFieldCtx(2, n)
        t = truth_table(symmetric_poly(ctx, d, allow_zero=True), limits).values
        t1 = truth_table(symmetric_poly(ctx, d1, allow_zero=True), limits).values
        t2 = truth_table(symmetric_poly(ctx, d2, allow_zero=True), limits).values
        out["n"] = n
        out["verified"] = bool(np.array_equal(t, t1 & t2))
    return out


# -- partitions and the Moebius function -----------------------------------------------

@dataclass(frozen=True)
class Partition:
    blocks: tuple  # tuple of sorted tuples, ordered by minimum element

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        bs = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in bs):
            raise DomainError("blocks must be nonempty")
        flat = [v for b in bs for v in b]
        if len(flat) != len(set(flat)):
            raise DomainError("blocks must be disjoint")
        return cls(tuple(sorted(bs)))

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks)

    def refines(self, other: "Partition") -> bool:
        """self <= other: every block of self sits inside a block of other."""
        where = {v: i for i, b in enumerate(other.blocks) for v in b}
        return all(len({where[v] for v in b}) == 1 for b in self.blocks)

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def set_partitions(d: int) -> list:
    """All partitions of {1..d} in restricted-growth-string order."""
    out = []

    def rec(i, labels, m):
        if i == d:
            blocks = [[] for _ in range(m)]
            for v, lab in enumerate(labels, start=1):
                blocks[lab].append(v)
            out.append(Partition.of(blocks))
            return
        for lab in range(m + 1):
            rec(i + 1, labels + [lab], max(m, lab + 1))

    rec(0, [], 0)
    return out


def moebius(pi: Partition, sign: str = "standard") -> int:
    """prod over blocks of (-1)^{|C|-1} (|C|-1)!  ("unshifted" uses exponent |C|)."""
    if sign not in ("standard", "unshifted"):
        raise DomainError("sign must be 'standard' or 'unshifted'")
    shift = 1 if sign == "standard" else 0
    out = 1
    for b in pi.blocks:
        out *= (-1) ** (len(b) - shift) * math.factorial(len(b) - 1)
    return out


def partitions_and_moebius(d: int, sign: str = "standard") -> dict:
    """Partitions of [d] with their Moebius values and the inversion-identity checks.

    The sum of mu over everything below pi factors over the blocks of pi, so
    the identity reduces to block sums s(m) = sum over partitions of an
    m-set, which must be 1 for m = 1 and 0 for m >= 2.
    """
    if not 1 <= d <= 10:
        raise DomainError("d must lie in 1..10")
    parts = set_partitions(d)
    values = [moebius(pi, sign) for pi in parts]
    block_sums = {m: sum(moebius(s, sign) for s in set_partitions(m)) for m in range(1, d + 1)}
    pi_min = Partition.of([[v] for v in range(1, d + 1)])
    mu_min_ok = moebius(pi_min, sign) == 1
    inversion_ok = mu_min_ok and all(block_sums[m] == 0 for m in range(2, d + 1)) \
        and block_sums[1] == 1
    return {"d": d, "sign": sign, "partitions": list(zip(parts, values)),
            "count": len(parts), "mu_min_is_one": mu_min_ok, "block_sums": block_sums,
            "inversion_ok": inversion_ok}


def moebius_sum_below(pi: Partition, sign: str = "standard") -> int:
    """Direct sum of mu(pi') over pi' <= pi (reference for small d)."""
    return sum(moebius(q, sign) for q in set_partitions(pi.size) if q.refines(pi))


def _r_pi(pi: Partition, h: np.ndarray, p: int) -> np.ndarray:
    """R_pi for h of shape (trials, d, n)."""
    out = np.ones(h.shape[0], dtype=np.int64)
    for b in pi.blocks:
        prod = np.ones((h.shape[0], h.shape[2]), dtype=np.int64)
        for i in b:
            prod = prod * h[:, i - 1, :] % p
        out = out * (prod.sum(axis=1) % p) % p
    return out


def moebius_derivative_identity_check(d: int, n: int, p: int, trials: int = 1000,
                                      seed: int | None = None, sign: str = "standard",
                                      exhaustive_bits: int = 16) -> IdentityReport:
    """D_{h1}..D_{hd} S_d(x) = sum_pi mu(pi) R_pi(h1..hd) over F_p^n."""
    if not 1 <= d <= 5:
        raise DomainError("d must lie in 1..5")
    if not 1 <= n <= 8:
        raise DomainError("n must lie in 1..8")
    ctx = PrimeFieldCtx(p, n)
    S = symmetric_poly(ctx, d, allow_zero=True)
    N = ctx.size
    exhaustive = ctx.table_bits * (d + 1) <= exhaustive_bits
    if exhaustive:
        grid = np.arange(N ** (d + 1), dtype=np.int64)
        pts = np.stack([(grid // N**i) % N for i in range(d + 1)])
    else:
        seed = check_seed(seed)
        pts = stream(seed, 0).integers(0, N, size=(d + 1, trials), dtype=np.int64)
    x, hs = pts[0], pts[1:]
    verts = cube_vertex_ranks(ctx, x, hs)
    vals = evaluate_ranks(S, verts.ravel()).reshape(verts.shape).astype(np.int64)
    lhs = (cube_signs(d)[:, None] * vals).sum(axis=0) % p
    hd = np.moveaxis(ctx.digits(hs), 0, 1)  # (trials, d, n)
    rhs = np.zeros_like(lhs)
    for pi in set_partitions(d):
        mu = moebius(pi, sign) % p
        if mu:
            rhs = (rhs + mu * _r_pi(pi, hd, p)) % p
    bad = np.nonzero(lhs != rhs)[0]
    example = [int(v) for v in pts[:, bad[0]]] if bad.size else None
    return IdentityReport("moebius-derivative", int(lhs.size), int(bad.size), bool(exhaustive), example,
                          {"d": d, "n": n, "p": p, "sign": sign})


# -- the variety identity ----------------------------------------------------------------

def variety_table(ctx: PrimeFieldCtx, limits: Limits | None = None) -> np.ndarray:
    """Indicator of V = {S_1 = ... = S_p = 0}."""
    ind = np.ones(ctx.size, dtype=bool)
    for j in range(1, ctx.p + 1):
        S = symmetric_poly(ctx, j, allow_zero=True)
        if not S.is_zero():
            ind &= truth_table(S, limits).values == 0
    return ind


def _multiplicative_cube(values: np.ndarray, d: int) -> np.ndarray:
    """prod over omega of C^{d - |omega|} g(vertex), C = complex conjugation."""
    conj = (d - popcount(np.arange(1 << d))) % 2 == 1
    out = np.ones(values.shape[1:], dtype=np.complex128)
    for w in range(1 << d):
        v = values[w]
        out = out * (np.conj(v) if conj[w] else v)
    return out


def _conditioned_cubes(ctx, ind: np.ndarray, d: int, count: int, g: np.random.Generator):
    """Cubes with every vertex in V, built one direction at a time.

    Each new direction is drawn uniformly among the nonzero shifts that keep
    the whole cube inside V; dead ends restart from a fresh base point.
    """
    members = np.nonzero(ind)[0]
    N = ctx.size
    allh = np.arange(1, N, dtype=np.int64)
    xs = np.empty(count, dtype=np.int64)
    hs = np.empty((d, count), dtype=np.int64)
    filled = 0
    attempts = 0
    while filled < count:
        attempts += 1
        if attempts > 50 * count + 1000:
            break
        x = int(members[g.integers(0, members.size)])
        verts = np.array([x], dtype=np.int64)
        chosen = []
        for _ in range(d):
            shifted = ctx.add_ranks(verts[:, None], allh[None, :])
            ok = ind[shifted].all(axis=0)
            cand = allh[ok]
            if cand.size == 0:
                break
            h = int(cand[g.integers(0, cand.size)])
            chosen.append(h)
            verts = np.concatenate([verts, ctx.add_ranks(verts, h)])
        if len(chosen) == d:
            xs[filled] = x
            hs[:, filled] = chosen
            filled += 1
    return xs[:filled], hs[:, :filled]


def variety_identity_check(p: int, d: int, n: int, trials: int, seed: int,
                           limits: Limits | None = None, conditioned: int | None = None) -> dict:
    """Delta^d (f 1_V) = Delta^d (1_V) with f = e_F(S_d), on sampled cubes.

    Uniform cubes almost never lie inside V, where the identity has content,
    so a second batch is drawn conditioned on the whole cube lying in V.
    """
    if d <= p:
        raise DomainError(f"the variety identity needs d > p (got d={d}, p={p})")
    ctx = PrimeFieldCtx(p, n)
    ctx.check_table(limits)
    seed = check_seed(seed)
    ind = variety_table(ctx, limits)
    sd = truth_table(symmetric_poly(ctx, d, allow_zero=True), limits).values
    phase = np.exp(2j * np.pi * sd / p)
    one_v = ind.astype(np.complex128)
    g = stream(seed, 0)
    N = ctx.size
    pts = g.integers(0, N, size=(d + 1, trials), dtype=np.int64)
    cx, ch = _conditioned_cubes(ctx, ind, d, trials if conditioned is None else conditioned,
                                stream(seed, 1))
    x = np.concatenate([pts[0], cx])
    hs = np.concatenate([pts[1:], ch], axis=1)
    verts = cube_vertex_ranks(ctx, x, hs)
    lhs = _multiplicative_cube((phase * one_v)[verts], d)
    rhs = _multiplicative_cube(one_v[verts], d)
    bad = np.abs(lhs - rhs) > 1e-9
    inside = ind[verts].all(axis=0)
    density = Fraction(int(ind.sum()), N)
    bound = Fraction(1, 2 ** ((p - 1) * p * p))
    return {
        "p": p, "d": d, "n": n,
        "uniform_trials": int(trials), "conditioned_trials": int(cx.size),
        "cubes_inside_V": int(inside.sum()),
        "failures": int(bad.sum()), "ok": not bool(bad.any()),
        "V_size": int(ind.sum()), "density": str(density), "density_float": float(density),
        "recurrence_bound": str(bound), "density_above_bound": density >= bound,
        "U1_lower_bound_on_UD_norm_of_1V": float(density),
    }


# -- simultaneous Ramsey ------------------------------------------------------------------

def load_graph(source) -> tuple:
    """(n, E2, E3) from edge-list JSON; edges are 1-indexed."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"graph file is not valid JSON: {exc}") from None
    try:
        n = int(doc["n"])
        e2 = [tuple(int(v) for v in e) for e in doc.get("edges2", [])]
        e3 = [tuple(int(v) for v in e) for e in doc.get("edges3", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed graph file: {exc}") from None
    return n, e2, e3


def _edge_sets(n, E2, E3):
    s2, s3 = set(), set()
    for e in E2:
        if len(e) != 2 or len(set(e)) != 2 or not all(1 <= v <= n for v in e):
            raise DomainError(f"bad pair {e}")
        s2.add(frozenset(e))
    for e in E3:
        if len(e) != 3 or len(set(e)) != 3 or not all(1 <= v <= n for v in e):
            raise DomainError(f"bad triple {e}")
        s3.add(frozenset(e))
    return s2, s3


def is_monochromatic(I: Sequence[int], E2, E3) -> bool:
    s2 = {frozenset(e) for e in E2}
    s3 = {frozenset(e) for e in E3}
    pairs = {frozenset(c) in s2 for c in itertools.combinations(I, 2)}
    triples = {frozenset(c) in s3 for c in itertools.combinations(I, 3)}
    return len(pairs) <= 1 and len(triples) <= 1


def simultaneous_ramsey(n: int, E2, E3) -> dict:
    """Vertex set I homogeneous for both the graph E2 and the 3-graph E3."""
    if n < 2:
        raise DomainError("n must be at least 2")
    s2, s3 = _edge_sets(n, E2, E3)
    J = list(range(1, n + 1))
    seq: list[int] = []
    while J:
        classes: dict[tuple, list] = {}
        for v in J:
            sig = tuple(frozenset((a, v)) in s2 for a in seq) + tuple(
                frozenset((a, b, v)) in s3 for a, b in itertools.combinations(seq, 2))
            classes.setdefault(sig, []).append(v)
        sig = min(classes, key=lambda s: (-len(classes[s]), s))
        Jp = classes[sig]
        seq.append(Jp[0])
        J = Jp[1:]
    # along seq, pair colour depends on the earlier vertex only and triple
    # colour on the two earlier ones; extract homogeneity for both
    pos = {v: i for i, v in enumerate(seq)}

    def triple_colour(a, b):
        later = [c for c in seq if pos[c] > max(pos[a], pos[b])]
        return frozenset((a, b, later[0])) in s3 if later else None

    def pair_colour(a):
        later = [c for c in seq if pos[c] > pos[a]]
        return frozenset((a, later[0])) in s2 if later else None

    # graph-Ramsey extraction on the colouring (a, b) -> triple_colour(a, b)
    rest = list(seq)
    picked: list[tuple] = []
    while rest:
        v = rest[0]
        rest = rest[1:]
        if not rest:
            picked.append((v, None))
            break
        red = [w for w in rest if triple_colour(v, w)]
        blue = [w for w in rest if not triple_colour(v, w)]
        if len(red) > len(blue):
            picked.append((v, True))
            rest = red
        else:
            picked.append((v, False))
            rest = blue
    colours = Counter(c for _, c in picked[:-1])
    if colours:
        keep = max(sorted(colours, key=lambda c: (c is not False)), key=lambda c: colours[c])
        tier = [v for v, c in picked[:-1] if c == keep] + [picked[-1][0]]
    else:
        tier = [picked[-1][0]]
    # pigeonhole on the pair colour of every vertex but the last
    pc = Counter(pair_colour(v) for v in tier[:-1])
    if pc:
        keep2 = max(sorted(pc, key=lambda c: (c is not False)), key=lambda c: pc[c])
        I = [v for v in tier[:-1] if pair_colour(v) == keep2] + [tier[-1]]
    else:
        I = tier
    I = sorted(I)
    return {"n": n, "sequence": seq, "I": I, "size": len(I),
            "monochromatic": is_monochromatic(I, E2, E3)}
