"""Polynomial factors grouped by degree, with the counting and linear-solve tools built on them."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, IntractableError, PartialProgressError, ResourceError
from .field import DEFAULT_LIMITS, Limits, PrimeFieldCtx, cube_vertex_ranks, popcount
from .linalg import rank_mod_p, solve_mod_p
from .poly import Poly, monomial_basis, parse_poly, poly_from_coeffs, resolve_poly, truth_table
from .rank import analytic_rank_proxy, brute_rank, is_measurable, quadratic_witnesses

COMBINATION_CAP_BITS = 20


class Factor:
    """Polynomials grouped by degree slot: ``slots[i - 1]`` holds P_{i,1..M_i}."""

    def __init__(self, ctx: PrimeFieldCtx, slots: Sequence[Sequence[Poly]]):
        self.ctx = ctx
        slots = [list(s) for s in slots]
        while slots and not slots[-1]:
            slots.pop()
        for i, polys in enumerate(slots, start=1):
            for P in polys:
                if P.ctx != ctx:
                    raise DomainError("factor polynomial has a different context")
                if P.degree > i:
                    raise DomainError(f"polynomial {P} of degree {P.degree} placed in slot {i}")
        self.slots = slots

    @classmethod
    def from_list(cls, ctx, items: Sequence[tuple]):
        """Build from (degree_slot, Poly) pairs."""
        if not items:
            return cls(ctx, [])
        d = max(i for i, _ in items)
        if any(i < 1 for i, _ in items):
            raise DomainError("degree slots start at 1")
        slots = [[] for _ in range(d)]
        for i, P in items:
            slots[i - 1].append(P)
        return cls(ctx, slots)

    @property
    def d(self) -> int:
        return len(self.slots)

    @property
    def dims(self) -> tuple:
        return tuple(len(s) for s in self.slots)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def flat(self) -> list:
        """(slot, Poly) pairs in slot order."""
        return [(i, P) for i, s in enumerate(self.slots, start=1) for P in s]

    def polys(self) -> list:
        return [P for _, P in self.flat()]

    def to_dict(self) -> dict:
        return {"p": self.ctx.p, "n": self.ctx.n,
                "polys": [{"degree_slot": i, "text": str(P)} for i, P in self.flat()]}

    def __eq__(self, other):
        return isinstance(other, Factor) and self.ctx == other.ctx and self.slots == other.slots

    def __repr__(self):
        return f"Factor(dims={self.dims}, {[[str(P) for P in s] for s in self.slots]})"


def load_factor(source) -> Factor:
    """Factor from a JSON document or a path to one; parsed dicts pass straight through."""
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
            raise DomainError(f"factor file is not valid JSON: {exc}") from None
    try:
        ctx = PrimeFieldCtx(int(doc["p"]), int(doc["n"]))
        items = [(int(e["degree_slot"]), resolve_poly(e["text"], ctx)) for e in doc["polys"]]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"factor file is missing field {exc}") from None
    return Factor.from_list(ctx, items)


def eval_map(factor: Factor, x: Sequence[int]) -> tuple:
    if len(x) != factor.ctx.n:
        raise DomainError("point dimension does not match the factor")
    return tuple(tuple(P(x) for P in s) for s in factor.slots)


def eval_tables(factor: Factor, limits: Limits | None = None) -> np.ndarray:
    """(p^n, dim) array of configuration coordinates at every point."""
    ctx = factor.ctx
    ctx.check_table(limits)
    polys = factor.polys()
    if not polys:
        return np.zeros((ctx.size, 0), dtype=np.uint8)
    return np.stack([truth_table(P, limits).values for P in polys], axis=1)


def _nest(factor: Factor, flat: Sequence[int]) -> tuple:
    out, k = [], 0
    for m in factor.dims:
        out.append(tuple(int(v) for v in flat[k:k + m]))
        k += m
    return tuple(out)


# -- atoms -----------------------------------------------------------------------

@dataclass
class AtomCensus:
    counts: dict
    expected: Fraction
    nonempty: int
    empty: int
    max_min_ratio: float
    max_relative_deviation: float

    def to_dict(self):
        return {
            "atoms": [{"config": [list(s) for s in k], "count": v} for k, v in sorted(self.counts.items())],
            "expected": str(self.expected),
            "nonempty": self.nonempty,
            "empty": self.empty,
            "max_min_ratio": self.max_min_ratio,
            "max_relative_deviation": self.max_relative_deviation,
        }


def atom_census(factor: Factor, limits: Limits | None = None) -> AtomCensus:
    ctx = factor.ctx
    tab = eval_tables(factor, limits)
    keys, counts = np.unique(tab, axis=0, return_counts=True)
    census = {_nest(factor, k): int(c) for k, c in zip(keys, counts)}
    expected = Fraction(ctx.size, ctx.p**factor.dim)
    total = ctx.p**factor.dim
    dev = max(abs(Fraction(c) / expected - 1) for c in census.values())
    if len(census) < total:
        dev = max(dev, Fraction(1))
    ratio = max(census.values()) / min(census.values())
    return AtomCensus(census, expected, len(census), total - len(census), ratio, float(dev))


# -- regularity --------------------------------------------------------------------

class RegularityBudget:
    """Growth function F plus the strategy used to estimate ranks."""

    ORACLES = ("auto", "exact-quadratic", "analytic-proxy", "brute")

    def __init__(self, growth: Callable[[int], int] | int, rank_oracle: str = "auto"):
        if isinstance(growth, (int, float)):
            c = growth
            growth = lambda _m, c=c: c  # noqa: E731
        if rank_oracle not in self.ORACLES:
            raise DomainError(f"unknown rank oracle {rank_oracle!r}; choose from {self.ORACLES}")
        values = [growth(m) for m in range(65)]
        if any(b < a for a, b in zip(values, values[1:])):
            raise DomainError("growth function must be nondecreasing")
        self.growth = growth
        self.rank_oracle = rank_oracle


def estimate_rank(Q: Poly, i: int, oracle: str = "auto", limits: Limits | None = None):
    """Estimate rank_{i-1}(Q) for a degree-slot-i combination. Returns (value, method)."""
    if Q.degree <= 0:
        return 0, "exact"
    if Q.degree <= i - 1:
        return 1, "exact"
    if i == 1:
        return math.inf, "exact"
    if oracle == "brute":
        cert = brute_rank(Q, i - 1, limits)
        return cert.k, "brute"
    if i == 2 and oracle in ("auto", "exact-quadratic"):
        return len(quadratic_witnesses(Q)), "exact-quadratic"
    if oracle == "exact-quadratic":
        raise DomainError("the exact-quadratic oracle only handles degree slots up to 2")
    return analytic_rank_proxy(Q, limits), "analytic-proxy"


@dataclass
class Violation:
    degree: int
    coefficients: tuple
    estimate: float
    required: int
    method: str

    def to_dict(self):
        return {"degree": self.degree, "coefficients": list(self.coefficients),
                "estimate": None if self.estimate == math.inf else self.estimate,
                "required": self.required, "method": self.method}


def _combinations(p: int, m: int):
    for c in itertools.product(range(p), repeat=m):
        if any(c):
            yield c


def _combine(ctx, polys, coeffs) -> Poly:
    Q = Poly.zero(ctx)
    for c, P in zip(coeffs, polys):
        if c:
            Q = Q + P.scale(c)
    return Q


def regularity_check(factor: Factor, budget: RegularityBudget,
                     limits: Limits | None = None, first_only: bool = False) -> list:
    """All (degree, coefficients) whose combination has estimated rank below F(dim)."""
    required = budget.growth(factor.dim)
    out = []
    for i in range(factor.d, 0, -1):
        polys = factor.slots[i - 1]
        m = len(polys)
        if m == 0:
            continue
        if m * math.log2(factor.ctx.p) > COMBINATION_CAP_BITS:
            raise ResourceError(
                f"degree slot {i} has p^{m} combinations, above the cap 2^{COMBINATION_CAP_BITS}"
            )
        for c in _combinations(factor.ctx.p, m):
            Q = _combine(factor.ctx, polys, c)
            est, method = estimate_rank(Q, i, budget.rank_oracle, limits)
            if est < required:
                out.append(Violation(i, c, est, required, method))
                if first_only:
                    return out
    return out


def default_decomposer(Q: Poly, d: int, limits: Limits | None = None) -> list:
    """Polynomials of degree <= d that Q is a function of."""
    if Q.degree <= 0:
        return []
    if Q.degree <= d:
        return [Q]
    if Q.degree == 2 and d == 1:
        return quadratic_witnesses(Q)
    return brute_rank(Q, d, limits).witnesses


def refines(fine: Factor, coarse: Factor, limits: Limits | None = None) -> bool:
    """Every atom of ``coarse`` is a union of atoms of ``fine``."""
    qs = fine.polys()
    return all(is_measurable(P, qs, limits).measurable for P in coarse.polys())


@dataclass
class RegularizeResult:
    factor: Factor
    steps: list = field(default_factory=list)
    refines_input: bool | None = None

    def to_dict(self):
        return {"factor": self.factor.to_dict(), "dims": list(self.factor.dims),
                "steps": self.steps, "refines_input": self.refines_input}


def regularize(factor: Factor, budget: RegularityBudget, decomposer=None,
               protected: Sequence[Poly] = (), limits: Limits | None = None,
               max_steps: int = 10000) -> RegularizeResult:
    """Refine ``factor`` until it passes regularity_check.

    Each step takes the first violation (highest degree, then lex-smallest
    coefficients), drops the last unprotected polynomial that appears in it
    and adds lower-degree polynomials the combination is a function of.  The
    dimension vector drops in reverse-lexicographic order, so this terminates.
    """
    decomposer = decomposer or default_decomposer
    protected = list(protected)
    ctx = factor.ctx
    current = Factor(ctx, factor.slots)
    steps = []
    for _ in range(max_steps):
        viol = regularity_check(current, budget, limits, first_only=True)
        if not viol:
            break
        v = viol[0]
        i = v.degree
        polys = current.slots[i - 1]
        candidates = [j for j, c in enumerate(v.coefficients) if c and polys[j] not in protected]
        Q = _combine(ctx, polys, v.coefficients)
        if not candidates:
            raise PartialProgressError(
                f"violation at degree {i} involves only protected polynomials", current, str(Q))
        j = candidates[-1]
        try:
            witnesses = decomposer(Q, i - 1, limits)
        except (IntractableError, DomainError) as exc:
            raise PartialProgressError(
                f"could not decompose {Q} into degree <= {i - 1} parts: {exc}", current, str(Q)
            ) from None
        if any(W.degree > i - 1 for W in witnesses):
            raise PartialProgressError("decomposer returned a witness of too high degree",
                                       current, str(Q))
        items = [(s, P) for s, slot in enumerate(current.slots, start=1)
                 for jj, P in enumerate(slot) if not (s == i and jj == j)]
        items += [(max(W.degree, 1), W) for W in witnesses if W.degree >= 1]
        steps.append({"degree": i, "removed": str(polys[j]), "combination": str(Q),
                      "added": [str(W) for W in witnesses if W.degree >= 1]})
        current = Factor.from_list(ctx, items)
    else:
        raise PartialProgressError("regularize exceeded its step budget", current, None)
    ok = None
    try:
        ok = refines(current, factor, limits)
    except ResourceError:
        ok = None
    return RegularizeResult(current, steps, ok)


# -- face vectors ----------------------------------------------------------------------

@dataclass(frozen=True)
class FaceVector:
    i0: int
    j0: int
    free: tuple  # free coordinates of the lower face (1-based); fixed ones are 0

    @property
    def dim(self) -> int:
        return len(self.free)

    def support(self, k: int) -> list:
        """Cube indices w (bit l <-> omega_{l+1}) lying on the face."""
        mask = sum(1 << (l - 1) for l in self.free)
        return [w for w in range(1 << k) if w & ~mask == 0]

    def to_dict(self):
        return {"i0": self.i0, "j0": self.j0, "free": list(self.free)}


def _check_dims(dims):
    dims = tuple(int(m) for m in dims)
    if any(m < 0 for m in dims):
        raise DomainError("dimension vector entries must be nonnegative")
    while dims and dims[-1] == 0:
        dims = dims[:-1]
    return dims


def relevant_lower_faces(dims, k: int) -> list:
    dims = _check_dims(dims)
    out = []
    for i0, m in enumerate(dims, start=1):
        for j0 in range(1, m + 1):
            for size in range(i0 + 1, k + 1):
                for free in itertools.combinations(range(1, k + 1), size):
                    out.append(FaceVector(i0, j0, free))
    return out


def face_matrix(dims, k: int, faces, p: int) -> np.ndarray:
    """Rows = face vectors as elements of Sigma^{0,1}^k, coordinates (flat slot index, w)."""
    dims = _check_dims(dims)
    offsets = np.cumsum((0,) + dims)
    total = int(offsets[-1])
    signs = np.where(popcount(np.arange(1 << k)) % 2 == 0, 1, p - 1)
    rows = np.zeros((len(faces), total << k), dtype=np.int64)
    for r, f in enumerate(faces):
        slot = int(offsets[f.i0 - 1]) + f.j0 - 1
        for w in f.support(k):
            rows[r, (slot << k) + w] = signs[w]
    return rows


def sigma_box_dimension(dims, k: int) -> int:
    dims = _check_dims(dims)
    return sum(m * sum(math.comb(k, j) for j in range(i + 1)) for i, m in enumerate(dims, start=1))


@dataclass
class FaceBasis:
    faces: list
    dim_sigma_box: int
    formula: int
    independent: bool

    def to_dict(self):
        return {"faces": [f.to_dict() for f in self.faces], "count": len(self.faces),
                "dim_sigma_box": self.dim_sigma_box, "formula": self.formula,
                "independent": self.independent, "matches": self.dim_sigma_box == self.formula}


def lower_face_basis(dims, k: int, p: int = 2, max_entries: int = 1 << 24) -> FaceBasis:
    """Relevant lower face vectors, their rank over F_p and the resulting dim of Sigma_box."""
    dims = _check_dims(dims)
    d = len(dims)
    if k <= d:
        raise DomainError(f"the dimension count needs k > d (got k={k}, d={d})")
    faces = relevant_lower_faces(dims, k)
    size = (1 << k) * sum(dims)
    if size * max(len(faces), 1) > max_entries:
        raise ResourceError("face-vector matrix exceeds its size budget")
    rank = rank_mod_p(face_matrix(dims, k, faces, p), p) if faces else 0
    dim_box = size - rank
    return FaceBasis(faces, dim_box, sigma_box_dimension(dims, k), rank == len(faces))


def box_constraint_violation(dims, k: int, t_box: np.ndarray, p: int):
    """First relevant lower face vector not orthogonal to t_box, or None."""
    faces = relevant_lower_faces(dims, k)
    signs = np.where(popcount(np.arange(1 << k)) % 2 == 0, 1, -1)
    offsets = np.cumsum((0,) + _check_dims(dims))
    for f in faces:
        col = int(offsets[f.i0 - 1]) + f.j0 - 1
        sup = f.support(k)
        if int((signs[sup] * t_box[sup, col]).sum()) % p:
            return f
    return None


@dataclass
class BoxCount:
    count: int
    total: int
    predicted: Fraction
    ratio: float

    def to_dict(self):
        return {"count": self.count, "total": self.total, "predicted": str(self.predicted),
                "ratio": self.ratio, "deviation": self.ratio - 1}


def _normalize_box(factor: Factor, k: int, t_box) -> np.ndarray:
    rows = []
    for entry in t_box:
        if len(entry) and isinstance(entry[0], (list, tuple)):
            entry = [v for s in entry for v in s]
        rows.append([int(v) for v in entry])
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), -1) if rows else np.zeros((0, 0))
    if arr.shape != (1 << k, factor.dim):
        raise DomainError(f"t_box must have 2^{k} entries of {factor.dim} residues each")
    return arr % factor.ctx.p


def count_parallelepipeds(factor: Factor, x: Sequence[int], t_box, k: int | None = None,
                          limits: Limits | None = None) -> BoxCount:
    """Number of h in (F^n)^k with Phi(x + omega.h) = t_box(omega) for every omega."""
    ctx = factor.ctx
    limits = limits or DEFAULT_LIMITS
    t_box = list(t_box)
    if k is None:
        k = len(t_box).bit_length() - 1
    if k < 0 or len(t_box) != 1 << k:
        raise DomainError("t_box must have 2^k entries")
    box = _normalize_box(factor, k, t_box)
    xr = ctx.rank(ctx.point(x))
    if ctx.table_bits * k > limits.max_cube_bits + 1e-9:
        raise ResourceError(f"p^(n*k) = 2^{ctx.table_bits * k:.1f} shift tuples exceeds the "
                            f"cap 2^{limits.max_cube_bits} (max_cube_bits)")
    tab = eval_tables(factor, limits).astype(np.int64)
    base = tab[xr] if factor.dim else np.zeros(0, dtype=np.int64)
    if not np.array_equal(box[0], base):
        raise DomainError("t_box(0) must equal Phi(x)")
    bad = box_constraint_violation(factor.dims, k, box, ctx.p)
    if bad is not None:
        raise DomainError(f"t_box violates the parallelepiped constraint of face vector {bad.to_dict()}")
    N = ctx.size
    total = N**k
    count = 0
    if factor.dim == 0:
        count = total
    elif k == 0:
        count = 1
    else:
        rest = N ** (k - 1)
        step = max(1, (1 << 20) // rest)
        digits = np.arange(rest, dtype=np.int64)
        tails = np.stack([(digits // N**j) % N for j in range(k - 1)]) if k > 1 else np.zeros((0, rest), np.int64)
        for h1 in range(0, N, step):
            h1s = np.arange(h1, min(h1 + step, N), dtype=np.int64)
            hs = np.concatenate([np.repeat(h1s, rest)[None, :], np.tile(tails, (1, h1s.size))])
            verts = cube_vertex_ranks(ctx, np.full(hs.shape[1], xr, dtype=np.int64), hs)
            ok = np.ones(hs.shape[1], dtype=bool)
            for w in range(1 << k):
                ok &= (tab[verts[w]] == box[w]).all(axis=1)
            count += int(ok.sum())
    exponent = ctx.n * k - sum(m * sum(math.comb(k, j) for j in range(1, i + 1))
                               for i, m in enumerate(factor.dims, start=1))
    predicted = Fraction(ctx.p) ** exponent
    return BoxCount(count, total, predicted, float(Fraction(count) / predicted))


def observed_box(factor: Factor, x: Sequence[int], hs: Sequence[Sequence[int]]) -> list:
    """(Phi(x + omega.h))_omega as flat configuration rows."""
    ctx = factor.ctx
    xr = np.array([ctx.rank(ctx.point(x))])
    hr = np.array([[ctx.rank(ctx.point(h))] for h in hs], dtype=np.int64).reshape(len(hs), 1)
    verts = cube_vertex_ranks(ctx, xr, hr)[:, 0]
    return [[P(ctx.unrank(int(v))) for P in factor.polys()] for v in verts]


# -- linear solves ----------------------------------------------------------------------

@dataclass
class Representation:
    terms: dict  # exponent tuple over flat factor polys -> coefficient
    weights: tuple

    def weight(self, s) -> int:
        return sum(w * e for w, e in zip(self.weights, s))

    def max_weight(self) -> int:
        return max((self.weight(s) for s in self.terms), default=0)

    def to_dict(self, factor: Factor):
        names = [f"t{i}_{j}" for i, m in enumerate(factor.dims, start=1) for j in range(1, m + 1)]
        out = []
        for s, c in sorted(self.terms.items()):
            mono = "*".join(f"{nm}^{e}" if e > 1 else nm for nm, e in zip(names, s) if e) or "1"
            out.append({"monomial": mono, "exponents": list(s), "coefficient": c,
                        "weight": self.weight(s)})
        return {"terms": out, "max_weight": self.max_weight()}


def _weighted_exponents(weights, p: int, D: int):
    def rec(idx, left):
        if idx == len(weights):
            yield ()
            return
        w = weights[idx]
        for e in range(p):
            if e * w > left:
                break
            for rest in rec(idx + 1, left - e * w):
                yield (e,) + rest
    return list(rec(0, D))


def factor_degree_representation(P: Poly, factor: Factor, D: int,
                                 limits: Limits | None = None):
    """Coefficients c_s with P = sum_s c_s prod P_{i,j}^{s_{i,j}} over weights <= D, or None."""
    limits = limits or DEFAULT_LIMITS
    ctx = factor.ctx
    if P.ctx != ctx:
        raise DomainError("context mismatch")
    polys = factor.polys()
    m = is_measurable(P, polys, limits)
    if not m.measurable:
        raise DomainError(f"{P} is not measurable with respect to the factor")
    weights = tuple(i for i, _ in factor.flat())
    monos = _weighted_exponents(weights, ctx.p, D)
    if len(monos) > limits.max_unknowns:
        raise ResourceError(f"{len(monos)} unknowns exceed the solver cap {limits.max_unknowns}")
    configs = list(m.lookup.items())
    p = ctx.p
    A = np.array([[math.prod(pow(v, e, p) for v, e in zip(cfg, s)) % p for s in monos]
                  for cfg, _ in configs], dtype=np.int64).reshape(len(configs), len(monos))
    b = np.array([val for _, val in configs], dtype=np.int64)
    sol = solve_mod_p(A, b, p)
    if sol is None:
        return None
    return Representation({s: int(c) for s, c in zip(monos, sol) if c}, weights)


def replay_representation(P: Poly, factor: Factor, rep: Representation,
                          limits: Limits | None = None) -> bool:
    tab = eval_tables(factor, limits).astype(np.int64)
    p = factor.ctx.p
    acc = np.zeros(factor.ctx.size, dtype=np.int64)
    for s, c in rep.terms.items():
        term = np.full(factor.ctx.size, c, dtype=np.int64)
        for col, e in enumerate(s):
            if e:
                term = term * (tab[:, col] ** e) % p
        acc = (acc + term) % p
    return bool(np.array_equal(acc, truth_table(P, limits).values))


def ideal_membership(Q: Poly, Ps: Sequence[Poly], deg_bounds: Sequence[int],
                     limits: Limits | None = None):
    """R_i with deg R_i <= bound_i and Q = sum P_i R_i as functions, or None."""
    limits = limits or DEFAULT_LIMITS
    ctx = Q.ctx
    if len(Ps) != len(deg_bounds):
        raise DomainError("one degree bound per generator is required")
    if any(P.ctx != ctx for P in Ps):
        raise DomainError("context mismatch")
    ctx.check_table(limits)
    bases = [monomial_basis(ctx, b) if b >= 0 else [] for b in deg_bounds]
    unknowns = sum(len(b) for b in bases)
    if unknowns > limits.max_unknowns:
        raise ResourceError(f"{unknowns} unknowns exceed the solver cap {limits.max_unknowns}")
    cols = []
    for P, basis in zip(Ps, bases):
        pv = truth_table(P, limits).values.astype(np.int64)
        for e in basis:
            cols.append(pv * truth_table(Poly(ctx, {e: 1}), limits).values % ctx.p)
    b = truth_table(Q, limits).values.astype(np.int64)
    if not cols:
        return [] if not b.any() and not Ps else None
    A = np.stack(cols, axis=1)
    sol = solve_mod_p(A, b, ctx.p)
    if sol is None:
        return None
    out, k = [], 0
    for basis in bases:
        out.append(poly_from_coeffs(ctx, basis, sol[k:k + len(basis)]))
        k += len(basis)
    return out


def replay_ideal(Q: Poly, Ps: Sequence[Poly], Rs: Sequence[Poly], limits: Limits | None = None) -> bool:
    acc = Poly.zero(Q.ctx)
    for P, R in zip(Ps, Rs):
        acc = acc + P * R
    return bool(np.array_equal(truth_table(acc, limits).values, truth_table(Q, limits).values))
