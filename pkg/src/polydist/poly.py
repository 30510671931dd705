"""Sparse polynomials over F_p^n with dense truth tables."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError
from .field import DEFAULT_LIMITS, Limits, PrimeFieldCtx, popcount


class PolyParseError(DomainError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def reduce_exponent(e: int, p: int) -> int:
    """Exponent of the reduced monomial: x^p = x on F_p."""
    if e < 0:
        raise DomainError("negative exponent")
    if e == 0:
        return 0
    return (e - 1) % (p - 1) + 1


def graded_key(exps: tuple) -> tuple:
    """Sort key putting higher total degree first, then lex-descending (x1 first)."""
    return (-sum(exps), tuple(-e for e in exps))


class Poly:
    """Sparse polynomial: exponent tuple -> nonzero coefficient in F_p."""

    __slots__ = ("ctx", "terms", "__dict__")

    def __init__(self, ctx: PrimeFieldCtx, terms: Mapping[tuple, int] | None = None):
        self.ctx = ctx
        clean: dict[tuple, int] = {}
        p, n = ctx.p, ctx.n
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DomainError(f"monomial {exps} has {len(exps)} exponents, expected {n}")
            exps = tuple(reduce_exponent(e, p) for e in exps)
            v = (clean.get(exps, 0) + int(c)) % p
            if v:
                clean[exps] = v
            else:
                clean.pop(exps, None)
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def constant(cls, ctx, c: int):
        return cls(ctx, {(0,) * ctx.n: c})

    @classmethod
    def variable(cls, ctx, i: int):
        if not 1 <= i <= ctx.n:
            raise DomainError(f"variable index {i} outside 1..{ctx.n}")
        return cls(ctx, {tuple(1 if j == i - 1 else 0 for j in range(ctx.n)): 1})

    @classmethod
    def linear(cls, ctx, coeffs: Sequence[int], constant: int = 0):
        terms = {(0,) * ctx.n: constant}
        for i, c in enumerate(coeffs):
            terms[tuple(1 if j == i else 0 for j in range(ctx.n))] = c
        return cls(ctx, terms)

    # -- basic properties ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.ctx.n, 0)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly(self.ctx, {e: c for e, c in self.terms.items() if sum(e) == d})

    def _check(self, other: "Poly"):
        if not isinstance(other, Poly):
            raise DomainError("expected a Poly")
        if other.ctx != self.ctx:
            raise DomainError(f"context mismatch: {self.ctx} vs {other.ctx}")

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = Poly.constant(self.ctx, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.ctx, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Poly.constant(self.ctx, other)
        return self + (-other)

    def scale(self, c: int) -> "Poly":
        return Poly(self.ctx, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        p = self.ctx.p
        out: dict[tuple, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(reduce_exponent(a + b, p) for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return Poly(self.ctx, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    # -- printing --------------------------------------------------------
    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: graded_key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = []
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly(p={self.ctx.p}, n={self.ctx.n}, {self})"

    # -- evaluation ------------------------------------------------------
    def __call__(self, x: Sequence[int]) -> int:
        return evaluate(self, x)

    @cached_property
    def symmetric_degree(self):
        """d if this polynomial equals S_d, otherwise None."""
        if not self.terms:
            return None
        degs = {sum(e) for e in self.terms}
        if len(degs) != 1:
            return None
        d = degs.pop()
        if any(c != 1 for c in self.terms.values()):
            return None
        if any(v > 1 for e in self.terms for v in e):
            return None
        if len(self.terms) != math.comb(self.ctx.n, d):
            return None
        return d


# -- parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x(?P<idx>\d+))|(?P<op>[+*^])|(?P<bad>\S))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("bad") is not None:
            raise PolyParseError(f"unexpected character {m.group('bad')!r}", start)
        if m.group("num") is not None:
            out.append(("num", int(m.group("num")), start))
        elif m.group("var") is not None:
            out.append(("var", int(m.group("idx")), start))
        else:
            out.append((m.group("op"), None, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def parse_poly(text: str, ctx: PrimeFieldCtx) -> Poly:
    """Parse ``"2*x1^2*x3 + x2 + 1"``-style text into a reduced Poly."""
    toks = _tokens(text)
    i = 0
    terms: dict[tuple, int] = {}

    def take(kind):
        nonlocal i
        t = toks[i]
        if t[0] != kind:
            what = "end of input" if t[0] == "end" else repr(t[0] if t[1] is None else t[1])
            raise PolyParseError(f"expected {kind}, found {what}", t[2])
        i += 1
        return t

    while True:
        coeff = 1
        exps = [0] * ctx.n
        while True:
            t = toks[i]
            if t[0] == "num":
                coeff *= take("num")[1]
            else:
                t = take("var")
                if not 1 <= t[1] <= ctx.n:
                    raise PolyParseError(f"variable x{t[1]} outside x1..x{ctx.n}", t[2])
                e = 1
                if toks[i][0] == "^":
                    take("^")
                    e = take("num")[1]
                exps[t[1] - 1] += e
            if toks[i][0] != "*":
                break
            take("*")
        key = tuple(reduce_exponent(e, ctx.p) for e in exps)
        terms[key] = terms.get(key, 0) + coeff
        if toks[i][0] == "+":
            take("+")
            continue
        take("end")
        break
    return Poly(ctx, terms)


_ALIAS = re.compile(r"^\s*S(\d+)\s*$")


def resolve_poly(text: str, ctx: PrimeFieldCtx) -> Poly:
    """Like parse_poly, but ``S<d>`` expands to the elementary symmetric polynomial."""
    m = _ALIAS.match(text)
    if m:
        return symmetric_poly(ctx, int(m.group(1)))
    return parse_poly(text, ctx)


# -- evaluation --------------------------------------------------------------

def evaluate(P: Poly, x: Sequence[int]) -> int:
    ctx = P.ctx
    if len(x) != ctx.n:
        raise DomainError(f"point has {len(x)} coordinates, expected {ctx.n}")
    p = ctx.p
    total = 0
    for exps, c in P.terms.items():
        v = c
        for xi, e in zip(x, exps):
            if e:
                v = v * pow(int(xi), e, p) % p
                if not v:
                    break
        total += v
    return total % p


def _symmetric_values(ctx: PrimeFieldCtx, d: int, ranks: np.ndarray) -> np.ndarray:
    if ctx.p == 2:
        w = popcount(ranks)
        return ((w & d) == d).astype(np.uint8)
    # e_d mod p by the one-variable-at-a-time recurrence e_j <- e_j + x_i e_{j-1}
    digits = ctx.digits(ranks)
    e = [np.ones(ranks.shape, dtype=np.int64)] + [np.zeros(ranks.shape, dtype=np.int64)] * d
    for i in range(ctx.n):
        xi = digits[..., i]
        for j in range(d, 0, -1):
            e[j] = (e[j] + xi * e[j - 1]) % ctx.p
    return e[d].astype(np.uint8)


def evaluate_ranks(P: Poly, ranks, limits: Limits | None = None) -> np.ndarray:
    """Vectorized evaluation at the points with the given ranks (uint8 residues)."""
    ctx = P.ctx
    ranks = np.asarray(ranks, dtype=np.int64)
    d = P.symmetric_degree
    if d is not None:
        return _symmetric_values(ctx, d, ranks)
    if ctx.p == 2:
        out = np.zeros(ranks.shape, dtype=np.uint8)
        for exps in P.terms:
            mask = sum(1 << i for i, e in enumerate(exps) if e)
            out ^= ((ranks & mask) == mask).astype(np.uint8)
        return out
    digits = ctx.digits(ranks)
    p = ctx.p
    acc = np.zeros(ranks.shape, dtype=np.int64)
    pw_cache: dict[tuple, np.ndarray] = {}
    for exps, c in P.terms.items():
        v = np.full(ranks.shape, c, dtype=np.int64)
        for i, e in enumerate(exps):
            if e:
                key = (i, e)
                if key not in pw_cache:
                    pw_cache[key] = (digits[..., i] ** e) % p
                v = (v * pw_cache[key]) % p
        acc += v
        acc %= p
    return acc.astype(np.uint8)


# -- derivatives ---------------------------------------------------------------

def _check_point(ctx, h):
    if len(h) != ctx.n:
        raise DomainError(f"shift has {len(h)} coordinates, expected {ctx.n}")
    return tuple(int(c) % ctx.p for c in h)


def additive_derivative(P: Poly, h: Sequence[int]) -> Poly:
    """D_h P(x) = P(x + h) - P(x), by binomial expansion of each (x_i + h_i)^e."""
    ctx = P.ctx
    h = _check_point(ctx, h)
    p = ctx.p
    out: dict[tuple, int] = {}
    for exps, c in P.terms.items():
        choices = []
        for e, hi in zip(exps, h):
            opts = []
            for j in range(e + 1):
                w = math.comb(e, j) * pow(hi, e - j, p) % p
                if w:
                    opts.append((j, w))
            choices.append(opts)
        for combo in itertools.product(*choices):
            v = c
            for _, w in combo:
                v = v * w % p
            key = tuple(j for j, _ in combo)
            out[key] = out.get(key, 0) + v
        out[exps] = out.get(exps, 0) - c
    return Poly(ctx, out)


def iterated_derivative(P: Poly, hs: Iterable[Sequence[int]]) -> Poly:
    for h in hs:
        P = additive_derivative(P, h)
    return P


# -- families ----------------------------------------------------------------

def symmetric_poly(ctx: PrimeFieldCtx, d: int, allow_zero: bool = False) -> Poly:
    """Elementary symmetric polynomial S_d (S_0 = 1)."""
    if d < 0:
        raise DomainError("degree must be nonnegative")
    if d > ctx.n:
        if allow_zero:
            return Poly.zero(ctx)
        raise DomainError(f"S_{d} is identically zero on {ctx.n} variables")
    terms = {}
    for idx in itertools.combinations(range(ctx.n), d):
        e = [0] * ctx.n
        for i in idx:
            e[i] = 1
        terms[tuple(e)] = 1
    return Poly(ctx, terms)


def monomial_basis(ctx: PrimeFieldCtx, d: int, min_degree: int = 0) -> list[tuple]:
    """Exponent vectors of reduced monomials with min_degree <= degree <= d.

    Order: degree ascending; within a degree, lex-descending with x1 first
    (so degree one reads x1, x2, ..., xn).
    """
    out = []
    for deg in range(max(min_degree, 0), d + 1):
        block = [e for e in _exponents_of_degree(ctx.n, ctx.p - 1, deg)]
        block.sort(key=lambda e: tuple(-v for v in e))
        out.extend(block)
    return out


def _exponents_of_degree(n: int, cap: int, deg: int):
    if n == 0:
        if deg == 0:
            yield ()
        return
    for first in range(min(cap, deg), -1, -1):
        for rest in _exponents_of_degree(n - 1, cap, deg - first):
            yield (first,) + rest


def dim_poly_space(ctx: PrimeFieldCtx, d: int) -> int:
    return len(monomial_basis(ctx, d))


def poly_from_coeffs(ctx: PrimeFieldCtx, basis: Sequence[tuple], coeffs: Sequence[int]) -> Poly:
    return Poly(ctx, {e: int(c) for e, c in zip(basis, coeffs) if int(c) % ctx.p})


def coeffs_in_basis(P: Poly, basis: Sequence[tuple]) -> list[int]:
    index = {e: i for i, e in enumerate(basis)}
    out = [0] * len(basis)
    for e, c in P.terms.items():
        if e not in index:
            raise DomainError(f"monomial {e} is outside the basis")
        out[index[e]] = c
    return out


def random_poly(ctx: PrimeFieldCtx, d: int, rng: np.random.Generator,
                homogeneous: bool = False, nonzero: bool = False) -> Poly:
    """Uniform random element of P_d (or of its degree-d homogeneous part)."""
    basis = monomial_basis(ctx, d, min_degree=d if homogeneous else 0)
    if not basis:
        return Poly.zero(ctx)
    while True:
        coeffs = rng.integers(0, ctx.p, size=len(basis))
        P = poly_from_coeffs(ctx, basis, coeffs)
        if not (nonzero and P.is_zero()):
            return P


# -- truth tables ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PhaseTable:
    """Values of an F_p-valued function at every point, indexed by rank."""

    ctx: PrimeFieldCtx
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.ctx.size,):
            raise DomainError(f"table has shape {v.shape}, expected ({self.ctx.size},)")
        object.__setattr__(self, "values", v.astype(np.uint8, copy=False))

    def histogram(self) -> np.ndarray:
        return np.bincount(self.values, minlength=self.ctx.p).astype(np.int64)

    def shift(self, h_rank: int) -> "PhaseTable":
        """x -> f(x + h)."""
        r = np.arange(self.ctx.size, dtype=np.int64)
        return PhaseTable(self.ctx, self.values[self.ctx.add_ranks(r, h_rank)])

    def derivative(self, h_rank: int) -> "PhaseTable":
        p = self.ctx.p
        s = self.shift(h_rank).values.astype(np.int16)
        return PhaseTable(self.ctx, ((s - self.values) % p).astype(np.uint8))

    def __eq__(self, other):
        return (isinstance(other, PhaseTable) and other.ctx == self.ctx
                and np.array_equal(other.values, self.values))


def _coefficient_tensor(P: Poly) -> np.ndarray:
    ctx = P.ctx
    flat = np.zeros(ctx.size, dtype=np.uint8)
    for exps, c in P.terms.items():
        flat[ctx.rank(exps)] = c
    return flat


def _vandermonde_transform(flat: np.ndarray, p: int, n: int) -> np.ndarray:
    """Apply value[x] = sum_e c[e] x^e along every axis of the (p,)*n tensor."""
    if p == 2:
        a = flat.copy()
        for i in range(n):
            v = a.reshape(-1, 2, 1 << i)
            v[:, 1, :] ^= v[:, 0, :]
        return a
    vm = np.array([[pow(x, e, p) if (x or e) else 1 for e in range(p)] for x in range(p)],
                  dtype=np.int64)
    a = flat
    for i in range(n):
        v = a.reshape(-1, p, p**i)
        out = np.empty_like(v)
        for x in range(p):
            acc = np.zeros(v[:, 0, :].shape, dtype=np.int32)
            for e in range(p):
                if vm[x, e]:
                    acc += int(vm[x, e]) * v[:, e, :]
            out[:, x, :] = acc % p
        a = out.reshape(-1)
    return a


def truth_table(P: Poly, limits: Limits | None = None, fast: bool = True) -> PhaseTable:
    ctx = P.ctx
    ctx.check_table(limits or DEFAULT_LIMITS)
    if fast and P.symmetric_degree is not None:
        vals = _symmetric_values(ctx, P.symmetric_degree, np.arange(ctx.size, dtype=np.int64))
        return PhaseTable(ctx, vals)
    return PhaseTable(ctx, _vandermonde_transform(_coefficient_tensor(P), ctx.p, ctx.n))


def table_derivative(P: Poly, h: Sequence[int], limits: Limits | None = None) -> PhaseTable:
    """D_h P computed by shifting the truth table (cross-check for additive_derivative)."""
    return truth_table(P, limits).derivative(P.ctx.rank(_check_point(P.ctx, h)))


# -- multilinear interpolation on {0,1}^k ---------------------------------------------

def multilinear_coefficients(values, p: int) -> np.ndarray:
    """Coefficients c_S (S as bit mask) of the multilinear interpolant of cube values.

    values[w] is Q at the cube vertex with bit l of w equal to omega_{l+1}.
    """
    v = np.asarray(values, dtype=np.int64) % p
    k = int(v.size).bit_length() - 1
    if v.size != 1 << k:
        raise DomainError("cube table length must be a power of two")
    if k > 20:
        raise DomainError("cube dimension above 20")
    a = v.copy()
    for i in range(k):
        w = a.reshape(-1, 2, 1 << i)
        w[:, 1, :] = (w[:, 1, :] - w[:, 0, :]) % p
    return a


def multilinear_evaluate(coeffs, p: int) -> np.ndarray:
    a = np.asarray(coeffs, dtype=np.int64).copy() % p
    k = int(a.size).bit_length() - 1
    for i in range(k):
        w = a.reshape(-1, 2, 1 << i)
        w[:, 1, :] = (w[:, 1, :] + w[:, 0, :]) % p
    return a


def multilinear_cube_extension_check(values, p: int) -> bool:
    """The multilinear interpolant reproduces the cube values, and vanishes if they do."""
    v = np.asarray(values, dtype=np.int64) % p
    c = multilinear_coefficients(v, p)
    if not np.array_equal(multilinear_evaluate(c, p), v):
        return False
    if not v.any() and c.any():
        return False
    return True
