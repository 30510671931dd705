"""Prime-field arithmetic and point geometry in F_p^n.

Points are tuples of residues.  Every point has a rank in ``[0, p**n)`` given
by little-endian mixed-radix encoding (coordinate 1 is the least significant
digit); for ``p == 2`` the rank is the bit mask of the point, so ``x + h`` is
``x ^ h`` and ``|x|`` is a popcount.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceError

Point = tuple

# ranks are stored in int64 arrays
MAX_INDEX_BITS = 62


@dataclass(frozen=True)
class Limits:
    """Size caps. Exceeding any of them is a ResourceError, never a truncated answer."""

    max_table_bits: int = 28
    max_cube_bits: int = 34
    max_search_bits: int = 30
    max_unknowns: int = 4096


DEFAULT_LIMITS = Limits()


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrimeFieldCtx:
    p: int
    n: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise DomainError(f"modulus {self.p!r} is not prime")
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n!r}")
        if self.n * math.log2(self.p) > MAX_INDEX_BITS:
            raise ResourceError(
                f"p^n = {self.p}^{self.n} does not fit in a {MAX_INDEX_BITS}-bit point index"
            )

    @property
    def size(self) -> int:
        return self.p**self.n

    @property
    def table_bits(self) -> float:
        return self.n * math.log2(self.p)

    def check_table(self, limits: Limits | None = None, what: str = "truth table") -> None:
        limits = limits or DEFAULT_LIMITS
        if self.table_bits > limits.max_table_bits + 1e-9:
            raise ResourceError(
                f"{what} needs p^n = {self.p}^{self.n} entries, above the cap "
                f"2^{limits.max_table_bits} (max_table_bits)"
            )

    # -- ranks ---------------------------------------------------------
    def rank(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise DomainError(f"point has {len(x)} coordinates, expected {self.n}")
        r = 0
        for c in reversed(x):
            c = int(c)
            if not 0 <= c < self.p:
                raise DomainError(f"coordinate {c} is not a residue mod {self.p}")
            r = r * self.p + c
        return r

    def unrank(self, r: int) -> Point:
        if not 0 <= r < self.size:
            raise DomainError(f"rank {r} outside [0, {self.size})")
        out = []
        for _ in range(self.n):
            r, c = divmod(r, self.p)
            out.append(c)
        return tuple(out)

    def point(self, coords: Sequence[int]) -> Point:
        if len(coords) != self.n:
            raise DomainError(f"point has {len(coords)} coordinates, expected {self.n}")
        return tuple(int(c) % self.p for c in coords)

    def zero(self) -> Point:
        return (0,) * self.n

    def basis_vector(self, i: int) -> Point:
        """e_i with 1-based index i."""
        if not 1 <= i <= self.n:
            raise DomainError(f"basis index {i} outside 1..{self.n}")
        return tuple(1 if j == i - 1 else 0 for j in range(self.n))

    @cached_property
    def _powers(self) -> np.ndarray:
        return np.array([self.p**i for i in range(self.n)], dtype=np.int64)

    def digits(self, ranks) -> np.ndarray:
        """Coordinate matrix of shape ``ranks.shape + (n,)``."""
        ranks = np.asarray(ranks, dtype=np.int64)
        return (ranks[..., None] // self._powers) % self.p

    def from_digits(self, digits) -> np.ndarray:
        return (np.asarray(digits, dtype=np.int64) * self._powers).sum(axis=-1)

    def add_ranks(self, a, b) -> np.ndarray:
        """Vectorized rank(unrank(a) + unrank(b)) with numpy broadcasting."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        return self.from_digits((self.digits(a) + self.digits(b)) % self.p)

    def scale_ranks(self, a, c: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        c %= self.p
        if self.p == 2:
            return a if c else np.zeros_like(a)
        return self.from_digits((self.digits(a) * c) % self.p)

    def addition_table(self) -> np.ndarray:
        """``table[h, x] = rank(x + h)`` for all ranks (size p^n x p^n)."""
        r = np.arange(self.size, dtype=np.int64)
        return self.add_ranks(r[:, None], r[None, :])


def enumerate_points(ctx: PrimeFieldCtx) -> Iterator[Point]:
    """All p^n points in rank order."""
    for r in range(ctx.size):
        yield ctx.unrank(r)


def weight(x: Sequence[int]) -> int:
    """|x|: number of nonzero coordinates (popcount for p = 2)."""
    return sum(1 for c in x if c)


def popcount(ranks) -> np.ndarray:
    return np.bitwise_count(np.asarray(ranks, dtype=np.uint64)).astype(np.int64)


def char_value(ctx: PrimeFieldCtx, t: int) -> complex:
    """The standard additive character e_F(t) = exp(2 pi i t / p)."""
    if not 0 <= t < ctx.p:
        raise DomainError(f"{t} is not a residue mod {ctx.p}")
    if ctx.p == 2:
        return complex(1 - 2 * t, 0)
    return cmath.exp(2j * math.pi * t / ctx.p)


def add_points(ctx: PrimeFieldCtx, x: Sequence[int], y: Sequence[int]) -> Point:
    if len(x) != ctx.n or len(y) != ctx.n:
        raise DomainError("dimension mismatch")
    return tuple((a + b) % ctx.p for a, b in zip(x, y))


def cube_vertex(ctx: PrimeFieldCtx, x: Sequence[int], hs: Sequence[Sequence[int]],
                omega: Sequence[int]) -> Point:
    """x + sum of the h_i with omega_i = 1."""
    if len(hs) != len(omega):
        raise DomainError(f"{len(hs)} shifts but omega has length {len(omega)}")
    if len(x) != ctx.n or any(len(h) != ctx.n for h in hs):
        raise DomainError("dimension mismatch")
    out = list(x)
    for h, w in zip(hs, omega):
        if w not in (0, 1):
            raise DomainError("omega must be a 0/1 vector")
        if w:
            out = [(a + b) % ctx.p for a, b in zip(out, h)]
    return tuple(out)


def cube_vertex_ranks(ctx: PrimeFieldCtx, x, hs) -> np.ndarray:
    """Vertex ranks of the parallelepipeds spanned at x by hs.

    ``x`` has shape S and ``hs`` shape (k,) + S; the result has shape
    (2^k,) + S where index omega (bit l set iff omega_{l+1} = 1) is
    ``x + omega . h``.
    """
    x = np.asarray(x, dtype=np.int64)
    hs = np.asarray(hs, dtype=np.int64)
    k = hs.shape[0]
    out = np.empty((1 << k,) + x.shape, dtype=np.int64)
    out[0] = x
    for w in range(1, 1 << k):
        low = (w & -w).bit_length() - 1
        out[w] = ctx.add_ranks(out[w & (w - 1)], hs[low])
    return out


def cube_signs(k: int) -> np.ndarray:
    """(-1)^{k - |omega|} for omega in {0,1}^k, as +-1 integers."""
    w = popcount(np.arange(1 << k))
    return np.where((k - w) % 2 == 0, 1, -1).astype(np.int64)


@dataclass(frozen=True)
class CycloSum:
    """An exact sum of values of e_F, stored as counts per residue."""

    p: int
    counts: tuple

    @classmethod
    def zero(cls, p: int) -> "CycloSum":
        return cls(p, (0,) * p)

    @classmethod
    def from_residues(cls, p: int, residues) -> "CycloSum":
        c = np.bincount(np.asarray(residues, dtype=np.int64).ravel() % p, minlength=p)
        return cls(p, tuple(int(v) for v in c))

    def __add__(self, other: "CycloSum") -> "CycloSum":
        if self.p != other.p:
            raise DomainError("cannot add cyclotomic sums over different fields")
        return CycloSum(self.p, tuple(a + b for a, b in zip(self.counts, other.counts)))

    @property
    def mass(self) -> int:
        return sum(self.counts)

    def integer_value(self) -> int:
        if self.p != 2:
            raise DomainError("only F_2 character sums are integers in general")
        return self.counts[0] - self.counts[1]

    def value(self) -> complex:
        if self.p == 2:
            return complex(self.integer_value(), 0)
        re = math.fsum(c * math.cos(2 * math.pi * t / self.p) for t, c in enumerate(self.counts))
        im = math.fsum(c * math.sin(2 * math.pi * t / self.p) for t, c in enumerate(self.counts))
        return complex(re, im)

    def mean(self) -> complex:
        """value / mass."""
        if self.p == 2:
            return complex(self.integer_value() / self.mass, 0)
        v = self.value()
        return complex(v.real / self.mass, v.imag / self.mass)
