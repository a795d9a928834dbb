"""Primitive integer coordinates on projective spaces and multi-index algebra.

Every rational point of P^n has a unique representative by coprime integers
whose first nonzero entry is positive; all modules work with that
representative so that equality, hashing and report files are deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .primes import is_prime


class InvalidPointError(ValueError):
    """Raised for the all-zero coordinate vector."""


class DimensionError(ValueError):
    """Raised when arities of points, indices or spaces disagree."""


def _gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of P^n(Q) stored as its primitive sign-normalized lift."""

    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if not any(self.coords):
            raise InvalidPointError("all coordinates are zero")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def max_abs(self) -> int:
        """Largest |coordinate| of the primitive representative."""
        return max(abs(c) for c in self.coords)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]

    @staticmethod
    def from_json(data: Sequence[str]) -> "ProjectivePoint":
        return normalize([Fraction(s) for s in data])

    def __str__(self) -> str:
        return "(" + " : ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class ProductPoint:
    """A rational point of a product of projective spaces, one factor each."""

    factors: tuple[ProjectivePoint, ...]

    @property
    def arity(self) -> int:
        return len(self.factors)

    def to_json(self) -> list[list[str]]:
        return [f.to_json() for f in self.factors]

    @staticmethod
    def from_json(data: Sequence[Sequence[str]]) -> "ProductPoint":
        return ProductPoint(tuple(ProjectivePoint.from_json(f) for f in data))

    def __str__(self) -> str:
        return " x ".join(str(f) for f in self.factors)


Point = ProjectivePoint | ProductPoint


def normalize(coords: Sequence[Fraction | int]) -> ProjectivePoint:
    """Unique primitive, sign-normalized integer representative of a class.

    Clears denominators, divides by the gcd and flips signs so the first
    nonzero coordinate is positive.
    """
    fracs = [Fraction(c) for c in coords]
    if not any(fracs):
        raise InvalidPointError("all coordinates are zero")
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // math.gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = _gcd_all(ints)
    ints = [c // g for c in ints]
    for c in ints:
        if c != 0:
            if c < 0:
                ints = [-x for x in ints]
            break
    return ProjectivePoint(tuple(ints))


def normalize_product(factors: Sequence[Sequence[Fraction | int]]) -> ProductPoint:
    return ProductPoint(tuple(normalize(f) for f in factors))


@dataclass(frozen=True)
class MultiIndex:
    """Vector of positive integers with componentwise order, sum and product."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.entries or any(e < 1 for e in self.entries):
            raise ValueError("multi-index entries must be >= 1")

    @property
    def arity(self) -> int:
        return len(self.entries)

    def __call__(self, k: int) -> int:
        """1-based component access."""
        return self.entries[k - 1]

    def _check_arity(self, other: "MultiIndex") -> None:
        if self.arity != other.arity:
            raise DimensionError(
                f"arity mismatch: {self.arity} vs {other.arity}"
            )

    def leq(self, other: "MultiIndex") -> bool:
        self._check_arity(other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def add(self, other: "MultiIndex") -> "MultiIndex":
        self._check_arity(other)
        return MultiIndex(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def mul(self, other: "MultiIndex") -> "MultiIndex":
        self._check_arity(other)
        return MultiIndex(tuple(a * b for a, b in zip(self.entries, other.entries)))

    def min_entry(self) -> int:
        return min(self.entries)

    def is_prime_index(self) -> bool:
        return all(is_prime(e) for e in self.entries)

    def to_json(self) -> list[int]:
        return list(self.entries)

    @staticmethod
    def from_json(data: Sequence[int]) -> "MultiIndex":
        return MultiIndex(tuple(int(e) for e in data))

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


# ---------------------------------------------------------------------------
# bounded enumeration
#
# Coordinate values are ordered 0 < 1 < -1 < 2 < -2 < ...; points stream in
# lexicographic order over that ordering, each projective class exactly once
# (primitive vector, first nonzero coordinate positive).  Reports and
# tie-breaks everywhere rely on this order being stable.


def coordinate_values(bound: int) -> list[int]:
    out = [0]
    for v in range(1, bound + 1):
        out.append(v)
        out.append(-v)
    return out


def enumerate_projective(n: int, bound: int,
                         lead_values: Sequence[int] | None = None):
    """All points of P^n with every coordinate in [-bound, bound].

    `lead_values` restricts the first coordinate (partitioning hook); the
    canonical first coordinate is never negative, so only values from
    0..bound are meaningful there.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    full = coordinate_values(bound)
    lead = list(range(bound + 1)) if lead_values is None else list(lead_values)

    def rec(prefix: list[int], g: int, seen_nonzero: bool):
        pos = len(prefix)
        if pos == n + 1:
            if seen_nonzero and g == 1:
                yield ProjectivePoint(tuple(prefix))
            return
        if pos == 0:
            values = lead
        elif not seen_nonzero:
            values = range(bound + 1)
        else:
            values = full
        for v in values:
            yield from rec(prefix + [v], math.gcd(g, v), seen_nonzero or v != 0)

    yield from rec([], 0, False)


def enumerate_product(dims: Sequence[int], bounds: Sequence[int]):
    """Cartesian product of factor enumerations, first factor outermost."""
    if len(dims) != len(bounds):
        raise DimensionError("one bound per factor required")
    factor_lists = [list(enumerate_projective(d, b)) for d, b in zip(dims, bounds)]
    for combo in itertools.product(*factor_lists):
        yield ProductPoint(combo)
