"""Elliptic curves y^2 = x^3 + a x + b over Q, exactly.

Provides the abscissa map of multiplication by N (via division polynomial
recurrences reduced modulo the curve relation, so only x survives), the full
affine group law, and an x-only ladder that recomputes x([N]P) from the
two-term sum/product identities for x(P+Q) and x(P-Q).  The ladder never
touches division polynomials, which makes it the independent cross-check
for the quotient maps built here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .forms import (
    poly_add,
    poly_divexact,
    poly_mul,
    poly_scale,
    poly_sub,
    poly_trim,
)

INFINITY = "infinity"
XCoord = Union[Fraction, str]  # a rational abscissa or INFINITY


class InvalidCurveError(ValueError):
    """Singular Weierstrass data (4a^3 + 27b^2 = 0)."""


class DegenerateLadderError(ArithmeticError):
    """The x-only ladder hit x([k]P) = x(P), which it cannot disambiguate."""


@dataclass(frozen=True)
class WeierstrassCurve:
    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if 4 * self.a**3 + 27 * self.b**2 == 0:
            raise InvalidCurveError(f"singular curve a={self.a} b={self.b}")

    def rhs(self, x: Fraction) -> Fraction:
        return x**3 + self.a * x + self.b

    def contains(self, x: Fraction, y: Fraction) -> bool:
        return y * y == self.rhs(x)

    def cubic(self) -> list[Fraction]:
        return [self.b, self.a, Fraction(0), Fraction(1)]


# ---------------------------------------------------------------------------
# division polynomials, represented as (poly in x, y-parity)


class DivisionPolynomials:
    """psi_N = P_N(x) * y^(N+1 mod 2), cached, reduced mod y^2 = x^3+ax+b."""

    def __init__(self, curve: WeierstrassCurve):
        self.curve = curve
        a, b = curve.a, curve.b
        self._c = curve.cubic()
        self._cache: dict[int, list[Fraction]] = {
            0: [],
            1: [Fraction(1)],
            2: [Fraction(2)],
            3: poly_trim([-a * a, 12 * b, 6 * a, Fraction(0), Fraction(3)]),
            4: poly_scale(
                poly_trim([
                    -8 * b * b - a**3,
                    -4 * a * b,
                    -5 * a * a,
                    20 * b,
                    5 * a,
                    Fraction(0),
                    Fraction(1),
                ]),
                Fraction(4),
            ),
        }

    def _mul(self, n1: int, n2: int) -> list[Fraction]:
        """x-part of psi_{n1} * psi_{n2}; y^2 factors folded into the cubic."""
        p = poly_mul(self.poly(n1), self.poly(n2))
        if n1 % 2 == 0 and n2 % 2 == 0:
            p = poly_mul(p, self._c)
        return p

    def poly(self, n: int) -> list[Fraction]:
        if n < 0:
            raise ValueError("index must be >= 0")
        if n in self._cache:
            return self._cache[n]
        m = n // 2
        if n % 2 == 1:
            # psi_{2m+1} = psi_{m+2} psi_m^3 - psi_{m-1} psi_{m+1}^3;
            # _mul folds every y^2 into the cubic, so parities balance out
            t1 = poly_mul(self._mul(m + 2, m), self._mul(m, m))
            t2 = poly_mul(self._mul(m - 1, m + 1), self._mul(m + 1, m + 1))
            res = poly_sub(t1, t2)
        else:
            # psi_{2m} = psi_m (psi_{m+2} psi_{m-1}^2 - psi_{m-2} psi_{m+1}^2) / 2y
            t1 = poly_mul(self.poly(m + 2), self._mul(m - 1, m - 1))
            t2 = poly_mul(self.poly(m - 2), self._mul(m + 1, m + 1))
            bracket = poly_sub(t1, t2)
            prod = poly_mul(self.poly(m), bracket)
            if m % 2 == 1:
                # parity-0 product: divide by 2y = 2 y, i.e. (prod/c)/2 * y
                prod = poly_divexact(prod, self._c)
            res = poly_scale(prod, Fraction(1, 2))
        self._cache[n] = res
        return res

    def multiple_x_fraction(self, n: int) -> tuple[list[Fraction], list[Fraction]]:
        """(A, D) with x([n]P) = A(x)/D(x), deg A = n^2, deg D = n^2 - 1."""
        if n < 2:
            raise ValueError("multiple must be >= 2")
        pn = self.poly(n)
        side = self._mul(n - 1, n + 1)
        dn = poly_mul(pn, pn)
        if n % 2 == 0:
            dn = poly_mul(dn, self._c)
        # x * psi_n^2 - psi_{n-1} psi_{n+1}
        a = poly_sub(poly_mul([Fraction(0), Fraction(1)], dn), side)
        return poly_trim(a), poly_trim(dn)


# ---------------------------------------------------------------------------
# full affine group law (for curve points with rational y)


@dataclass(frozen=True)
class CurvePoint:
    """Affine point or the point at infinity (x = y = None)."""

    curve: WeierstrassCurve
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if (self.x is None) != (self.y is None):
            raise ValueError("affine point needs both coordinates")
        if self.x is not None and not self.curve.contains(self.x, self.y):
            raise ValueError(f"({self.x}, {self.y}) is not on the curve")

    @property
    def is_zero(self) -> bool:
        return self.x is None

    def __neg__(self) -> "CurvePoint":
        if self.is_zero:
            return self
        return CurvePoint(self.curve, self.x, -self.y)

    def __add__(self, other: "CurvePoint") -> "CurvePoint":
        if self.curve != other.curve:
            raise ValueError("points on different curves")
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        if x1 == x2:
            if y1 == -y2:
                return CurvePoint(self.curve)
            lam = (3 * x1 * x1 + self.curve.a) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        y3 = lam * (x1 - x3) - y1
        return CurvePoint(self.curve, x3, y3)

    def __mul__(self, n: int) -> "CurvePoint":
        if n < 0:
            return (-self) * (-n)
        acc = CurvePoint(self.curve)
        add = self
        while n:
            if n & 1:
                acc = acc + add
            n >>= 1
            if n:
                add = add + add
        return acc

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# x-only ladder


def x_double(curve: WeierstrassCurve, x: XCoord) -> XCoord:
    """x([2]P) from x(P); infinity for 2-torsion abscissae."""
    if x == INFINITY:
        return INFINITY
    a, b = curve.a, curve.b
    den = 4 * (x**3 + a * x + b)
    if den == 0:
        return INFINITY
    num = x**4 - 2 * a * x * x - 8 * b * x + a * a
    return num / den

def _x_sum_of_pair(curve: WeierstrassCurve, u: Fraction, v: Fraction) -> Fraction:
    """x(P+Q) + x(P-Q) for x(P) = u, x(Q) = v, u != v."""
    a, b = curve.a, curve.b
    return (2 * (u * v + a) * (u + v) + 4 * b) / (u - v) ** 2


def x_multiple(curve: WeierstrassCurve, x: XCoord, n: int) -> XCoord:
    """x([n]P) for any point P with abscissa x, by repeated x-only addition.

    Uses x([k+1]P) = (x([k]P + P) + x([k]P - P)) - x([k-1]P); fails with
    DegenerateLadderError when x([k]P) = x(P) turns up along the way (P is
    then torsion of small order; callers sample past such abscissae).
    """
    if n < 0:
        n = -n
    if n == 0:
        return INFINITY
    if x == INFINITY:
        return INFINITY
    if n == 1:
        return x
    prev: XCoord = INFINITY
    cur: XCoord = x
    for _ in range(n - 1):
        if cur == INFINITY:
            nxt: XCoord = x
        elif cur == x:
            if prev == INFINITY:
                nxt = x_double(curve, x)
            else:
                raise DegenerateLadderError("x([k]P) = x(P) with k > 1")
        else:
            if prev == INFINITY:
                # [k-1]P = O forces x([k]P) = x(P), handled above
                raise DegenerateLadderError("inconsistent ladder state")
            nxt = _x_sum_of_pair(curve, cur, x) - prev
        prev, cur = cur, nxt
    return cur
