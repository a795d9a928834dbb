"""Dense univariate polynomials and binary homogeneous forms, exactly.

Univariate polynomials are coefficient lists (index = power, Fraction or
int entries).  A binary form of degree d is the homogenization in (X, W):
coeffs[i] is the coefficient of X^i W^(d-i).  Resultants are Sylvester
determinants computed fraction-free; the cofactor solver produces the
integer identities

    u * F + v * G = Res(F, G) * X^(2d-1)
    s * F + t * G = Res(F, G) * W^(2d-1)

that drive the height comparison bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence


class SingularMapError(ValueError):
    """The two forms share a projective zero (vanishing resultant)."""


# ---------------------------------------------------------------------------
# univariate helpers


def poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] = out[i] + c
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return poly_trim(out)


def poly_sub(p: Sequence, q: Sequence) -> list:
    return poly_add(p, [-c for c in q])


def poly_mul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_scale(p: Sequence, c) -> list:
    return poly_trim([c * a for a in p])


def poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def poly_compose(p: Sequence, q: Sequence) -> list:
    acc: list = []
    for c in reversed(list(p)):
        acc = poly_add(poly_mul(acc, q), [c])
    return acc


def poly_degree(p: Sequence) -> int:
    """Degree with deg 0 = -1 for the zero polynomial."""
    return len(poly_trim(list(p))) - 1


def poly_divexact(p: Sequence, q: Sequence) -> list:
    """Quotient p/q when the division is exact; raises otherwise."""
    rem = poly_trim([Fraction(c) for c in p])
    div = poly_trim([Fraction(c) for c in q])
    if not div:
        raise ZeroDivisionError("division by zero polynomial")
    if not rem:
        return []
    out = [Fraction(0)] * (len(rem) - len(div) + 1)
    while rem and len(rem) >= len(div):
        k = len(rem) - len(div)
        c = rem[-1] / div[-1]
        out[k] = c
        for i, b in enumerate(div):
            rem[k + i] -= c * b
        rem = poly_trim(rem)
    if rem:
        raise ArithmeticError("polynomial division is not exact")
    return poly_trim(out)


# ---------------------------------------------------------------------------
# binary forms


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous integer form in (X, W); coeffs[i] multiplies X^i W^(d-i)."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x, w):
        d = self.degree
        xp = 1
        wp = [1] * (d + 1)
        for i in range(1, d + 1):
            wp[i] = wp[i - 1] * w
        acc = 0
        for i, c in enumerate(self.coeffs):
            if c != 0:
                acc = acc + c * xp * wp[d - i]
            if i < d:
                xp = xp * x
        return acc

    def height(self) -> int:
        """Max |coefficient|."""
        return max(abs(c) for c in self.coeffs)

    def term_count(self) -> int:
        return sum(1 for c in self.coeffs if c != 0)

    def is_monomial(self) -> bool:
        return self.term_count() == 1

    def mul(self, other: "BinaryForm") -> "BinaryForm":
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return BinaryForm(tuple(out))


def homogenize(p: Sequence[int], degree: int) -> BinaryForm:
    """W^degree * p(X/W) for a univariate p with deg p <= degree."""
    coeffs = list(p) + [0] * (degree + 1 - len(p))
    if len(coeffs) != degree + 1:
        raise ValueError("polynomial degree exceeds homogenization degree")
    return BinaryForm(tuple(coeffs))


def clear_pair(num: Sequence[Fraction | int], den: Sequence[Fraction | int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Joint primitive integer normalization of a form pair.

    Both coefficient vectors are scaled by the same rational so the map
    (num : den) is unchanged: denominators cleared, content divided out,
    and the sign fixed so the first nonzero coefficient of den (of num if
    den vanishes) is positive.
    """
    fracs = [Fraction(c) for c in num] + [Fraction(c) for c in den]
    if not any(fracs):
        raise ValueError("zero form pair")
    mult = 1
    for f in fracs:
        mult = mult * f.denominator // gcd(mult, f.denominator)
    ints = [int(f * mult) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    k = len(num)
    for v in ints[k:] + ints[:k]:
        if v != 0:
            if v < 0:
                ints = [-x for x in ints]
            break
    return tuple(ints[:k]), tuple(ints[k:])


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    a = [row[:] for row in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def sylvester_matrix(f: BinaryForm, g: BinaryForm) -> list[list[int]]:
    """Matrix of (u, v) -> u*f + v*g on degree d-1 form pairs.

    Row k is the X^k W^(2d-1-k) coefficient; columns 0..d-1 are the
    coefficients of u, columns d..2d-1 those of v.
    """
    d = f.degree
    if g.degree != d:
        raise ValueError("forms must have equal degree")
    n = 2 * d
    m = [[0] * n for _ in range(n)]
    for j in range(d):
        for i in range(d + 1):
            m[i + j][j] = f.coeffs[i]
            m[i + j][d + j] = g.coeffs[i]
    return m


def resultant(f: BinaryForm, g: BinaryForm) -> int:
    """Sylvester determinant; zero iff f and g share a projective root."""
    return _bareiss_det(sylvester_matrix(f, g))


def _solve_scaled(m: list[list[int]], rhs_index: int, scale: int) -> list[int]:
    """Integer solution of m*x = scale*e_{rhs_index} (scale = +-det m)."""
    n = len(m)
    a = [[Fraction(v) for v in row] for row in m]
    b = [Fraction(0)] * n
    b[rhs_index] = Fraction(scale)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k] != 0:
                piv = i
                break
        if piv is None:
            raise SingularMapError("singular system: zero resultant")
        a[k], a[piv] = a[piv], a[k]
        b[k], b[piv] = b[piv], b[k]
        inv = 1 / a[k][k]
        a[k] = [v * inv for v in a[k]]
        b[k] = b[k] * inv
        for i in range(n):
            if i != k and a[i][k] != 0:
                c = a[i][k]
                a[i] = [u - c * v for u, v in zip(a[i], a[k])]
                b[i] = b[i] - c * b[k]
    out = []
    for v in b:
        if v.denominator != 1:
            raise ArithmeticError("cofactor solution is not integral")
        out.append(int(v))
    return out


@dataclass(frozen=True)
class CofactorIdentities:
    """Integer forms with u*f + v*g = res*X^(2d-1), s*f + t*g = res*W^(2d-1)."""

    res: int
    u: BinaryForm
    v: BinaryForm
    s: BinaryForm
    t: BinaryForm

    def height(self) -> int:
        return max(self.u.height(), self.v.height(), self.s.height(), self.t.height())

    def verify(self, f: BinaryForm, g: BinaryForm) -> bool:
        d = f.degree
        lhs_x = poly_trim(list(
            _add_tuples(self.u.mul(f).coeffs, self.v.mul(g).coeffs)))
        lhs_w = poly_trim(list(
            _add_tuples(self.s.mul(f).coeffs, self.t.mul(g).coeffs)))
        want_x = [0] * (2 * d - 1) + [self.res]
        want_w = [self.res]
        return lhs_x == poly_trim(want_x) and lhs_w == poly_trim(want_w)


def _add_tuples(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def cofactor_identities(f: BinaryForm, g: BinaryForm) -> CofactorIdentities:
    d = f.degree
    m = sylvester_matrix(f, g)
    res = _bareiss_det(m)
    if res == 0:
        raise SingularMapError("forms share a common projective zero")
    top = _solve_scaled(m, 2 * d - 1, res)
    bot = _solve_scaled(m, 0, res)
    ident = CofactorIdentities(
        res=res,
        u=BinaryForm(tuple(top[:d])),
        v=BinaryForm(tuple(top[d:])),
        s=BinaryForm(tuple(bot[:d])),
        t=BinaryForm(tuple(bot[d:])),
    )
    if not ident.verify(f, g):
        raise ArithmeticError("cofactor identity failed self-check")
    return ident
