"""Directed-rounding real intervals on top of gmpy2 mpfr.

Every operation rounds the lower endpoint down and the upper endpoint up,
so an interval always encloses the exact real result.  Integers and
Fractions convert exactly (up to the working precision, with outward
rounding).  This is the only place the package touches floating point
with rigor requirements; binary64 elsewhere is presentation only.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2


class PrecisionError(ArithmeticError):
    """Working precision too small for the requested operation."""


class IntervalField:
    """Factory for intervals at a fixed binary precision."""

    def __init__(self, precision: int = 320):
        self.precision = precision
        self._dn = gmpy2.context(precision=precision, round=gmpy2.RoundDown)
        self._up = gmpy2.context(precision=precision, round=gmpy2.RoundUp)

    def exact(self, v: int | Fraction) -> "Interval":
        if isinstance(v, Fraction):
            lo = self._dn.div(v.numerator, v.denominator)
            hi = self._up.div(v.numerator, v.denominator)
        else:
            lo = self._dn.add(v, 0)
            hi = self._up.add(v, 0)
        return Interval(self, lo, hi)

    def log_int(self, n: int) -> "Interval":
        """Enclosure of log(n) for an exact positive integer."""
        if n <= 0:
            raise ValueError("log of a nonpositive integer")
        lo = self._dn.log(self._dn.add(n, 0))
        hi = self._up.log(self._up.add(n, 0))
        return Interval(self, lo, hi)


class Interval:
    __slots__ = ("field", "lo", "hi")

    def __init__(self, field: IntervalField, lo, hi):
        self.field = field
        self.lo = lo
        self.hi = hi
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise PrecisionError("nan endpoint")

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.exact(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.field
        return Interval(f, f._dn.add(self.lo, o.lo), f._up.add(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(self.field, -self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.field
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(f._dn.mul(a, b) for a, b in pairs)
        hi = max(f._up.mul(a, b) for a, b in pairs)
        return Interval(f, lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise PrecisionError("division by an interval containing zero")
        f = self.field
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(f._dn.div(a, b) for a, b in pairs)
        hi = max(f._up.div(a, b) for a, b in pairs)
        return Interval(f, lo, hi)

    # -- lattice / elementary ----------------------------------------------

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(self.field, gmpy2.mpfr(0), max(-self.lo, self.hi))

    def max_with(self, other: "Interval") -> "Interval":
        return Interval(self.field, max(self.lo, other.lo), max(self.hi, other.hi))

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise PrecisionError("log of an interval touching zero")
        f = self.field
        return Interval(f, f._dn.log(self.lo), f._up.log(self.hi))

    def divided_by_int(self, n: int) -> "Interval":
        f = self.field
        if n <= 0:
            raise ValueError("positive divisor required")
        return Interval(f, f._dn.div(self.lo, n), f._up.div(self.hi, n))

    def scaled_by_fraction(self, q: Fraction) -> "Interval":
        out = self * q.numerator
        return out.divided_by_int(q.denominator)

    # -- output --------------------------------------------------------------

    def midpoint(self) -> float:
        mid = gmpy2.div(gmpy2.add(self.lo, self.hi), 2)
        return float(mid)

    def half_width_up(self) -> float:
        f = self.field
        w = f._up.div(f._up.sub(self.hi, self.lo), 2)
        out = float(w)
        return math.nextafter(abs(out), math.inf)

    def upper_float(self) -> float:
        return math.nextafter(float(self.hi), math.inf)

    def lower_float(self) -> float:
        return math.nextafter(float(self.lo), -math.inf)

    def __repr__(self) -> str:
        return f"Interval[{self.lo}, {self.hi}]"
