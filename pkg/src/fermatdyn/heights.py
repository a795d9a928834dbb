"""Weil heights, rigorous canonical heights, and the height-zero decision.

The canonical height of a point under a degree-d map f on P^1 is the limit
of h(f^k x)/d^k.  Expanding that orbit in exact integers is exponentially
infeasible at small tolerances, so the same telescoping sum is evaluated in
two rigorous pieces:

  * an archimedean part: the scale-invariant real orbit z -> f(z)/|f(z)|
    tracked in directed-rounding interval arithmetic, contributing
    log |f(z_i)| / d^(i+1) per step;
  * a content part: the primitive orbit loses an integer gcd g_i <= |Res|
    at each step, and v_p(g_i) is recovered exactly from a mod p^K shadow
    orbit for each prime p dividing the resultant.

Truncating both series after J steps leaves a tail below
(C + log|Res|)/(d^J (d-1)) with C the explicit height-comparison constant,
so the reported error radius is a true bound on |value - h_F(x)|.

Threshold tests (orbit escape, certified minima) compare exact integers:
h(y) > C/(d-1) is decided as max|y|^(d-1) > T with T = exp(C) an integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import gmpy2

from .forms import CofactorIdentities, cofactor_identities
from .intervals import Interval, IntervalField, PrecisionError
from .points import (
    Point,
    ProductPoint,
    ProjectivePoint,
    enumerate_product,
    enumerate_projective,
)
from .primes import factorize
from .systems import EndoSystem, P1Morphism

_EPS = 2.0**-50


class UnsupportedSystemError(ValueError):
    """Height machinery does not cover this system/space combination."""


class BoundTooSmallError(ValueError):
    """A search region contained no positive-height point."""


def _log_up(n: int) -> float:
    return math.nextafter(math.log(n), math.inf) if n > 1 else 0.0


def _log_down(n: int) -> float:
    return math.nextafter(math.log(n), -math.inf) if n > 1 else 0.0


# ---------------------------------------------------------------------------
# naive heights


def naive_height(point: Point) -> float:
    """log max|coordinate| of the primitive lift; sums over product factors."""
    if isinstance(point, ProductPoint):
        return sum(naive_height(f) for f in point.factors)
    return math.log(point.max_abs())


def naive_height_exact(point: ProjectivePoint) -> int:
    """The integer whose log is the naive height."""
    return point.max_abs()


# ---------------------------------------------------------------------------
# height difference bound |h(f(y)) - d h(y)| <= C


@dataclass(frozen=True)
class HeightDifferenceBound:
    """C with |h(f(y)) - d h(y)| <= C for every rational point y of P^1.

    C = log(threshold_int) exactly, so borderline comparisons can be done
    on integers.  upper_int bounds the coordinate growth from coefficient
    size and term count; lower_int comes from the resultant cofactor
    identities; both certificates are retained.
    """

    degree: int
    c: float
    upper_int: int
    lower_int: int
    threshold_int: int
    res: int
    res_factors: tuple[tuple[int, int], ...]
    cofactors: Optional[CofactorIdentities]

    def threshold_exceeded(self, point: ProjectivePoint) -> bool:
        """Exact test h(y) > C/(d-1), i.e. max|y|^(d-1) > threshold."""
        if self.degree < 2:
            raise UnsupportedSystemError("threshold needs degree >= 2")
        return point.max_abs() ** (self.degree - 1) > self.threshold_int

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "c": self.c,
            "upper_int": str(self.upper_int),
            "lower_int": str(self.lower_int),
            "threshold_int": str(self.threshold_int),
            "resultant": str(self.res),
        }


@lru_cache(maxsize=256)
def height_difference_bound(f: P1Morphism) -> HeightDifferenceBound:
    d = f.degree
    num, den = f.num, f.den
    # monomial pair (+-X^d : +-W^d): heights transform exactly
    if (num.is_monomial() and den.is_monomial()
            and abs(num.coeffs[d]) == 1 and abs(den.coeffs[0]) == 1
            and num.coeffs[d] != 0 and den.coeffs[0] != 0):
        return HeightDifferenceBound(
            degree=d, c=0.0, upper_int=1, lower_int=1, threshold_int=1,
            res=f.resultant(), res_factors=(), cofactors=None)

    hf = max(num.height(), den.height())
    terms = max(num.term_count(), den.term_count())
    upper_int = terms * hf

    ci = cofactor_identities(num, den)
    k1 = ci.u.term_count() * ci.u.height() + ci.v.term_count() * ci.v.height()
    k2 = ci.s.term_count() * ci.s.height() + ci.t.term_count() * ci.t.height()
    lower_int = max(k1, k2)

    threshold = max(upper_int, lower_int)
    res = abs(ci.res)
    factors = tuple(sorted(factorize(res).items()))
    return HeightDifferenceBound(
        degree=d, c=_log_up(threshold), upper_int=upper_int,
        lower_int=lower_int, threshold_int=threshold, res=ci.res,
        res_factors=factors, cofactors=ci)


# ---------------------------------------------------------------------------
# canonical heights


@dataclass(frozen=True)
class CanonicalHeightResult:
    """A value together with a radius certifying |value - h_F(x)| <= radius.

    exact_log, when set, means the value is exactly log(exact_log) with
    radius zero; exact comparison paths use it.
    """

    value: float
    error_radius: float
    iterations: int
    exact_log: Optional[int] = None

    @property
    def lower(self) -> float:
        return self.value - self.error_radius

    @property
    def upper(self) -> float:
        return self.value + self.error_radius

    def to_json(self) -> dict:
        return {"value": self.value, "error_radius": self.error_radius,
                "iterations": self.iterations}


def _content_series(f: P1Morphism, point: ProjectivePoint, p: int, cap: int,
                    steps: int, d: int) -> Fraction:
    """sum_{i<steps} v_p(g_i)/d^(i+1) for the gcds g_i lost along the orbit.

    Tracks the primitive orbit modulo p^K; each division by p^v costs v
    digits of precision, and v <= cap = v_p(Res) per step, so K is sized
    so the budget never runs out.
    """
    prec = cap * (steps + 1) + 2
    x, w = point.coords
    rem = prec
    modulus = p**rem
    x %= modulus
    w %= modulus
    total = Fraction(0)
    denom = 1
    for _ in range(steps):
        denom *= d
        modulus = p**rem
        a = f.num(x, w) % modulus
        b = f.den(x, w) % modulus
        va = _vp_bounded(a, p, rem)
        vb = _vp_bounded(b, p, rem)
        v = min(va, vb)
        if v > cap:
            raise ArithmeticError("orbit content exceeded its resultant bound")
        if v:
            total += Fraction(v, denom)
            rem -= v
            pv = p**v
            sub = p**rem
            x = (a // pv) % sub
            w = (b // pv) % sub
        else:
            x, w = a, b
    return total


def _vp_bounded(residue: int, p: int, rem: int) -> int:
    if residue == 0:
        return rem
    v = 0
    while residue % p == 0:
        residue //= p
        v += 1
    return v


def _real_orbit_sum(f: P1Morphism, point: ProjectivePoint, d: int, steps: int,
                    fld: IntervalField) -> Interval:
    """h(y_0) + sum_{i<steps} log|f(z_i)| / d^(i+1) on the normalized orbit."""
    x, w = point.coords
    m0 = point.max_abs()
    total = fld.log_int(m0)
    zx = fld.exact(Fraction(x, m0))
    zw = fld.exact(Fraction(w, m0))
    denom = 1
    for _ in range(steps):
        denom *= d
        a = f.num(zx, zw)
        b = f.den(zx, zw)
        m = a.abs().max_with(b.abs())
        total = total + m.log().divided_by_int(denom)
        zx = a / m
        zw = b / m
    return total


def _p1_canonical(f: P1Morphism, d: int, point: ProjectivePoint,
                  tolerance: float) -> CanonicalHeightResult:
    hdb = height_difference_bound(f)
    if hdb.threshold_int == 1:
        # heights transform exactly; the limit is the naive height
        m = point.max_abs()
        return CanonicalHeightResult(math.log(m), 0.0, 0, exact_log=m)

    # split the budget: truncation tails take half, interval width the rest
    target = tolerance / 2
    padic_log = sum(m * _log_up(p) for p, m in hdb.res_factors)
    tail_const = hdb.c + padic_log
    steps = 1
    while tail_const / ((d - 1) * d**steps) > target:
        steps += 1

    series = [(p, _content_series(f, point, p, m, steps, d))
              for p, m in hdb.res_factors]

    precision = 320
    while True:
        fld = IntervalField(precision)
        try:
            total = _real_orbit_sum(f, point, d, steps, fld)
            for p, s in series:
                if s:
                    total = total - fld.log_int(p).scaled_by_fraction(s)
            tail = tail_const / ((d - 1) * d**steps)
            value = total.midpoint()
            radius = (total.half_width_up() + tail
                      + _EPS * (1.0 + abs(value)))
            radius = math.nextafter(radius, math.inf)
            if radius <= tolerance:
                return CanonicalHeightResult(value, radius, steps)
            # truncation tails fit inside tolerance/2 by construction, so
            # only interval width can spill over
            raise PrecisionError("interval width exceeds budget")
        except PrecisionError:
            precision *= 2
            if precision > 1 << 16:
                raise


def canonical_height(system: EndoSystem, point: Point, tolerance: float,
                     index: Optional[int] = None) -> CanonicalHeightResult:
    """Rigorous canonical height for the system at the given point.

    Power-type systems are exact.  P^1 systems iterate the member of the
    stated index (default: the smallest); any member yields the same
    function, which tests exercise.  Products sum factor heights.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    system.check_point(point)
    kind = system.height_kind
    if kind == "exact-power":
        m = point.max_abs()
        return CanonicalHeightResult(math.log(m), 0.0, 0, exact_log=m)
    if kind == "p1":
        cert = is_height_zero(system, point)
        if cert.verdict == "zero":
            return CanonicalHeightResult(0.0, 0.0, len(cert.orbit), exact_log=1)
        f, d = system.height_map(index)
        return _p1_canonical(f, d, point, tolerance)
    if kind == "product":
        parts = [canonical_height(fs, fp, tolerance / len(system.factors))
                 for fs, fp in zip(system.factors, point.factors)]
        value = math.fsum(p.value for p in parts)
        radius = math.fsum(p.error_radius for p in parts)
        radius += _EPS * (1.0 + abs(value))
        exact = None
        if all(p.exact_log is not None for p in parts):
            exact = math.prod(p.exact_log for p in parts)
            value = math.log(exact)
            radius = 0.0
        return CanonicalHeightResult(
            value, radius, max(p.iterations for p in parts), exact_log=exact)
    raise UnsupportedSystemError(f"no canonical height for kind {kind!r}")


# ---------------------------------------------------------------------------
# height-zero decision


@dataclass(frozen=True)
class HeightZeroCertificate:
    """Reproducible verdict on membership in {h_F = 0}.

    zero: the orbit table closes into a cycle below the escape threshold.
    positive: orbit[escape_index] exceeds the exact threshold integer.
    Product certificates carry one factor certificate each.
    """

    verdict: str
    orbit: tuple[Point, ...]
    cycle: Optional[tuple[int, int]] = None
    escape_index: Optional[int] = None
    threshold_int: int = 1
    degree: int = 0
    factor_certs: tuple["HeightZeroCertificate", ...] = ()

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict,
                     "orbit": [p.to_json() for p in self.orbit]}
        if self.cycle is not None:
            out["cycle"] = list(self.cycle)
        if self.escape_index is not None:
            out["escape_index"] = self.escape_index
            out["threshold_int"] = str(self.threshold_int)
            out["degree"] = self.degree
        if self.factor_certs:
            out["factors"] = [c.to_json() for c in self.factor_certs]
        return out


def _power_zero_cert(point: ProjectivePoint) -> HeightZeroCertificate:
    if point.max_abs() <= 1:
        squared = ProjectivePoint(tuple(abs(c) for c in point.coords))
        return HeightZeroCertificate(
            "zero", (point, squared, squared), cycle=(1, 2))
    return HeightZeroCertificate(
        "positive", (point,), escape_index=0, threshold_int=1, degree=2)


def is_height_zero(system: EndoSystem, point: Point) -> HeightZeroCertificate:
    """Decides h_F(x) = 0 with a re-checkable witness.

    Power systems: zero iff every primitive coordinate lies in {0, +-1}.
    P^1 systems: the orbit of the smallest-index map either revisits a
    point (zero) or exceeds the exact escape threshold (positive).
    Products: zero iff every factor is zero.
    """
    system.check_point(point)
    kind = system.height_kind
    if kind == "exact-power":
        return _power_zero_cert(point)
    if kind == "product":
        certs = tuple(is_height_zero(fs, fp)
                      for fs, fp in zip(system.factors, point.factors))
        verdict = "zero" if all(c.verdict == "zero" for c in certs) else "positive"
        return HeightZeroCertificate(verdict, (point,), factor_certs=certs)
    if kind != "p1":
        raise UnsupportedSystemError(f"no zero decision for kind {kind!r}")

    f, d = system.height_map()
    hdb = height_difference_bound(f)
    orbit: list[ProjectivePoint] = [point]
    seen = {point: 0}
    cur = point
    while True:
        if hdb.threshold_exceeded(cur):
            return HeightZeroCertificate(
                "positive", tuple(orbit), escape_index=len(orbit) - 1,
                threshold_int=hdb.threshold_int, degree=d)
        cur = f.apply(cur)
        if cur in seen:
            orbit.append(cur)
            return HeightZeroCertificate(
                "zero", tuple(orbit), cycle=(seen[cur], len(orbit) - 1))
        seen[cur] = len(orbit)
        orbit.append(cur)


def recheck_certificate(system: EndoSystem, cert: HeightZeroCertificate) -> bool:
    """Re-verifies a certificate by exact evaluation."""
    if cert.factor_certs:
        ok = all(recheck_certificate(fs, c)
                 for fs, c in zip(system.factors, cert.factor_certs))
        zero = all(c.verdict == "zero" for c in cert.factor_certs)
        return ok and (cert.verdict == ("zero" if zero else "positive"))
    if system.height_kind == "exact-power":
        small = cert.orbit[0].max_abs() <= 1
        return cert.verdict == ("zero" if small else "positive")
    f, d = system.height_map()
    hdb = height_difference_bound(f)
    for a, b in zip(cert.orbit, cert.orbit[1:]):
        if f.apply(a) != b:
            return False
    if cert.verdict == "zero":
        i, j = cert.cycle
        return cert.orbit[i] == cert.orbit[j] and i < j
    esc = cert.orbit[cert.escape_index]
    return hdb.threshold_exceeded(esc)


# ---------------------------------------------------------------------------
# minimum positive height over a search region


@dataclass(frozen=True)
class MinPositiveHeight:
    """A certified lower bound for positive canonical heights in a region.

    a_lower bounds h_F from below over every positive-height rational point
    of the search region; `certified` records the self-consistency test
    (attained minimum fits under log H), in which case no point outside the
    region can do better and the bound is global.
    """

    a_lower: float
    region_bound: int
    attaining_point: Point
    attained: CanonicalHeightResult
    certified: bool
    positive_count: int
    zero_count: int
    exact_log: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "a_lower": self.a_lower,
            "region_bound": self.region_bound,
            "attaining_point": self.attaining_point.to_json(),
            "attained": self.attained.to_json(),
            "certified_global": self.certified,
            "positive_count": self.positive_count,
            "zero_count": self.zero_count,
        }


def _search_limit(hdb: HeightDifferenceBound, bound: int) -> int:
    """Largest max|coord| with h <= log(bound) + C/(d-1), exactly."""
    d = hdb.degree
    root, _ = gmpy2.iroot(bound ** (d - 1) * hdb.threshold_int, d - 1)
    return int(root)


def _height_slack(system: EndoSystem) -> list[float]:
    """Per-factor C/(d-1) with h_F >= h - slack, up-rounded (0 if exact)."""
    if system.height_kind == "product":
        out = []
        for fs in system.factors:
            out.extend(_height_slack(fs))
        return out
    if system.height_kind == "exact-power":
        return [0.0]
    f, d = system.height_map()
    hdb = height_difference_bound(f)
    return [math.nextafter(hdb.c / (d - 1), math.inf)]


def _naive_floor(point: Point, slack: list[float]) -> float:
    """Down-rounded lower bound for h_F(point) from naive heights."""
    factors = point.factors if isinstance(point, ProductPoint) else (point,)
    total = 0.0
    for f, s in zip(factors, slack):
        total += max(0.0, _log_down(f.max_abs()) - s)
    return total


def _refine_positive(system: EndoSystem, point: Point,
                     tolerance: float) -> CanonicalHeightResult:
    tol = tolerance
    while True:
        res = canonical_height(system, point, tol)
        if res.exact_log is not None or res.lower > 0:
            return res
        tol /= 16


def min_positive_height(system: EndoSystem, bound: int,
                        tolerance: float = 1e-10) -> MinPositiveHeight:
    """Scans the slack-enlarged region and certifies the minimum.

    Every point outside the scanned region has h_F > log(bound), so when
    the attained minimum (plus its radius) fits under log(bound) the bound
    is global over all of the space's rational points.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    kind = system.height_kind
    if kind == "exact-power":
        pts = enumerate_projective(system.dims[0], bound)
    elif kind == "p1":
        f, _ = system.height_map()
        pts = enumerate_projective(1, _search_limit(height_difference_bound(f), bound))
    elif kind == "product":
        limits = []
        for fs in system.factors:
            if fs.height_kind == "exact-power":
                limits.append(bound)
            else:
                ff, _ = fs.height_map()
                limits.append(_search_limit(height_difference_bound(ff), bound))
        pts = enumerate_product(system.dims, limits)
    else:
        raise UnsupportedSystemError(f"no search path for kind {kind!r}")

    slack = _height_slack(system)
    best: Optional[CanonicalHeightResult] = None
    best_point: Optional[Point] = None
    positives = zeros = 0
    for pt in pts:
        cert = is_height_zero(system, pt)
        if cert.verdict == "zero":
            zeros += 1
            continue
        positives += 1
        if best is not None and _naive_floor(pt, slack) > best.upper:
            continue
        res = _refine_positive(system, pt, tolerance)
        if best is None or res.value < best.value:
            best = res
            best_point = pt
    if best is None:
        raise BoundTooSmallError(
            f"no positive-height point with coordinates up to {bound}")

    if best.exact_log is not None:
        certified = best.exact_log <= bound
        a_lower = math.log(best.exact_log)
    else:
        certified = best.upper <= _log_down(bound)
        a_lower = best.lower
    return MinPositiveHeight(
        a_lower=a_lower, region_bound=bound, attaining_point=best_point,
        attained=best, certified=certified,
        positive_count=positives, zero_count=zeros,
        exact_log=best.exact_log)
