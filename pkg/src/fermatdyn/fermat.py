"""Pullback hypersurface searches, Fermat's-property reports, certificates.

Y_N is the preimage of a fixed (multi)homogeneous hypersurface Y under the
index-N member of a system; membership is decided by composing exact
evaluation (never by expanding the pulled-back form).  A report lists every
bounded rational point on Y_N with its height-zero verdict; the property
"all such points have canonical height zero" generalizes the classical
statement that Fermat curves carry only trivial solutions.

The certificate engine turns a finite hit list S plus a certified minimum
positive height into the threshold index m0 beyond which any rational point
mapping into S must itself have height zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .heights import (
    CanonicalHeightResult,
    HeightZeroCertificate,
    MinPositiveHeight,
    canonical_height,
    is_height_zero,
)
from .parallel import effective_workers, run_ordered, split_lead_values
from .points import (
    DimensionError,
    MultiIndex,
    Point,
    ProductPoint,
    ProjectivePoint,
    enumerate_product,
    enumerate_projective,
)
from .systems import EndoSystem, Index

__all__ = [
    "Hypersurface",
    "FermatReport",
    "KeyLemmaCertificate",
    "EmpiricalCheckReport",
    "search_points",
    "member_YN",
    "check_fermat_property",
    "certify_threshold",
    "verify_certificate_empirically",
    "fermat_hyperplane",
    "bilinear_surface",
]


class InvalidCertificateError(ValueError):
    """Certificate preconditions violated (empty S, nonpositive minimum)."""


# ---------------------------------------------------------------------------
# hypersurfaces


@dataclass(frozen=True)
class Hypersurface:
    """One (multi)homogeneous form with rational coefficients.

    `factors` lists the coordinate count of each factor space; monomial
    exponents are flat tuples over the concatenated coordinates.  The form
    must be homogeneous of one degree per factor block.
    """

    factors: tuple[int, ...]
    monomials: tuple[tuple[tuple[int, ...], Fraction], ...]
    degrees: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if not self.monomials:
            raise ValueError("zero form")
        width = sum(self.factors)
        degs: Optional[tuple[int, ...]] = None
        for exps, coeff in self.monomials:
            if len(exps) != width:
                raise DimensionError("monomial width does not match factors")
            if coeff == 0:
                raise ValueError("zero coefficient in form")
            pos = 0
            block = []
            for k in self.factors:
                block.append(sum(exps[pos:pos + k]))
                pos += k
            if degs is None:
                degs = tuple(block)
            elif degs != tuple(block):
                raise ValueError("form is not multihomogeneous")
        object.__setattr__(self, "degrees", degs)
        # integer-scaled coefficients for fast exact zero tests
        denom = 1
        for _, coeff in self.monomials:
            denom = denom * coeff.denominator // math.gcd(denom, coeff.denominator)
        object.__setattr__(self, "_int_exps",
                           tuple(e for e, _ in self.monomials))
        object.__setattr__(self, "_int_coeffs",
                           tuple(int(c * denom) for _, c in self.monomials))

    def _flatten(self, point: Point) -> list[int]:
        coords: list[int] = []
        if isinstance(point, ProductPoint):
            if len(point.factors) != len(self.factors):
                raise DimensionError("point arity does not match form")
            for f, k in zip(point.factors, self.factors):
                if len(f.coords) != k:
                    raise DimensionError("factor width mismatch")
                coords.extend(f.coords)
        else:
            if len(self.factors) != 1 or len(point.coords) != self.factors[0]:
                raise DimensionError("point does not match form")
            coords.extend(point.coords)
        return coords

    def evaluate(self, point: Point) -> Fraction:
        coords = self._flatten(point)
        total = Fraction(0)
        for exps, coeff in self.monomials:
            term = coeff
            for c, e in zip(coords, exps):
                if e:
                    if c == 0:
                        term = Fraction(0)
                        break
                    term *= Fraction(c)**e
            total += term
        return total

    def vanishes_on(self, coords: Sequence[int]) -> bool:
        """Zero test on an integer coordinate vector (scale-invariant)."""
        total = 0
        for exps, coeff in zip(self._int_exps, self._int_coeffs):
            term = coeff
            for c, e in zip(coords, exps):
                if e:
                    if c == 0:
                        term = 0
                        break
                    term *= c**e if e > 1 else c
            total += term
        return total == 0

    def contains(self, point: Point) -> bool:
        return self.vanishes_on(self._flatten(point))

    def to_json(self) -> dict:
        return {
            "factors": list(self.factors),
            "monomials": [
                {"exponents": list(e), "coefficient": str(c)}
                for e, c in self.monomials
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Hypersurface":
        monos = tuple(
            (tuple(int(x) for x in m["exponents"]), Fraction(m["coefficient"]))
            for m in data["monomials"]
        )
        return Hypersurface(tuple(int(k) for k in data["factors"]), monos)


def fermat_hyperplane(n: int = 2) -> Hypersurface:
    """X_0 + X_1 + ... + X_{n-1} - X_n on P^n."""
    monos = []
    for i in range(n + 1):
        exps = [0] * (n + 1)
        exps[i] = 1
        monos.append((tuple(exps), Fraction(1) if i < n else Fraction(-1)))
    return Hypersurface((n + 1,), tuple(monos))


def bilinear_surface(alpha, beta, gamma, delta) -> Hypersurface:
    """a X0 Y0 + b X1 Y1 + c X0 Y1 + d X1 Y0 on P^1 x P^1."""
    coeffs = [Fraction(v) for v in (alpha, beta, gamma, delta)]
    if any(c == 0 for c in coeffs):
        raise ValueError("all four coefficients must be nonzero")
    if coeffs[0] * coeffs[1] - coeffs[2] * coeffs[3] == 0:
        raise ValueError("degenerate surface: vanishing determinant")
    a, b, c, d = coeffs
    monos = (
        ((1, 0, 1, 0), a),
        ((0, 1, 0, 1), b),
        ((1, 0, 0, 1), c),
        ((0, 1, 1, 0), d),
    )
    return Hypersurface((2, 2), monos)


# ---------------------------------------------------------------------------
# bounded search


def search_points(dims: Sequence[int], bound: int,
                  lead_values: Optional[Sequence[int]] = None):
    """Primitive sign-normalized points with all coordinates in [-H, H].

    One projective space when len(dims) == 1, a product otherwise; order is
    the canonical lexicographic stream (deterministic, partition-friendly).
    """
    if len(dims) == 1:
        yield from enumerate_projective(dims[0], bound, lead_values)
    else:
        first = enumerate_projective(dims[0], bound, lead_values)
        rest = [list(enumerate_projective(d, bound)) for d in dims[1:]]
        for p0 in first:
            for combo in itertools.product(*rest):
                yield ProductPoint((p0,) + combo)


def member_YN(system: EndoSystem, index: Index, surface: Hypersurface,
              point: Point) -> bool:
    """Exact test form(f_index(point)) = 0, evaluated by composition.

    Works on an unnormalized integer lift of the image; vanishing of a
    multihomogeneous form does not depend on the lift.
    """
    system.check_point(point)
    if tuple(d + 1 for d in system.dims) != surface.factors:
        raise DimensionError("surface does not live on the system's space")
    return surface.vanishes_on(system.raw_image(index, point))


# ---------------------------------------------------------------------------
# Fermat-property reports


@dataclass(frozen=True)
class FermatHit:
    point: Point
    certificate: HeightZeroCertificate

    def to_json(self) -> dict:
        return {"point": self.point.to_json(),
                "verdict": self.certificate.verdict,
                "certificate": self.certificate.to_json()}


@dataclass(frozen=True)
class FermatReport:
    system: dict
    index: Index
    bound: int
    hits: tuple[FermatHit, ...]
    counterexample: Optional[Point]

    @property
    def verdict(self) -> str:
        return ("counterexample" if self.counterexample is not None
                else "fermat-holds-within-bound")

    def to_json(self) -> dict:
        idx = self.index.to_json() if isinstance(self.index, MultiIndex) else self.index
        out = {
            "system": self.system,
            "index": idx,
            "bound": self.bound,
            "verdict": self.verdict,
            "hits": [h.to_json() for h in self.hits],
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        return out


def _scan_chunk(system: EndoSystem, index: Index, surface: Hypersurface,
                bound: int, lead_values: Sequence[int]) -> list[FermatHit]:
    dims = tuple(d + 1 for d in system.dims)
    if surface.factors != dims:
        raise DimensionError("surface does not live on the system's space")
    hits = []
    for pt in search_points(system.dims, bound, lead_values):
        if member_YN(system, index, surface, pt):
            hits.append(FermatHit(pt, is_height_zero(system, pt)))
    return hits


def check_fermat_property(system: EndoSystem, index: Index,
                          surface: Hypersurface, bound: int,
                          workers: Optional[int] = None) -> FermatReport:
    """Scans Y_index up to the bound and classifies every hit.

    The verdict is qualified by the bound: a clean scan is evidence within
    [-H, H], never a completeness claim.  The first positive-height hit in
    search order becomes the counterexample; all hits are reported.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    w = effective_workers(workers)
    chunks = split_lead_values(bound, w)
    tasks = [
        (lambda lv=lv: _scan_chunk(system, index, surface, bound, lv))
        for lv in chunks
    ]
    hits: list[FermatHit] = []
    for part in run_ordered(tasks, w):
        hits.extend(part)
    counterexample = next(
        (h.point for h in hits if h.certificate.verdict == "positive"), None)
    return FermatReport(
        system=system.descriptor(), index=index, bound=bound,
        hits=tuple(hits), counterexample=counterexample)


def scan_indices(system: EndoSystem, surface: Hypersurface,
                 indices: Sequence[Index], bound: int,
                 workers: Optional[int] = None) -> list[FermatReport]:
    """One Fermat check per index over a shared point list.

    The search space is enumerated once; per-index scans are independent
    and may run on the worker pool, merged back in index order.  Height
    verdicts are memoized per point across indices.
    """
    points = list(search_points(system.dims, bound))
    certs: dict[Point, HeightZeroCertificate] = {}

    def classify(pt: Point) -> HeightZeroCertificate:
        if pt not in certs:
            certs[pt] = is_height_zero(system, pt)
        return certs[pt]

    def scan_one(index: Index) -> FermatReport:
        hits = [FermatHit(pt, classify(pt)) for pt in points
                if member_YN(system, index, surface, pt)]
        counterexample = next(
            (h.point for h in hits if h.certificate.verdict == "positive"), None)
        return FermatReport(system=system.descriptor(), index=index,
                            bound=bound, hits=tuple(hits),
                            counterexample=counterexample)

    w = effective_workers(workers)
    tasks = [(lambda i=i: scan_one(i)) for i in indices]
    return run_ordered(tasks, w)


# ---------------------------------------------------------------------------
# key-lemma certificates


def _exact_compare(base: int, exponent: int, target: int) -> bool:
    """base^exponent > target by integers, with a float screen for size."""
    if base < 2:
        raise InvalidCertificateError("exact comparison needs base >= 2")
    bits = exponent * math.log2(base)
    if bits > target.bit_length() + 2:
        return True
    if bits < target.bit_length() - 2:
        return False
    return base**exponent > target


@dataclass(frozen=True)
class KeyLemmaCertificate:
    """Threshold index with d_{m0} * a > max_S h_F, outward-rounded.

    Consequence: for any member index m at or beyond the threshold, a
    rational point whose f_m-image lies in S has canonical height zero.
    """

    s_points: tuple[Point, ...]
    s_heights: tuple[CanonicalHeightResult, ...]
    max_upper: float
    max_exact: Optional[int]
    a_lower: float
    a_exact: Optional[int]
    threshold_index: Union[int, MultiIndex]
    source_index: Optional[Index]
    transcript: tuple[str, ...]

    def to_json(self) -> dict:
        m0 = (self.threshold_index.to_json()
              if isinstance(self.threshold_index, MultiIndex)
              else self.threshold_index)
        out = {
            "s_count": len(self.s_points),
            "s_points": [p.to_json() for p in self.s_points],
            "max_height_upper": self.max_upper,
            "a_lower": self.a_lower,
            "threshold_index": m0,
            "transcript": list(self.transcript),
        }
        if self.max_exact is not None:
            out["max_height_exact_log"] = str(self.max_exact)
        if self.a_exact is not None:
            out["a_lower_exact_log"] = str(self.a_exact)
        if self.source_index is not None:
            out["source_index"] = (
                self.source_index.to_json()
                if isinstance(self.source_index, MultiIndex) else self.source_index)
        return out


def _scalar_threshold(degree_law: Callable[[int], int], start: int,
                      a_exact: Optional[int], a_lower: float,
                      max_exact: Optional[int], max_upper: float,
                      transcript: list[str]) -> int:
    m = start
    for _ in range(10**6):
        d = degree_law(m)
        if a_exact is not None and max_exact is not None:
            ok = _exact_compare(a_exact, d, max_exact)
            transcript.append(
                f"m={m}: {a_exact}^{d} {'>' if ok else '<='} {max_exact}")
        else:
            ok = d * a_lower > max_upper
            transcript.append(
                f"m={m}: {d} * {a_lower!r} {'>' if ok else '<='} {max_upper!r}")
        if ok:
            return m
        m += 1
    raise InvalidCertificateError("no threshold index found (degrees bounded?)")


def certify_threshold(system: EndoSystem, s_points: Sequence[Point],
                      minimum: Union[MinPositiveHeight, Sequence[MinPositiveHeight]],
                      tolerance: float = 1e-9,
                      source_index: Optional[Index] = None,
                      degree_law: Optional[Callable[[int], int]] = None,
                      ) -> KeyLemmaCertificate:
    """Finds the minimal index past which the height-drop argument closes.

    Scalar systems: minimal m with d_m * a > max h_F(S).  Product systems
    take one minimum per factor and return the componentwise-minimal
    multi-index M0 with min_i d_i(M0) a_i > max h_F(S); both comparisons
    are exact on integers whenever the heights carry exact logs.
    """
    if not s_points:
        raise InvalidCertificateError("S must be nonempty")
    heights = tuple(canonical_height(system, p, tolerance) for p in s_points)
    exacts = [h.exact_log for h in heights]
    if all(e is not None for e in exacts):
        max_exact: Optional[int] = max(exacts)
        max_upper = math.log(max_exact) if max_exact > 1 else 0.0
    else:
        max_exact = None
        max_upper = max(h.upper for h in heights)
        max_upper = math.nextafter(max_upper, math.inf)

    transcript: list[str] = []
    if isinstance(minimum, MinPositiveHeight):
        if minimum.a_lower <= 0:
            raise InvalidCertificateError("a_lower must be positive")
        a_exact = minimum.exact_log
        if a_exact is not None and a_exact < 2:
            a_exact = None
        law = degree_law if degree_law is not None else system.degree_law
        start = system.start_index if isinstance(system.start_index, int) else 2
        m0: Union[int, MultiIndex] = _scalar_threshold(
            law, start, a_exact, minimum.a_lower, max_exact, max_upper,
            transcript)
        a_lower = minimum.a_lower
        a_exact_out = a_exact
    else:
        minima = list(minimum)
        if len(minima) != len(getattr(system, "factors", ())):
            raise InvalidCertificateError("one minimum per product factor required")
        if degree_law is not None:
            raise InvalidCertificateError("degree-law override is scalar-only")
        comps = []
        for k, (fs, mn) in enumerate(zip(system.factors, minima)):
            if mn.a_lower <= 0:
                raise InvalidCertificateError("a_lower must be positive")
            a_exact = mn.exact_log
            if a_exact is not None and a_exact < 2:
                a_exact = None
            sub: list[str] = []
            comp = _scalar_threshold(
                fs.degree_law, fs.start_index, a_exact, mn.a_lower,
                max_exact, max_upper, sub)
            transcript.extend(f"factor {k + 1}: {line}" for line in sub)
            comps.append(comp)
        m0 = MultiIndex(tuple(comps))
        a_lower = min(mn.a_lower for mn in minima)
        a_exact_out = None

    return KeyLemmaCertificate(
        s_points=tuple(s_points), s_heights=heights,
        max_upper=max_upper, max_exact=max_exact,
        a_lower=a_lower, a_exact=a_exact_out,
        threshold_index=m0, source_index=source_index,
        transcript=tuple(transcript))


# ---------------------------------------------------------------------------
# empirical verification


@dataclass(frozen=True)
class EmpiricalCheckReport:
    checks: tuple[dict, ...]
    passed: bool

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": list(self.checks)}


def verify_certificate_empirically(certificate: KeyLemmaCertificate,
                                   system: EndoSystem, surface: Hypersurface,
                                   bound: int,
                                   samples: Optional[Sequence] = None,
                                   workers: Optional[int] = None,
                                   ) -> EmpiricalCheckReport:
    """Checks the certificate's consequence by fresh bounded searches.

    S must have been collected as the Y_p hits (multiplicative law) or the
    Y_{N1} hits (additive law) at this bound; each sampled index m at or
    past the threshold then scans Y_{m.p} (resp. Y_{m+N1}) and every hit
    must be height zero.  A violation means S was incomplete at this bound.
    """
    if certificate.source_index is None:
        raise InvalidCertificateError("certificate lacks its S source index")
    m0 = certificate.threshold_index
    src = certificate.source_index
    if samples is None:
        if isinstance(m0, MultiIndex):
            ones = MultiIndex((1,) * m0.arity)
            samples = [m0, m0.add(ones)]
        else:
            samples = [m0, m0 + 1]
    checks = []
    ok = True
    for m in samples:
        if isinstance(m, MultiIndex):
            if not m0.leq(m):
                raise InvalidCertificateError("sample below threshold index")
            target = src.mul(m) if system.index_law == "multiplicative" else src.add(m)
        else:
            if m < m0:
                raise InvalidCertificateError("sample below threshold index")
            target = src * m if system.index_law == "multiplicative" else src + m
        report = check_fermat_property(system, target, surface, bound, workers)
        all_zero = report.counterexample is None
        ok = ok and all_zero
        checks.append({
            "sample_index": m.to_json() if isinstance(m, MultiIndex) else m,
            "search_index": target.to_json() if isinstance(target, MultiIndex) else target,
            "hits": len(report.hits),
            "all_height_zero": all_zero,
        })
    return EmpiricalCheckReport(tuple(checks), ok)
