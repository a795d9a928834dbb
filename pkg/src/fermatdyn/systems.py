"""Commuting endomorphism systems with exact evaluation.

Built-in families: coordinate powers on P^n, Chebyshev maps on P^1,
multiplication-by-N quotient maps of an elliptic curve on P^1 = E/{+-1},
iteration of a fixed map, and factorwise products.  A system knows its
composition law (f_N o f_M = f_{NM} or f_{N+M}), its degree law, and can
evaluate any member exactly at rational points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .elliptic import DivisionPolynomials, WeierstrassCurve
from .forms import BinaryForm, SingularMapError, clear_pair, homogenize, resultant
from .points import (
    DimensionError,
    MultiIndex,
    Point,
    ProductPoint,
    ProjectivePoint,
    normalize,
)

Index = Union[int, MultiIndex]


class InvalidSystemError(ValueError):
    """System constraints violated (degree < 2, mixed index laws, ...)."""


# ---------------------------------------------------------------------------
# P^1 morphisms


@dataclass(frozen=True)
class P1Morphism:
    """(X : W) -> (num(X, W) : den(X, W)) with coprime primitive forms."""

    num: BinaryForm
    den: BinaryForm

    @property
    def degree(self) -> int:
        return self.num.degree

    def apply(self, point: ProjectivePoint) -> ProjectivePoint:
        if point.dim != 1:
            raise DimensionError("P1 morphism applied to non-P1 point")
        x, w = point.coords
        return normalize([self.num(x, w), self.den(x, w)])

    def resultant(self) -> int:
        return resultant(self.num, self.den)

    def to_json(self) -> dict:
        return {
            "num": [str(c) for c in self.num.coeffs],
            "den": [str(c) for c in self.den.coeffs],
        }


def p1_morphism(num: Sequence[Fraction | int], den: Sequence[Fraction | int]) -> P1Morphism:
    """Validated morphism from rational coefficient vectors of equal degree.

    Scales both forms jointly to a primitive integer pair and rejects pairs
    with a common projective zero.
    """
    if len(num) != len(den):
        raise InvalidSystemError("numerator and denominator degree differ")
    if len(num) < 2:
        raise InvalidSystemError("constant forms do not define a morphism")
    nc, dc = clear_pair(num, den)
    f = P1Morphism(BinaryForm(nc), BinaryForm(dc))
    if f.resultant() == 0:
        raise SingularMapError("forms share a projective zero")
    return f


# ---------------------------------------------------------------------------
# base maps usable for iteration systems


@dataclass(frozen=True)
class PnPowerMap:
    """(x_0 : ... : x_n) -> (x_0^d : ... : x_n^d)."""

    n: int
    d: int

    @property
    def degree(self) -> int:
        return self.d

    def apply(self, point: ProjectivePoint) -> ProjectivePoint:
        if point.dim != self.n:
            raise DimensionError("power map applied to wrong dimension")
        return normalize([c**self.d for c in point.coords])


BaseMap = Union[P1Morphism, PnPowerMap]


# ---------------------------------------------------------------------------
# system base


class EndoSystem:
    """Indexed commuting family with an index law and a degree law.

    Subclasses fix `kind`, the space (`dims`), the law, the start index, and
    implement `apply` and `degree_law`.  `height_kind` tells the heights
    module which canonical-height path applies: 'exact-power' (naive height
    is already canonical), 'p1' (telescoping limit of a P^1 map), or
    'product' (sum over factors).
    """

    kind: str = ""
    index_law: str = ""  # 'multiplicative' | 'additive'
    dims: tuple[int, ...] = ()
    start_index: Index = 2
    height_kind: str = ""

    def apply(self, index: Index, point: Point) -> Point:
        raise NotImplementedError

    def degree_law(self, index: Index):
        raise NotImplementedError

    def compose_index(self, i: Index, j: Index) -> Index:
        if isinstance(i, MultiIndex) != isinstance(j, MultiIndex):
            raise DimensionError("cannot mix scalar and multi-indices")
        if isinstance(i, MultiIndex):
            return i.mul(j) if self.index_law == "multiplicative" else i.add(j)
        return i * j if self.index_law == "multiplicative" else i + j

    def indices_from_start(self):
        """Members in increasing order (scalar systems only)."""
        n = self.start_index
        if not isinstance(n, int):
            raise InvalidSystemError("scalar index iteration on a product system")
        while True:
            yield n
            n += 1

    def height_map(self, index: Optional[int] = None) -> tuple[P1Morphism, int]:
        """The P^1 map iterated for canonical heights ('p1' systems only)."""
        raise InvalidSystemError(f"{self.kind} system has no P1 height map")

    def raw_image(self, index: Index, point: Point) -> list[int]:
        """Unnormalized integer coordinates of f_index(point), flattened.

        Any lift works for scale-invariant tests (form vanishing); the
        default falls back to the normalized image.
        """
        image = self.apply(index, point)
        if isinstance(image, ProductPoint):
            out: list[int] = []
            for f in image.factors:
                out.extend(f.coords)
            return out
        return list(image.coords)

    def descriptor(self) -> dict:
        raise NotImplementedError

    def check_point(self, point: Point) -> None:
        if len(self.dims) == 1:
            if not isinstance(point, ProjectivePoint) or point.dim != self.dims[0]:
                raise DimensionError("point does not live on the system's space")
        else:
            if not isinstance(point, ProductPoint) or point.arity != len(self.dims):
                raise DimensionError("point does not live on the system's space")
            for f, d in zip(point.factors, self.dims):
                if f.dim != d:
                    raise DimensionError("product factor dimension mismatch")


# ---------------------------------------------------------------------------
# coordinate powers on P^n


class PowerSystem(EndoSystem):
    """f_N = coordinatewise N-th power on P^n; multiplicative, d_N = N."""

    kind = "power"
    index_law = "multiplicative"
    height_kind = "exact-power"

    def __init__(self, n: int):
        if n < 1:
            raise InvalidSystemError("dimension must be >= 1")
        self.n = n
        self.dims = (n,)
        self.start_index = 2

    def apply(self, index: int, point: ProjectivePoint) -> ProjectivePoint:
        self.check_point(point)
        if index < 1:
            raise InvalidSystemError("index must be >= 1")
        return normalize([c**index for c in point.coords])

    def degree_law(self, index: int) -> int:
        return index

    def raw_image(self, index: int, point: ProjectivePoint) -> list[int]:
        return [c**index for c in point.coords]

    def height_map(self, index: Optional[int] = None) -> tuple[P1Morphism, int]:
        if self.n != 1:
            raise InvalidSystemError("P1 height map only exists in dimension 1")
        n = self.start_index if index is None else index
        num = homogenize([0] * n + [1], n)
        den = BinaryForm(tuple([1] + [0] * n))
        return P1Morphism(num, den), n

    def descriptor(self) -> dict:
        return {"kind": "power", "n": self.n,
                "index_law": self.index_law, "start_index": self.start_index}


def power_system(n: int) -> PowerSystem:
    return PowerSystem(n)


# ---------------------------------------------------------------------------
# Chebyshev maps


_CHEB_CACHE: dict[int, list[int]] = {0: [2], 1: [0, 1]}


def chebyshev_poly(n: int) -> list[int]:
    """Monic integer Chebyshev-type polynomial with t_n(z + 1/z) = z^n + z^-n.

    t_0 = 2, t_1 = z, and t_n = z t_{n-1} - t_{n-2}."""
    if n < 0:
        raise ValueError("index must be >= 0")
    if n not in _CHEB_CACHE:
        top = max(_CHEB_CACHE)
        for k in range(top + 1, n + 1):
            z_prev = [0] + _CHEB_CACHE[k - 1]
            two_back = _CHEB_CACHE[k - 2]
            two_back = two_back + [0] * (k + 1 - len(two_back))
            _CHEB_CACHE[k] = [a - b for a, b in zip(z_prev, two_back)]
    return list(_CHEB_CACHE[n])


class ChebyshevSystem(EndoSystem):
    """Homogenized Chebyshev maps on P^1; multiplicative, d_N = N."""

    kind = "chebyshev"
    index_law = "multiplicative"
    height_kind = "p1"

    def __init__(self) -> None:
        self.dims = (1,)
        self.start_index = 2
        self._maps: dict[int, P1Morphism] = {}

    def map_for_index(self, n: int) -> P1Morphism:
        if n < 1:
            raise InvalidSystemError("index must be >= 1")
        if n not in self._maps:
            num = chebyshev_poly(n)
            den = [1] + [0] * n
            self._maps[n] = p1_morphism(num + [0] * (n + 1 - len(num)), den)
        return self._maps[n]

    def apply(self, index: int, point: ProjectivePoint) -> ProjectivePoint:
        self.check_point(point)
        return self.map_for_index(index).apply(point)

    def degree_law(self, index: int) -> int:
        return index

    def raw_image(self, index: int, point: ProjectivePoint) -> list[int]:
        f = self.map_for_index(index)
        x, w = point.coords
        return [f.num(x, w), f.den(x, w)]

    def height_map(self, index: Optional[int] = None) -> tuple[P1Morphism, int]:
        n = self.start_index if index is None else index
        return self.map_for_index(n), n

    def descriptor(self) -> dict:
        return {"kind": "chebyshev",
                "index_law": self.index_law, "start_index": self.start_index}


def chebyshev_system() -> ChebyshevSystem:
    return ChebyshevSystem()


# ---------------------------------------------------------------------------
# elliptic quotient maps


def division_poly_multiple(curve: WeierstrassCurve, n: int) -> P1Morphism:
    """Degree n^2 map with x([n]P) = num/den on P^1 = E/{+-1}."""
    if n < 2:
        raise ValueError("multiple must be >= 2")
    dp = DivisionPolynomials(curve)
    a, d = dp.multiple_x_fraction(n)
    deg = n * n
    return p1_morphism(list(a) + [Fraction(0)] * (deg + 1 - len(a)),
                       list(d) + [Fraction(0)] * (deg + 1 - len(d)))


class LattesSystem(EndoSystem):
    """Quotients of multiplication-by-N on an elliptic curve; d_N = N^2."""

    kind = "lattes"
    index_law = "multiplicative"
    height_kind = "p1"

    def __init__(self, curve: WeierstrassCurve):
        self.curve = curve
        self.dims = (1,)
        self.start_index = 2
        self._maps: dict[int, P1Morphism] = {}

    def map_for_index(self, n: int) -> P1Morphism:
        if n < 1:
            raise InvalidSystemError("index must be >= 1")
        if n == 1:
            return p1_morphism([0, 1], [1, 0])
        if n not in self._maps:
            self._maps[n] = division_poly_multiple(self.curve, n)
        return self._maps[n]

    def apply(self, index: int, point: ProjectivePoint) -> ProjectivePoint:
        self.check_point(point)
        return self.map_for_index(index).apply(point)

    def raw_image(self, index: int, point: ProjectivePoint) -> list[int]:
        f = self.map_for_index(index)
        x, w = point.coords
        return [f.num(x, w), f.den(x, w)]

    def degree_law(self, index: int) -> int:
        return index * index

    def height_map(self, index: Optional[int] = None) -> tuple[P1Morphism, int]:
        n = self.start_index if index is None else index
        return self.map_for_index(n), n * n

    def descriptor(self) -> dict:
        return {"kind": "lattes", "a": str(self.curve.a), "b": str(self.curve.b),
                "index_law": self.index_law, "start_index": self.start_index}


def lattes_system(curve: WeierstrassCurve) -> LattesSystem:
    return LattesSystem(curve)


# ---------------------------------------------------------------------------
# iteration of a fixed map


class IterationSystem(EndoSystem):
    """f_N = N-fold composite of one map; additive, d_N = deg(f)^N."""

    kind = "iteration"
    index_law = "additive"

    def __init__(self, base: BaseMap):
        if base.degree < 2:
            raise InvalidSystemError("base map must have degree >= 2")
        self.base = base
        self.start_index = 1
        if isinstance(base, PnPowerMap):
            self.dims = (base.n,)
            self.height_kind = "exact-power"
        else:
            self.dims = (1,)
            self.height_kind = "p1"

    def apply(self, index: int, point: Point) -> Point:
        self.check_point(point)
        if index < 0:
            raise InvalidSystemError("index must be >= 0")
        out = point
        for _ in range(index):
            out = self.base.apply(out)
        return out

    def degree_law(self, index: int) -> int:
        return self.base.degree**index

    def height_map(self, index: Optional[int] = None) -> tuple[P1Morphism, int]:
        if not isinstance(self.base, P1Morphism):
            raise InvalidSystemError("no P1 height map for this base")
        # every member has the same canonical height; iterate the base map
        return self.base, self.base.degree

    def descriptor(self) -> dict:
        if isinstance(self.base, PnPowerMap):
            base = {"kind": "pn-power", "n": self.base.n, "d": self.base.d}
        else:
            base = self.base.to_json()
        return {"kind": "iteration", "base": base,
                "index_law": self.index_law, "start_index": self.start_index}


def iteration_system(base: BaseMap) -> IterationSystem:
    return IterationSystem(base)


# ---------------------------------------------------------------------------
# products


class ProductSystem(EndoSystem):
    """Factorwise action indexed by multi-indices; vector degree law."""

    kind = "product"

    def __init__(self, factors: Sequence[EndoSystem]):
        if not factors:
            raise InvalidSystemError("empty product")
        laws = {f.index_law for f in factors}
        if len(laws) != 1:
            raise InvalidSystemError("mixed index laws in product")
        for f in factors:
            if len(f.dims) != 1:
                raise InvalidSystemError("nested products are not supported")
        self.factors = tuple(factors)
        self.index_law = factors[0].index_law
        self.dims = tuple(f.dims[0] for f in factors)
        self.start_index = MultiIndex(tuple(f.start_index for f in factors))
        self.height_kind = "product"

    def apply(self, index: MultiIndex, point: ProductPoint) -> ProductPoint:
        self.check_point(point)
        if index.arity != len(self.factors):
            raise DimensionError("multi-index arity mismatch")
        return ProductPoint(tuple(
            f.apply(index(k + 1), p)
            for k, (f, p) in enumerate(zip(self.factors, point.factors))))

    def degree_law(self, index: MultiIndex) -> tuple[int, ...]:
        return tuple(f.degree_law(index(k + 1)) for k, f in enumerate(self.factors))

    def raw_image(self, index: MultiIndex, point: ProductPoint) -> list[int]:
        out: list[int] = []
        for k, (f, p) in enumerate(zip(self.factors, point.factors)):
            out.extend(f.raw_image(index(k + 1), p))
        return out

    def descriptor(self) -> dict:
        return {"kind": "product",
                "factors": [f.descriptor() for f in self.factors],
                "index_law": self.index_law,
                "start_index": self.start_index.to_json()}


def product_system(factors: Sequence[EndoSystem]) -> ProductSystem:
    return ProductSystem(factors)


# ---------------------------------------------------------------------------
# index-law verification


@dataclass
class IndexLawReport:
    """Pointwise commutation and composition-law evidence."""

    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"checks": self.checks, "passed": self.passed,
                "violations": self.violations}


def verify_index_law(system: EndoSystem, indices: Sequence[Index],
                     points: Sequence[Point]) -> IndexLawReport:
    """Checks f_I(f_J(x)) = f_J(f_I(x)) = f_{I op J}(x) exactly, pointwise."""
    report = IndexLawReport()
    for i in indices:
        for j in indices:
            composed = system.compose_index(i, j)
            for pt in points:
                a = system.apply(i, system.apply(j, pt))
                b = system.apply(j, system.apply(i, pt))
                c = system.apply(composed, pt)
                report.checks += 1
                if not (a == b == c):
                    report.violations.append({
                        "i": str(i), "j": str(j), "point": str(pt),
                        "i_then_j": str(a), "j_then_i": str(b),
                        "composite": str(c),
                    })
    return report


# ---------------------------------------------------------------------------
# serialization


def system_from_descriptor(desc: dict) -> EndoSystem:
    kind = desc.get("kind")
    if kind == "power":
        return PowerSystem(int(desc["n"]))
    if kind == "chebyshev":
        return ChebyshevSystem()
    if kind == "lattes":
        return LattesSystem(WeierstrassCurve(Fraction(desc["a"]), Fraction(desc["b"])))
    if kind == "iteration":
        base = desc["base"]
        if isinstance(base, dict) and base.get("kind") == "pn-power":
            return IterationSystem(PnPowerMap(int(base["n"]), int(base["d"])))
        if isinstance(base, dict) and base.get("kind") == "chebyshev":
            n = int(base["index"])
            return IterationSystem(ChebyshevSystem().map_for_index(n))
        num = [Fraction(c) for c in base["num"]]
        den = [Fraction(c) for c in base["den"]]
        return IterationSystem(p1_morphism(num, den))
    if kind == "product":
        return ProductSystem([system_from_descriptor(f) for f in desc["factors"]])
    raise InvalidSystemError(f"unknown system kind: {kind!r}")
