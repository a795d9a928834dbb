import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fermatdyn.elliptic import WeierstrassCurve
from fermatdyn.forms import poly_compose, resultant
from fermatdyn.points import MultiIndex, normalize, normalize_product
from fermatdyn.systems import (
    InvalidSystemError,
    PnPowerMap,
    chebyshev_poly,
    chebyshev_system,
    division_poly_multiple,
    iteration_system,
    lattes_system,
    p1_morphism,
    power_system,
    product_system,
    system_from_descriptor,
    verify_index_law,
)

CURVE = WeierstrassCurve(Fraction(-1), Fraction(0))


def random_p1_points(count, seed, span=40):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a, b = rng.randint(-span, span), rng.randint(-span, span)
        if a or b:
            out.append(normalize([a, b]))
    return out


class TestPowerSystem:
    def test_definition(self):
        ps = power_system(2)
        assert ps.apply(2, normalize([1, 2, 3])).coords == (1, 4, 9)

    def test_multiplicative_composition(self):
        ps = power_system(1)
        p = normalize([1, 2])
        assert ps.apply(2, ps.apply(3, p)) == ps.apply(6, p) == normalize([1, 64])

    def test_fixed_point(self):
        ps = power_system(1)
        assert ps.apply(5, normalize([0, 1])).coords == (0, 1)

    def test_degree_law(self):
        assert power_system(3).degree_law(7) == 7

    def test_index_law_random_points(self):
        ps = power_system(2)
        rng = random.Random(5)
        pts = [normalize([rng.randint(-9, 9) or 1 for _ in range(3)])
               for _ in range(10)]
        report = verify_index_law(ps, [2, 3, 4], pts)
        assert report.passed and report.checks == 90


class TestChebyshev:
    def test_poly_base_cases(self):
        assert chebyshev_poly(0) == [2]
        assert chebyshev_poly(1) == [0, 1]
        assert chebyshev_poly(2) == [-2, 0, 1]

    def test_poly_recursion_step(self):
        assert chebyshev_poly(3) == [0, -3, 0, 1]

    def test_poly_composition_identity(self):
        assert chebyshev_poly(4) == [2, 0, -4, 0, 1]
        assert chebyshev_poly(4) == poly_compose(chebyshev_poly(2), chebyshev_poly(2))

    def test_poly_degree(self):
        for n in range(1, 12):
            p = chebyshev_poly(n)
            assert len(p) - 1 == n and p[-1] == 1

    def test_map_values(self):
        cs = chebyshev_system()
        assert cs.apply(2, normalize([3, 1])).coords == (7, 1)
        assert cs.apply(2, normalize([1, 0])).coords == (1, 0)

    def test_composition_at_point(self):
        cs = chebyshev_system()
        z = normalize([5, 2])
        assert cs.apply(3, cs.apply(2, z)) == cs.apply(6, z)

    @given(st.fractions(min_value=-20, max_value=20, max_denominator=12)
           .filter(lambda t: t != 0),
           st.integers(min_value=1, max_value=8))
    def test_defining_identity(self, t, n):
        cs = chebyshev_system()
        z = normalize([t + 1 / t, 1])
        expected = normalize([t**n + t**-n, 1])
        assert cs.apply(n, z) == expected

    def test_commutation_pair(self):
        cs = chebyshev_system()
        report = verify_index_law(cs, [2, 3], random_p1_points(5, seed=1))
        assert report.passed


class TestLattes:
    def test_known_multiple(self):
        f = division_poly_multiple(CURVE, 2)
        assert f.apply(normalize([2, 1])) == normalize([25, 24])

    def test_two_torsion_to_infinity(self):
        f = division_poly_multiple(CURVE, 2)
        # abscissae of 2-torsion: roots of x^3 - x
        for x in (0, 1, -1):
            assert f.apply(normalize([x, 1])).coords == (1, 0)

    def test_commutation(self):
        ls = lattes_system(CURVE)
        z = normalize([3, 1])
        a = ls.apply(2, ls.apply(3, z))
        b = ls.apply(3, ls.apply(2, z))
        assert a == b == ls.apply(6, z)

    def test_degree_law(self):
        ls = lattes_system(CURVE)
        assert ls.degree_law(2) == 4
        assert ls.degree_law(3) == 9

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_algebraic_degree_matches_law(self, n):
        # degree of the coprime form pair equals d_N (dimension-1 instance
        # of degree_law^dim = topological degree)
        f = division_poly_multiple(CURVE, n)
        assert f.degree == n * n
        assert f.resultant() != 0

    def test_index_law_report(self):
        ls = lattes_system(CURVE)
        report = verify_index_law(ls, [2, 3], random_p1_points(4, seed=2, span=9))
        assert report.passed

    def test_singular_curve_rejected(self):
        with pytest.raises(Exception):
            lattes_system(WeierstrassCurve(Fraction(0), Fraction(0)))


class TestIteration:
    def test_composition_equals_big_index(self):
        cs = chebyshev_system()
        it = iteration_system(cs.map_for_index(2))
        z = normalize([3, 1])
        assert it.apply(3, z) == cs.apply(8, z)

    def test_degree_law(self):
        it = iteration_system(chebyshev_system().map_for_index(2))
        assert it.degree_law(3) == 8

    def test_additive_law(self):
        it = iteration_system(chebyshev_system().map_for_index(2))
        z = normalize([5, 3])
        assert it.apply(1, it.apply(2, z)) == it.apply(3, z)
        report = verify_index_law(it, [1, 2, 3], random_p1_points(4, seed=3, span=7))
        assert report.passed

    def test_degree_one_base_rejected(self):
        with pytest.raises(InvalidSystemError):
            iteration_system(p1_morphism([0, 1], [1, 0]))

    def test_pn_power_base(self):
        it = iteration_system(PnPowerMap(2, 3))
        p = normalize([1, 2, 5])
        assert it.apply(2, p) == power_system(2).apply(9, p)


class TestProduct:
    def test_factorwise_action(self):
        prod = product_system([power_system(1), power_system(1)])
        pp = normalize_product([[1, 2], [1, 2]])
        image = prod.apply(MultiIndex((2, 3)), pp)
        assert [f.coords for f in image.factors] == [(1, 4), (1, 8)]

    def test_multiplicative_multi_index(self):
        prod = product_system([power_system(1), power_system(1)])
        pp = normalize_product([[2, 3], [1, 5]])
        i, j = MultiIndex((2, 2)), MultiIndex((3, 5))
        assert prod.apply(i, prod.apply(j, pp)) == prod.apply(i.mul(j), pp)

    def test_height_zero_point_stays_small(self):
        prod = product_system([power_system(1), power_system(1)])
        pp = normalize_product([[1, 1], [1, -1]])
        for i in (MultiIndex((2, 2)), MultiIndex((3, 4)), MultiIndex((5, 2))):
            image = prod.apply(i, pp)
            assert image.factors[0].coords == (1, 1)
            assert image.factors[1].coords in ((1, 1), (1, -1))

    def test_mixed_laws_rejected(self):
        with pytest.raises(InvalidSystemError):
            product_system([
                power_system(1),
                iteration_system(chebyshev_system().map_for_index(2)),
            ])

    def test_vector_degree_law(self):
        prod = product_system([power_system(1), lattes_system(CURVE)])
        assert prod.degree_law(MultiIndex((5, 3))) == (5, 9)


class TestMorphismInvariants:
    def test_every_builtin_map_has_nonzero_resultant(self):
        cs = chebyshev_system()
        ls = lattes_system(CURVE)
        for n in (2, 3, 4, 5):
            for f in (cs.map_for_index(n), ls.map_for_index(n)):
                assert f.resultant() != 0
                assert resultant(f.num, f.den) == f.resultant()

    def test_primitive_coefficients(self):
        import math
        f = division_poly_multiple(CURVE, 3)
        g = math.gcd(*(abs(c) for c in f.num.coeffs + f.den.coeffs))
        assert g == 1


class TestSerialization:
    @pytest.mark.parametrize("system", [
        power_system(2),
        chebyshev_system(),
        lattes_system(CURVE),
        iteration_system(chebyshev_system().map_for_index(2)),
        iteration_system(PnPowerMap(3, 2)),
        product_system([power_system(1), power_system(1)]),
    ])
    def test_descriptor_roundtrip(self, system):
        desc = system.descriptor()
        clone = system_from_descriptor(desc)
        assert clone.descriptor() == desc
        assert clone.index_law == system.index_law
        assert clone.dims == system.dims

    def test_unknown_kind(self):
        with pytest.raises(InvalidSystemError):
            system_from_descriptor({"kind": "mystery"})
