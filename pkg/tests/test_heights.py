import math
import random
from fractions import Fraction

import pytest

from fermatdyn.elliptic import WeierstrassCurve
from fermatdyn.heights import (
    BoundTooSmallError,
    canonical_height,
    height_difference_bound,
    is_height_zero,
    min_positive_height,
    naive_height,
    recheck_certificate,
)
from fermatdyn.points import normalize, normalize_product
from fermatdyn.systems import (
    chebyshev_system,
    iteration_system,
    lattes_system,
    power_system,
    product_system,
)

CURVE = WeierstrassCurve(Fraction(-1), Fraction(0))


def random_p1_points(count, seed, span=50):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a, b = rng.randint(-span, span), rng.randint(-span, span)
        if a or b:
            out.append(normalize([a, b]))
    return out


class TestNaiveHeight:
    def test_single(self):
        assert naive_height(normalize([1, 2, 3])) == math.log(3)

    def test_unit_coordinates(self):
        assert naive_height(normalize([0, 1])) == 0.0

    def test_product_sums(self):
        pp = normalize_product([[1, 2], [1, 3]])
        assert naive_height(pp) == math.log(2) + math.log(3)


def exact_two_sided_ok(f, hdb, point):
    """|h(f(y)) - d h(y)| <= C checked on integers only."""
    m_y = point.max_abs()
    image = f.apply(point)
    m_f = image.max_abs()
    t = hdb.threshold_int
    d = hdb.degree
    return m_f <= t * m_y**d and m_y**d <= t * m_f


class TestHeightDifferenceBound:
    def test_power_map_exact(self):
        f, d = power_system(1).height_map()
        hdb = height_difference_bound(f)
        assert hdb.c == 0.0 and hdb.threshold_int == 1
        for p in random_p1_points(50, seed=11):
            assert exact_two_sided_ok(f, hdb, p)

    def test_chebyshev_bound_holds(self):
        cs = chebyshev_system()
        f, d = cs.height_map()
        hdb = height_difference_bound(f)
        assert hdb.c > 0
        assert hdb.cofactors.verify(f.num, f.den)
        for p in random_p1_points(300, seed=12):
            assert exact_two_sided_ok(f, hdb, p)

    def test_lattes_bound_holds(self):
        f, d = lattes_system(CURVE).height_map()
        hdb = height_difference_bound(f)
        assert math.isfinite(hdb.c) and hdb.c > 0
        assert abs(hdb.res) == 4096
        for p in random_p1_points(300, seed=13):
            assert exact_two_sided_ok(f, hdb, p)

    def test_threshold_is_exactly_exp_c(self):
        f, _ = chebyshev_system().height_map()
        hdb = height_difference_bound(f)
        assert hdb.c == pytest.approx(math.log(hdb.threshold_int), abs=1e-12)
        assert hdb.c >= math.log(hdb.threshold_int)


class TestCanonicalHeight:
    def test_power_exact(self):
        res = canonical_height(power_system(1), normalize([1, 2]), 1e-8)
        assert res.value == math.log(2)
        assert res.error_radius == 0.0
        assert res.exact_log == 2

    def test_chebyshev_preperiodic_is_zero(self):
        res = canonical_height(chebyshev_system(), normalize([2, 1]), 1e-8)
        assert res.value == 0.0 and res.error_radius == 0.0

    def test_chebyshev_closed_form(self):
        # z = t + 1/t with t = (3 + sqrt 5)/2 gives h_F(3) = log t
        res = canonical_height(chebyshev_system(), normalize([3, 1]), 1e-10)
        expected = math.log((3 + math.sqrt(5)) / 2)
        assert abs(res.value - expected) <= res.error_radius + 1e-12
        assert res.error_radius <= 1e-10

    @pytest.mark.parametrize("system,n", [
        (chebyshev_system(), 2),
        (chebyshev_system(), 3),
        (lattes_system(CURVE), 2),
        (power_system(1), 4),
    ])
    def test_functional_equation_sampled(self, system, n):
        d = system.degree_law(n)
        for p in random_p1_points(10, seed=n):
            hx = canonical_height(system, p, 1e-9)
            hfx = canonical_height(system, system.apply(n, p), 1e-9)
            combined = hfx.error_radius + d * hx.error_radius
            assert abs(hfx.value - d * hx.value) <= combined + 1e-12

    def test_index_independence(self):
        cs = chebyshev_system()
        for p in random_p1_points(10, seed=77):
            via2 = canonical_height(cs, p, 1e-9, index=2)
            via3 = canonical_height(cs, p, 1e-9, index=3)
            assert abs(via2.value - via3.value) <= (
                via2.error_radius + via3.error_radius + 1e-12)

    def test_against_exact_orbit_truncation(self):
        # independent oracle: h(f^k x)/d^k with exact integers brackets h_F
        cs = chebyshev_system()
        f, d = cs.height_map()
        hdb = height_difference_bound(f)
        for p in random_p1_points(5, seed=21, span=9):
            res = canonical_height(cs, p, 1e-10)
            cur = p
            for k in range(1, 10):
                cur = f.apply(cur)
                approx = math.log(cur.max_abs()) / d**k
                slack = hdb.c / (d**k * (d - 1))
                assert abs(res.value - approx) <= res.error_radius + slack + 1e-12

    def test_iteration_system_height(self):
        it = iteration_system(chebyshev_system().map_for_index(2))
        cs = chebyshev_system()
        p = normalize([3, 1])
        a = canonical_height(it, p, 1e-9)
        b = canonical_height(cs, p, 1e-9)
        assert abs(a.value - b.value) <= a.error_radius + b.error_radius

    def test_product_additivity_exact(self):
        prod = product_system([power_system(1), power_system(1)])
        pp = normalize_product([[1, 2], [1, 3]])
        res = canonical_height(prod, pp, 1e-9)
        assert res.value == math.log(6)
        assert res.error_radius == 0.0 and res.exact_log == 6

    def test_product_mixed_factors(self):
        prod = product_system([power_system(1), chebyshev_system()])
        pp = normalize_product([[1, 2], [3, 1]])
        res = canonical_height(prod, pp, 1e-8)
        h2 = canonical_height(chebyshev_system(), normalize([3, 1]), 1e-9)
        assert abs(res.value - (math.log(2) + h2.value)) <= (
            res.error_radius + h2.error_radius + 1e-12)
        assert res.error_radius <= 1e-8

    def test_nonnegativity_window(self):
        for system in (chebyshev_system(), lattes_system(CURVE)):
            for p in random_p1_points(5, seed=31, span=12):
                res = canonical_height(system, p, 1e-9)
                assert res.value + res.error_radius >= 0.0

    def test_tolerance_validation(self):
        with pytest.raises(ValueError):
            canonical_height(power_system(1), normalize([1, 2]), 0.0)


class TestHeightZero:
    def test_power_units(self):
        cert = is_height_zero(power_system(3), normalize([2, -2, 0, 2]))
        assert cert.verdict == "zero"
        assert cert.orbit[0].coords == (1, -1, 0, 1)

    def test_power_positive(self):
        cert = is_height_zero(power_system(2), normalize([3, 4, 5]))
        assert cert.verdict == "positive"

    def test_chebyshev_zero_orbit(self):
        cert = is_height_zero(chebyshev_system(), normalize([0, 1]))
        assert cert.verdict == "zero"
        affine = [p.coords for p in cert.orbit]
        assert affine == [(0, 1), (2, -1), (2, 1), (2, 1)]
        assert cert.cycle == (2, 3)

    def test_chebyshev_positive_orbit(self):
        cert = is_height_zero(chebyshev_system(), normalize([3, 1]))
        assert cert.verdict == "positive"
        escape = cert.orbit[cert.escape_index]
        assert escape.max_abs() > cert.threshold_int

    def test_certificates_recheck(self):
        cs = chebyshev_system()
        for coords in ([0, 1], [1, 1], [2, 1], [3, 1], [5, 2], [1, 0]):
            cert = is_height_zero(cs, normalize(coords))
            assert recheck_certificate(cs, cert)

    def test_product_zero_iff_all_factors(self):
        prod = product_system([power_system(1), power_system(1)])
        zz = normalize_product([[1, 1], [1, -1]])
        zp = normalize_product([[1, 1], [1, 2]])
        assert is_height_zero(prod, zz).verdict == "zero"
        assert is_height_zero(prod, zp).verdict == "positive"
        assert recheck_certificate(prod, is_height_zero(prod, zp))

    def test_chebyshev_preperiodic_sweep(self):
        # rational preperiodic points: infinity, 0, +-1, +-2
        cs = chebyshev_system()
        zero_set = set()
        from fermatdyn.points import enumerate_projective
        for p in enumerate_projective(1, 10):
            if is_height_zero(cs, p).verdict == "zero":
                zero_set.add(p.coords)
        assert zero_set == {(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (2, -1)}

    def test_lattes_zero_set_small(self):
        ls = lattes_system(CURVE)
        # abscissae of rational torsion: infinity and the 2-torsion roots
        for coords in ([1, 0], [0, 1], [1, 1], [1, -1]):
            assert is_height_zero(ls, normalize(coords)).verdict == "zero"
        assert is_height_zero(ls, normalize([3, 1])).verdict == "positive"


class TestMinPositiveHeight:
    def test_power_p1(self):
        m = min_positive_height(power_system(1), 5)
        assert m.a_lower == math.log(2)
        assert m.attaining_point.coords == (1, 2)
        assert m.certified and m.exact_log == 2

    def test_power_p2(self):
        m = min_positive_height(power_system(2), 5)
        assert m.a_lower == math.log(2)
        assert m.attaining_point.max_abs() == 2
        assert m.certified

    def test_power_any_bound_at_least_two(self):
        for bound in (2, 3, 9):
            m = min_positive_height(power_system(1), bound)
            assert m.a_lower == math.log(2) and m.certified

    def test_chebyshev_certified(self):
        m = min_positive_height(chebyshev_system(), 10)
        assert m.a_lower > 0
        assert m.certified
        # the attained minimum is h = log 2 at z = 3/2
        assert m.attaining_point.coords == (3, 2)
        assert abs(m.attained.value - math.log(2)) <= 1e-9

    def test_product_power(self):
        m = min_positive_height(
            product_system([power_system(1), power_system(1)]), 3)
        assert m.a_lower == math.log(2)
        assert m.certified

    def test_bound_too_small(self):
        with pytest.raises(BoundTooSmallError):
            min_positive_height(power_system(1), 1)

    def test_a_lower_bounds_region(self):
        # every positive-height point in the region obeys the bound
        cs = chebyshev_system()
        m = min_positive_height(cs, 5)
        from fermatdyn.points import enumerate_projective
        for p in enumerate_projective(1, 5):
            if is_height_zero(cs, p).verdict == "positive":
                h = canonical_height(cs, p, 1e-10)
                assert h.value + h.error_radius >= m.a_lower
