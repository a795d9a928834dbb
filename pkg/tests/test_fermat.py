import math
import random
from fractions import Fraction

import pytest

from fermatdyn.fermat import (
    Hypersurface,
    InvalidCertificateError,
    bilinear_surface,
    certify_threshold,
    check_fermat_property,
    fermat_hyperplane,
    member_YN,
    scan_indices,
    search_points,
    verify_certificate_empirically,
)
from fermatdyn.heights import is_height_zero, min_positive_height, recheck_certificate
from fermatdyn.points import DimensionError, MultiIndex, normalize, normalize_product
from fermatdyn.systems import chebyshev_system, iteration_system, power_system, product_system


class TestHypersurface:
    def test_fermat_line(self):
        y = fermat_hyperplane(2)
        assert y.degrees == (1,)
        assert y.evaluate(normalize([1, -1, 0])) == 0
        assert y.evaluate(normalize([1, 2, 2])) == 1

    def test_multihomogeneous_validation(self):
        with pytest.raises(ValueError):
            Hypersurface((2, 2), (((1, 0, 1, 0), Fraction(1)),
                                  ((2, 0, 0, 0), Fraction(1))))

    def test_degenerate_bilinear_rejected(self):
        with pytest.raises(ValueError):
            bilinear_surface(1, 1, 1, 1)   # det = 0
        with pytest.raises(ValueError):
            bilinear_surface(0, 1, 1, 1)

    def test_bilinear_evaluation(self):
        y = bilinear_surface(1, 1, 1, -2)
        assert y.degrees == (1, 1)
        assert y.evaluate(normalize_product([[1, 0], [1, -1]])) == 0

    def test_json_roundtrip(self):
        y = bilinear_surface(1, 1, 1, -2)
        assert Hypersurface.from_json(y.to_json()) == y

    def test_rational_coefficients(self):
        y = Hypersurface((2,), (((1, 0), Fraction(1, 2)), ((0, 1), Fraction(-1, 3))))
        assert y.evaluate(normalize([2, 3])) == 0


class TestSearchPoints:
    def test_p1_h1_exact(self):
        assert [p.coords for p in search_points([1], 1)] == [
            (0, 1), (1, 0), (1, 1), (1, -1)]

    def test_p1_h2(self):
        pts = {p.coords for p in search_points([1], 2)}
        assert len(pts) == 8
        assert {(1, 2), (2, 1), (1, -2), (2, -1)} <= pts

    def test_p2_h1_count(self):
        assert len(list(search_points([2], 1))) == 13

    def test_each_class_once(self):
        pts = list(search_points([2], 3))
        assert len(pts) == len(set(pts))

    def test_product_count(self):
        assert len(list(search_points([1, 1], 1))) == 16


class TestMembership:
    def test_cubes(self):
        y = fermat_hyperplane(2)
        ps = power_system(2)
        assert member_YN(ps, 3, y, normalize([1, -1, 0]))

    def test_pythagorean(self):
        y = fermat_hyperplane(2)
        assert member_YN(power_system(2), 2, y, normalize([3, 4, 5]))

    def test_non_member(self):
        y = fermat_hyperplane(2)
        assert not member_YN(power_system(2), 4, y, normalize([1, 2, 2]))

    def test_multiplicative_pullback_identity(self):
        # membership in Y_{NM} equals membership of f_M(x) in Y_N
        y = fermat_hyperplane(2)
        ps = power_system(2)
        rng = random.Random(4)
        for _ in range(40):
            pt = normalize([rng.randint(-6, 6) or 1 for _ in range(3)])
            n, m = rng.choice([2, 3]), rng.choice([2, 3, 4])
            lhs = member_YN(ps, n * m, y, pt)
            rhs = member_YN(ps, n, y, ps.apply(m, pt))
            assert lhs == rhs

    def test_additive_pullback_identity(self):
        # f_N^{-1}(Y_{N1}) = Y_{N+N1} for the iterated Chebyshev map
        it = iteration_system(chebyshev_system().map_for_index(2))
        fiber7 = Hypersurface((2,), (((1, 0), Fraction(1)),
                                     ((0, 1), Fraction(-7))))
        rng = random.Random(5)
        for _ in range(30):
            pt = normalize([rng.randint(-9, 9) or 1, rng.randint(1, 9)])
            n, n1 = rng.choice([1, 2]), rng.choice([1, 2])
            lhs = member_YN(it, n + n1, fiber7, pt)
            rhs = member_YN(it, n, fiber7, it.apply(n1, pt))
            assert lhs == rhs

    def test_arity_mismatch(self):
        y = fermat_hyperplane(2)
        with pytest.raises(DimensionError):
            member_YN(power_system(1), 2, y, normalize([1, 2]))


class TestFermatReports:
    def test_pythagorean_counterexample(self):
        rep = check_fermat_property(power_system(2), 2, fermat_hyperplane(2), 5)
        assert rep.verdict == "counterexample"
        assert rep.counterexample.coords == (3, 4, 5)
        # every reported hit satisfies the equation exactly
        y = fermat_hyperplane(2)
        for h in rep.hits:
            assert member_YN(power_system(2), 2, y, h.point)

    def test_cubic_holds_with_zero_coordinate(self):
        rep = check_fermat_property(power_system(2), 3, fermat_hyperplane(2), 20)
        assert rep.verdict == "fermat-holds-within-bound"
        assert rep.hits
        for h in rep.hits:
            assert 0 in h.point.coords
            assert h.certificate.verdict == "zero"

    def test_counterexamples_reverify(self):
        ps = power_system(2)
        rep = check_fermat_property(ps, 2, fermat_hyperplane(2), 5)
        for h in rep.hits:
            assert recheck_certificate(ps, h.certificate)
        cert = is_height_zero(ps, rep.counterexample)
        assert cert.verdict == "positive"

    def test_product_surface_report(self):
        prod = product_system([power_system(1), power_system(1)])
        y = bilinear_surface(1, 1, 1, -2)
        rep = check_fermat_property(prod, MultiIndex((2, 2)), y, 10)
        assert rep.verdict == "fermat-holds-within-bound"
        # the height-zero point ((1:0),(1:-1)) lies on Y itself
        assert y.evaluate(normalize_product([[1, 0], [1, -1]])) == 0

    def test_workers_do_not_change_report(self):
        rep1 = check_fermat_property(power_system(2), 2, fermat_hyperplane(2), 4,
                                     workers=1)
        rep8 = check_fermat_property(power_system(2), 2, fermat_hyperplane(2), 4,
                                     workers=8)
        assert rep1.to_json() == rep8.to_json()

    def test_scan_indices_matches_single_checks(self):
        ps = power_system(2)
        y = fermat_hyperplane(2)
        batch = scan_indices(ps, y, [1, 2, 3], 5)
        for idx, rep in zip([1, 2, 3], batch):
            single = check_fermat_property(ps, idx, y, 5)
            assert rep.to_json() == single.to_json()


class TestCertificates:
    def setup_method(self):
        self.ps = power_system(2)
        self.y = fermat_hyperplane(2)
        rep = check_fermat_property(self.ps, 2, self.y, 5)
        self.s_points = [h.point for h in rep.hits]
        self.minimum = min_positive_height(self.ps, 5)

    def test_threshold_linear_degrees(self):
        cert = certify_threshold(self.ps, self.s_points, self.minimum,
                                 source_index=2)
        assert cert.threshold_index == 3
        assert cert.max_exact == 5 and cert.a_exact == 2
        assert any("2^2 <= 5" in line for line in cert.transcript)
        assert any("2^3 > 5" in line for line in cert.transcript)

    def test_threshold_square_degrees(self):
        cert = certify_threshold(self.ps, self.s_points, self.minimum,
                                 source_index=2, degree_law=lambda m: m * m)
        assert cert.threshold_index == 2

    def test_zero_only_s(self):
        pts = [normalize([1, -1, 0]), normalize([0, 1, 1])]
        cert = certify_threshold(self.ps, pts, self.minimum)
        assert cert.threshold_index == self.ps.start_index

    def test_empty_s_rejected(self):
        with pytest.raises(InvalidCertificateError):
            certify_threshold(self.ps, [], self.minimum)

    def test_product_threshold(self):
        prod = product_system([power_system(1), power_system(1)])
        y = bilinear_surface(1, 1, 1, -2)
        hits = [h.point for h in check_fermat_property(
            prod, MultiIndex((1, 1)), y, 3).hits]
        assert hits
        minima = [min_positive_height(f, 3) for f in prod.factors]
        cert = certify_threshold(prod, hits, minima,
                                 source_index=MultiIndex((1, 1)))
        assert isinstance(cert.threshold_index, MultiIndex)
        # max h_F over S and per-factor a = log 2 pin the componentwise m0
        max_h = max(cert.s_heights, key=lambda h: h.value)
        for k in (1, 2):
            m = cert.threshold_index(k)
            assert 2**m > math.exp(max_h.value) - 1e-9
            assert 2**(m - 1) <= math.exp(max_h.upper) + 1e-9

    def test_empirical_verification(self):
        rep = check_fermat_property(self.ps, 3, self.y, 20)
        s_points = [h.point for h in rep.hits]
        cert = certify_threshold(self.ps, s_points, self.minimum,
                                 source_index=3)
        emp = verify_certificate_empirically(cert, self.ps, self.y, 20,
                                             samples=[3])
        assert emp.passed
        assert emp.checks[0]["search_index"] == 9

    def test_empirical_additive(self):
        it = iteration_system(chebyshev_system().map_for_index(2))
        fiber7 = Hypersurface((2,), (((1, 0), Fraction(1)),
                                     ((0, 1), Fraction(-7))))
        rep = check_fermat_property(it, 1, fiber7, 10)
        s_points = [h.point for h in rep.hits]
        minimum = min_positive_height(it, 3)
        cert = certify_threshold(it, s_points, minimum, source_index=1)
        emp = verify_certificate_empirically(cert, it, fiber7, 10)
        assert emp.passed
