import numpy as np
import pytest

from basicgerbe import (
    BoundaryError,
    BranchCutError,
    Contour,
    CutCirclePoint,
    EmptySpaceError,
    IllConditionedCutError,
    IncomparableError,
    UnitaryMatrix,
    UnsupportedOrderError,
    arc_contour,
    circle_between,
    circle_gt,
    cut_point,
    log_cut,
    quad_integrate,
    residue_eval,
    spectral_decompose,
    spectrum_contour,
)
from basicgerbe.contour import Segment, annular_sector


def winding(contour, pole):
    return quad_integrate(contour, lambda xi: 1.0 / (xi - pole))


class TestCutCirclePoint:
    def test_rejects_identity(self):
        with pytest.raises(BoundaryError):
            CutCirclePoint(1.0 + 0j)

    def test_rejects_off_circle(self):
        with pytest.raises(BoundaryError):
            CutCirclePoint(2j)

    def test_angle_range(self):
        assert abs(cut_point(-np.pi / 2).angle - 3 * np.pi / 2) < 1e-12


class TestCircleOrder:
    # The order follows its definition: z1 > z2 iff z2 reaches z1 by a
    # counter-clockwise rotation that avoids the identity.
    def test_quarter_points(self):
        assert not circle_gt(cut_point(np.pi / 2), cut_point(3 * np.pi / 2))
        assert circle_gt(cut_point(3 * np.pi / 2), cut_point(np.pi / 2))

    def test_upper_arc(self):
        assert circle_gt(cut_point(3 * np.pi / 4), cut_point(np.pi / 4))

    def test_equal_incomparable(self):
        z = cut_point(1.0)
        with pytest.raises(IncomparableError):
            circle_gt(z, cut_point(1.0))

    def test_exactly_one_direction(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = rng.uniform(0.01, 2 * np.pi - 0.01, size=2)
            if abs(a - b) < 1e-6:
                continue
            z1, z2 = cut_point(a), cut_point(b)
            assert circle_gt(z1, z2) != circle_gt(z2, z1)


class TestCircleBetween:
    def test_minus_one_between_quarters(self):
        assert circle_between(cut_point(np.pi / 2), cut_point(3 * np.pi / 2), -1.0)

    def test_near_identity_outside(self):
        lam = np.exp(1j * np.pi / 100)
        assert not circle_between(cut_point(np.pi / 2), cut_point(3 * np.pi / 2), lam)

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b, c = rng.uniform(0.01, 2 * np.pi - 0.01, size=3)
            if min(abs(a - b), abs(a - c), abs(b - c)) < 1e-6:
                continue
            z1, z2 = cut_point(a), cut_point(b)
            lam = np.exp(1j * c)
            assert circle_between(z1, z2, lam) == circle_between(z2, z1, lam)

    def test_endpoint_rejected(self):
        z1, z2 = cut_point(1.0), cut_point(2.0)
        with pytest.raises(BoundaryError):
            circle_between(z1, z2, z1.value)


class TestLogCut:
    def test_principal_at_i(self):
        assert abs(log_cut(cut_point(np.pi), 1j) - 1j * np.pi / 2) < 1e-12

    def test_normalized_at_one(self):
        for a in (0.3, np.pi, 5.1):
            assert log_cut(cut_point(a), 1.0) == 0.0

    def test_jump_across_cuts(self):
        z1, z2 = cut_point(3 * np.pi / 4), cut_point(np.pi / 4)
        jump = log_cut(z1, 1j) - log_cut(z2, 1j)
        assert abs(jump - 2j * np.pi) < 1e-12

    def test_on_ray_rejected(self):
        with pytest.raises(BranchCutError):
            log_cut(cut_point(np.pi / 2), 2j)

    def test_continuity_off_ray(self):
        z = cut_point(np.pi)
        rng = np.random.default_rng(2)
        for _ in range(100):
            xi = np.exp(1j * rng.uniform(-0.9 * np.pi, 0.9 * np.pi))
            eps = 1e-7
            diff = log_cut(z, xi * np.exp(1j * eps)) - log_cut(z, xi)
            assert abs(diff) <= 2 * eps

    def test_exp_inverts(self):
        z = cut_point(2.0)
        rng = np.random.default_rng(3)
        for _ in range(50):
            xi = rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            if abs(np.angle(xi) % (2 * np.pi) - 2.0) < 1e-3:
                continue
            assert abs(np.exp(log_cut(z, xi)) - xi) < 1e-12


class TestContours:
    def setup_method(self):
        self.spec = spectral_decompose(UnitaryMatrix(np.diag([1j, -1j])))

    def test_arc_contour_winding(self):
        c = arc_contour(cut_point(3 * np.pi / 4), cut_point(np.pi / 4), self.spec)
        assert abs(winding(c, 1j) - 1.0) < 1e-12
        assert abs(winding(c, -1j)) < 1e-12

    def test_null_pair_rejected(self):
        with pytest.raises(EmptySpaceError):
            arc_contour(cut_point(np.pi / 8), cut_point(np.pi / 4), self.spec)

    def test_cut_near_eigenvalue_rejected(self):
        z = cut_point(np.pi / 2 + 1e-8)
        with pytest.raises(IllConditionedCutError):
            arc_contour(z, cut_point(np.pi / 4), self.spec)

    def test_windings_match_betweenness(self):
        rng = np.random.default_rng(4)
        from basicgerbe import random_unitary

        for _ in range(20):
            spec = spectral_decompose(random_unitary(4, rng))
            angles = np.angle(spec.eigenvalues) % (2 * np.pi)
            a, b = np.sort(rng.uniform(0.0, 2 * np.pi, size=2))
            z1, z2 = cut_point(a), cut_point(b)
            dists = [abs(z.value - v) for z in (z1, z2) for v in spec.eigenvalues]
            if min(dists) < 1e-2 or abs(a - b) < 1e-2:
                continue
            inside = [
                circle_between(z1, z2, v) for v in spec.eigenvalues
            ]
            if not any(inside):
                continue
            c = arc_contour(z1, z2, spec)
            for v, want in zip(spec.eigenvalues, inside):
                assert abs(winding(c, v) - (1.0 if want else 0.0)) < 1e-10

    def test_spectrum_contour(self):
        c = spectrum_contour(cut_point(np.pi), self.spec)
        assert abs(winding(c, 1j) - 1.0) < 1e-12
        assert abs(winding(c, -1j) - 1.0) < 1e-12
        # trace stays off the negative real axis
        for seg in c.segments:
            pts = seg.point(np.linspace(0, 1, 64))
            on_ray = (np.abs(pts.imag) < 1e-9) & (pts.real < 0)
            assert not on_ray.any()

    def test_spectrum_contour_identity(self):
        spec = spectral_decompose(UnitaryMatrix(np.eye(2)))
        c = spectrum_contour(cut_point(np.pi), spec)
        assert abs(winding(c, 1.0) - 1.0) < 1e-12

    def test_not_closed_rejected(self):
        from basicgerbe.errors import EvaluationError

        with pytest.raises(EvaluationError):
            Contour((Segment("line", start=0j, end=1 + 0j),))

    def test_json(self):
        c = annular_sector(0.5, 1.5)
        obj = c.to_json()
        assert [s["kind"] for s in obj["segments"]] == ["arc", "line", "arc", "line"]


class TestQuadrature:
    def test_cauchy_inside(self):
        c = annular_sector(0.2, 1.2)
        val = quad_integrate(c, lambda xi: 1.0 / (xi - np.exp(0.7j)))
        assert abs(val - 1.0) < 1e-12

    def test_cauchy_outside(self):
        c = annular_sector(0.2, 1.2)
        val = quad_integrate(c, lambda xi: 1.0 / (xi - np.exp(3.0j)))
        assert abs(val) < 1e-12

    def test_log_derivative_pole(self):
        lam = np.exp(0.6j)
        z = cut_point(np.pi)
        c = annular_sector(0.1, 1.1)
        val = quad_integrate(c, lambda xi: log_cut(z, xi) / (xi - lam) ** 2)
        assert abs(val - 1.0 / lam) < 1e-11

    def test_matrix_valued(self):
        g = np.diag([1j, -1j])
        c = annular_sector(np.pi / 4, 3 * np.pi / 4)
        val = quad_integrate(c, lambda xi: np.linalg.inv(xi * np.eye(2) - g))
        assert np.linalg.norm(val - np.diag([1.0, 0.0])) < 1e-11

    def test_deformation_invariance(self):
        lam = np.exp(1.1j)
        f = lambda xi: np.exp(xi) / (xi - lam)
        v1 = quad_integrate(annular_sector(0.6, 1.6, rho=0.5), f)
        v2 = quad_integrate(annular_sector(0.8, 1.4, rho=0.3), f)
        assert abs(v1 - v2) < 1e-10


class TestResidues:
    def test_double_pole_cross_term(self):
        li, lj = np.exp(0.4j), np.exp(1.9j)
        # residue at the double pole alone
        val = residue_eval([(lj, 2)], coeff=[
            lambda x: 1.0 / (x - li),
            lambda x: -1.0 / (x - li) ** 2,
        ])
        assert abs(val - (-((li - lj) ** -2))) < 1e-12

    def test_simple_pole_cross_term(self):
        li, lj = np.exp(0.4j), np.exp(1.9j)
        val = residue_eval([(li, 1)], coeff=[lambda x: 1.0 / (x - lj) ** 2])
        assert abs(val - (li - lj) ** -2) < 1e-12

    def test_pair_sum_matches_quadrature(self):
        li, lj = np.exp(0.4j), np.exp(1.9j)
        total = residue_eval([(li, 1), (lj, 2)])
        c = annular_sector(0.1, 2.2)
        quad = quad_integrate(c, lambda xi: 1.0 / ((xi - li) * (xi - lj) ** 2))
        assert abs(total - quad) < 1e-10

    def test_log_triple_pole(self):
        val = residue_eval([(1j, 3)], with_log=cut_point(np.pi))
        assert abs(val - 0.5) < 1e-12  # -(1/2) lam^{-2} at lam = i

    def test_order_cap(self):
        with pytest.raises(UnsupportedOrderError):
            residue_eval([(1j, 4)])

    def test_random_configs_vs_quadrature(self):
        rng = np.random.default_rng(5)
        z = cut_point(0.05)
        c = annular_sector(0.3, 2 * np.pi - 0.3)
        for _ in range(50):
            angles = 0.4 + np.cumsum(rng.uniform(0.3, 1.2, size=3))
            angles = angles[angles < 2 * np.pi - 0.4][:2]
            if len(angles) < 2:
                continue
            la, lb = np.exp(1j * angles)
            want = quad_integrate(
                c, lambda xi: log_cut(z, xi) / ((xi - la) * (xi - lb) ** 2)
            )
            got = residue_eval([(la, 1), (lb, 2)], with_log=z)
            assert abs(want - got) < 1e-10
