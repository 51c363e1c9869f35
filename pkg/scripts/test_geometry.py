"""
區域幾何、ψ 驗證與問題規格解析的測試
"""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monge_ampere_lab.errors import (
    GridTooCoarse,
    InvalidDomain,
    InvalidPsi,
    NotTangent,
    ParameterOutOfRange,
    PointNotOnBoundary,
    SpecError,
    UnsupportedDomain,
)
from monge_ampere_lab.geometry.domain import (
    AnnularDomain,
    contains,
    geodesic_on_inner,
    inner_normal,
    min_support,
    normal_curvature,
    tangent_basis,
)
from monge_ampere_lab.geometry.grid import PolarGrid
from monge_ampere_lab.geometry.integration import integrate_over_domain
from monge_ampere_lab.geometry.problem import load_problem_spec, problem_spec_from_dict
from monge_ampere_lab.numerics.quadrature import adaptive_integrate

from conftest import SKEWED_ANNULUS, UNIT_ANNULUS

angles = st.floats(min_value=0.0, max_value=2.0 * math.pi, allow_nan=False, allow_infinity=False)


class TestDomainConstruction:
    def test_radii_must_be_ordered(self):
        with pytest.raises(InvalidDomain):
            AnnularDomain.concentric(2, 2.0, 1.0)

    def test_dimension_must_be_at_least_two(self):
        with pytest.raises(InvalidDomain):
            AnnularDomain.concentric(1, 1.0, 2.0)

    def test_skewed_inner_disk_must_contain_origin(self):
        with pytest.raises(InvalidDomain):
            AnnularDomain.skewed((0.6, 0.0), (0.0, 0.0), 0.5, 2.0)

    def test_skewed_inner_disk_must_sit_inside_outer(self):
        with pytest.raises(InvalidDomain):
            AnnularDomain.skewed((0.25, 0.0), (-1.0, 0.0), 0.5, 1.5)

    def test_min_support(self, unit_annulus, skewed_annulus):
        assert min_support(unit_annulus) == 1.0
        assert min_support(skewed_annulus) == pytest.approx(0.25)


class TestInnerBoundary:
    def test_concentric_normal_is_radial(self, unit_annulus):
        np.testing.assert_allclose(inner_normal(unit_annulus, [0.0, 1.0]), [0.0, 1.0], atol=1e-15)

    def test_point_off_boundary_is_rejected(self, unit_annulus):
        with pytest.raises(PointNotOnBoundary):
            inner_normal(unit_annulus, [1.5, 0.0])

    def test_curvature_is_reciprocal_radius(self, skewed_annulus):
        x = np.array([0.75, 0.0])
        assert normal_curvature(skewed_annulus, x, [0.0, 1.0]) == pytest.approx(2.0)

    def test_non_tangent_direction_is_rejected(self, unit_annulus):
        with pytest.raises(NotTangent):
            normal_curvature(unit_annulus, [1.0, 0.0], [1.0, 0.0])

    def test_geodesic_stays_on_circle(self, unit_annulus):
        x0 = np.array([1.0, 0.0])
        gamma = geodesic_on_inner(unit_annulus, x0, [0.0, 1.0], 0.5)
        assert np.linalg.norm(gamma) == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(gamma, [math.cos(0.5), math.sin(0.5)], atol=1e-14)

    def test_tangent_basis_is_orthogonal_to_normal(self):
        domain = AnnularDomain.concentric(3, 1.0, 2.0)
        x = np.array([0.0, 0.6, 0.8])
        basis = tangent_basis(domain, x)
        assert basis.shape == (2, 3)
        np.testing.assert_allclose(basis @ x, 0.0, atol=1e-14)
        np.testing.assert_allclose(basis @ basis.T, np.eye(2), atol=1e-14)

    @given(theta=angles)
    @settings(max_examples=60, deadline=None)
    def test_skewed_normal_is_unit_and_points_inward(self, theta):
        domain = AnnularDomain.skewed((0.25, 0.0), (1.0, 0.0), 0.5, 2.0)
        x = domain.inner_center + 0.5 * np.array([math.cos(theta), math.sin(theta)])
        nu = inner_normal(domain, x)
        assert np.linalg.norm(nu) == pytest.approx(1.0, abs=1e-12)
        assert contains(domain, x + 1e-3 * nu)[0]
        assert not contains(domain, x - 1e-3 * nu)[0]


class TestDomainIntegration:
    @pytest.mark.parametrize("width", [0.1, 0.5, 0.9])
    def test_reciprocal_radius_integral(self, width):
        domain = AnnularDomain.concentric(2, 1.0, 1.0 + width)
        value = integrate_over_domain(domain, lambda x: 1.0 / np.linalg.norm(x, axis=-1), rel_tol=1e-12)
        assert value == pytest.approx(2.0 * math.pi * width, rel=1e-6)

    def test_skewed_area(self, skewed_annulus):
        value = integrate_over_domain(skewed_annulus, lambda x: np.ones(len(x)))
        assert value == pytest.approx(math.pi * (4.0 - 0.25), rel=1e-8)

    def test_spherical_shell_volume(self):
        domain = AnnularDomain.concentric(3, 1.0, 2.0)
        value = integrate_over_domain(domain, lambda x: np.ones(len(x)))
        assert value == pytest.approx(4.0 * math.pi / 3.0 * 7.0, rel=1e-8)


class TestAdaptiveQuadrature:
    def test_kinked_integrand_meets_relative_tolerance(self):
        value = adaptive_integrate(lambda x: np.abs(np.sin(x)), 0.0, 3.0 * math.pi, rel_tol=1e-8)
        assert abs(value - 6.0) <= 1e-8 * 6.0

    def test_endpoint_singularity(self):
        value = adaptive_integrate(np.sqrt, 0.0, 1.0, rel_tol=1e-8)
        assert abs(value - 2.0 / 3.0) <= 1e-8 * 2.0 / 3.0

    def test_empty_interval(self):
        assert adaptive_integrate(np.exp, 1.0, 1.0) == 0.0


class TestPolarGrid:
    def test_minimum_size(self, unit_annulus):
        with pytest.raises(GridTooCoarse):
            PolarGrid.on(unit_annulus, 8, 64)

    def test_requires_concentric_plane(self, skewed_annulus):
        with pytest.raises(UnsupportedDomain):
            PolarGrid.on(skewed_annulus, 32, 32)

    def test_refinement_keeps_nodes(self, unit_annulus):
        grid = PolarGrid.on(unit_annulus, 33, 32)
        fine = grid.refined()
        assert fine.nr == 65 and fine.ntheta == 64
        np.testing.assert_allclose(fine.r_nodes[::2], grid.r_nodes)


class TestProblemSpec:
    def test_missing_domain(self):
        with pytest.raises(SpecError):
            problem_spec_from_dict({"psi": {"kind": "constant", "value": 1.0}})

    def test_unknown_psi(self):
        with pytest.raises(InvalidPsi):
            problem_spec_from_dict({"domain": UNIT_ANNULUS, "psi": {"kind": "mystery"}})

    def test_non_positive_psi(self):
        with pytest.raises(InvalidPsi):
            problem_spec_from_dict({"domain": UNIT_ANNULUS, "psi": {"kind": "constant", "value": -1.0}})

    def test_negative_gamma(self):
        with pytest.raises(ParameterOutOfRange):
            problem_spec_from_dict({"domain": UNIT_ANNULUS, "gamma0": -0.5})

    def test_increasing_theta_is_rejected(self):
        with pytest.raises(SpecError):
            problem_spec_from_dict({"domain": UNIT_ANNULUS, "flow": {"theta": {"kind": "linear", "rate": 1.0}}})

    def test_phi_k_matches_closed_form(self):
        spec = problem_spec_from_dict({"domain": UNIT_ANNULUS, "phi": {"kind": "phi-k", "d": 1.0}})
        # u = r²/2 − 2，u(1) = −3/2
        assert spec.inner_phi_value() == pytest.approx(2.5, abs=1e-14)

    def test_skewed_phi_evaluates_on_inner_boundary(self):
        spec = problem_spec_from_dict({"domain": SKEWED_ANNULUS, "phi": {"kind": "skewed-quadratic"}})
        assert np.isfinite(spec.phi(np.array([0.75, 0.0])))

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "annulus.json"
        path.write_text(json.dumps({"domain": UNIT_ANNULUS, "gamma0": 2.0}), encoding="utf-8")
        spec = load_problem_spec(path)
        assert spec.name == "annulus"
        assert spec.gamma0 == 2.0

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(SpecError):
            load_problem_spec(tmp_path / "missing.json")
