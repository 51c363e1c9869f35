"""
條件檢查器的測試：結構條件與 R₀、Gauss 映射質量、曲率條件、下解條件
"""
import math

import numpy as np
import pytest

from monge_ampere_lab.closed_form import RadialConcentric2D
from monge_ampere_lab.conditions import (
    ConditionId,
    ParabolicSubsolution,
    SubsolutionProbe,
    check_curvature,
    check_flow_subsolution,
    check_prescribed_gauss,
    check_structure,
    check_structure_gradient,
    check_subsolution,
    gauss_map_mass,
    structure_radius,
    subsolution_sweep,
)
from monge_ampere_lab.errors import GammaZero, NegativeK, NoRoot, NotIntegrable, SpecError
from monge_ampere_lab.geometry.problem import problem_spec_from_dict
from monge_ampere_lab.numerics.quadrature import integrate_radial_whole_space

from conftest import UNIT_ANNULUS, radial_spec

reciprocal_radius = lambda x: 1.0 / np.linalg.norm(x, axis=-1)
exponential_profile = lambda rho: np.exp(-rho) / rho


def blowup_spec(width: float):
    return problem_spec_from_dict({
        "domain": {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 1.0 + width},
        "psi": {"kind": "gradient-blowup"},
        "gamma0": 1.0,
        "phi": {"kind": "constant", "value": 0.0},
    })


def gauss_spec(profile):
    return problem_spec_from_dict({
        "domain": dict(UNIT_ANNULUS),
        "psi": {"kind": "gauss-curvature", "profile": profile},
        "gamma0": 0.0,
        "phi": {"kind": "constant", "value": 1.0},
    })


class TestStructureCondition:
    @pytest.mark.parametrize("width", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_radius_matches_closed_form(self, width):
        report = check_structure(blowup_spec(width), reciprocal_radius, exponential_profile)
        assert report.satisfied
        assert report.constants_used["integral_g"] == pytest.approx(2.0 * math.pi * width, rel=1e-6)
        assert report.constants_used["integral_h"] == pytest.approx(2.0 * math.pi, rel=1e-6)
        assert report.constants_used["R0"] == pytest.approx(-math.log(1.0 - width), abs=1e-8)

    def test_structure_radius_helper(self):
        assert structure_radius(blowup_spec(0.5), reciprocal_radius, exponential_profile) == pytest.approx(
            math.log(2.0), abs=1e-8
        )

    def test_fails_when_mass_exceeds(self):
        heavy = lambda x: 2.0 / np.linalg.norm(x, axis=-1)
        report = check_structure(blowup_spec(0.6), heavy, exponential_profile)
        assert not report.satisfied
        assert report.constants_used["R0"] is None
        with pytest.raises(NoRoot):
            structure_radius(blowup_spec(0.6), heavy, exponential_profile)

    def test_non_integrable_density(self):
        with pytest.raises(NotIntegrable):
            integrate_radial_whole_space(lambda rho: 1.0 / (1.0 + rho), 2)

    def test_report_serialises(self):
        report = check_structure(blowup_spec(0.5), reciprocal_radius, exponential_profile)
        data = report.to_dict()
        assert data["condition_id"] == ConditionId.STRUCTURE.value
        assert data["satisfied"] is True


class TestGaussMapMass:
    def test_line(self):
        assert gauss_map_mass(1) == pytest.approx(2.0, abs=1e-8)

    def test_plane(self):
        assert gauss_map_mass(2) == pytest.approx(math.pi, abs=1e-8)

    def test_space(self):
        assert gauss_map_mass(3) == pytest.approx(4.0 * math.pi / 3.0, abs=1e-8)


class TestPrescribedGauss:
    def test_vanishing_curvature_is_admissible(self):
        report = check_prescribed_gauss(gauss_spec({"kind": "outer-vanishing", "k0": 0.05, "power": 1.0}))
        assert report.satisfied
        # 0.05·2π∫₁²(2 − r) r dr
        assert report.constants_used["integral_K"] == pytest.approx(0.2 * math.pi / 3.0, rel=1e-8)
        assert report.constants_used["outer_max_abs_K"] <= 1e-10

    def test_constant_curvature_is_rejected(self):
        report = check_prescribed_gauss(gauss_spec({"kind": "constant", "value": 1.0}))
        assert not report.satisfied
        assert report.margin <= -1.0

    def test_negative_curvature(self):
        with pytest.raises(NegativeK):
            gauss_spec({"kind": "constant", "value": -1.0})

    def test_requires_gauss_psi(self):
        with pytest.raises(SpecError):
            check_prescribed_gauss(radial_spec())


class TestStructureGradient:
    def test_large_envelope_holds(self):
        spec = radial_spec()
        report = check_structure_gradient(spec, lambda z: np.full_like(z, 10.0), beta=0.0, band=0.1)
        assert report.satisfied
        assert report.constants_used["exponent"] == 3

    def test_small_envelope_fails(self):
        spec = radial_spec()
        report = check_structure_gradient(spec, lambda z: np.full_like(z, 1e-3), beta=0.0, band=0.1)
        assert not report.satisfied

    def test_invalid_band(self):
        with pytest.raises(SpecError):
            check_structure_gradient(radial_spec(), lambda z: z, beta=0.0, band=0.0)


class TestCurvatureCondition:
    def test_ratio_on_radial_solution(self):
        spec = radial_spec(d=0.5, gamma0=3.0)
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 0.5)
        report = check_curvature(spec, sol, M=1.0)
        # γ₀u + φ = u_ν = d 在整個 Γ⁻ 上
        expected = 0.5 / (1.0 - sol.inner_value())
        assert report.constants_used["ratio_min"] == pytest.approx(expected, rel=1e-9)
        assert report.constants_used["kappa_max"] == pytest.approx(1.0, rel=1e-12)
        assert report.margin == pytest.approx(3.0 + expected - 2.0, rel=1e-9)
        assert report.satisfied

    def test_small_gamma_fails(self):
        spec = radial_spec(d=0.5, gamma0=1.0)
        report = check_curvature(spec, RadialConcentric2D(1.0, 1.0, 2.0, 0.5), M=1.0)
        assert not report.satisfied

    def test_gamma_zero(self):
        spec = radial_spec(d=0.5, gamma0=0.0)
        with pytest.raises(GammaZero):
            check_curvature(spec, RadialConcentric2D(1.0, 1.0, 2.0, 0.5), M=1.0)


class TestSubsolution:
    @pytest.mark.parametrize("d", [1.0, 0.5, 0.1, 0.01])
    def test_implied_tangential_second_derivative(self, d, unit_annulus):
        spec = radial_spec(d=d)
        u = RadialConcentric2D(1.0, 1.0, 2.0, d)
        usub = RadialConcentric2D(1.0, 1.0, 2.0, 2.0 * d)
        report = check_subsolution(SubsolutionProbe.at_angle(u, usub, unit_annulus, 0.3), spec)
        assert report.constants_used["implied_u_xixi"] == pytest.approx(d, abs=1e-6)

    def test_sweep_returns_worst(self):
        spec = radial_spec(d=0.5)
        u = RadialConcentric2D(1.0, 1.0, 2.0, 0.5)
        report = subsolution_sweep(spec, u, u, count=12)
        assert report.condition_id is ConditionId.SUBSOLUTION
        assert report.margin == pytest.approx(0.5 - 1e-3, abs=1e-6)

    def test_flow_strictness(self):
        spec = radial_spec(d=1.0)
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        sub = ParabolicSubsolution(lambda t: sol, lambda x, t: np.full(len(x), -2.0))
        report = check_flow_subsolution(sub, spec, [0.0, 0.5], delta0=0.5)
        assert report.margin == pytest.approx(0.5, abs=1e-10)
        assert report.constants_used["comparison_margin"] is None
