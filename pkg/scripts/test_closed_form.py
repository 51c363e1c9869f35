"""
解析解族的測試：PDE 與邊界殘差、內邊界二階法向量的爆破、臨界 φ、偏心環點值
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monge_ampere_lab.closed_form import (
    GradientBlowup,
    PhiSequence,
    RadialConcentric2D,
    RadialConcentricND,
    SkewedQuadratic,
    SkewedShifted,
    blowup_gradient_family,
    critical_phi,
    gauss_image_mass_radial,
    inner_dnn,
    inner_hess_nn,
    phi_k,
    skewed_inner_neumann,
)
from monge_ampere_lab.errors import (
    BadMu,
    IndexOutOfRange,
    OutOfDomain,
    ParameterOutOfRange,
    UnsupportedFamily,
    ValidityViolated,
)
from monge_ampere_lab.closed_form.radial import RadialSolution
from monge_ampere_lab.geometry.domain import AnnularDomain, sample_domain_points, sample_inner_boundary

PHI_INFINITY = 0.5 * (2.0 * math.sqrt(3.0) - math.acosh(2.0))


def pde_residual(sol, points):
    batch = sol.eval_many(points)
    rhs = sol.psi_spec().rhs(points, batch.u, batch.grad)
    return float(np.max(np.abs(np.linalg.det(batch.hess) - rhs)))


def robin_residual(sol, gamma0, count=1000):
    points, _ = sample_inner_boundary(sol.domain, count)
    batch = sol.eval_many(points)
    phi = sol.matching_phi(gamma0)(points)
    return float(np.max(np.abs(sol.inner_neumann_data(points) - gamma0 * batch.u - phi)))


class TestRadialConcentric2D:
    @pytest.mark.parametrize("d", [1.0, 0.5, 0.1])
    def test_equation_and_boundary_residuals(self, d):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, d)
        points = sample_domain_points(sol.domain, 1000)
        assert pde_residual(sol, points) <= 1e-10
        outer = 2.0 * np.stack([np.cos(np.linspace(0, 6, 50)), np.sin(np.linspace(0, 6, 50))], axis=-1)
        assert np.max(np.abs(sol.eval_many(outer).u)) <= 1e-10
        # Robin 資料取 φ_k 時，內邊界 u_ν − γ₀u − φ 為零
        inner, _ = sample_inner_boundary(sol.domain, 1000)
        slopes = sol.inner_neumann_data(inner)
        residual = slopes - sol.eval_many(inner).u - sol.phi(1.0)
        assert np.max(np.abs(residual)) <= 1e-10

    def test_quadratic_case(self):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        value = sol.eval([1.5, 0.0])
        assert value.u == pytest.approx(1.125 - 2.0, abs=1e-14)
        np.testing.assert_allclose(value.hess, np.eye(2), atol=1e-14)
        assert sol.phi(1.0) == pytest.approx(2.5, abs=1e-14)

    def test_outside_domain(self):
        with pytest.raises(OutOfDomain):
            RadialConcentric2D(1.0, 1.0, 2.0, 0.5).eval([0.5, 0.0])

    def test_parameters_validated(self):
        with pytest.raises(ParameterOutOfRange):
            RadialConcentric2D(1.0, 1.0, 2.0, 0.0)

    @given(d=st.floats(min_value=0.05, max_value=3.0), psi=st.floats(min_value=0.2, max_value=3.0))
    @settings(max_examples=40, deadline=None)
    def test_residuals_across_family(self, d, psi):
        sol = RadialConcentric2D(psi, 1.0, 2.0, d)
        points = sample_domain_points(sol.domain, 200)
        assert pde_residual(sol, points) <= 1e-9 * max(1.0, psi * psi)
        assert robin_residual(sol, 1.0, 64) <= 1e-10 * max(1.0, psi)

    def test_profile_is_required(self):
        with pytest.raises(TypeError):
            RadialSolution()


class TestInnerSecondDerivative:
    @pytest.mark.parametrize("d", [1.0, 0.5, 0.1, 1e-3])
    def test_reported_value_2d(self, d):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, d)
        assert inner_dnn(sol) == pytest.approx(1.0 / d + d, rel=1e-10)

    def test_blowup_at_tiny_d(self):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1e-6)
        assert inner_dnn(sol) >= 1e6 * (1.0 - 1e-9)

    def test_hessian_normal_entry_matches_eval(self):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 0.1)
        hess = sol.eval([1.0, 0.0]).hess
        assert hess[0, 0] == pytest.approx(inner_hess_nn(sol), rel=1e-10)
        assert hess[0, 0] + hess[1, 1] == pytest.approx(inner_dnn(sol), rel=1e-10)

    @pytest.mark.parametrize("d", [1.0, 0.5, 0.1])
    def test_three_dimensional_analogue(self, d):
        sol = RadialConcentricND(3, 1.0, 1.0, 2.0, d)
        assert inner_dnn(sol) == pytest.approx(1.0 / d ** 2, rel=1e-10)
        hess = sol.eval([1.0, 0.0, 0.0]).hess
        assert hess[0, 0] == pytest.approx(1.0 / d ** 2, rel=1e-10)

    def test_three_dimensional_equation(self):
        sol = RadialConcentricND(3, 1.0, 1.0, 2.0, 0.5)
        points = sample_domain_points(sol.domain, 100)
        assert pde_residual(sol, points) <= 1e-10

    def test_non_radial_family_rejected(self, skewed_annulus):
        with pytest.raises(UnsupportedFamily):
            inner_dnn(SkewedQuadratic(1.0, skewed_annulus))


class TestCriticalPhi:
    def test_independent_value(self):
        assert critical_phi(1.0, 1.0, 1.0, 2.0) == pytest.approx(PHI_INFINITY, abs=1e-14)
        assert PHI_INFINITY == pytest.approx(1.073572, abs=1e-6)

    def test_bad_mu(self):
        with pytest.raises(BadMu):
            critical_phi(1.0, 1.0, 1.0, 1.0)

    def test_sequence_decreases_to_threshold(self):
        d_values = [1.0, 0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-6]
        seq = PhiSequence(1.0, 1.0, 1.0, 2.0, d_values)
        values = np.array([phi_k(seq, k) for k in range(len(d_values))])
        assert np.all(np.diff(values) < 0.0)
        assert np.all(values > PHI_INFINITY)
        # φ_k − φ_∞ = d_k + O(d_k²)
        assert abs(values[-1] - PHI_INFINITY) <= 2e-6
        assert abs(values[-1] - PHI_INFINITY - d_values[-1]) <= 1e-8

    def test_index_out_of_range(self):
        seq = PhiSequence(1.0, 1.0, 1.0, 2.0, [1.0, 0.5])
        with pytest.raises(IndexOutOfRange):
            phi_k(seq, 2)

    def test_sequence_must_decrease(self):
        with pytest.raises(ParameterOutOfRange):
            PhiSequence(1.0, 1.0, 1.0, 2.0, [0.5, 1.0])

    def test_gauss_image_mass(self):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        # 梯度像是 1 ≤ |p| ≤ 2
        assert gauss_image_mass_radial(sol) == pytest.approx(math.pi * (0.5 - 0.2), rel=1e-12)


class TestSkewed:
    def test_neumann_spot_values(self, skewed_annulus):
        sol = SkewedQuadratic(1.0, skewed_annulus)
        assert skewed_inner_neumann(sol, skewed_annulus, [0.75, 0.0]) == pytest.approx(-0.25, abs=1e-12)
        for sign in (1.0, -1.0):
            x = [7.0 / 12.0, sign * math.sqrt(5.0) / 6.0]
            assert skewed_inner_neumann(sol, skewed_annulus, x) == pytest.approx(0.0, abs=1e-12)

    def test_gradient_agrees_with_closed_neumann(self, skewed_annulus):
        sol = SkewedQuadratic(1.0, skewed_annulus)
        points, _ = sample_inner_boundary(skewed_annulus, 64)
        expected = [skewed_inner_neumann(sol, skewed_annulus, x) for x in points]
        np.testing.assert_allclose(sol.inner_neumann_data(points), expected, atol=1e-12)

    def test_outer_boundary_is_zero_level(self, skewed_annulus):
        sol = SkewedQuadratic(2.0, skewed_annulus)
        theta = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
        outer = np.array([1.0, 0.0]) + 2.0 * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        assert np.max(np.abs(sol.eval_many(outer).u)) <= 1e-12

    def test_shifted_radial_requires_clearance(self):
        annulus = AnnularDomain.skewed((0.25, 0.0), (1.0, 0.0), 0.5, 2.0)
        with pytest.raises(ValidityViolated):
            SkewedShifted(RadialConcentric2D(1.0, 1.0, 2.0, 0.5), annulus)

    def test_shifted_radial_solves_equation(self):
        annulus = AnnularDomain.skewed((0.1, 0.0), (0.0, 0.0), 2.0, 3.0)
        sol = SkewedShifted(RadialConcentric2D(1.0, 1.0, 3.0, 0.5), annulus)
        points = sample_domain_points(annulus, 300)
        assert pde_residual(sol, points) <= 1e-10


class TestGradientBlowup:
    def test_sup_gradient(self):
        result = blowup_gradient_family(GradientBlowup(1.0, 1.5, 0.5))
        assert result.sup_grad == pytest.approx(-math.log(math.exp(-0.5) - 0.5), rel=1e-14)

    def test_equation(self):
        sol = GradientBlowup(1.0, 1.5, 0.5)
        points = sample_domain_points(sol.domain, 300)
        assert pde_residual(sol, points) <= 1e-9

    def test_gradient_grows_as_d_approaches_limit(self):
        limit = -math.log(0.5)
        grads = [blowup_gradient_family(GradientBlowup(1.0, 1.5, limit - eps)).sup_grad for eps in (1e-1, 1e-2, 1e-3)]
        assert grads[0] < grads[1] < grads[2]

    def test_admissible_range(self):
        with pytest.raises(ParameterOutOfRange):
            GradientBlowup(1.0, 1.5, 0.8)
        with pytest.raises(ParameterOutOfRange):
            GradientBlowup(1.0, 2.5, 0.1)
