"""
先驗常數、輔助函數 w 與線性化恆等式的測試
"""
import math

import numpy as np
import pytest

from monge_ampere_lab.bounds import (
    BarrierSpec,
    DefiningFunction,
    PowerLaw,
    Reciprocal,
    barrier_field,
    boundary_maximum_check,
    c0_bound,
    c0_du_bound,
    elliptic_constants,
    estimate_validation,
    gauge_properties,
    linearization_refinement,
    local_gradient_bound,
    m_bound,
    minimize_c0_over_k,
    reciprocal_identity_residual,
    sample_barrier_norms,
    suggested_M,
)
from monge_ampere_lab.bounds.linearization import first_order_identity_check, linearization_identity_check
from monge_ampere_lab.closed_form import RadialConcentric2D, SkewedQuadratic
from monge_ampere_lab.errors import (
    BadDefiningFunction,
    GammaZero,
    GaugeUndefined,
    GridTooCoarse,
    KOutOfRange,
    LambdaOutOfRange,
)
from monge_ampere_lab.geometry import problem_spec_from_dict
from monge_ampere_lab.geometry.grid import PolarGrid

from conftest import radial_spec


class TestConstants:
    def test_c0_rejects_k_outside_range(self):
        spec = radial_spec(d=0.5)
        with pytest.raises(KOutOfRange):
            c0_bound(spec, 0.25)
        with pytest.raises(KOutOfRange):
            c0_bound(spec, 0.0)

    def test_minimised_c0_is_not_above_grid_values(self):
        spec = radial_spec(d=0.5)
        K, C0 = minimize_c0_over_k(spec, 1.0)
        for trial in (0.01, 0.05, 0.1, 0.2):
            assert C0 <= c0_bound(spec, trial, 1.0) * (1.0 + 1e-9)
        assert 0.0 < K < 0.25

    def test_m_bound_first_branch(self):
        norms = {"ell1": 0.0, "ell2": 2.0, "ell3": 0.0, "a_sup": 0.0}
        assert m_bound(norms, {"sup": 1.0, "sup_d2log": 0.0}, 1.0, 2) == pytest.approx(2.0)

    def test_default_defining_function(self, unit_annulus):
        rho = DefiningFunction.default_for(unit_annulus)
        assert rho.lambda_min == pytest.approx(0.5)
        assert rho.min_abs_on_inner == pytest.approx(0.75)
        assert rho.scaled(0.5).sup_grad_on_outer == pytest.approx(0.5)
        with pytest.raises(BadDefiningFunction):
            rho.scaled(2.0)

    def test_constants_record_formulas(self):
        constants = elliptic_constants(radial_spec(d=0.5))
        data = constants.to_dict()
        assert set(data["formulas"]) == {"C0", "C1", "C3"}
        assert constants.C1 >= constants.C0 / 0.75


class TestGradientDependentConstants:
    def test_c0_prime_worked_value(self):
        spec = problem_spec_from_dict({
            "domain": {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 1.5},
            "psi": {"kind": "constant", "value": 1.0},
            "gamma0": 1.0,
            "phi": {"kind": "constant", "value": 1.0},
        })
        expected = math.log(2.0) + 1.0 + 3.0 * math.log(2.0)
        assert c0_du_bound(math.log(2.0), spec) == pytest.approx(expected, rel=1e-12)
        assert c0_du_bound(math.log(2.0), spec) == pytest.approx(3.7726, abs=1e-4)

    def test_c0_prime_needs_positive_gamma(self):
        spec = problem_spec_from_dict({
            "domain": {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 1.5},
            "psi": {"kind": "constant", "value": 1.0},
            "gamma0": 0.0,
            "phi": {"kind": "constant", "value": 1.0},
        })
        with pytest.raises(GammaZero):
            c0_du_bound(math.log(2.0), spec)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5])
    def test_local_bound_uses_level_set_distance(self, unit_annulus, lam):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        distance = 2.0 - math.sqrt(4.0 - 2.0 * lam)
        assert local_gradient_bound(3.0, lam, sol, unit_annulus) == pytest.approx(3.0 / distance, rel=1e-10)

    def test_local_bound_decreases_with_lambda(self, unit_annulus):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        bounds = [local_gradient_bound(3.0, lam, sol, unit_annulus) for lam in (0.25, 0.75, 1.5)]
        assert bounds == sorted(bounds, reverse=True)

    @pytest.mark.parametrize("lam", [0.0, -0.5, 1.6])
    def test_local_bound_rejects_lambda(self, unit_annulus, lam):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        with pytest.raises(LambdaOutOfRange):
            local_gradient_bound(3.0, lam, sol, unit_annulus)


class TestEstimateValidation:
    @pytest.mark.parametrize("d", [1.0, 0.5, 0.1])
    def test_closed_form_respects_bounds(self, d):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, d)
        result = estimate_validation(sol, radial_spec(d=d))
        assert result.passed, result.violations
        assert result.sup_u <= result.constants.C0
        assert result.sup_grad <= result.constants.C1
        # 徑向解的混合導數 u_ξν 在 Γ⁻ 上為零
        assert result.sup_xinu <= 1e-10


class TestGauges:
    def test_reciprocal_identity_vanishes(self):
        u = np.linspace(-5.0, 0.0, 101)
        assert reciprocal_identity_residual(3.0, u) <= 1e-12

    def test_reciprocal_requires_margin(self):
        with pytest.raises(GaugeUndefined):
            Reciprocal(-1.0).check_defined(np.zeros(3))

    def test_power_law_identity_matches_closed_form(self):
        gauge = PowerLaw(10.0, 1.5)
        u = np.linspace(-1.0, 0.0, 11)
        np.testing.assert_allclose(gauge.identity(u), gauge.closed_identity(u), rtol=1e-10)
        props = gauge_properties(gauge, 1.0)
        assert props["identity_min"] > 0.0
        assert props["d1_min"] > 0.0


class TestBarrier:
    @pytest.mark.parametrize("d", [1.0, 0.5])
    def test_maximum_on_boundary(self, d):
        spec = radial_spec(d=d)
        sol = RadialConcentric2D(1.0, 1.0, 2.0, d)
        C1 = elliptic_constants(spec, solution=sol).C1
        norms = sample_barrier_norms(spec, (1.0, 0.0), C1)
        M = suggested_M(norms)
        assert M > m_bound(norms.norms(), norms.psi_norms(), C1, 2)
        grid = PolarGrid.on(spec.domain, 128, 128)
        values = barrier_field(sol, spec, BarrierSpec.reciprocal(M), grid)
        assert values.shape == (128, 128)
        peak = boundary_maximum_check(values, grid)
        assert peak.at_boundary
        u = sol.eval_many(grid.flat_points(), check_domain=False).u
        assert reciprocal_identity_residual(M, u) <= 1e-12

    def test_norms_stable_under_grid_refinement(self):
        spec = radial_spec(d=0.5)
        C1 = elliptic_constants(spec, solution=RadialConcentric2D(1.0, 1.0, 2.0, 0.5)).C1
        coarse = sample_barrier_norms(spec, (1.0, 0.0), C1, PolarGrid.on(spec.domain, 65, 128)).to_dict()
        fine = sample_barrier_norms(spec, (1.0, 0.0), C1, PolarGrid.on(spec.domain, 129, 256)).to_dict()
        assert coarse["resolution"] == [65, 128]
        for key in ("resolution", "step", "C1"):
            coarse.pop(key)
            fine.pop(key)
        for key, value in coarse.items():
            assert value == pytest.approx(fine[key], rel=0.02, abs=1e-9), key


    def test_coarse_grid_rejected(self, unit_annulus):
        grid = PolarGrid.on(unit_annulus, 64, 64)
        with pytest.raises(GridTooCoarse):
            boundary_maximum_check(np.zeros((64, 64)), grid)

    def test_gauge_undefined_for_small_m(self):
        spec = radial_spec(d=0.5)
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 0.5)
        grid = PolarGrid.on(spec.domain, 32, 32)
        # sup u = 0 on Γ⁺
        with pytest.raises(GaugeUndefined):
            barrier_field(sol, spec, BarrierSpec.reciprocal(-0.5), grid)


class TestLinearization:
    def test_second_order_convergence(self):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 0.5)
        xi = np.array([0.6, 0.8])
        result = linearization_refinement(sol, [1.2, 0.4], xi)
        assert all(order is not None and order >= 1.8 for order in result["orders"])

    @pytest.mark.parametrize("h", [1e-2, 5e-3, 2.5e-3])
    def test_quadratic_family(self, skewed_annulus, h):
        sol = SkewedQuadratic(1.0, skewed_annulus)
        assert linearization_identity_check(sol, [1.5, 0.2], [0.0, 1.0], h) <= 1e-10

    def test_first_order_identity(self):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 0.5)
        assert first_order_identity_check(sol, [1.2, 0.4], [math.sqrt(0.5), math.sqrt(0.5)]) <= 1e-6
