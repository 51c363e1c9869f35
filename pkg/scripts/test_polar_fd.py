"""
2-D 極座標 Newton 求解器的測試：網格收斂階數、Newton 收縮、離散凸性
"""
import math

import numpy as np
import pytest

from monge_ampere_lab.closed_form import RadialConcentric2D, field_values
from monge_ampere_lab.errors import GridTooCoarse, NoBracket, UnsupportedFamily
from monge_ampere_lab.geometry.grid import PolarGrid
from monge_ampere_lab.geometry.problem import problem_spec_from_dict
from monge_ampere_lab.solvers import (
    convergence_study,
    discrete_min_eig,
    discrete_residual,
    gradient_image_measure,
    newton_solve,
    oracle_for,
    quadratic_init,
    sample_solution_on_grid,
    with_phi_constant,
)

from conftest import UNIT_ANNULUS, radial_spec


@pytest.fixture(scope="module")
def benchmark_spec():
    return radial_spec(d=0.5)


class TestConvergence:
    def test_second_order_on_benchmark(self, benchmark_spec):
        table = convergence_study(benchmark_spec, [(32, 32), (64, 64), (128, 128)])
        errors = [row["sup_error"] for row in table]
        assert errors[0] > errors[1] > errors[2]
        orders = [row["order"] for row in table[1:]]
        for order in orders:
            assert 1.8 <= order <= 2.2
        assert all(row["flag"] is None for row in table)

    def test_oracle_matches_generating_slope(self, benchmark_spec):
        oracle = oracle_for(benchmark_spec)
        assert oracle.d_k == pytest.approx(0.5, abs=1e-12)

    def test_oracle_requires_constant_data(self):
        spec = problem_spec_from_dict({
            "domain": dict(UNIT_ANNULUS),
            "psi": {"kind": "power", "coefficient": 1.0, "exponent": 1.0},
        })
        with pytest.raises(UnsupportedFamily):
            oracle_for(spec)

    def test_oracle_below_threshold(self, benchmark_spec):
        with pytest.raises(NoBracket):
            oracle_for(with_phi_constant(benchmark_spec, 0.5))


class TestNewton:
    def test_quadratic_contraction_inside_basin(self, benchmark_spec):
        grid = PolarGrid.on(benchmark_spec.domain, 64, 64)
        solution, report = newton_solve(benchmark_spec, quadratic_init(benchmark_spec, grid))
        ratios = report.contraction_ratios(1e-2)
        assert ratios
        assert all(ratio <= 0.1 for ratio in ratios)
        assert report.final_residual_sup <= 1e-9
        assert report.convexity_min_eig > 0.0
        exact = field_values(oracle_for(benchmark_spec), grid.flat_points()).reshape(64, 64)
        assert np.max(np.abs(solution.values - exact)) <= 1e-3

    def test_exact_solution_has_small_residual(self, benchmark_spec):
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 0.5)
        coarse = discrete_residual(sample_solution_on_grid(sol, benchmark_spec, PolarGrid.on(benchmark_spec.domain, 32, 32)), benchmark_spec)
        fine = discrete_residual(sample_solution_on_grid(sol, benchmark_spec, PolarGrid.on(benchmark_spec.domain, 64, 64)), benchmark_spec)
        assert np.max(np.abs(fine.values)) < np.max(np.abs(coarse.values))

    def test_result_is_discretely_convex(self, benchmark_spec):
        grid = PolarGrid.on(benchmark_spec.domain, 32, 32)
        solution, _ = newton_solve(benchmark_spec, quadratic_init(benchmark_spec, grid))
        assert discrete_min_eig(solution) > 0.0

    def test_grid_too_coarse(self, benchmark_spec):
        with pytest.raises(GridTooCoarse):
            PolarGrid.on(benchmark_spec.domain, 8, 8)


class TestGradientImage:
    def test_quadratic_image_mass(self):
        spec = radial_spec(d=1.0)
        sol = RadialConcentric2D(1.0, 1.0, 2.0, 1.0)
        field = sample_solution_on_grid(sol, spec, PolarGrid.on(spec.domain, 64, 64))
        # 梯度像是 1 ≤ |p| ≤ 2，權重 (1+|p|²)^{-2}
        assert gradient_image_measure(field) == pytest.approx(math.pi * (0.5 - 0.2), rel=1e-2)
