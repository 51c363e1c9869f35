"""
徑向打靶求解器的測試
"""
import math

import numpy as np
import pytest

from monge_ampere_lab.closed_form import critical_phi
from monge_ampere_lab.errors import NoBracket, ParameterOutOfRange, SlopeCollapse, UnsupportedDomain
from monge_ampere_lab.geometry.problem import problem_spec_from_dict
from monge_ampere_lab.solvers import (
    blowup_sweep,
    closed_form_for,
    find_brackets,
    integrate_outward,
    shoot,
    with_phi_constant,
)

from conftest import SKEWED_ANNULUS, UNIT_ANNULUS, radial_spec


class TestShooting:
    @pytest.mark.parametrize("d", [1.0, 0.5, 0.1])
    def test_recovers_generating_slope(self, d):
        spec = radial_spec(d=d)
        profile = shoot(spec)
        assert profile.meta["d_star"] == pytest.approx(d, abs=1e-8)
        assert profile.sup_error(closed_form_for(spec, d)) <= 1e-8
        assert len(profile.r_nodes) == 1024
        assert np.all(profile.u_r > 0.0) and np.all(profile.u_rr > 0.0)
        assert profile.u[-1] == 0.0

    def test_inner_second_derivative(self):
        profile = shoot(radial_spec(d=0.1))
        assert profile.inner_dnn() == pytest.approx(10.1, rel=1e-6)

    def test_below_threshold_has_no_bracket(self):
        spec = radial_spec(d=0.5)
        below = with_phi_constant(spec, 0.9 * critical_phi(1.0, 1.0, 1.0, 2.0))
        with pytest.raises(NoBracket):
            shoot(below)

    def test_three_dimensional(self):
        spec = radial_spec(d=0.5, dim=3)
        profile = shoot(spec)
        assert profile.meta["d_star"] == pytest.approx(0.5, abs=1e-8)
        assert profile.inner_dnn() == pytest.approx(4.0, rel=1e-6)

    def test_ode_residual_is_small(self):
        profile = shoot(radial_spec(d=0.5))
        assert profile.meta["ode_residual"] <= 1e-6

    def test_u_dependent_right_hand_side(self):
        spec = problem_spec_from_dict({
            "domain": dict(UNIT_ANNULUS),
            "psi": {"kind": "exp-in-z", "base": 1.0, "rate": 0.5},
            "gamma0": 1.0,
            "phi": {"kind": "constant", "value": 2.5},
        })
        profile = shoot(spec)
        assert abs(profile.meta["residual"]) <= 1e-8
        assert abs(profile.u[-1]) <= 1e-10
        assert profile.meta["sweeps"] >= 1


class TestGuards:
    def test_requires_concentric_domain(self):
        spec = problem_spec_from_dict({"domain": SKEWED_ANNULUS, "phi": {"kind": "skewed-quadratic"}})
        with pytest.raises(UnsupportedDomain):
            integrate_outward(spec, 0.5)

    def test_slope_floor(self):
        with pytest.raises(SlopeCollapse):
            integrate_outward(radial_spec(), 0.0)

    def test_bracket_interval(self):
        with pytest.raises(ParameterOutOfRange):
            find_brackets(radial_spec(), 1.0, 0.5)


class TestBlowupSweep:
    def test_inner_values_follow_reciprocal(self):
        rows = blowup_sweep(radial_spec(), [1.0, 0.1, 0.01])
        for row in rows:
            assert row.u_nn_inner == pytest.approx(1.0 / row.d + row.d, rel=1e-6)
            assert row.inner_hess_nn == pytest.approx(1.0 / row.d, rel=1e-6)
        assert rows[0].phi_k > rows[1].phi_k > rows[2].phi_k > critical_phi(1.0, 1.0, 1.0, 2.0)

    def test_rejects_non_positive(self):
        with pytest.raises(ParameterOutOfRange):
            blowup_sweep(radial_spec(), [0.5, 0.0])
