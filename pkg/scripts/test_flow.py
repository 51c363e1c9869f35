"""
流方程求解器的測試：u_t 界限、sup|u| 界限、IGCF 圖形恆等式、時間加密
"""
import warnings

import numpy as np
import pytest

from monge_ampere_lab.bounds import flow_constants
from monge_ampere_lab.closed_form import RadialConcentric2D
from monge_ampere_lab.config import FLOW_HISTORY_LENGTH
from monge_ampere_lab.errors import MissingFlow, ParameterOutOfRange, PreconditionRejected, StepRejected
from monge_ampere_lab.geometry.problem import problem_spec_from_dict
from monge_ampere_lab.solvers import (
    elliptic_gap_observer,
    initial_state,
    run,
    stability_cap,
    step,
    time_refinement,
    ut_bounds_audit,
)

from conftest import UNIT_ANNULUS, radial_spec


def flow_data(**overrides):
    data = {
        "domain": dict(UNIT_ANNULUS),
        "psi": {"kind": "constant", "value": 1.0},
        "gamma0": 2.0,
        "phi": {"kind": "constant", "value": 4.0},
        "flow": {
            "theta": {"kind": "linear", "rate": -1.0},
            "phi_rate": 1.0,
            "u0": {"kind": "closed-form", "family": "radial2d", "psi": 1.0, "d": 1.0},
            "T": 1.0,
        },
    }
    for key, value in overrides.items():
        if key in data["flow"]:
            data["flow"][key] = value
        else:
            data[key] = value
    return data


@pytest.fixture(scope="module")
def benchmark_run():
    spec = problem_spec_from_dict(flow_data(), "radial-flow")
    return spec, run(spec, dt=4e-4, nodes=33)


class TestBenchmark:
    def test_constants(self, flow_spec):
        constants = flow_constants(flow_spec)
        assert constants.CT_upper == pytest.approx(1.0)
        assert constants.C0_T == pytest.approx(3.0, rel=1e-12)

    def test_ut_bounds(self, benchmark_run):
        spec, result = benchmark_run
        audit = ut_bounds_audit(result.series, flow_constants(spec).CT_upper)
        assert not audit["violated"]
        assert audit["max_abs_ut"] <= 1.0 + 1e-6
        assert audit["min_abs_ut"] > 0.0
        assert all(row["max_ut"] < 0.0 for row in result.series)

    def test_sup_u_bound(self, benchmark_run):
        spec, result = benchmark_run
        sup_u = max(row["sup_u"] for row in result.series)
        assert sup_u <= flow_constants(spec).C0_T + 1e-6

    def test_reaches_horizon(self, benchmark_run):
        _, result = benchmark_run
        assert result.final.t == pytest.approx(1.0, abs=1e-12)
        assert result.final.outer_trace() == pytest.approx(-1.0, abs=1e-12)
        assert result.snapshots[0][0] == 0.0 and result.snapshots[-1][0] == result.final.t

    def test_u_is_nonincreasing(self, benchmark_run):
        _, result = benchmark_run
        first, last = result.snapshots[0][2], result.snapshots[-1][2]
        assert np.all(last <= first + 1e-10)

    def test_history_is_recorded(self, benchmark_run):
        _, result = benchmark_run
        assert len(result.final.history) == min(len(result.series) - 1, FLOW_HISTORY_LENGTH)


class TestInverseGaussCurvatureFlow:
    def test_graph_identity_every_step(self):
        spec = problem_spec_from_dict(flow_data(psi={"kind": "igcf"}), "igcf")
        result = run(spec, T=5e-5, dt=1e-5, nodes=33)
        assert len(result.series) > 1
        for row in result.series:
            assert row["igcf_residual"] <= 1e-8


class TestTimeRefinement:
    def test_first_order_in_time(self, flow_spec):
        report = time_refinement(flow_spec, 0.1, [2e-4, 1e-4, 5e-5], nodes=33)
        assert len(report["differences"]) == 2
        assert report["dts_used"] == pytest.approx([2e-4, 1e-4, 5e-5])
        assert all(order is not None and order >= 0.9 for order in report["orders"])

    def test_steps_above_cap_rejected(self, flow_spec):
        cap = stability_cap(initial_state(flow_spec, nodes=33), flow_spec)
        with pytest.raises(StepRejected):
            time_refinement(flow_spec, 0.05, [4.0 * cap, 2.0 * cap, cap], nodes=33)

    def test_needs_two_steps(self, flow_spec):
        with pytest.raises(ParameterOutOfRange):
            time_refinement(flow_spec, 0.05, [1e-4], nodes=33)


class TestRunBookkeeping:
    def test_oversized_dt_is_subdivided(self, flow_spec):
        cap = stability_cap(initial_state(flow_spec, nodes=33), flow_spec)
        result = run(flow_spec, T=0.01, dt=4.0 * cap, nodes=33)
        assert result.subdivided
        assert result.max_step <= cap * (1.0 + 1e-9)

    def test_inner_robin_update_stays_scalar(self, flow_spec):
        with warnings.catch_warnings():
            warnings.filterwarnings("error", message="Conversion of an array with ndim > 0")
            result = run(flow_spec, T=0.004, dt=4e-4, nodes=33)
        assert result.final.u.ndim == 1
        assert not result.subdivided


class TestStepping:
    def test_step_above_cap_rejected(self, flow_spec):
        state = initial_state(flow_spec, nodes=33)
        cap = stability_cap(state, flow_spec)
        with pytest.raises(StepRejected):
            step(state, flow_spec, 10.0 * cap)

    def test_negative_step(self, flow_spec):
        with pytest.raises(ParameterOutOfRange):
            step(initial_state(flow_spec, nodes=33), flow_spec, -1e-4)

    def test_zero_step_is_identity(self, flow_spec):
        state = initial_state(flow_spec, nodes=33)
        assert step(state, flow_spec, 0.0) is state

    def test_initial_boundary_mismatch(self, flow_spec):
        with pytest.raises(PreconditionRejected):
            initial_state(flow_spec, RadialConcentric2D(1.0, 1.0, 2.0, 0.5), nodes=33)

    def test_missing_flow(self):
        with pytest.raises(MissingFlow):
            initial_state(radial_spec())

    def test_decreasing_phi_rejected(self):
        spec = problem_spec_from_dict(flow_data(phi_rate=-1.0))
        with pytest.raises(PreconditionRejected):
            run(spec, T=0.01, dt=1e-4, nodes=33)

    def test_observers_called_each_step(self, flow_spec):
        observer = elliptic_gap_observer(RadialConcentric2D(1.0, 1.0, 2.0, 1.0))
        result = run(flow_spec, T=0.01, dt=1e-3, observers=[observer], nodes=33)
        assert len(observer.gaps) == len(result.series) - 1
        assert observer.gaps[-1][1] > 0.0

    def test_empty_series(self):
        with pytest.raises(ParameterOutOfRange):
            ut_bounds_audit([])
