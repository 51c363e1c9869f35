"""
命令列入口
子命令：oracle、check、constants、barrier、solve-radial、solve-2d、flow、recipes

輸出寫到 MA_LAB_OUTPUT_DIR（或 --output-dir），每次執行另寫一份 manifest。
結束碼：0 成功（條件不成立也算成功，結果寫在 JSON 的 satisfied）、2 規格錯誤、3 求解器錯誤。
"""
import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import __version__
from ..bounds import (
    BarrierSpec,
    barrier_field,
    boundary_maximum_check,
    c0_bound,
    c0_du_bound,
    elliptic_constants,
    estimate_validation,
    flow_constants,
    m_bound,
    minimize_c0_over_k,
    reciprocal_identity_residual,
    sample_barrier_norms,
    suggested_M,
)
from ..closed_form import (
    GradientBlowup,
    RadialConcentric2D,
    RadialConcentricND,
    SkewedQuadratic,
    blowup_gradient_family,
    critical_phi,
    inner_dnn,
    inner_hess_nn,
    skewed_inner_neumann,
)
from ..conditions import (
    check_curvature,
    check_prescribed_gauss,
    check_structure,
    check_structure_gradient,
    gauss_map_mass,
    structure_radius,
    subsolution_sweep,
)
from ..config import LOG_LEVEL, OUTPUT_DIR, PSI_SAMPLE_COUNT
from ..errors import MongeAmpereLabError, SolverError, SpecError, UnsupportedFamily
from ..geometry import GradientBlowupPsi, PolarGrid, ProblemSpec, problem_spec_from_dict, sample_domain_points
from ..solvers import (
    blowup_sweep,
    closed_form_for,
    convergence_study,
    discrete_min_eig,
    gradient_image_measure,
    newton_solve,
    oracle_for,
    profile_on_grid,
    quadratic_init,
    run,
    sample_solution_on_grid,
    shoot,
    time_refinement,
    ut_bounds_audit,
    with_phi_constant,
)
from .manifest import RunManifest, spec_digest
from .presets import get_preset_library
from .writers import dumps_json, write_csv, write_json

logger = logging.getLogger(__name__)

RECIPES_FILE = Path(__file__).resolve().parents[2] / "docs" / "recipes.json"
SUMMARY_HEADER = ["quantity", "x", "y", "value"]


@dataclass
class RunContext:
    """一次執行的輸出目錄與 manifest"""
    output_dir: Path
    manifest: RunManifest
    payload: Dict[str, Any] = field(default_factory=dict)

    def csv(self, name: str, header: Sequence[str], rows) -> Path:
        path = write_csv(self.output_dir / name, header, rows)
        self.manifest.add_output(path)
        return path

    def json(self, name: str, data: Any) -> Path:
        path = write_json(self.output_dir / name, data)
        self.manifest.add_output(path)
        return path


# ---- 共用工具 ----

def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"不是逗號分隔的數字：{text}") from e


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"不是逗號分隔的整數：{text}") from e


def _spec_dict(args, default_preset: str) -> Tuple[Dict, Dict]:
    """
    問題規格的字典形式與 extras

    --spec 指向 JSON 檔時優先；否則取 --preset（或子命令的預設）。之後套用共用的覆寫參數。
    """
    if getattr(args, "spec", None):
        try:
            with open(args.spec, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise SpecError(f"❌ 無法讀取問題規格 {args.spec}: {e}") from e
        data.setdefault("name", Path(args.spec).stem)
        extras = data.pop("extras", {})
    else:
        preset = get_preset_library().get(getattr(args, "preset", None) or default_preset)
        data, extras = preset["spec"], preset["extras"]

    domain = data.setdefault("domain", {})
    if getattr(args, "r_inner", None) is not None:
        domain["r_inner"] = args.r_inner
    if getattr(args, "r_outer", None) is not None:
        domain["r_outer"] = args.r_outer
    if getattr(args, "width", None) is not None:
        extras["width"] = args.width
    if "width" in extras and domain.get("kind", "concentric") == "concentric":
        domain["r_outer"] = float(domain["r_inner"]) + float(extras["width"])
    if getattr(args, "gamma0", None) is not None:
        data["gamma0"] = args.gamma0
    if getattr(args, "psi", None) is not None:
        data["psi"] = {"kind": "constant", "value": args.psi}
    return data, extras


def _load_spec(args, context: RunContext, default_preset: str) -> Tuple[ProblemSpec, Dict, Dict]:
    data, extras = _spec_dict(args, default_preset)
    context.manifest.spec_digest = spec_digest(data)
    return problem_spec_from_dict(data, data.get("name", default_preset)), data, extras


def _closed_form_solution(spec: ProblemSpec):
    """規格對應的解析解：phi-k 直接取 d_k，偏心二次解，其餘以 φ 反解 d"""
    if spec.phi.kind == "phi-k":
        return closed_form_for(spec, float(spec.phi.params["d"]))
    if spec.phi.kind == "skewed-quadratic":
        return SkewedQuadratic(spec.psi.value, spec.domain)
    return oracle_for(spec)


def _blowup_structure():
    """梯度爆破 ψ 的結構函數：g(x) = 1/|x|，h(ρ) = e^{−ρ}/ρ"""
    g = lambda x: 1.0 / np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
    h = lambda rho: np.exp(-np.asarray(rho, dtype=float)) / np.asarray(rho, dtype=float)
    return g, h


def _require_blowup_psi(spec: ProblemSpec):
    if not isinstance(spec.psi, GradientBlowupPsi):
        raise UnsupportedFamily("❌ 結構條件的 g、h 只對 gradient-blowup ψ 內建")
    return _blowup_structure()


def _sample_rows(solution, spec_psi, points: np.ndarray) -> List[List[float]]:
    """解析解在取樣點上的值、梯度與 PDE 殘差 |det D²u − ψⁿ|"""
    batch = solution.eval_many(points, check_domain=False)
    psi_n = np.asarray(spec_psi.rhs(points, batch.u, batch.grad), dtype=float)
    residual = np.abs(np.linalg.det(batch.hess) - psi_n)
    return [[*x, u, *g, res] for x, u, g, res in zip(points, batch.u, batch.grad, residual)]


def _sample_header(dim: int) -> List[str]:
    coords = [f"x{i}" for i in range(dim)]
    grads = [f"du{i}" for i in range(dim)]
    return [*coords, "u", *grads, "pde_residual"]


# ---- oracle ----

def cmd_oracle(args, context: RunContext) -> None:
    """解析解取樣、摘要與爆破表"""
    family = args.family
    if family in ("radial2d", "radialnd", "gradient-blowup") and args.dk is None:
        raise SpecError(f"❌ --family {family} 需要 --dk")

    summary: List[List[Any]] = []
    if family in ("radial2d", "radialnd"):
        dim = 2 if family == "radial2d" else args.dim
        psi = 1.0 if args.psi is None else args.psi
        gamma0 = 1.0 if args.gamma0 is None else args.gamma0
        r_inner = 1.0 if args.r_inner is None else args.r_inner
        r_outer = 2.0 if args.r_outer is None else args.r_outer
        data = {
            "domain": {"kind": "concentric", "dim": dim, "r_inner": r_inner, "r_outer": r_outer},
            "psi": {"kind": "constant", "value": psi},
            "gamma0": gamma0,
            "phi": {"kind": "phi-k", "d": args.dk},
            "name": f"oracle-{family}",
        }
        if dim == 2:
            solution = RadialConcentric2D(psi, r_inner, r_outer, args.dk)
        else:
            solution = RadialConcentricND(dim, psi, r_inner, r_outer, args.dk)
        spec = problem_spec_from_dict(data)
        summary += [
            ["d_k", None, None, args.dk],
            ["phi", None, None, solution.phi(gamma0)],
            ["u_inner", None, None, solution.inner_value()],
            ["inner_dnn", None, None, inner_dnn(solution)],
            ["inner_hess_nn", None, None, inner_hess_nn(solution)],
        ]
        if dim == 2 and gamma0 > 0:
            summary.append(["critical_phi", None, None, critical_phi(psi, gamma0, r_inner, r_outer / r_inner)])
        if args.d_list:
            rows = blowup_sweep(spec, args.d_list, args.nodes)
            table = []
            for row in rows:
                exact = inner_dnn(closed_form_for(spec, row.d)) if dim == 2 else inner_hess_nn(closed_form_for(spec, row.d))
                table.append([*row.as_tuple(), exact])
            context.csv(f"oracle_{family}_blowup.csv",
                        ["d", "phi_k", "u_nn_inner", "inner_hess_nn", "sup_grad", "inner_dnn_exact"], table)
    elif family == "skewed-quadratic":
        data, extras = _spec_dict(args, "skewed-annulus")
        data["phi"] = {"kind": "skewed-quadratic"}
        spec = problem_spec_from_dict(data, "oracle-skewed-quadratic")
        solution = SkewedQuadratic(spec.psi.value, spec.domain)
        for x in extras.get("probe_points", []):
            summary.append(["u_nu", x[0], x[1], skewed_inner_neumann(solution, spec.domain, np.asarray(x, dtype=float))])
    elif family == "gradient-blowup":
        data, extras = _spec_dict(args, "structure-counterexample")
        spec = problem_spec_from_dict(data, "oracle-gradient-blowup")
        solution = GradientBlowup(spec.domain.r_inner, spec.domain.r_outer, args.dk)
        result = blowup_gradient_family(solution, spec.gamma0)
        summary += [
            ["d_k", None, None, args.dk],
            ["phi", None, None, result.phi],
            ["sup_grad", None, None, result.sup_grad],
        ]
    else:
        raise UnsupportedFamily(f"❌ 未知的解析解族：{family}")

    context.manifest.spec_digest = spec_digest(data)
    points = sample_domain_points(spec.domain, args.samples)
    context.csv(f"oracle_{family}_samples.csv", _sample_header(spec.dim), _sample_rows(solution, solution.psi_spec(), points))
    context.csv(f"oracle_{family}_summary.csv", SUMMARY_HEADER, summary)
    context.payload = {"family": family, "summary": {row[0]: row[3] for row in summary if row[1] is None}}
    logger.info(f"✅ 解析解 {family} 已輸出到 {context.output_dir}")


# ---- check ----

DEFAULT_CHECK_PRESETS = {
    "structure": "structure-counterexample",
    "structure-gradient": "structure-counterexample",
    "prescribed-gauss": "gauss-curvature-omega",
}


def cmd_check(args, context: RunContext) -> None:
    """條件檢查；不成立時照樣結束碼 0，satisfied = false"""
    condition = args.condition
    spec, data, extras = _load_spec(args, context, DEFAULT_CHECK_PRESETS.get(condition, "radial-blowup"))
    extra: Dict[str, Any] = {}

    if condition == "curvature":
        report = check_curvature(spec, _closed_form_solution(spec), args.M)
    elif condition == "structure":
        g, h = _require_blowup_psi(spec)
        report = check_structure(spec, g, h)
        width = spec.domain.r_outer - spec.domain.r_inner
        if width < 1.0:
            extra["R0_expected"] = -math.log(1.0 - width)
    elif condition == "structure-gradient":
        z_scale = args.z_scale
        report = check_structure_gradient(spec, lambda s: np.full(np.shape(s), z_scale), args.beta, args.band,
                                          count=args.samples, flow=args.flow)
    elif condition == "subsolution":
        u = _closed_form_solution(spec)
        if not isinstance(u, RadialConcentric2D):
            raise UnsupportedFamily("❌ 下解檢查的 CLI 只支援 2-D 徑向解")
        sub_d = u.d_k if args.sub_dk is None else args.sub_dk
        sub_psi = u.psi if args.sub_psi is None else args.sub_psi
        usub = RadialConcentric2D(sub_psi, u.r_inner, u.r_outer, sub_d)
        report = subsolution_sweep(spec, u, usub, count=args.count)
        extra["sub"] = usub.describe()
    elif condition == "prescribed-gauss":
        report = check_prescribed_gauss(spec)
        extra["gauss_map_mass"] = {str(n): gauss_map_mass(int(n)) for n in extras.get("mass_dims", [spec.dim])}
    elif condition == "estimates":
        validation = estimate_validation(_closed_form_solution(spec), spec)
        context.payload = {"condition_id": "estimates", "satisfied": validation.passed, **validation.to_dict()}
        context.json("check_estimates.json", context.payload)
        return
    else:
        raise SpecError(f"❌ 未知的條件：{condition}")

    context.payload = {**report.to_dict(), **extra}
    context.json(f"check_{condition}.json", context.payload)


# ---- constants ----

def cmd_constants(args, context: RunContext) -> None:
    """先驗常數"""
    default = {"flow": "radial-flow", "C0-prime": "structure-counterexample"}.get(args.formula, "radial-blowup")
    spec, data, extras = _load_spec(args, context, default)
    formula = args.formula
    payload: Dict[str, Any] = {"formula": formula}

    if formula == "C0":
        if args.K == "auto":
            K, C0 = minimize_c0_over_k(spec)
        else:
            K = float(args.K)
            C0 = c0_bound(spec, K)
        payload.update({"K": K, "C0": C0})
    elif formula in ("C1", "C3", "elliptic"):
        payload.update(elliptic_constants(spec).to_dict())
    elif formula == "M":
        constants = elliptic_constants(spec)
        norms = sample_barrier_norms(spec, tuple(args.xi), constants.C1)
        payload.update({
            "C1": constants.C1,
            "M_min": m_bound(norms.norms(), norms.psi_norms(), constants.C1, spec.dim),
            "M_suggested": suggested_M(norms),
            "norms": norms.to_dict(),
        })
    elif formula == "C0-prime":
        g, h = _require_blowup_psi(spec)
        R0 = structure_radius(spec, g, h)
        payload.update({"R0": R0, "C0_prime": c0_du_bound(R0, spec)})
    elif formula == "flow":
        payload.update(flow_constants(spec).to_dict())
    else:
        raise SpecError(f"❌ 未知的公式：{formula}")

    context.payload = payload
    context.json(f"constants_{formula}.json", payload)


# ---- barrier ----

def cmd_barrier(args, context: RunContext) -> None:
    """輔助函數 w 的網格極大值位置與規範恆等式"""
    data, extras = _spec_dict(args, "radial-blowup")
    context.manifest.spec_digest = spec_digest(data)
    rows, reports = [], []
    for d in args.dk:
        local = dict(data, phi={"kind": "phi-k", "d": d})
        spec = problem_spec_from_dict(local, f"barrier-d{d:g}")
        solution = closed_form_for(spec, d)
        grid = PolarGrid.on(spec.domain, args.nr, args.ntheta)
        C1 = elliptic_constants(spec, solution=solution).C1
        norms = sample_barrier_norms(spec, tuple(args.xi), C1)
        M = suggested_M(norms) if args.M == "auto" else float(args.M)
        bspec = BarrierSpec.reciprocal(M, tuple(args.xi), args.N)
        values = barrier_field(solution, spec, bspec, grid)
        peak = boundary_maximum_check(values, grid)
        u = solution.eval_many(grid.flat_points(), check_domain=False).u
        identity = reciprocal_identity_residual(M, u)
        rows.append([d, M, peak.value, peak.index[0], peak.index[1], peak.at_boundary, identity])
        reports.append({"d": d, "M": M, "C1": C1, "max": peak.value, "index": list(peak.index),
                        "at_boundary": peak.at_boundary, "identity_residual": identity})
    context.csv("barrier.csv", ["d", "M", "max_w", "i", "j", "at_boundary", "identity_residual"], rows)
    context.payload = {"barrier": reports}
    context.json("barrier.json", context.payload)


# ---- solve-radial ----

def cmd_solve_radial(args, context: RunContext) -> None:
    """徑向打靶"""
    spec, data, extras = _load_spec(args, context, "radial-blowup")
    if args.phi_from_dk is not None:
        spec = with_phi_constant(spec, closed_form_for(spec, args.phi_from_dk).phi(spec.gamma0))
    elif args.phi is not None:
        spec = with_phi_constant(spec, args.phi)
    profile = shoot(spec, (args.d_lo, args.d_hi), args.tol, args.nodes)
    meta = dict(profile.meta)
    meta["phi"] = spec.inner_phi_value()
    meta["inner_dnn"] = profile.inner_dnn()
    try:
        meta["sup_error"] = profile.sup_error(closed_form_for(spec, profile.d_star))
    except UnsupportedFamily:
        pass
    context.csv("solve_radial_profile.csv", ["r", "u", "u_r", "u_rr"], profile.rows())
    context.payload = meta
    context.json("solve_radial.json", meta)


# ---- solve-2d ----

def cmd_solve_2d(args, context: RunContext) -> None:
    """2-D 極座標 Newton 求解，或 --study 時做網格收斂研究"""
    spec, data, extras = _load_spec(args, context, "radial-blowup")
    if args.study:
        table = convergence_study(spec, [(n, n) for n in args.grids], args.tol)
        header = ["nr", "ntheta", "h", "sup_error", "iterations", "order", "flag"]
        context.csv("solve_2d_convergence.csv", header, [[row[k] for k in header] for row in table])
        context.payload = {"convergence": table}
        context.json("solve_2d_convergence.json", context.payload)
        return

    grid = PolarGrid.on(spec.domain, args.nr, args.ntheta)
    oracle = None
    try:
        oracle = _closed_form_solution(spec)
    except MongeAmpereLabError as e:
        logger.info(f"📋 沒有可比較的解析解：{e}")
    if args.init == "oracle":
        if oracle is None:
            raise UnsupportedFamily("❌ --init oracle 需要解析解")
        init = sample_solution_on_grid(oracle, spec, grid)
    elif args.init == "radial":
        init = profile_on_grid(shoot(spec), spec, grid)
    else:
        init = quadratic_init(spec, grid)

    solution, report = newton_solve(spec, init, args.tol, args.max_iter)
    payload = {**report.to_dict(), "nr": args.nr, "ntheta": args.ntheta,
               "min_eig": discrete_min_eig(solution), "gauss_image_mass": gradient_image_measure(solution)}
    if oracle is not None:
        exact = sample_solution_on_grid(oracle, spec, grid).values
        payload["sup_error"] = float(np.max(np.abs(solution.values - exact)))
    context.csv("solve_2d_field.csv", ["r", "theta", "u"], solution.rows())
    context.payload = payload
    context.json("solve_2d.json", payload)


# ---- flow ----

def cmd_flow(args, context: RunContext) -> None:
    """徑向流推進，輸出時間序列與 u_t 界限的檢查"""
    data, extras = _spec_dict(args, "radial-flow")
    flow = data.setdefault("flow", {})
    if args.T is not None:
        flow["T"] = args.T
    if args.theta is not None:
        flow["theta"] = {"kind": "linear", "rate": args.theta}
    if args.phit is not None:
        flow["phi_rate"] = args.phit
    if args.phi0 is not None:
        data["phi"] = {"kind": "constant", "value": args.phi0}
    context.manifest.spec_digest = spec_digest(data)
    spec = problem_spec_from_dict(data, data.get("name", "flow"))

    dt = args.dt if args.dt is not None else float(extras.get("dt", 1e-4))
    nodes = args.nodes if args.nodes is not None else int(extras.get("nodes", 33))
    result = run(spec, dt=dt, nodes=nodes, snapshot_every=args.snapshot_every)
    constants = flow_constants(spec)
    audit = ut_bounds_audit(result.series, constants.CT_upper)
    sup_u = max(row["sup_u"] for row in result.series)

    header = list(result.series[0].keys())
    context.csv("flow_series.csv", header, [[row[k] for k in header] for row in result.series])
    snapshot_rows = [[t, float(np.linalg.norm(x)), value] for t, points, values in result.snapshots
                     for x, value in zip(points, np.ravel(values))]
    context.csv("flow_snapshots.csv", ["t", "r", "u"], snapshot_rows)
    payload = {
        "T": result.final.t,
        "dt": dt,
        "nodes": nodes,
        "audit": audit,
        "constants": constants.to_dict(),
        "sup_u": sup_u,
        "sup_u_within_C0_T": sup_u <= constants.C0_T + 1e-6,
    }
    if args.refine:
        payload["time_refinement"] = time_refinement(spec, result.final.t, args.refine, nodes)
    context.payload = payload
    context.json("flow.json", payload)


# ---- recipes ----

def load_recipes(path: Optional[Path] = None) -> List[Dict]:
    path = Path(path or RECIPES_FILE)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)["recipes"]
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise SpecError(f"❌ 無法讀取重現配方 {path}: {e}") from e


def cmd_recipes(args, context: RunContext) -> None:
    """列出或執行 docs/recipes.json 中的重現配方"""
    recipes = load_recipes(args.index)
    if not args.run:
        context.payload = {"recipes": [{"name": r["name"], "argv": r["argv"]} for r in recipes]}
        return
    by_name = {r["name"]: r for r in recipes}
    missing = [name for name in args.run if name not in by_name]
    if missing:
        raise SpecError(f"❌ 沒有這些配方：{', '.join(missing)}")
    results = {}
    for name in args.run:
        argv = ["--output-dir", str(context.output_dir / name), *by_name[name]["argv"]]
        logger.info(f"🔄 執行配方 {name}: {' '.join(by_name[name]['argv'])}")
        code = main(argv, configure_logging=False)
        results[name] = code
        if code != 0:
            # 沿用子命令的錯誤族，結束碼維持 2 或 3
            error = SpecError if code == SpecError.exit_code else SolverError
            raise error(f"❌ 配方 {name} 失敗（結束碼 {code}）")
    context.payload = {"ran": results}


# ---- parser ----

def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", type=Path, help="問題規格 JSON 檔")
    parser.add_argument("--preset", help="預設名稱（見 cli/config/presets.yml）")
    parser.add_argument("--gamma0", type=float)
    parser.add_argument("--psi", type=float, help="常數 ψ")
    parser.add_argument("--r-inner", type=float)
    parser.add_argument("--r-outer", type=float)
    parser.add_argument("--width", type=float, help="R₊ − R₋（同心區域）")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ma-lab", description="Monge-Ampère annulus verification lab")
    parser.add_argument("--output-dir", type=Path, default=Path(OUTPUT_DIR))
    parser.add_argument("--log-level", default=LOG_LEVEL)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    oracle = sub.add_parser("oracle", help="解析解取樣與爆破表")
    oracle.add_argument("--family", required=True, choices=["radial2d", "radialnd", "skewed-quadratic", "gradient-blowup"])
    oracle.add_argument("--dk", type=float)
    oracle.add_argument("--dim", type=int, default=3)
    oracle.add_argument("--d-list", type=_float_list)
    oracle.add_argument("--nodes", type=int, default=1024)
    oracle.add_argument("--samples", type=int, default=PSI_SAMPLE_COUNT)
    _add_spec_arguments(oracle)
    oracle.set_defaults(handler=cmd_oracle)

    check = sub.add_parser("check", help="條件檢查（輸出 ConditionReport JSON）")
    check.add_argument("condition", choices=["curvature", "structure", "structure-gradient", "subsolution",
                                             "prescribed-gauss", "estimates"])
    check.add_argument("--M", type=float, default=1.0)
    check.add_argument("--sub-dk", type=float)
    check.add_argument("--sub-psi", type=float)
    check.add_argument("--count", type=int, default=36)
    check.add_argument("--beta", type=float, default=0.0)
    check.add_argument("--band", type=float, default=0.1)
    check.add_argument("--z-scale", type=float, default=1.0)
    check.add_argument("--samples", type=int, default=2000)
    check.add_argument("--flow", action="store_true", help="梯度結構條件改用流方程的指數")
    _add_spec_arguments(check)
    check.set_defaults(handler=cmd_check)

    constants = sub.add_parser("constants", help="先驗常數")
    constants.add_argument("--formula", required=True, choices=["C0", "C1", "C3", "elliptic", "M", "C0-prime", "flow"])
    constants.add_argument("--K", default="auto", help="'auto' 或 (0, 1/max|x|²) 內的數")
    constants.add_argument("--xi", type=_float_list, default=[1.0, 0.0])
    _add_spec_arguments(constants)
    constants.set_defaults(handler=cmd_constants)

    barrier = sub.add_parser("barrier", help="輔助函數的邊界極大值檢查")
    barrier.add_argument("--dk", type=_float_list, default=[1.0, 0.5])
    barrier.add_argument("--M", default="auto")
    barrier.add_argument("--N", type=float)
    barrier.add_argument("--xi", type=_float_list, default=[1.0, 0.0])
    barrier.add_argument("--nr", type=int, default=128)
    barrier.add_argument("--ntheta", type=int, default=128)
    _add_spec_arguments(barrier)
    barrier.set_defaults(handler=cmd_barrier)

    radial = sub.add_parser("solve-radial", help="徑向打靶")
    radial.add_argument("--phi-from-dk", type=float)
    radial.add_argument("--phi", type=float)
    radial.add_argument("--d-lo", type=float, default=1e-6)
    radial.add_argument("--d-hi", type=float, default=10.0)
    radial.add_argument("--nodes", type=int, default=1024)
    radial.add_argument("--tol", type=float, default=1e-10)
    _add_spec_arguments(radial)
    radial.set_defaults(handler=cmd_solve_radial)

    solve2d = sub.add_parser("solve-2d", help="2-D 極座標 Newton")
    solve2d.add_argument("--nr", type=int, default=64)
    solve2d.add_argument("--ntheta", type=int, default=64)
    solve2d.add_argument("--tol", type=float, default=1e-9)
    solve2d.add_argument("--max-iter", type=int, default=30)
    solve2d.add_argument("--init", choices=["quadratic", "oracle", "radial"], default="quadratic")
    solve2d.add_argument("--study", action="store_true", help="在 --grids 上做收斂研究")
    solve2d.add_argument("--grids", type=_int_list, default=[32, 64, 128])
    _add_spec_arguments(solve2d)
    solve2d.set_defaults(handler=cmd_solve_2d)

    flow = sub.add_parser("flow", help="徑向流推進")
    flow.add_argument("--T", type=float)
    flow.add_argument("--dt", type=float)
    flow.add_argument("--theta", type=float, help="ϑ(t) = theta·t 的斜率（需 < 0）")
    flow.add_argument("--phi0", type=float, help="t = 0 的常數 φ")
    flow.add_argument("--phit", type=float, help="φ 的時間變化率（需 > 0）")
    flow.add_argument("--nodes", type=int)
    flow.add_argument("--snapshot-every", type=int, default=0)
    flow.add_argument("--refine", type=_float_list, help="時間加密用的 dt 列")
    _add_spec_arguments(flow)
    flow.set_defaults(handler=cmd_flow)

    recipes = sub.add_parser("recipes", help="列出或執行重現配方")
    recipes.add_argument("--index", type=Path)
    recipes.add_argument("--run", nargs="*", help="要執行的配方名稱")
    recipes.set_defaults(handler=cmd_recipes)
    return parser


def main(argv: Optional[Sequence[str]] = None, configure_logging: bool = True) -> int:
    """
    解析參數並執行子命令

    Returns:
        結束碼：0 成功、2 規格錯誤、3 求解器錯誤
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if configure_logging:
        logging.basicConfig(level=str(args.log_level).upper(), format="%(levelname)s %(name)s: %(message)s")

    context = RunContext(Path(args.output_dir), RunManifest(argv, None, __version__))
    try:
        args.handler(args, context)
    except MongeAmpereLabError as e:
        logger.error(str(e))
        return e.exit_code
    if context.manifest.outputs:
        context.manifest.write(context.output_dir, args.command)
    if context.payload:
        print(dumps_json(context.payload))
    return 0
