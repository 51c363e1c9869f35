"""
命令列介面測試
子命令在 tmp_path 下輸出，檢查 CSV / JSON 內容、結束碼與逐位元可重現性
"""
import csv
import json
import math

import pytest

from monge_ampere_lab.bounds import c0_bound
from monge_ampere_lab.cli import PresetLibrary, dumps_json, format_value, main, spec_digest
from monge_ampere_lab.cli.main import build_parser, load_recipes
from monge_ampere_lab.geometry import problem_spec_from_dict


def _run(tmp_path, *argv) -> int:
    return main(["--output-dir", str(tmp_path), *argv], configure_logging=False)


def _summary(path):
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def _json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


class TestOracleCommand:
    def test_radial_summary_reports_inner_second_derivative(self, tmp_path):
        assert _run(tmp_path, "oracle", "--family", "radial2d", "--psi", "1", "--dk", "0.1", "--samples", "64") == 0
        rows = {row["quantity"]: row for row in _summary(tmp_path / "oracle_radial2d_summary.csv")}
        assert float(rows["inner_dnn"]["value"]) == pytest.approx(10.1, rel=1e-12)
        assert float(rows["d_k"]["value"]) == pytest.approx(0.1)
        assert rows["inner_dnn"]["x"] == ""
        assert (tmp_path / "oracle_radial2d_samples.csv").exists()
        assert (tmp_path / "oracle.manifest.json").exists()

    def test_samples_have_small_pde_residual(self, tmp_path):
        assert _run(tmp_path, "oracle", "--family", "radial2d", "--dk", "0.5", "--samples", "64") == 0
        rows = _summary(tmp_path / "oracle_radial2d_samples.csv")
        assert len(rows) > 0
        assert max(float(row["pde_residual"]) for row in rows) <= 1e-10

    def test_blowup_table_written_for_d_list(self, tmp_path):
        code = _run(tmp_path, "oracle", "--family", "radial2d", "--dk", "0.1", "--d-list", "1,0.1", "--samples", "16")
        assert code == 0
        rows = _summary(tmp_path / "oracle_radial2d_blowup.csv")
        assert [float(row["d"]) for row in rows] == [1.0, 0.1]
        for row in rows:
            assert float(row["u_nn_inner"]) == pytest.approx(float(row["inner_dnn_exact"]), rel=1e-6)

    def test_missing_dk_is_spec_error(self, tmp_path):
        assert _run(tmp_path, "oracle", "--family", "radial2d") == 2
        assert not (tmp_path / "oracle.manifest.json").exists()

    def test_skewed_probe_points(self, tmp_path):
        code = _run(tmp_path, "oracle", "--family", "skewed-quadratic", "--preset", "skewed-annulus", "--samples", "32")
        assert code == 0
        rows = _summary(tmp_path / "oracle_skewed-quadratic_summary.csv")
        assert [row["quantity"] for row in rows] == ["u_nu"] * 3
        assert float(rows[0]["x"]) == pytest.approx(0.75)
        assert float(rows[0]["value"]) == pytest.approx(-0.25, abs=1e-12)
        for row in rows[1:]:
            assert float(row["value"]) == pytest.approx(0.0, abs=1e-12)

    def test_output_is_deterministic(self, tmp_path):
        argv = ["oracle", "--family", "radial2d", "--dk", "0.5", "--samples", "32"]
        assert _run(tmp_path / "a", *argv) == 0
        assert _run(tmp_path / "b", *argv) == 0
        for name in ("oracle_radial2d_summary.csv", "oracle_radial2d_samples.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        first = _json(tmp_path / "a" / "oracle.manifest.json")
        second = _json(tmp_path / "b" / "oracle.manifest.json")
        assert first["spec_digest"] == second["spec_digest"]
        assert len(first["spec_digest"]) == 64
        assert first["outputs"] == ["oracle_radial2d_samples.csv", "oracle_radial2d_summary.csv"]


class TestCheckCommand:
    def test_structure_radius_for_width(self, tmp_path):
        assert _run(tmp_path, "check", "structure", "--preset", "structure-counterexample", "--width", "0.5") == 0
        report = _json(tmp_path / "check_structure.json")
        assert report["satisfied"] is True
        assert report["constants_used"]["R0"] == pytest.approx(math.log(2.0), abs=1e-8)
        assert report["R0_expected"] == pytest.approx(math.log(2.0))

    def test_unsatisfied_condition_still_exits_zero(self, tmp_path):
        assert _run(tmp_path, "check", "curvature", "--preset", "radial-blowup", "--gamma0", "1", "--M", "1") == 0
        report = _json(tmp_path / "check_curvature.json")
        assert report["condition_id"] == "curvature"
        assert report["satisfied"] is (report["margin"] > 0.0)

    def test_prescribed_gauss_reports_mass(self, tmp_path):
        assert _run(tmp_path, "check", "prescribed-gauss") == 0
        report = _json(tmp_path / "check_prescribed-gauss.json")
        assert report["satisfied"] is True
        assert report["gauss_map_mass"]["1"] == pytest.approx(2.0, rel=1e-8)
        assert report["gauss_map_mass"]["2"] == pytest.approx(math.pi, rel=1e-8)

    def test_structure_needs_blowup_psi(self, tmp_path):
        assert _run(tmp_path, "check", "structure", "--preset", "radial-blowup") == 2

    def test_spec_file(self, tmp_path):
        spec_path = tmp_path / "annulus.json"
        spec_path.write_text(json.dumps({
            "domain": {"kind": "concentric", "dim": 2, "r_inner": 1.0, "r_outer": 2.0},
            "psi": {"kind": "constant", "value": 1.0},
            "gamma0": 1.0,
            "phi": {"kind": "phi-k", "d": 1.0},
        }), encoding="utf-8")
        assert _run(tmp_path / "out", "check", "estimates", "--spec", str(spec_path)) == 0
        report = _json(tmp_path / "out" / "check_estimates.json")
        assert report["satisfied"] is True

    def test_unreadable_spec_file(self, tmp_path):
        assert _run(tmp_path, "check", "estimates", "--spec", str(tmp_path / "missing.json")) == 2


class TestConstantsCommand:
    def test_c0_auto_beats_trial_values(self, tmp_path):
        assert _run(tmp_path, "constants", "--formula", "C0", "--K", "auto") == 0
        payload = _json(tmp_path / "constants_C0.json")
        assert 0.0 < payload["K"] < 0.25
        spec = problem_spec_from_dict(PresetLibrary().get("radial-blowup")["spec"])
        for K in (0.01, 0.1, 0.2):
            assert payload["C0"] <= c0_bound(spec, K) * (1.0 + 1e-9)

    def test_fixed_k_out_of_range(self, tmp_path):
        assert _run(tmp_path, "constants", "--formula", "C0", "--K", "0.25") == 2


class TestSolveRadialCommand:
    def test_recovers_dk(self, tmp_path):
        assert _run(tmp_path, "solve-radial", "--phi-from-dk", "0.5") == 0
        meta = _json(tmp_path / "solve_radial.json")
        assert meta["d_star"] == pytest.approx(0.5, abs=1e-8)
        assert meta["sup_error"] <= 1e-8
        assert (tmp_path / "solve_radial_profile.csv").exists()

    def test_phi_below_threshold_is_solver_error(self, tmp_path):
        assert _run(tmp_path, "solve-radial", "--phi", "0.5") == 3


class TestFlowCommand:
    def test_short_run_audit(self, tmp_path):
        assert _run(tmp_path, "flow", "--T", "0.02") == 0
        payload = _json(tmp_path / "flow.json")
        assert payload["T"] == pytest.approx(0.02)
        assert payload["audit"]["violated"] is False
        assert payload["sup_u_within_C0_T"] is True


class TestRecipesCommand:
    def _index(self, tmp_path, argv):
        path = tmp_path / "recipes.json"
        path.write_text(json.dumps({"recipes": [{"name": "broken", "description": "", "argv": argv}]}),
                        encoding="utf-8")
        return path

    def test_failing_recipe_keeps_spec_exit_code(self, tmp_path):
        index = self._index(tmp_path, ["oracle", "--family", "radial2d"])
        assert _run(tmp_path / "out", "recipes", "--index", str(index), "--run", "broken") == 2

    def test_failing_recipe_keeps_solver_exit_code(self, tmp_path):
        index = self._index(tmp_path, ["solve-radial", "--phi", "0.5"])
        assert _run(tmp_path / "out", "recipes", "--index", str(index), "--run", "broken") == 3

    def test_unknown_recipe_name(self, tmp_path):
        index = self._index(tmp_path, ["oracle", "--family", "radial2d", "--dk", "0.5"])
        assert _run(tmp_path / "out", "recipes", "--index", str(index), "--run", "missing") == 2


class TestSupport:
    def test_parser_requires_subcommand(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_presets_fall_back_to_builtin(self, tmp_path):
        library = PresetLibrary(tmp_path / "nowhere.yml")
        assert library.names() == sorted([
            "gauss-curvature-omega", "radial-blowup", "radial-flow", "skewed-annulus", "structure-counterexample",
        ])
        preset = library.get("radial-blowup")
        preset["spec"]["gamma0"] = 7.0
        assert library.get("radial-blowup")["spec"]["gamma0"] == 1.0

    def test_yaml_presets_match_builtin_names(self):
        assert PresetLibrary().names() == PresetLibrary("/nonexistent/presets.yml").names()

    def test_format_value(self):
        assert format_value(None) == ""
        assert format_value(True) == "true"
        assert format_value(3) == "3"
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(float("nan")) == "nan"
        assert format_value(float("-inf")) == "-inf"

    def test_dumps_json_sorts_keys_and_drops_nonfinite(self):
        text = dumps_json({"b": float("inf"), "a": 1.5})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": 1.5, "b": None}

    def test_spec_digest_ignores_key_order(self):
        assert spec_digest({"a": 1, "b": [1.0, 2.0]}) == spec_digest({"b": [1.0, 2.0], "a": 1})
        assert spec_digest(None) is None

    def test_recipes_index_loads(self):
        names = [recipe["name"] for recipe in load_recipes()]
        assert "closed-form-radial" in names
        assert len(names) == len(set(names))
