import json
from pathlib import Path

import jsonschema
import pytest

from emdk.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, dumps, main
from emdk.scenario import report_schema, scenario_schema

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def result(report, task):
    return next(r for r in report["results"] if r["task"] == task)


BASE = {
    "medium": {"kind": "vacuum"},
    "field": {"kind": "components", "components": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]},
    "tasks": ["decompose"],
}


class TestFixtures:
    def test_vacuum_post_invariant(self, tmp_path):
        code, rep = run(["run", str(SCENARIOS / "vacuum.json")], tmp_path)
        assert code == EXIT_OK and rep["status"] == "ok"
        assert result(rep, "post_invariant")["chi"] == 0
        assert result(rep, "verify_variation")["residual"] <= 1e-7

    def test_magnetoelectric_example(self, tmp_path):
        code, rep = run(["run", str(SCENARIOS / "magnetoelectric.json")], tmp_path)
        assert code == EXIT_OK
        assert result(rep, "post_invariant")["chi"] == 0
        cls = result(rep, "classify")
        assert cls["verdict"] == "INTRINSIC" and cls["lower_bound"] > 1e-3

    def test_isotropic_decompose(self, tmp_path):
        code, rep = run(["run", str(SCENARIOS / "isotropic_eps2.json")], tmp_path)
        assert code == EXIT_OK
        dec = result(rep, "decompose")
        for a, b in zip(dec["d"]["components"], dec["e"]["components"]):
            assert abs(a - 2 * b) < 1e-12
        assert dec["d"]["frame"] == "global" and dec["d_vector"]["frame"] == "observer"
        assert result(rep, "classify")["verdict"] == "NOT_INTRINSIC"

    @pytest.mark.parametrize("name", ["vacuum.json", "magnetoelectric.json", "isotropic_eps2.json"])
    def test_byte_identical(self, tmp_path, name):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["run", str(SCENARIOS / name), "--seed", "4", "--out", str(a)]) == EXIT_OK
        assert main(["run", str(SCENARIOS / name), "--seed", "4", "--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("name", ["vacuum.json", "magnetoelectric.json", "isotropic_eps2.json"])
    def test_fixtures_validate(self, name):
        jsonschema.validate(json.loads((SCENARIOS / name).read_text()), scenario_schema())


class TestReport:
    def test_schema_round_trip_and_labels(self, tmp_path):
        code, rep = run(["run", str(SCENARIOS / "vacuum.json")], tmp_path)
        jsonschema.validate(rep, report_schema())
        for key in ("orientation", "signature", "two_form_basis", "units"):
            assert key in rep["conventions"]
        for task in ("sem_abraham", "sem_minkowski"):
            r = result(rep, task)
            assert r["tensor"]["frame"] == "global" and r["tensor_comoving"]["frame"] == "comoving"

    def test_seventeen_digits(self):
        assert dumps(0.1) == "0.10000000000000001"
        assert dumps([1.0, -0.0, 1 / 3]) == "[1, 0, 0.33333333333333331]"
        assert json.loads(dumps({"a": [0.1, 1 / 3]})) == {"a": [0.1, 1 / 3]}
        with pytest.raises(ValueError):
            dumps(float("nan"))

    def test_eps0_scales_excitation(self, tmp_path):
        doc = dict(BASE, medium={"kind": "isotropic", "eps": 2.0, "mu": 1.0}, units={"eps0": 3.0})
        _, rep = run(["run", write(tmp_path, doc)], tmp_path)
        dec = result(rep, "decompose")
        for a, b in zip(dec["d"]["components"], dec["e"]["components"]):
            assert abs(a - 6 * b) < 1e-12
        assert rep["conventions"]["units"]["eps0"] == 3

    def test_classify_subcommand_runs_only_classify(self, tmp_path):
        code, rep = run(["classify", str(SCENARIOS / "vacuum.json")], tmp_path)
        assert code == EXIT_OK
        assert [r["task"] for r in rep["results"]] == ["classify"]


class TestErrors:
    def test_bad_json_reports_line(self, tmp_path, capsys):
        path = write(tmp_path, '{"medium": {"kind": "vacuum"},\n "field": {"kind" "uniform"}}')
        assert main(["run", path]) == EXIT_INVALID
        assert "line 2" in capsys.readouterr().err

    def test_unknown_task(self, tmp_path, capsys):
        path = write(tmp_path, dict(BASE, tasks=["decompose", "bogus"]))
        assert main(["run", path]) == EXIT_INVALID
        assert "/tasks/1" in capsys.readouterr().err

    def test_missing_field_path(self, tmp_path, capsys):
        path = write(tmp_path, dict(BASE, medium={"kind": "isotropic", "eps": 2.0}))
        assert main(["run", path]) == EXIT_INVALID
        assert "/medium" in capsys.readouterr().err

    @pytest.mark.parametrize("doc", [
        dict(BASE, tasks=[]),
        dict(BASE, medium_velocity=[1.0, 2.0]),
        dict(BASE, medium={"kind": "matrix", "matrix": [[1, 2, 3, 4, 5, 6]] * 6}),
        '{"medium": {"kind": "vacuum"}, "observer": [1e999, 0, 0], "field": '
        '{"kind": "uniform", "components": [1, 2, 3, 4, 5, 6]}, "tasks": ["decompose"]}',
    ])
    def test_invalid_scenarios(self, tmp_path, doc):
        assert main(["run", write(tmp_path, doc)]) == EXIT_INVALID

    def test_missing_file_and_bad_flag(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == EXIT_INVALID
        assert main(["run", str(SCENARIOS / "vacuum.json"), "--fd-step", "-1"]) == EXIT_INVALID
        assert main(["frobnicate"]) == EXIT_INVALID

    def test_strict_residual_failure(self, tmp_path):
        path = write(tmp_path, dict(BASE, tasks=["verify_variation"]))
        code, rep = run(["run", path, "--strict", "--fd-step", "0.3"], tmp_path)
        assert code == EXIT_NUMERICAL and rep["status"] == "numerical_failure"
        code, rep = run(["run", path, "--fd-step", "0.3"], tmp_path, "lax.json")
        assert code == EXIT_OK and result(rep, "verify_variation")["passed"] is False

    def test_step_too_large_for_metric(self, tmp_path):
        doc = dict(BASE, tasks=["verify_variation"], variation={"edot": [[-1, 0, 0, 0]] * 4})
        code, rep = run(["run", write(tmp_path, doc), "--fd-step", "2"], tmp_path)
        assert code == EXIT_NUMERICAL and "error" in result(rep, "verify_variation")


class TestSelftestCommand:
    def test_default_and_seed(self, tmp_path):
        code, rep = run(["selftest"], tmp_path)
        assert code == EXIT_OK and result(rep, "selftest")["passed"]
        code, _ = run(["selftest", "--seed", "99"], tmp_path, "b.json")
        assert code == EXIT_OK

    def test_flip_fails_loudly(self, tmp_path, capsys):
        code, rep = run(["selftest", "--flip-hodge"], tmp_path)
        assert code == EXIT_NUMERICAL
        assert "id_iX_star" in result(rep, "selftest")["failures"]
        assert "FAILED" in capsys.readouterr().err
