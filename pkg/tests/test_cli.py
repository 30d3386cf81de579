import json

import numpy as np
import pytest

from basicgerbe import matrix_to_json, random_unitary
from basicgerbe.cli import SUITES, SuiteConfig, eval_point, main, run_suite


def write_curvature_point(path):
    g = np.diag([1j, -1j])
    obj = {
        "g": matrix_to_json(g),
        "z1": [-np.sqrt(0.5), np.sqrt(0.5)],
        "z2": [np.sqrt(0.5), np.sqrt(0.5)],
        "X": matrix_to_json(np.array([[0, 1], [-1, 0]], dtype=complex)),
        "Y": matrix_to_json(np.array([[0, 1j], [1j, 0]], dtype=complex)),
    }
    path.write_text(json.dumps(obj))
    return obj


class TestRunSuite:
    def test_all_suites_pass_small(self):
        for suite in SUITES:
            report = run_suite(SuiteConfig(suite=suite, dim=3, samples=3, seed=1))
            assert report["passed"], (suite, report["checks"])
            assert report["suite"] == suite
            for c in report["checks"]:
                assert c["samples"] >= 1
                assert c["max_abs_error"] <= c["tolerance"]

    def test_report_deterministic(self):
        cfg = lambda: SuiteConfig(suite="projectors", dim=3, samples=4, seed=9)
        r1 = json.dumps(run_suite(cfg()), sort_keys=True)
        r2 = json.dumps(run_suite(cfg()), sort_keys=True)
        assert r1 == r2

    def test_tolerance_override_fails(self):
        cfg = SuiteConfig(
            suite="projectors",
            dim=3,
            samples=2,
            seed=0,
            tolerances={"residue-vs-quadrature": 0.0},
        )
        report = run_suite(cfg)
        assert not report["passed"]

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite(SuiteConfig(suite="nonsense"))

    def test_report_schema(self):
        report = run_suite(SuiteConfig(suite="gerbe-axioms", dim=3, samples=2, seed=2))
        assert set(report) == {"suite", "config", "checks", "passed"}
        assert set(report["config"]) == {"dim", "samples", "seed", "tolerances"}
        for c in report["checks"]:
            assert set(c) == {
                "name",
                "identity",
                "samples",
                "max_abs_error",
                "mean_abs_error",
                "tolerance",
                "failures",
            }


class TestEvalPoint:
    def test_curvature_with_oracle(self, tmp_path):
        obj = write_curvature_point(tmp_path / "p.json")
        rec = eval_point(obj, "curvature", "residue", True)
        assert abs(complex(rec["value_re"], rec["value_im"]) - (-0.5j)) < 1e-10
        assert rec["residual_vs_oracle"] < 1e-10

    def test_curvature_no_oracle(self, tmp_path):
        obj = write_curvature_point(tmp_path / "p.json")
        rec = eval_point(obj, "curvature", "quadrature", False)
        assert rec["residual_vs_oracle"] is None

    def test_projector_matrix_output(self, tmp_path):
        obj = write_curvature_point(tmp_path / "p.json")
        rec = eval_point(obj, "projector", "residue", True)
        assert rec["matrix"]["dim"] == 2
        assert abs(rec["matrix"]["re"][0][0] - 1.0) < 1e-10
        assert rec["residual_vs_oracle"] < 1e-10

    def test_missing_field(self):
        from basicgerbe import SchemaError

        with pytest.raises(SchemaError) as err:
            eval_point({}, "curvature", "residue", True)
        assert "$.g" in str(err.value)

    def test_flag_input(self):
        from basicgerbe import flag_point_to_json, random_flag_tangent, sample_regular
        from basicgerbe.sampling import sample_rng

        rng = sample_rng(0, "cli-test", 0)
        pt = sample_regular(3, rng)
        tans = [random_flag_tangent(pt, rng) for _ in range(3)]
        obj = flag_point_to_json(pt)
        obj["tangents"] = [
            {
                "dlambda": flag_point_to_json(pt, t)["dlambda"],
                "dP": flag_point_to_json(pt, t)["dP"],
            }
            for t in tans
        ]
        rec = eval_point(obj, "df", "residue", True)
        assert rec["residual_vs_oracle"] < 1e-9


class TestMain:
    def test_verify_pass_exit_zero(self, tmp_path, capsys):
        report = tmp_path / "r.json"
        code = main(
            [
                "verify",
                "--suite",
                "projectors",
                "--dim",
                "3",
                "--samples",
                "2",
                "--seed",
                "0",
                "--report",
                str(report),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS projectors/residue-vs-quadrature" in out
        assert json.loads(report.read_text())["passed"]

    def test_verify_fail_exit_one(self, capsys):
        code = main(
            [
                "verify",
                "--suite",
                "projectors",
                "--dim",
                "3",
                "--samples",
                "2",
                "--tol",
                "integer-trace=0",
            ]
        )
        assert code == 1
        assert "FAIL" in capsys.readouterr().out

    def test_reports_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            args = [
                "verify", "--suite", "gerbe-axioms", "--dim", "3",
                "--samples", "2", "--seed", "5", "--report", str(p),
            ]
            assert main(args) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_eval_exit_zero(self, tmp_path, capsys):
        p = tmp_path / "p.json"
        write_curvature_point(p)
        code = main(["eval", "--input", str(p), "--quantity", "curvature"])
        assert code == 0
        rec = json.loads(capsys.readouterr().out)
        assert abs(rec["value_im"] + 0.5) < 1e-10

    def test_eval_bad_schema_exit_two(self, tmp_path, capsys):
        p = tmp_path / "p.json"
        p.write_text(json.dumps({"g": matrix_to_json(np.eye(2))}))
        code = main(["eval", "--input", str(p), "--quantity", "curvature"])
        assert code == 2
        assert "$.z1" in capsys.readouterr().err

    def test_eval_missing_file_exit_two(self, tmp_path):
        assert (
            main(["eval", "--input", str(tmp_path / "no.json"), "--quantity", "nu"])
            == 2
        )

    def test_eval_invalid_json_exit_two(self, tmp_path):
        p = tmp_path / "p.json"
        p.write_text("{not json")
        assert main(["eval", "--input", str(p), "--quantity", "nu"]) == 2

    def test_bad_tol_exit_two(self):
        assert (
            main(["verify", "--suite", "projectors", "--samples", "1", "--tol", "x"])
            == 2
        )
