import json

import jsonschema
import pytest

from qgamma import cli
from qgamma.cli import COMMAND_HANDLERS, CommandOutcome, build_parser, main, run
from qgamma.config import build_run_config
from qgamma.utils.exceptions import ConvergenceError
from qgamma.utils.output_formatter import export_csv, read_csv, to_serializable


def config(command, tmp_path, **extra):
    data = {
        "command": command,
        "params": {"n": 1, "gamma": 0.25},
        "K": "two-bump",
        "output_dir": str(tmp_path),
    }
    data.update(extra)
    return build_run_config(data)


def load_summary(path):
    with open(path / "summary.json", "r", encoding="utf-8") as f:
        return json.load(f)


def stub(outcome):
    return lambda cfg: outcome


class TestRun:
    @pytest.mark.parametrize(
        "code, status, verdict",
        [(0, "ok", "applicable"), (2, "hypotheses-unmet", "not-applicable"), (1, "error", None)],
    )
    def test_exit_codes_and_status(self, tmp_path, monkeypatch, summary_schema, code, status, verdict):
        outcome = CommandOutcome({"value": 1.0}, ["line"], code, {"t.csv": (["a"], [[1]])}, verdict)
        monkeypatch.setitem(COMMAND_HANDLERS, "check-k", stub(outcome))
        assert run(config("check-k", tmp_path)) == code

        summary = load_summary(tmp_path)
        jsonschema.validate(summary, summary_schema)
        assert summary["status"] == status
        assert summary["verdict"] == verdict
        assert summary["artifacts"] == ["report.txt", "summary.json", "t.csv"]
        assert summary["params"] == {"n": 1, "gamma": 0.25}
        assert summary["K"] == {"builtin": "two-bump", "options": {}}

    def test_error_keeps_newton_trace(self, tmp_path, monkeypatch, summary_schema):
        def failing(cfg):
            raise ConvergenceError("Newton did not converge", [{"iter": 0, "residual": 1.0}])

        monkeypatch.setitem(COMMAND_HANDLERS, "solve", failing)
        assert run(config("solve", tmp_path)) == 1

        summary = load_summary(tmp_path)
        jsonschema.validate(summary, summary_schema)
        assert summary["status"] == "error"
        assert summary["results"]["error_code"] == "CONVERGENCE_ERROR"
        report = (tmp_path / "report.txt").read_text(encoding="utf-8")
        assert "Newton did not converge" in report
        assert "'iter': 0" in report

    def test_unexpected_errors_are_contained(self, tmp_path, monkeypatch):
        def broken(cfg):
            raise ZeroDivisionError("boom")

        monkeypatch.setitem(COMMAND_HANDLERS, "landscape", broken)
        assert run(config("landscape", tmp_path)) == 1
        assert load_summary(tmp_path)["results"]["error_code"] == "ZeroDivisionError"

    def test_summary_is_reproducible(self, tmp_path, monkeypatch):
        outcome = CommandOutcome({"x": 0.1 + 0.2, "arr": [3, 1]}, ["line"])
        monkeypatch.setitem(COMMAND_HANDLERS, "degree", stub(outcome))
        run(config("degree", tmp_path / "a"))
        run(config("degree", tmp_path / "b"))
        first = (tmp_path / "a" / "summary.json").read_bytes()
        assert first == (tmp_path / "b" / "summary.json").read_bytes()


class TestCommands:
    @pytest.mark.slow
    def test_verify_bubble(self, tmp_path, summary_schema):
        assert run(config("verify-bubble", tmp_path, numerics={"L": 16})) == 0
        summary = load_summary(tmp_path)
        jsonschema.validate(summary, summary_schema)
        results = summary["results"]
        assert results["relative_difference"] <= 1e-6
        assert results["kernel"]["dim"] == 2
        assert results["sphere_constant"]["deviation"] <= 1e-10
        rows = read_csv(tmp_path / "bubble_ratio.csv")
        assert len(rows) == 41

    @pytest.mark.slow
    def test_single_bump_is_not_applicable(self, tmp_path, summary_schema):
        cfg = config("check-k", tmp_path, params={"n": 2, "gamma": 0.5}, K="gaussian")
        assert run(cfg) == 2
        summary = load_summary(tmp_path)
        jsonschema.validate(summary, summary_schema)
        assert summary["status"] == "hypotheses-unmet"
        assert summary["verdict"] == "not-applicable"
        assert "crit_points.csv" in summary["artifacts"]
        assert "Verdict: not-applicable" in (tmp_path / "report.txt").read_text(encoding="utf-8")

    def test_report_merges_sweeps(self, tmp_path, summary_schema):
        for name, C in (("run-a", 2.0), ("run-b", 5.0)):
            rows = [[e, "ok", 1e-10, 3, 1.0, C * e, 0.5, ""] for e in (0.01, 0.02, 0.04)]
            (tmp_path / name).mkdir()
            export_csv(rows, cli.SWEEP_HEADER, tmp_path / name / "sweep.csv")

        cfg = build_run_config({"command": "report", "output_dir": str(tmp_path)})
        assert run(cfg) == 0

        out = tmp_path / "report"
        summary = load_summary(out)
        jsonschema.validate(summary, summary_schema)
        assert "params" not in summary
        assert summary["results"]["fits"]["run-b"]["slope"] == pytest.approx(1.0)
        assert summary["results"]["fits"]["run-b"]["C"] == pytest.approx(5.0)

        merged = read_csv(out / "sweep_merged.csv")
        assert len(merged) == 8
        fit_rows = [r for r in merged if r["epsilon"] == "fit"]
        assert [r["source"] for r in fit_rows] == ["run-a", "run-b"]

        # a second report sees the same inputs
        first = (out / "sweep_merged.csv").read_bytes()
        assert run(cfg) == 0
        assert (out / "sweep_merged.csv").read_bytes() == first

    def test_report_without_artifacts(self, tmp_path):
        cfg = build_run_config({"command": "report", "output_dir": str(tmp_path)})
        assert run(cfg) == 1
        summary = load_summary(tmp_path / "report")
        assert summary["results"]["error_code"] == "FILESYSTEM_ERROR"


class TestMain:
    def test_no_arguments_prints_help(self, capsys):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 0

    def test_invalid_config_exits_with_error(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"command": "solve", "params": {"n": 1, "gamma": 0.25}, "bogus": 1}))
        with pytest.raises(SystemExit) as info:
            main(["solve", "--config", str(path)])
        assert info.value.code == 1

    def test_flags_become_overrides(self):
        args = build_parser().parse_args(
            ["landscape", "--n", "1", "--gamma", "0.25", "--k", "gaussian", "--box", "0", "1", "-2", "2"]
        )
        overrides = cli._overrides(args)
        assert overrides["K"] == {"builtin": "gaussian"}
        assert overrides["box"] == [[0.0, 1.0], [-2.0, 2.0]]

        args = build_parser().parse_args(["sweep", "--k", "exp(-r2)", "--eps", "0.04", "0.01", "--cold", "--mu", "0.9"])
        overrides = cli._overrides(args)
        assert overrides["K"] == {"expression": "exp(-r2)"}
        assert overrides["epsilons"] == [0.01, 0.04]
        assert overrides["warm_start"] is False
        assert overrides["seed_bubble"] == {"mu": 0.9}


def test_serializable_rounds_and_drops_nonfinite():
    import numpy as np

    data = to_serializable({"a": np.float64(0.1) + np.float64(0.2), "b": np.array([1, 2]), "c": float("nan")})
    assert data == {"a": 0.3, "b": [1, 2], "c": None}


def test_toon_export_without_library(tmp_path, monkeypatch):
    from qgamma.utils import output_formatter
    from qgamma.utils.exceptions import FileSystemError

    monkeypatch.setattr(output_formatter, "TOON_AVAILABLE", False)
    with pytest.raises(FileSystemError, match="toon-format"):
        output_formatter.export_summary_toon({"status": "ok"}, tmp_path / "summary.toon")
    assert not (tmp_path / "summary.toon").exists()
