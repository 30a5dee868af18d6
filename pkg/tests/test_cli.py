"""CLI subcommands: artifacts, summaries, exit codes, determinism."""

import csv
import json

import pytest

import powlab as pl
from powlab.cli import main
from conftest import make_economy

LIMITING_DOC = {
    "protocol": {"B": 0.2, "Phi": 0.05, "Q": 10.0},
    "security": {"g": 1.0, "k": 1.0, "sigma_eps": 1e9, "s_star": 0.0},
    "demand": {"theta_U": 20.0, "eps": 1.0, "theta_S": 0.0, "delta": 0.0},
    "costs": {"family": "uniform", "mass": 1.0, "c_min": 0.0, "c_max": 1.0},
}

BASELINE_DOC = pl.economy_to_dict(make_economy(
    B=0.25, Phi=0.05, Q=20.0, g=1.0, k=2.0, sigma_eps=5.0, theta_U=50.0,
    eps=1.0, theta_S=5.0, delta=1.0, family=pl.PowerCosts(0.0, 1.0, 2.0),
    mass=2.0))


def full_config(economy=None):
    return {
        "economy": economy or dict(BASELINE_DOC),
        "scan": {"n_grid": 512},
        "tatonnement": {"p0": 1.3, "kappa": 0.01, "tol": 1e-8,
                        "max_iters": 20000},
        "sweep": {"field": "protocol.Q", "grid": [15.0, 20.0, 25.0]},
        "dynamics": {
            "T": 120, "lambda_adj": 0.5,
            "theta_u_shock": {"persistence": 0.5, "sd": 0.02},
            "fee_process": {"persistence": 0.5, "sd": 0.01},
            "halving_week": 60, "seed": 5,
        },
        "var": {"lags": 2, "horizon": 26},
    }


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


def run(args, capsys=None):
    code = main(args)
    return code


class TestSolve:
    def test_limiting_economy(self, tmp_path, capsys):
        config = write_config(tmp_path, {"economy": LIMITING_DOC,
                                         "scan": {"n_grid": 512}})
        out = tmp_path / "out"
        assert main(["solve", "--config", config, "--out", str(out)]) == 0
        with open(out / "equilibria.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert float(rows[0]["P_star"]) == pytest.approx(1.0, abs=1e-6)
        assert rows[0]["stability"] == "stable"
        summary = capsys.readouterr().out
        assert "equilibria.csv" in summary and "boundary_ok=True" in summary

    def test_writes_into_created_directory(self, tmp_path):
        config = write_config(tmp_path, full_config())
        out = tmp_path / "nested" / "dirs"
        assert main(["solve", "--config", config, "--out", str(out)]) == 0
        assert (out / "equilibria.csv").exists()


class TestCommands:
    def test_halving(self, tmp_path):
        config = write_config(tmp_path, full_config())
        assert main(["halving", "--config", config, "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "halving_report.json").read_text())
        assert doc["delta_H"] < 0.0
        assert doc["delta_P"] < 0.0

    def test_sweep(self, tmp_path):
        config = write_config(tmp_path, full_config())
        assert main(["sweep", "--config", config, "--out", str(tmp_path)]) == 0
        with open(tmp_path / "sweep.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:2] == ["axis_value", "n_equilibria"]
        assert len(rows) == 4

    def test_uniqueness_check(self, tmp_path):
        config = write_config(tmp_path, full_config())
        assert main(["uniqueness-check", "--config", config,
                     "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "uniqueness.json").read_text())
        assert doc["holds_everywhere"] is True

    def test_tatonnement(self, tmp_path):
        config = write_config(tmp_path, full_config())
        assert main(["tatonnement", "--config", config,
                     "--out", str(tmp_path)]) == 0
        with open(tmp_path / "tatonnement.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "P", "Z"]
        assert len(rows) > 2

    def test_simulate_var_irf(self, tmp_path):
        config = write_config(tmp_path, full_config())
        assert main(["simulate", "--config", config, "--out", str(tmp_path)]) == 0
        data = pl.load_dataset(tmp_path / "dataset.csv")
        assert len(data) == 120

        assert main(["var", "--config", config, "--out", str(tmp_path)]) == 0
        model_doc = json.loads((tmp_path / "var_model.json").read_text())
        assert model_doc["lag_order"] == 2

        assert main(["irf", "--config", config, "--out", str(tmp_path)]) == 0
        with open(tmp_path / "irf.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["horizon", "resp_log_P", "resp_log_H", "resp_log_Phi"]
        assert len(rows) == 28  # horizons 0..26

    def test_var_from_dataset_file(self, tmp_path):
        config_doc = full_config()
        config = write_config(tmp_path, config_doc)
        assert main(["simulate", "--config", config, "--out", str(tmp_path)]) == 0
        config_doc["var"]["dataset"] = str(tmp_path / "dataset.csv")
        config2 = write_config(tmp_path, config_doc, name="config2.json")
        assert main(["var", "--config", config2, "--out", str(tmp_path)]) == 0

    def test_seed_override_changes_dataset(self, tmp_path):
        config = write_config(tmp_path, full_config())
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", config, "--out", str(out_a)]) == 0
        assert main(["simulate", "--config", config, "--out", str(out_b),
                     "--seed", "99"]) == 0
        assert (out_a / "dataset.csv").read_bytes() \
            != (out_b / "dataset.csv").read_bytes()


class TestDeterminism:
    def test_rerun_is_byte_identical(self, tmp_path):
        config = write_config(tmp_path, full_config())
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for command, artifact in (
            ("solve", "equilibria.csv"),
            ("simulate", "dataset.csv"),
            ("irf", "irf.csv"),
        ):
            assert main([command, "--config", config, "--out", str(out_a)]) == 0
            assert main([command, "--config", config, "--out", str(out_b)]) == 0
            assert (out_a / artifact).read_bytes() == (out_b / artifact).read_bytes()


class TestErrors:
    def read_error(self, capsys):
        err = capsys.readouterr().err.strip().splitlines()[-1]
        return json.loads(err)["error"]

    def test_missing_config_exits_4(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.json")
        assert main(["solve", "--config", missing, "--out", str(tmp_path)]) == 4
        error = self.read_error(capsys)
        assert "nope.json" in error["message"]
        assert error["exit_code"] == 4

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{broken")
        assert main(["solve", "--config", str(path), "--out", str(tmp_path)]) == 2
        assert self.read_error(capsys)["type"] == "ParameterError"

    def test_invalid_economy_exits_2(self, tmp_path, capsys):
        doc = {"economy": dict(LIMITING_DOC, security={
            "g": 1.0, "k": 1.0, "sigma_eps": 0.0, "s_star": 0.0})}
        config = write_config(tmp_path, doc)
        assert main(["solve", "--config", config, "--out", str(tmp_path)]) == 2
        assert "sigma_eps" in self.read_error(capsys)["message"]

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        config = write_config(tmp_path, {"economy": LIMITING_DOC, "what": 1})
        assert main(["solve", "--config", config, "--out", str(tmp_path)]) == 2
        assert "what" in self.read_error(capsys)["message"]

    def test_scenario_error_exits_3(self, tmp_path, capsys):
        doc = full_config(economy=dict(
            LIMITING_DOC,
            protocol={"B": 0.0, "Phi": 0.25, "Q": 10.0}))
        config = write_config(tmp_path, doc)
        assert main(["halving", "--config", config, "--out", str(tmp_path)]) == 3
        assert self.read_error(capsys)["type"] == "DomainError"

    def test_no_equilibrium_scenario_exits_3(self, tmp_path, capsys):
        doc = full_config(economy=dict(
            LIMITING_DOC, protocol={"B": 0.2, "Phi": 0.05, "Q": 1e9}))
        config = write_config(tmp_path, doc)
        assert main(["halving", "--config", config, "--out", str(tmp_path)]) == 3
        assert self.read_error(capsys)["type"] == "ScenarioError"

    def test_missing_dynamics_block_exits_2(self, tmp_path, capsys):
        config = write_config(tmp_path, {"economy": LIMITING_DOC})
        assert main(["simulate", "--config", config, "--out", str(tmp_path)]) == 2
        assert "dynamics" in self.read_error(capsys)["message"]

    def test_unwritable_out_exits_4(self, tmp_path, capsys):
        config = write_config(tmp_path, full_config())
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        out = blocker / "sub"
        assert main(["solve", "--config", config, "--out", str(out)]) == 4

    def test_missing_dataset_file_exits_4(self, tmp_path, capsys):
        doc = full_config()
        doc["var"]["dataset"] = str(tmp_path / "absent.csv")
        config = write_config(tmp_path, doc)
        assert main(["var", "--config", config, "--out", str(tmp_path)]) == 4

    def test_malformed_dataset_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("week,log_P\n0,1\n")
        doc = full_config()
        doc["var"]["dataset"] = str(bad)
        config = write_config(tmp_path, doc)
        assert main(["var", "--config", config, "--out", str(tmp_path)]) == 2
