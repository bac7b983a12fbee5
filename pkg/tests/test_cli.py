import json
import subprocess
import sys

import numpy as np
import pytest

from robust_ircw import PowerAllocation, RobustSolution, cli
from robust_ircw.experiments import run_verifications

SMALL_SCENARIO = {"ofdm": {"n_subcarriers": 32}, "noise": {"snr_db": 5.0}}


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(SMALL_SCENARIO))
    return path


def run(*args):
    return cli.main([str(a) for a in args])


class TestSubcommands:
    def test_plan(self, tmp_path, scenario_file):
        out = tmp_path / "plan.csv"
        assert run("plan", "--scenario", scenario_file, "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "subcarrier,power,mu_prime,mi_lower,mi_upper,dir_lower,dir_upper"
        assert len(lines) == 33
        powers = np.array([float(line.split(",")[1]) for line in lines[1:]])
        assert powers.sum() == pytest.approx(1.0, abs=1e-10)
        meta = json.loads((tmp_path / "plan.csv.meta.json").read_text())
        assert meta["specific_response"] == "class midpoint"
        assert meta["kkt_residual"] <= 1e-7

    def test_sweep_snr(self, tmp_path, scenario_file):
        out = tmp_path / "snr.csv"
        assert run("sweep-snr", "--scenario", scenario_file, "--out", out) == 0
        assert len(out.read_text().splitlines()) == 8

    def test_sweep_width(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({**SMALL_SCENARIO, "bounds": {"family": "fixed_upper"}, "sweep": {"width": [0, 1, 2]}}))
        out = tmp_path / "w.csv"
        assert run("sweep-width", "--scenario", path, "--out", out) == 0
        assert len(out.read_text().splitlines()) == 4
        meta = json.loads((tmp_path / "w.csv.meta.json").read_text())
        assert meta["specific_response"] == "midpoint of narrowest class"

    def test_tradeoff_overrides(self, tmp_path, scenario_file):
        out = tmp_path / "t.csv"
        assert run("tradeoff", "--scenario", scenario_file, "--out", out, "--budget", "2.0") == 0
        assert len(out.read_text().splitlines()) == 12
        assert json.loads((tmp_path / "t.csv.meta.json").read_text())["budget"] == 2.0

    def test_verify_spectrum(self, tmp_path, scenario_file):
        out = tmp_path / "spec.csv"
        assert run("verify-spectrum", "--scenario", scenario_file, "--out", out, "--trials", "300") == 0
        header = out.read_text().splitlines()[0]
        assert header == "subcarrier,power,approx_error,expected,mc_mean,mc_std,z_score"

    def test_verify(self, tmp_path, scenario_file):
        out = tmp_path / "v.json"
        assert run("verify", "--scenario", scenario_file, "--out", out) == 0
        assert json.loads(out.read_text())["passed"] is True

    def test_stdout(self, capsys, scenario_file):
        assert run("sweep-snr", "--scenario", scenario_file) == 0
        assert capsys.readouterr().out.startswith("sweep_value,")


class TestExitCodes:
    def test_config_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("[")
        assert run("plan", "--scenario", bad) == 2

    def test_width_sweep_needs_family(self, scenario_file):
        assert run("sweep-width", "--scenario", scenario_file) == 2

    def test_bad_override(self, scenario_file):
        assert run("plan", "--scenario", scenario_file, "--wc", "1.5") == 2

    def test_verification_failure(self, tmp_path, scenario_file, monkeypatch):
        def corrupt(sol):
            n = sol.allocation.powers.size
            return RobustSolution(PowerAllocation(np.full(n, 1.0 / n)), sol.multiplier, 0.0, 0.0)

        monkeypatch.setattr(
            cli, "run_verifications", lambda scenario, seed: run_verifications(scenario, seed, solution_hook=corrupt)
        )
        assert run("verify", "--scenario", scenario_file, "--out", tmp_path / "v.json") == 3

    def test_argparse_usage(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["nonsense"])
        assert exc.value.code == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "command", ["plan", "sweep-snr", "tradeoff", "verify-spectrum", "verify"]
    )
    def test_byte_identical(self, tmp_path, scenario_file, command):
        extra = ["--trials", "200"] if command == "verify-spectrum" else []
        outputs = []
        for k in range(2):
            out = tmp_path / f"{command}-{k}.out"
            assert run(command, "--scenario", scenario_file, "--out", out, "--seed", "11", *extra) == 0
            outputs.append((out.read_bytes(), (tmp_path / f"{out.name}.meta.json").read_bytes() if command != "verify" else b""))
        assert outputs[0] == outputs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "robust_ircw", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "sweep-snr" in proc.stdout
