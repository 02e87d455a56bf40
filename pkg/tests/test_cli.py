import json
import subprocess
import sys

import pytest

from scarforge import circuits, cli


def run(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_xi_linear(capsys, tmp_path):
    path = tmp_path / "xi.qc.json"
    code, rep = run(capsys, "xi", "linear", "--n", "10", "--xi", "0.5", "--out", str(path))
    assert code == 0 and rep["pass"]
    assert rep["metrics"]["fidelity"] > 1 - 1e-10
    assert len(circuits.load(path)) == 8


def test_xi_stitch(capsys):
    code, rep = run(capsys, "xi", "stitch", "--n", "14", "--block", "2", "--xi", "1", "--shots", "2000", "--seed", "3")
    assert code == 0
    assert rep["metrics"]["success_probability_exact"] == "377/729"
    assert rep["metrics"]["success_probability"] == pytest.approx(377 / 729)
    assert abs(rep["metrics"]["success_probability_sampled"] - 377 / 729) < 0.05


def test_sk_commands(capsys):
    code, rep = run(capsys, "sk", "mps", "--m", "6", "--k", "2")
    assert code == 0 and rep["metrics"]["depth_estimate"] == 12
    code, rep = run(capsys, "sk", "kmax", "--n", "6")
    assert code == 0 and rep["metrics"]["H_J"] == pytest.approx(-3)
    code, rep = run(capsys, "sk", "kmax", "--n", "10", "--compressed")
    assert code == 0 and rep["metrics"]["fib_projection_weight"] == pytest.approx(1)
    code, rep = run(capsys, "sk", "variational", "--n", "10", "--k", "4", "--restarts", "5", "--seed", "2")
    assert code == 0 and rep["metrics"]["infidelity"] < 1e-8


def test_variational_determinism(capsys, tmp_path):
    csv = tmp_path / "h.csv"
    args = ("sk", "variational", "--n", "10", "--k", "2", "--restarts", "2", "--seed", "9", "--stop-below", "0")
    _, a = run(capsys, *args, "--csv", str(csv))
    _, b = run(capsys, *args)
    assert a["metrics"] == b["metrics"] and a["checks"] == b["checks"]
    assert len(csv.read_text().splitlines()) == 3


def test_failing_check_sets_exit_status(capsys):
    code, rep = run(capsys, "sk", "variational", "--n", "12", "--k", "2", "--restarts", "1", "--tol", "1e-30")
    assert code == 1 and rep["pass"] is False


def test_verify(capsys):
    code, rep = run(capsys, "verify", "revival", "--n", "10", "--xi", "1", "--delta", "1", "--j", "0.5", "--t", "auto")
    assert code == 0 and rep["params"]["t"] == pytest.approx(3.141592653589793 / 2)
    assert rep["metrics"]["fidelity"] == pytest.approx(1, abs=1e-12)
    code, rep = run(capsys, "verify", "project-mz", "--n", "14", "--xi", "1", "--k", "5")
    assert code == 0 and rep["metrics"]["probability_exact"] == "56/377"


def test_adiabatic(capsys, tmp_path):
    csv = tmp_path / "gap.csv"
    code, rep = run(capsys, "adiabatic", "gap", "--n", "8", "--points", "5", "--csv", str(csv))
    assert code == 0 and rep["metrics"]["argmin_s_over_T"] == 1.0
    assert csv.read_text().splitlines()[0] == "s_over_T,gap"
    code, rep = run(capsys, "adiabatic", "sweep", "--n", "6", "--t", "20", "--steps", "200", "--min-fidelity", "0.9")
    assert code == 0


def test_usage_errors(capsys):
    assert cli.main(["xi", "stitch", "--n", "9", "--block", "2"]) == 2
    assert cli.main(["sk", "kmax", "--n", "7"]) == 2
    assert cli.main(["verify", "revival", "--n", "8", "--xi", "1", "--delta", "1", "--j", "0", "--t", "soon"]) == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["sk"])
    assert e.value.code == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "scarforge", "sk", "kmax", "--n", "8"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["metrics"]["H_J"] == pytest.approx(-5)
