import json
import subprocess
import sys

import numpy as np
import pytest

from hetsis import AGE_LABELS, AgeContactData, SISModel, calibrate_to_R0, activity_structured, homogeneous
from hetsis.cli import main


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "act.json"
    calibrate_to_R0(activity_structured(), 2.0).save_json(path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_r0(capsys, model_file):
    code, out = run(capsys, "r0", "--model", model_file)
    assert code == 0
    assert out.splitlines()[0] == "r0"
    assert float(out.splitlines()[1]) == pytest.approx(2.0, rel=1e-12)
    code, out = run(capsys, "r0", "--model", model_file, "--format", "json")
    assert json.loads(out)["r0"] == pytest.approx(2.0)


def test_equilibrium_then_strategy_commands(capsys, model_file, tmp_path):
    eq = tmp_path / "eq.csv"
    assert run(capsys, "equilibrium", "--model", model_file, "--out", eq)[0] == 0
    assert eq.read_text().splitlines()[0] == "label,mu,gamma,g,eta_equi"
    code, out = run(capsys, "re", "--model", model_file, "--strategy", eq)
    assert code == 0 and float(out.splitlines()[1]) == pytest.approx(1.0, abs=1e-8)
    code, out = run(capsys, "cost", "--model", model_file, "--strategy", eq, "--format", "json")
    assert json.loads(out)["cost"] == pytest.approx(0.4018471376771, abs=1e-11)
    code, out = run(capsys, "equilibrium", "--model", model_file, "--format", "json")
    d = json.loads(out)
    assert d["cost_equi"] == pytest.approx(0.4018471376771, abs=1e-11)
    assert len(d["types"]) == 3


def test_calibrate(capsys, model_file, tmp_path):
    out_path = tmp_path / "cal.json"
    assert run(capsys, "calibrate", "--model", model_file, "--target-r0", 3, "--out", out_path)[0] == 0
    from hetsis import basic_reproduction_number

    assert basic_reproduction_number(SISModel.load_json(out_path)) == pytest.approx(3.0, rel=1e-12)
    assert run(capsys, "calibrate", "--model", model_file)[0] == 2


def test_simulate(capsys, model_file, tmp_path):
    code, out = run(capsys, "simulate", "--model", model_file, "--t-end", 5, "--dt", 0.1)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,low,average,high" and len(lines) == 52
    init = tmp_path / "init.csv"
    init.write_text("label,g\nlow,0.1\naverage,0.1\nhigh,0.1\n")
    code, out = run(capsys, "simulate", "--model", model_file, "--t-end", 1, "--initial", init, "--format", "json")
    d = json.loads(out)
    assert d["states"][0] == [0.1, 0.1, 0.1]


def test_check_maximality(capsys, model_file, tmp_path):
    code, out = run(capsys, "check-maximality", "--model", model_file)
    assert code == 0 and json.loads(out)["is_maximal"] is True
    zero = tmp_path / "zero.csv"
    zero.write_text("label,g\nlow,0\naverage,0\nhigh,0\n")
    code, out = run(capsys, "check-maximality", "--model", model_file, "--equilibrium", zero)
    assert code == 0 and not any(json.loads(out)["conditions"].values())
    bad = tmp_path / "bad.csv"
    bad.write_text("label,g\nlow,0.3\naverage,0.3\nhigh,0.3\n")
    assert run(capsys, "check-maximality", "--model", model_file, "--equilibrium", bad)[0] == 2


def test_table1_without_contacts(capsys, caplog):
    code, out = run(capsys, "table1")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "structure,r0,cost_equi_pct,cost_uni_pct"
    assert "Homogeneous,2,50.0,50.0" in rows
    assert "Homogeneous,3,66.7,66.7" in rows
    assert "Activity,2.5,50.0,60.0" in rows
    assert "skipped" in caplog.text


def test_tables_with_synthetic_contacts(capsys, tmp_path):
    rng = np.random.default_rng(3)
    f = rng.dirichlet(np.ones(6) * 5)
    flows = rng.uniform(0.2, 3, (6, 6))
    flows = flows + flows.T
    path = tmp_path / "contacts.csv"
    AgeContactData(AGE_LABELS, f, flows / f[:, None]).write_csv(path)
    code, out = run(capsys, "table1", "--contacts", path, "--format", "json")
    assert code == 0
    names = {r["structure"] for r in json.loads(out)["rows"]}
    assert names == {"Homogeneous", "Age", "Activity", "Age+Activity"}
    code, out = run(capsys, "table2", "--contacts", path)
    assert code == 0
    assert out.splitlines()[0] == "age_group,low,average,high"
    assert len(out.splitlines()) == 8


def test_exit_codes(capsys, tmp_path, model_file, monkeypatch):
    assert run(capsys, "r0", "--model", tmp_path / "nope.json")[0] == 4
    assert run(capsys, "table2")[0] == 4
    assert run(capsys, "table1", "--contacts", tmp_path / "nope.csv")[0] == 4
    invalid = tmp_path / "invalid.json"
    d = homogeneous(2.0, 1.0).to_dict()
    d["gamma"] = [-1.0]
    invalid.write_text(json.dumps(d))
    assert run(capsys, "r0", "--model", invalid)[0] == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert run(capsys, "r0", "--model", garbage)[0] == 2
    from hetsis import equilibrium

    monkeypatch.setattr(equilibrium, "MAX_ITER", 2)
    monkeypatch.setattr(equilibrium, "NEWTON_MAX_STEPS", 0)
    assert run(capsys, "equilibrium", "--model", model_file)[0] == 3


def test_verify_properties_deterministic(capsys, tmp_path):
    code1, out1 = run(capsys, "verify-properties", "--seed", 7)
    code2, out2 = run(capsys, "verify-properties", "--seed", 7)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.splitlines()[-1] == "ALL PASS 12/12"


def test_verify_properties_fault_injection(capsys):
    code, out = run(capsys, "verify-properties", "--inject-fault")
    assert code == 1
    assert "FAIL rho_monotone" in out


def test_module_entry_point(model_file):
    proc = subprocess.run(
        [sys.executable, "-m", "hetsis.cli", "r0", "--model", str(model_file)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("r0\n")
