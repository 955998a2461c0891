import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lindrad import cli
from lindrad.config import parse_config
from lindrad.errors import ConfigError

MINIMAL_TRAJECTORY = """
[scenario]
kind = trajectory

[field]
B0 = 0 0 1e-3

[initial]
gamma0 = 10.0

[numerics]
model = landau-lifshitz
dt = 20.0
steps = 100
"""


def test_minimal_config_fills_defaults():
    cfg = parse_config(MINIMAL_TRAJECTORY)
    assert cfg.kind == "trajectory"
    assert cfg.numerics["record_every"] == 1
    assert cfg.output["format"] == "csv"
    assert cfg.constants.alpha == pytest.approx(1.0 / 137.036)
    pi = cfg.initial_pi()
    assert np.linalg.norm(pi) == pytest.approx(10.0 * np.sqrt(1 - 0.01))
    echo = cfg.echo()
    assert echo["numerics"]["dt"] == 20.0


def test_explicit_momentum_wins():
    cfg = parse_config("[initial]\npi = 1 2 3\n")
    assert np.array_equal(cfg.initial_pi(), [1.0, 2.0, 3.0])


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("[numerics]\ndt = 1\ndt = 2\n")
    assert exc.value.line == 3
    assert exc.value.key == "dt"


def test_duplicate_section_rejected():
    with pytest.raises(ConfigError):
        parse_config("[field]\n[field]\n")


def test_unknown_key_and_section():
    with pytest.raises(ConfigError) as exc:
        parse_config("[numerics]\nzeta = 1\n")
    assert exc.value.key == "zeta"
    with pytest.raises(ConfigError):
        parse_config("[warp]\nspeed = 9\n")


def test_gradb_divergence_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("[field]\ngradB = 1 0 0 ; 0 0 0 ; 0 0 0\n")
    assert "divergence" in str(exc.value)


def test_malformed_lines():
    with pytest.raises(ConfigError):
        parse_config("dt = 1\n")  # key outside a section
    with pytest.raises(ConfigError):
        parse_config("[numerics]\ndt 1\n")
    with pytest.raises(ConfigError):
        parse_config("[numerics\ndt = 1\n")
    with pytest.raises(ConfigError):
        parse_config("[scenario]\nkind = dance\n")
    with pytest.raises(ConfigError):
        parse_config("[numerics]\ndt = fast\n")


def test_write_table_csv_golden(tmp_path):
    path = tmp_path / "t.csv"
    cli.write_table([{"t": 0.0, "gamma": 10.0}], "csv", path)
    assert path.read_bytes() == b"t,gamma\n0,10\n"


def test_write_table_empty_and_roundtrip(tmp_path):
    path = tmp_path / "empty.csv"
    cli.write_table([], "csv", path, fieldnames=["a", "b"])
    assert path.read_text() == "a,b\n"
    jpath = tmp_path / "t.json"
    records = [{"t": 0.125, "gamma": 10.5}, {"t": 0.25, "gamma": 9.75}]
    cli.write_table(records, "json", jpath)
    assert json.loads(jpath.read_text()) == records


def test_full_precision_formatting():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(3) == "3"
    assert cli.fmt(True) == "true"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "lindrad.cli", *args], capture_output=True, text=True
    )


def test_cli_trajectory_schema(tmp_path):
    out = tmp_path / "run"
    r = run_cli("trajectory", "--model", "lorentz", "--dt", "50", "--steps", "10", "--out", str(out), "--quiet")
    assert r.returncode == 0, r.stderr
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,x1,x2,x3,pi1,pi2,pi3,gamma"
    report = json.loads((out / "report.json").read_text())
    assert report["scenario"] == "trajectory"


def test_cli_usage_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[numerics]\ndt = 1\ndt = 2\n")
    r = run_cli("trajectory", "--config", str(bad))
    assert r.returncode == 2
    assert "duplicate key" in r.stderr


def test_cli_physics_failure_exit_code(tmp_path):
    cfg = tmp_path / "kin.cfg"
    cfg.write_text(
        "[numerics]\nmode = fp\ndt = 10.0\nsteps = 5\nfrozen = true\n"
        "grid_x = -2 2 41\ngrid_pi = -2 2 41\n[field]\nB0 = 0 0 0\n"
    )
    r = run_cli("kinetic", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert r.returncode == 1
    assert "CFL" in r.stderr


def test_cli_kinetic_determinism(tmp_path):
    cfg = tmp_path / "kin.cfg"
    cfg.write_text(
        "[constants]\nalpha = 3.0\n"
        "[field]\nB0 = 0 0 0\n"
        "[initial]\nsigma_x = 0.3 0 0\nsigma_pi = 0.2 0 0\n"
        "[numerics]\nmode = mc\ndt = 1e-3\nsteps = 40\nparticles = 2000\nseed = 31\n"
        "frozen = true\nfrozen_F = 0.6 0 0\nfrozen_v = 0.86 0 0\nfrozen_gamma = 2.0\n"
    )
    r1 = run_cli("kinetic", "--config", str(cfg), "--out", str(tmp_path / "a"), "--quiet")
    r2 = run_cli("kinetic", "--config", str(cfg), "--out", str(tmp_path / "b"), "--quiet")
    assert r1.returncode == 0, r1.stderr
    assert r2.returncode == 0
    a = (tmp_path / "a" / "mc_moments.csv").read_bytes()
    b = (tmp_path / "b" / "mc_moments.csv").read_bytes()
    assert a == b


def test_cli_estimate(tmp_path):
    r = run_cli("estimate", "--e-ratio", "1e-3", "--gamma", "10", "--dp", "1",
                "--out", str(tmp_path), "--quiet")
    assert r.returncode == 0
    doc = json.loads((tmp_path / "estimates.json").read_text())
    assert doc["Dq_over_Dc"] == pytest.approx(1.0)
    assert doc["RR_over_Diff"] == pytest.approx(0.1)


def test_cli_lindblad_demo_columns(tmp_path):
    r = run_cli("lindblad-demo", "--p", "0 0 0", "--sigma-plus", "0.05",
                "--dt", "0.5", "--steps", "20", "--out", str(tmp_path), "--quiet")
    assert r.returncode == 0, r.stderr
    header = (tmp_path / "lindblad.csv").read_text().splitlines()[0]
    assert header == "t,pop_pes,pop_nes,trace,min_eig,purity"


def test_run_validate_report_structure(tmp_path, monkeypatch):
    # wire-level contract: one report entry per registered acceptance check
    from lindrad import validate as v

    fakes = [
        lambda: v.CheckResult("alpha_check", 0.0, 1.0, True),
        lambda: v.CheckResult("beta_check", 2.0, 1.0, False),
    ]
    monkeypatch.setattr(v, "ALL_CHECKS", fakes)
    monkeypatch.setattr(cli, "_emit_validate_artifacts", lambda *a, **k: None)
    cfg = parse_config("[scenario]\nkind = validate\n")
    code = cli.run_scenario(cfg, out_dir=tmp_path, quiet=True)
    assert code == 1  # one failing check
    report = json.loads((tmp_path / "report.json").read_text())
    names = [c["name"] for c in report["checks"]]
    assert names == ["alpha_check", "beta_check"]
    assert report["checks"][1]["passed"] is False


def test_nonfinite_value_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("[numerics]\ndt = inf\n")
    assert "non-finite" in str(exc.value)
    with pytest.raises(ConfigError):
        parse_config("[field]\nB0 = 0 nan 0\n")


@pytest.mark.parametrize(
    "text",
    [
        "[scenario]\nkind = constants\n",
        "[scenario]\nkind = estimate\n",
        MINIMAL_TRAJECTORY,
        "[scenario]\nkind = wigner-demo\n[numerics]\nx_span = -10 10 128\n",
    ],
)
def test_parse_implies_runnable(text, tmp_path):
    # anything parse_config accepts must run without usage errors
    cfg = parse_config(text)
    code = cli.run_scenario(cfg, out_dir=tmp_path, quiet=True)
    assert code in (0, 1)


def test_partial_outputs_removed_on_failure(tmp_path):
    keeper = tmp_path / "keep.txt"
    keeper.write_text("precious")
    cfg = parse_config(
        "[scenario]\nkind = kinetic\n"
        "[numerics]\nmode = fp\ndt = 10.0\nsteps = 5\nfrozen = true\n"
        "grid_x = -2 2 41\ngrid_pi = -2 2 41\n"
        "[field]\nB0 = 0 0 0\n"
    )
    from lindrad.errors import StepSizeError

    with pytest.raises(StepSizeError):
        cli.run_scenario(cfg, out_dir=tmp_path, quiet=True)
    assert keeper.read_text() == "precious"
    leftovers = [p for p in tmp_path.rglob("*") if p != keeper]
    assert leftovers == []
