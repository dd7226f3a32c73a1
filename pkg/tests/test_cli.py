import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from ringdft import cli
from ringdft.config import ConfigParseError, parse_config
from ringdft.errors import ConfigurationError

SMALL_STATIC = """
mode = "static"
[grid]
n_points = 256
length = 16.0
[constants]
beta = 1.0
[potential.external]
kind = "harmonic"
[scf]
route = "spectral"
occupancy = "boltzmann"
"""

HARTREE_STATIC = """
mode = "static"
[grid]
n_points = 96
length = 12.0
[constants]
n_particles = 2
[potential.external]
kind = "softened_coulomb"
charge = 1.0
[potential.hartree]
coupling = 0.5
[scf]
occupancy = "zero_T"
n_eigs = 8
max_iterations = 2
residual_tolerance = 1e-12
fail_on_nonconvergence = true
"""


def _write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def _main(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_defaults():
    spec = parse_config("")
    assert spec.mode == "static"
    assert spec.grid.n_points == 256
    assert spec.grid.boundary == "dirichlet"
    assert spec.grid.origin == -10.0
    assert spec.constants.beta == 1.0
    assert spec.scf.route == "spectral"
    assert spec.betas == (0.5, 1.0, 2.0, 4.0)


def test_unknown_key_is_named():
    with pytest.raises(ConfigParseError) as info:
        parse_config("[constants]\nbetaa = 1.0\n")
    assert info.value.key == "constants.betaa"
    assert "betaa" in str(info.value)


def test_negative_beta_is_named():
    with pytest.raises(ConfigurationError) as info:
        parse_config("[constants]\nbeta = -1.0\n")
    assert info.value.key == "constants.beta"
    assert "beta" in str(info.value)


def test_malformed_toml_reports_position():
    with pytest.raises(ConfigParseError) as info:
        parse_config("[grid\nn_points = 3\n")
    assert "line 1" in str(info.value)


@pytest.mark.parametrize("text, key", [
    ("[dynamics]\ndt = 0.0\n", "dynamics.dt"),
    ("[grid]\nn_points = 2\n", "grid.n_points"),
    ("[scf]\nroute = 'diffusion'\noccupancy = 'zero_T'\n", "scf.occupancy"),
    ("mode = 'dynamics'\n[scf]\nroute = 'diffusion'\n", "scf.route"),
    ("mode = 'sideways'\n", "mode"),
    ("[classical_limit]\nhbar_values = [0.5, 1.0]\n", "classical_limit.hbar_values"),
    ("[potential.external]\nkind = 'box_well'\ndepth = 1.0\n", "potential.external.width"),
    ("[potential.external]\nkind = 'harmonic'\ndepth = 1.0\n", "potential.external.depth"),
])
def test_invalid_values(text, key):
    with pytest.raises(ConfigurationError) as info:
        parse_config(text)
    assert info.value.key == key


def test_config_error_exit_code_and_no_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "mode = 'dynamics'\n[dynamics]\ndt = 0\n")
    out = tmp_path / "out"
    code, io = _main(capsys, "run", cfg, "--out", out)
    assert code == cli.EXIT_CONFIG
    assert "key=dynamics.dt" in io.err
    assert not out.exists()


def test_missing_config_file(tmp_path, capsys):
    code, io = _main(capsys, "run", tmp_path / "nope.toml")
    assert code == cli.EXIT_CONFIG


def test_static_run_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    code, _ = _main(capsys, "run", _write(tmp_path, SMALL_STATIC), "--out", out)
    assert code == cli.EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["density.csv", "field.csv", "report.txt", "spectrum.csv"]
    assert (out / "density.csv").read_text().splitlines()[0] == "r,density"
    assert (out / "field.csv").read_text().splitlines()[0] == "r,field"
    assert (out / "spectrum.csv").read_text().splitlines()[0] == "index,energy,occupation"
    density = np.loadtxt(out / "density.csv", delimiter=",", skiprows=1)
    assert density.shape == (256, 2)
    dr = 16.0 / 257
    assert dr * density[:, 1].sum() == pytest.approx(1.0, rel=1e-12)
    report = (out / "report.txt").read_text()
    assert "converged: True" in report
    line = next(ln for ln in report.splitlines() if ln.startswith("free energy"))
    assert float(line.split(":")[-1]) == pytest.approx(np.log(2 * np.sinh(0.5)), abs=1e-3)


def test_runs_are_byte_identical(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL_STATIC)
    for name in ("a", "b"):
        assert _main(capsys, "run", cfg, "--out", tmp_path / name)[0] == cli.EXIT_OK
    for f in ("density.csv", "field.csv", "spectrum.csv", "report.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_nonconvergence_exit_code_removes_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    code, io = _main(capsys, "run", _write(tmp_path, HARTREE_STATIC), "--out", out)
    assert code == cli.EXIT_NONCONVERGED
    assert "kind=NonConvergenceError" in io.err
    assert not out.exists()


def test_nonconvergence_reported_without_flag(tmp_path, capsys):
    out = tmp_path / "out"
    text = HARTREE_STATIC.replace("fail_on_nonconvergence = true", "fail_on_nonconvergence = false")
    code, _ = _main(capsys, "run", _write(tmp_path, text), "--out", out)
    assert code == cli.EXIT_OK
    assert "converged: False" in (out / "report.txt").read_text()


def test_numerical_failure_exit_code(tmp_path, capsys):
    text = """
[grid]
n_points = 64
length = 4.0
[potential.external]
kind = "box_well"
depth = 800.0
width = 2.0
[scf]
route = "diffusion"
beta_steps = 1000
"""
    existing = tmp_path / "out"
    existing.mkdir()
    (existing / "keep.txt").write_text("unrelated")
    code, io = _main(capsys, "run", _write(tmp_path, text), "--out", existing)
    assert code == cli.EXIT_NUMERICAL
    assert "kind=DivergenceError" in io.err
    assert sorted(p.name for p in existing.iterdir()) == ["keep.txt"]


def test_beta_sweep(tmp_path, capsys):
    text = SMALL_STATIC.replace('mode = "static"', 'mode = "beta_sweep"') + "[beta_sweep]\nbetas = [1.0, 2.0]\n"
    out = tmp_path / "out"
    assert _main(capsys, "run", _write(tmp_path, text), "--out", out)[0] == cli.EXIT_OK
    lines = (out / "q_trace.csv").read_text().splitlines()
    assert lines[0] == "beta,Q,F"
    data = np.loadtxt(out / "q_trace.csv", delimiter=",", skiprows=1)
    exact_q = 1.0 / (2 * np.sinh(0.5 * data[:, 0]))
    np.testing.assert_allclose(data[:, 1], exact_q, atol=2e-3)


def test_classical_limit(tmp_path, capsys):
    text = """
mode = "classical_limit"
[grid]
n_points = 128
length = 12.0
[potential.external]
kind = "harmonic"
[scf]
route = "diffusion"
beta_steps = 500
[classical_limit]
hbar_values = [1.0, 0.5]
"""
    out = tmp_path / "out"
    assert _main(capsys, "run", _write(tmp_path, text), "--out", out)[0] == cli.EXIT_OK
    data = np.loadtxt(out / "cylinder.csv", delimiter=",", skiprows=1)
    assert (out / "cylinder.csv").read_text().splitlines()[0] == "hbar,l1_distance"
    assert data[1, 1] < data[0, 1]


def test_dynamics(tmp_path, capsys):
    text = """
mode = "dynamics"
[grid]
n_points = 128
length = 12.0
[potential.external]
kind = "harmonic"
[scf]
occupancy = "zero_T"
n_eigs = 4
[dynamics]
dt = 0.01
n_steps = 20
record_every = 10
displacement = 0.5
"""
    out = tmp_path / "out"
    assert _main(capsys, "run", _write(tmp_path, text), "--out", out)[0] == cli.EXIT_OK
    assert (out / "trajectory.csv").read_text().splitlines()[0] == "t,norm_defect,energy,dipole"
    traj = np.loadtxt(out / "trajectory.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(traj[:, 0], [0.0, 0.1, 0.2])
    assert np.all(traj[:, 1] < 1e-10)
    assert traj[0, 3] == pytest.approx(0.5, abs=1e-2)
    snaps = np.loadtxt(out / "density_snapshots.csv", delimiter=",", skiprows=1)
    assert snaps.shape == (3 * 128, 3)


def test_validate_subcommand(capsys):
    code, io = _main(capsys, "validate", "--check", "oracle_independence")
    assert code == cli.EXIT_OK
    assert io.out.startswith("[PASS] oracle independence")


def test_validate_unknown_check(capsys):
    code, io = _main(capsys, "validate", "--check", "nothing")
    assert code == cli.EXIT_CONFIG
    assert "key=nothing" in io.err


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, "[constants]\nbetaa = 1\n")
    proc = subprocess.run([sys.executable, "-m", "ringdft", "run", str(cfg)], capture_output=True, text=True,
                          cwd=tmp_path)
    assert proc.returncode == cli.EXIT_CONFIG
    assert proc.stderr.startswith("ringdft: error code=1 kind=ConfigParseError key=constants.betaa")


def test_demo_config_parses():
    root = Path(__file__).resolve().parents[1]
    for cfg in sorted((root / "demos" / "configs").glob("*.toml")):
        parse_config(cfg.read_text())
