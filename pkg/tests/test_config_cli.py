"""Flat-config parsing, builders, and the command-line front end."""
import math

import numpy as np
import pytest

from reactlab import Grid1D, read_csv
from reactlab.cli import main
from reactlab.config import (ConfigError, build_barrier, build_field,
                             build_heat, build_problem, build_stefan_kwargs,
                             build_sweep, load_config, parse_config_text)
from reactlab.grid import DirichletConst, NeumannZero

IOTA_11 = 1.2401252666271909  # free-boundary constant for U0 = V0 = 1


# ------------------------------------------------------------------- parsing

def test_parse_basic():
    cfg = parse_config_text(
        "# run header\n"
        "\n"
        "m = 2.0   # exponent\n"
        "k=1e3\n"
        "u0 = bump 4.0 0.3 0.2\n")
    assert cfg == {"m": "2.0", "k": "1e3", "u0": "bump 4.0 0.3 0.2"}


@pytest.mark.parametrize("text", [
    "m = 1\nm = 2\n",        # duplicate key
    "just some words\n",     # no assignment
    "m =\n",                 # empty value
    " = 2.0\n",              # empty key
])
def test_parse_rejects(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("m = 2.0\nk = 10\n")
    assert load_config(path) == {"m": "2.0", "k": "10"}


# -------------------------------------------------------------------- fields

@pytest.fixture(scope="module")
def grid():
    return Grid1D(0.0, 1.0, 64)


def test_field_zero(grid):
    assert not build_field(grid, "zero", "u0").values.any()


def test_field_const(grid):
    np.testing.assert_array_equal(build_field(grid, "const 2.5", "u0").values,
                                  2.5)


def test_field_bump(grid):
    f = build_field(grid, "bump 4.0 0.5 0.25", "u0")
    assert f.values.max() == pytest.approx(4.0)
    assert f.values[grid.nodes < 0.25].max() == 0.0
    assert f.values[grid.nodes > 0.75].max() == 0.0


def test_field_sin_default_mode(grid):
    f = build_field(grid, "sin 2.0", "u0")
    np.testing.assert_allclose(f.values, 2.0 * np.sin(math.pi * grid.nodes),
                               atol=1e-15)


def test_field_sin_mode_count(grid):
    f = build_field(grid, "sin 1.0 3", "u0")
    np.testing.assert_allclose(f.values,
                               np.sin(3 * math.pi * grid.nodes), atol=1e-14)


def test_field_step_default_hi(grid):
    f = build_field(grid, "step 0.05 0.5", "v0")
    np.testing.assert_array_equal(
        f.values, np.where(grid.nodes >= 0.5, 0.05, 0.0))


def test_field_step_explicit(grid):
    f = build_field(grid, "step 1.0 0.25 0.75", "v0")
    inside = (grid.nodes >= 0.25) & (grid.nodes <= 0.75)
    np.testing.assert_array_equal(f.values, np.where(inside, 1.0, 0.0))


@pytest.mark.parametrize("spec", [
    "plateau 1.0",        # unknown kind
    "zero 1.0",           # arity
    "const",              # arity
    "bump 4.0 0.3",       # arity
    "sin 1.0 2.5",        # non-integral mode count
    "step one 0.5",       # not a number
])
def test_field_rejects(grid, spec):
    with pytest.raises(ConfigError):
        build_field(grid, spec, "u0")


# ------------------------------------------------------------------ builders

SIMULATE_TEXT = """\
x_min = 0.0
x_max = 1.0
n_cells = 32
m = 2.0
k = 10.0
T = 0.02
dt = 1e-3
sample_stride = 10
bc_left = dirichlet 0.0
u0 = bump 4.0 0.3 0.2
v0 = step 0.05 0.5 1.0
"""


def simulate_cfg():
    return parse_config_text(SIMULATE_TEXT)


def test_build_problem_round_trip():
    spec, stride = build_problem(simulate_cfg())
    assert (spec.m, spec.k, spec.T, spec.dt) == (2.0, 10.0, 0.02, 1e-3)
    assert spec.theta == 1.0 and stride == 10
    assert isinstance(spec.bc.left, DirichletConst)
    assert spec.bc.left.value == 0.0
    assert isinstance(spec.bc.right, NeumannZero)
    assert spec.grid.n_cells == 32
    assert spec.v0.values.max() == 0.05


def test_build_problem_rejects_unknown_key():
    cfg = simulate_cfg()
    cfg["n_cell"] = "32"  # typo must fail loudly
    with pytest.raises(ConfigError, match="n_cell"):
        build_problem(cfg)


def test_build_problem_missing_key():
    cfg = simulate_cfg()
    del cfg["m"]
    with pytest.raises(ConfigError, match="'m'"):
        build_problem(cfg)


def test_build_problem_bad_bc():
    cfg = simulate_cfg()
    cfg["bc_left"] = "robin 1.0"
    with pytest.raises(ConfigError, match="robin"):
        build_problem(cfg)


def test_build_heat_shares_simulate_file():
    # m, k, v0 are tolerated and ignored so one file drives both commands
    spec, stride = build_heat(simulate_cfg())
    assert (spec.T, spec.dt, spec.theta) == (0.02, 1e-3, 1.0)
    assert stride == 10
    prob = spec.to_problem()
    assert not prob.v0.values.any()


SWEEP_TEXT = SIMULATE_TEXT.replace("T = 0.02", "T = 0.03") + """\
k_values = 10 100
compact_a = 0.2
compact_b = 0.8
tau = 0.01
"""


def test_build_sweep():
    spec = build_sweep(parse_config_text(SWEEP_TEXT))
    assert spec.k_values == (10.0, 100.0)
    assert spec.compact == (0.2, 0.8)
    assert spec.tau == 0.01
    assert spec.base.k == 10.0  # defaulted to the first rung
    # optional probes resolve to their documented defaults
    assert spec.interface_level == 0.5 * spec.base.v0.values.max()
    assert spec.probe_x == 0.8
    assert spec.sample_stride == 10


def test_build_sweep_optional_probes():
    cfg = parse_config_text(SWEEP_TEXT + "interface_level = 0.02\n"
                                         "probe_x = 0.5\n")
    spec = build_sweep(cfg)
    assert spec.interface_level == 0.02
    assert spec.probe_x == 0.5


def test_build_sweep_requires_ladder():
    cfg = parse_config_text(SWEEP_TEXT)
    del cfg["k_values"]
    with pytest.raises(ConfigError, match="k_values"):
        build_sweep(cfg)


STEFAN_TEXT = """\
u0_level = 1.0
v0_level = 1.0
k_values = 100 1000
x_min = 0.0
x_max = 1.0
n_cells = 32
T = 0.1
"""


def test_build_stefan_kwargs():
    kwargs = build_stefan_kwargs(parse_config_text(STEFAN_TEXT))
    assert kwargs["u0_level"] == 1.0 and kwargs["v0_level"] == 1.0
    assert kwargs["k_values"] == (100.0, 1000.0)
    assert kwargs["grid"].n_cells == 32
    assert kwargs["T"] == 0.1 and kwargs["theta"] == 1.0
    assert "dt" not in kwargs


def test_build_stefan_optional_and_leftovers():
    kwargs = build_stefan_kwargs(
        parse_config_text(STEFAN_TEXT + "dt = 1e-3\nsample_stride = 5\n"))
    assert kwargs["dt"] == 1e-3 and kwargs["sample_stride"] == 5
    with pytest.raises(ConfigError, match="mystery"):
        build_stefan_kwargs(parse_config_text(STEFAN_TEXT + "mystery = 1\n"))


BARRIER_TEXT = """\
d1 = 1.0
d3 = 1.5
d2 = 2.0
dim = 2
u0_level = 1.0
v0_level = 1.0
t0 = 0.5
T0 = 0.8
m = 1.5
k = 1000.0
n_cells = 32
sample_dt = 0.01
lambda1 = 0.1
lambda2 = 0.1
"""


def test_build_barrier():
    spec, kwargs = build_barrier(parse_config_text(BARRIER_TEXT))
    assert (spec.d1, spec.d3, spec.d2, spec.dim) == (1.0, 1.5, 2.0, 2)
    assert spec.k == 1000.0
    assert kwargs == {"n_cells": 32, "sample_dt": 0.01,
                      "lambda1": 0.1, "lambda2": 0.1}


def test_build_barrier_lambda_pairing():
    cfg = parse_config_text(BARRIER_TEXT)
    del cfg["lambda2"]
    with pytest.raises(ConfigError, match="lambda"):
        build_barrier(cfg)


# ------------------------------------------------------------------- the CLI

@pytest.fixture()
def simulate_file(tmp_path):
    path = tmp_path / "simulate.cfg"
    path.write_text(SIMULATE_TEXT)
    return path


def test_cli_profile_stdout(capsys):
    assert main(["profile", "--u0", "1.0", "--v0", "1.0",
                 "--samples", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("iota = ")
    assert float(out[0].split("=")[1]) == pytest.approx(IOTA_11, rel=1e-12)
    assert out[1] == "eta,f"
    assert len(out) == 7  # iota line + header + 5 samples
    eta_last, f_last = (float(v) for v in out[-1].split(","))
    assert eta_last == pytest.approx(1.25 * IOTA_11, rel=1e-12)
    assert f_last == 0.0  # beyond the free boundary


def test_cli_profile_to_dir(tmp_path, capsys):
    out_dir = tmp_path / "prof"
    assert main(["profile", "--u0", "2.0", "--v0", "0.5",
                 "--out", str(out_dir)]) == 0
    assert capsys.readouterr().out.startswith("iota = ")
    header, rows = read_csv(out_dir / "profile.csv")
    assert header == ["eta", "f"]
    assert len(rows) == 201
    assert rows[0] == [0.0, 2.0]  # f(0) = U0


def test_cli_profile_bad_samples(capsys):
    assert main(["profile", "--u0", "1", "--v0", "1", "--samples", "1"]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_profile_bad_data(capsys):
    assert main(["profile", "--u0", "-1", "--v0", "1"]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_simulate(simulate_file, tmp_path):
    out_dir = tmp_path / "runs"
    assert main(["simulate", "--config", str(simulate_file),
                 "--out", str(out_dir)]) == 0
    header, rows = read_csv(out_dir / "simulate.csv")
    assert header == ["t", "x", "u", "v", "z"]
    arr = np.asarray(rows)
    assert set(np.unique(arr[:, 0])) == {0.0, 0.01, 0.02}
    first = arr[arr[:, 0] == 0.0]
    assert first[:, 2].max() == pytest.approx(4.0, rel=1e-2)  # initial bump
    assert np.all(first[:, 4] == 0.0)                          # z(0) = 0
    # v stays within its initial plateau and decays where u arrives
    assert arr[:, 3].max() <= 0.05 + 1e-15


def test_cli_simulate_stdout(simulate_file, capsys):
    assert main(["simulate", "--config", str(simulate_file)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,x,u,v,z"
    assert len(lines) == 1 + 3 * 33  # three samples, 33 nodes


def test_cli_heat_same_config(simulate_file, tmp_path):
    out_dir = tmp_path / "heat"
    assert main(["heat", "--config", str(simulate_file),
                 "--out", str(out_dir)]) == 0
    header, rows = read_csv(out_dir / "heat.csv")
    assert header == ["t", "x", "u"]
    assert len(rows) == 3 * 33


def test_cli_sweep(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(SWEEP_TEXT)
    out_dir = tmp_path / "sweep_out"
    assert main(["sweep", "--config", str(cfg), "--out", str(out_dir),
                 "--threads", "2"]) == 0
    out = capsys.readouterr().out
    assert "k = 10:" in out and "k = 100:" in out
    assert "decay slope" in out
    assert "smallest k with sup v < k^-3" in out
    header, rows = read_csv(out_dir / "sweep_metrics.csv")
    assert header[:3] == ["k", "sup_u_err", "sup_v_compact"]
    assert [r[0] for r in rows] == [10.0, 100.0]
    assert (out_dir / "sweep_interface.csv").exists()
    assert (out_dir / "sweep_summary.csv").exists()


def test_cli_stefan(tmp_path, capsys):
    cfg = tmp_path / "stefan.cfg"
    cfg.write_text(STEFAN_TEXT)
    out_dir = tmp_path / "stefan_out"
    assert main(["stefan", "--config", str(cfg), "--out", str(out_dir)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("iota = ")
    assert float(out.splitlines()[0].split("=")[1]) == pytest.approx(
        IOTA_11, rel=1e-12)
    header, rows = read_csv(out_dir / "stefan_metrics.csv")
    assert header == ["k", "sup_u_err", "interface_sup_err", "fit_exponent",
                      "fit_prefactor"]
    assert len(rows) == 2


def test_cli_verify_barrier(tmp_path, capsys):
    cfg = tmp_path / "barrier.cfg"
    cfg.write_text(BARRIER_TEXT)
    out_dir = tmp_path / "barrier_out"
    assert main(["verify-barrier", "--config", str(cfg),
                 "--out", str(out_dir)]) == 0
    out = capsys.readouterr().out
    assert "iota* = " in out and "rho_hat" in out and "reaction margin" in out
    assert (out_dir / "barrier_report.csv").exists()


def test_cli_missing_config(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(SIMULATE_TEXT + "mystery = 3\n")
    assert main(["simulate", "--config", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "mystery" in err


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == "0.1.0"


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
