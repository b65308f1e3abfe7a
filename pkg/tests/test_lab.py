"""Experiment harness: sweeps, the free-boundary experiment, CSV reports."""
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from reactlab import (BoundarySpec, DirichletConst, Field, Grid1D,
                      NeumannZero, ProblemSpec, SweepSpec, bump_profile,
                      emit_csv, heat_run, HeatSpec, interface_position,
                      mass, read_csv, run, segregated_bump_data,
                      stefan_experiment, sweep, v_field)

DD = BoundarySpec(DirichletConst(0.0), DirichletConst(0.0))
NN = BoundarySpec(NeumannZero(), NeumannZero())


# --------------------------------------------------------------- initial data

def test_bump_profile_shape():
    x = np.linspace(0.0, 1.0, 201)
    b = bump_profile(x, 4.0, 0.3, 0.2)
    assert b[x <= 0.1].tolist() == [0.0] * np.sum(x <= 0.1)
    assert b[x >= 0.5].tolist() == [0.0] * np.sum(x >= 0.5)
    inside = (x > 0.105) & (x < 0.495)
    assert np.all(b[inside] > 0.0)
    assert b[60] == 4.0  # x = 0.3: the peak attains exactly amp
    assert np.max(b) == 4.0


def test_segregated_bump_data_supports():
    grid = Grid1D(0.0, 1.0, 128)
    u0, v0 = segregated_bump_data(grid, 8.0, 0.3, 0.2, 0.05)
    assert np.all(u0.values * v0.values == 0.0)
    # no node lands exactly on the center at this resolution
    assert 0.99 * 8.0 < np.max(u0.values) <= 8.0
    h = grid.spacing
    on = grid.nodes >= 0.5 + h - 1e-12
    np.testing.assert_array_equal(v0.values[on], 0.05)
    np.testing.assert_array_equal(v0.values[~on], 0.0)


def test_segregated_bump_data_rejects_overlap():
    grid = Grid1D(0.0, 1.0, 32)
    with pytest.raises(ValueError):
        segregated_bump_data(grid, 8.0, 0.3, 0.2, 0.05, gap_cells=-3)


# --------------------------------------------------------- interface position

def test_interface_position_interpolates():
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    v = np.array([0.001, 0.01, 0.04, 0.05, 0.05])
    # level 0.025: v < level at nodes 0, 1; leftmost node with v >= level is
    # node 2, crossing between nodes 1 and 2 at 0.01 + (x-0.25)/0.25*0.03
    pos = interface_position(v, x, 0.025)
    assert pos == pytest.approx(0.25 + 0.25 * (0.025 - 0.01) / 0.03, rel=1e-12)


def test_interface_position_edge_cases():
    x = np.array([0.0, 0.5, 1.0])
    assert interface_position(np.array([0.9, 0.9, 0.9]), x, 0.5) == 0.0
    assert interface_position(np.array([0.1, 0.2, 0.3]), x, 0.5) == 1.0
    with pytest.raises(ValueError):
        interface_position(np.array([0.1, 0.2, 0.3]), x, 0.0)


# ------------------------------------------------------------------ SweepSpec

def tiny_base(bc=DD, n_cells=64, T=0.04, dt=1e-4):
    grid = Grid1D(0.0, 1.0, n_cells)
    u0, v0 = segregated_bump_data(grid, 8.0, 0.3, 0.2, 0.05)
    return ProblemSpec(grid, bc, u0, v0, m=2.0, k=100.0, T=T, dt=dt)


def test_sweep_spec_validation():
    base = tiny_base()
    ok = dict(base=base, k_values=(10.0, 100.0), compact=(0.1, 0.9),
              tau=0.004, sample_stride=4)
    SweepSpec(**ok)
    bad_cases = [
        dict(k_values=(100.0, 10.0)),          # not ascending
        dict(k_values=(100.0,)),               # fewer than two rungs
        dict(k_values=(0.0, 10.0)),            # nonpositive rate
        dict(compact=(-0.1, 0.9)),             # outside the domain
        dict(compact=(0.9, 0.1)),              # reversed
        dict(tau=0.05),                        # tau >= T
        dict(tau=0.0),                         # tau <= 0
        dict(tau=0.0041),                      # not a sample time
        dict(probe_x=0.95),                    # probe outside compact
    ]
    for kw in bad_cases:
        with pytest.raises(ValueError):
            SweepSpec(**{**ok, **kw})


def test_sweep_metrics_and_invariants():
    spec = SweepSpec(tiny_base(), (100.0, 1000.0), (0.1, 0.9), 0.004,
                     sample_stride=4)
    rep = sweep(spec, threads=2)
    assert [r.k for r in rep.rows] == [100.0, 1000.0]
    for row in rep.rows:
        assert math.isfinite(row.sup_u_err) and row.sup_u_err >= 0.0
        assert 0.0 <= row.sup_v_compact <= 0.05 * (1.0 + 1e-12)
        assert row.probe_decay > 0.0
        assert row.mass_final > 0.0
    # v is consumed, never created: sup over the compact set shrinks with k
    assert rep.rows[1].sup_v_compact <= rep.rows[0].sup_v_compact + 1e-12
    # interface curves: one per k, same length as the sample times
    for k, curve in rep.interface_curves.items():
        assert curve.shape == rep.interface_times.shape
    assert rep.decay_slope < 0.0
    assert rep.probe_z_heat > 0.0


def test_sweep_u_dominated_by_heat_reference():
    # u_k <= u_infinity + 1e-10: the reaction only removes u.
    spec = SweepSpec(tiny_base(), (100.0, 1000.0), (0.1, 0.9), 0.004,
                     sample_stride=4)
    heat = heat_run(HeatSpec(spec.base.grid, spec.base.bc, spec.base.u0,
                             spec.base.T, spec.base.dt), sample_stride=4)
    for k in spec.k_values:
        traj = run(replace(spec.base, k=k), sample_stride=4)
        for s_k, s_h in zip(traj.states, heat.states):
            assert np.max(s_k.u.values - s_h.u.values) <= 1e-10


def test_sweep_neumann_mass_accounting():
    spec = SweepSpec(tiny_base(bc=NN), (100.0, 1000.0), (0.0, 1.0), 0.004,
                     sample_stride=4)
    rep = sweep(spec)
    m0 = mass(spec.base.u0)
    for row in rep.rows:
        # deficit is defined as initial minus final mass; with Neumann walls
        # it is exactly the reaction-consumed mass
        assert row.mass_final + row.mass_deficit == pytest.approx(m0,
                                                                  rel=1e-12)
        assert row.mass_deficit > 0.0
    # consumption shrinks as the reaction sharpens (less overlap in time)
    assert rep.rows[1].mass_deficit < rep.rows[0].mass_deficit


def test_first_k_below_cubic():
    spec = SweepSpec(tiny_base(), (100.0, 1000.0), (0.1, 0.9), 0.004,
                     sample_stride=4)
    rep = sweep(spec)
    first = rep.first_k_below_cubic()
    expect = None
    for row in rep.rows:
        if row.sup_v_compact < row.k ** -3:
            expect = row.k
            break
    assert first == expect


# ----------------------------------------------------------- stefan experiment

@pytest.fixture(scope="module")
def stefan_small():
    return stefan_experiment(1.0, 1.0, (1e2, 1e3), Grid1D(0.0, 1.0, 128),
                             T=0.2, threads=2)


def test_stefan_metrics_finite(stefan_small):
    rep = stefan_small
    assert rep.profile.iota == pytest.approx(1.2401252666271909, rel=1e-12)
    for row in rep.rows:
        assert math.isfinite(row.sup_u_err)
        assert math.isfinite(row.fit_exponent)
        assert row.fit_prefactor > 0.0
    assert rep.rows[1].sup_u_err < rep.rows[0].sup_u_err


def test_stefan_interface_monotone(stefan_small):
    for k, curve in stefan_small.interface_curves.items():
        assert np.all(np.diff(curve) >= -1e-12)


def test_stefan_warns_past_exit_time():
    # iota sqrt(t) hits the far wall at t = (width/iota)^2 ~ 0.650; a longer
    # horizon still runs but the metrics truncate to the contained window.
    with pytest.warns(UserWarning, match="exits the domain"):
        rep = stefan_experiment(1.0, 1.0, (1e2, 1e3), Grid1D(0.0, 1.0, 32),
                                T=1.0)
    for row in rep.rows:
        assert math.isfinite(row.sup_u_err)


# ------------------------------------------------------------------ CSV output

def test_emit_and_read_sweep_csv(tmp_path):
    spec = SweepSpec(tiny_base(), (100.0, 1000.0), (0.1, 0.9), 0.004,
                     sample_stride=4)
    rep = sweep(spec)
    emit_csv(rep, tmp_path)
    header, rows = read_csv(tmp_path / "sweep_metrics.csv")
    assert header[0] == "k"
    assert len(rows) == 2
    by_name = dict(zip(header, rows[0]))
    # 17-significant-digit round trip is exact for doubles
    assert by_name["k"] == rep.rows[0].k
    assert by_name["sup_u_err"] == rep.rows[0].sup_u_err
    assert by_name["sup_v_compact"] == rep.rows[0].sup_v_compact

    header_i, rows_i = read_csv(tmp_path / "sweep_interface.csv")
    assert header_i == ["k", "t", "x_star"]
    assert len(rows_i) == 2 * rep.interface_times.size

    # the summary file is key/value text, not a numeric table
    raw = (tmp_path / "sweep_summary.csv").read_text().splitlines()
    assert raw[0] == "quantity,value"
    keys = [line.split(",")[0] for line in raw[1:]]
    assert "tau" in keys and "decay_slope" in keys


def test_emit_and_read_stefan_csv(tmp_path, stefan_small):
    emit_csv(stefan_small, tmp_path)
    header, rows = read_csv(tmp_path / "stefan_metrics.csv")
    assert header[0] == "k"
    assert len(rows) == 2
    assert rows[0][header.index("fit_exponent")] == \
        stefan_small.rows[0].fit_exponent
    assert (tmp_path / "stefan_interface.csv").exists()
    assert (tmp_path / "stefan_summary.csv").exists()


def test_read_csv_round_trip_synthetic(tmp_path):
    from reactlab.lab import _write_table
    values = [math.pi, 1.0 / 3.0, 6.02214076e23, 1.1e-308, 0.0]
    path = tmp_path / "t.csv"
    _write_table(path, ["a", "b", "c", "d", "e"], [values])
    header, rows = read_csv(path)
    assert rows[0] == values  # exact: %.17g round-trips float64


def test_emit_csv_rejects_unknown_report(tmp_path):
    with pytest.raises(TypeError):
        emit_csv(object(), tmp_path)
