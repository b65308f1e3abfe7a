"""Annulus barrier construction: a numerically computed subsolution pair for
the n-dimensional radial problem, built from a small-amplitude interval
(one-phase) run and an exponential radial envelope, plus the verification
machinery that checks the subsolution inequalities on the sampled grid.

Construction (radii 0 < d1 < d3 < d2, window [t0, T0] with T0 < (d2/d3)^2 t0):

* sigma = 1 + (n - 1)/d1 dominates the radial drift of the Laplacian on
  [d1, d2]; u_star = exp(-sigma (d2 - d1)) U0 absorbs the envelope at d1.
* iota_star is placed inside (d3/sqrt(t0), d2/sqrt(T0)), so the free
  boundary r = d1 + iota_star sqrt(t) of the comparison interval problem
  covers d3 throughout [t0, T0] without touching d2.
* delta rescales the v-level so the interval problem with data
  (u_star, delta V0) has exactly that similarity slope.
* The interval run is the scaled (m = 1) problem on (d1, d2) driven through
  a half-line stage: inflow u_star at 0 on (0, d2), trace at d1 replayed as
  Dirichlet data. u_bar = exp(sigma (d2 - r)) u, v_bar = v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import (BoundarySpec, DirichletConst, DirichletSeries, Field,
                   Grid1D, laplacian_tridiag)
from .selfsim import gauss_quarter_integral, solve_iota
from .solver import ProblemSpec, Trajectory, scaled_run, v_field

__all__ = [
    "AnnulusBarrierSpec",
    "choose_iota_star",
    "interval_problem",
    "SpaceTimeField",
    "build_annulus_subsolution",
    "reaction_inequality_margin",
    "ReactionMargin",
    "BarrierReport",
    "verify_subsolution",
    "annulus_barrier_experiment",
]


@dataclass(frozen=True)
class AnnulusBarrierSpec:
    """Geometry and data for the annulus barrier experiment."""

    d1: float
    d3: float
    d2: float
    dim: int
    u0_level: float   # inflow level U0 at r = d1
    v0_level: float   # initial v level V0 on (d1, d2)
    t0: float
    T0: float
    m: float
    k: float

    def __post_init__(self):
        if not (0.0 < self.d1 < self.d3 < self.d2):
            raise ValueError(f"need 0 < d1 < d3 < d2, got "
                             f"{self.d1}, {self.d3}, {self.d2}")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.u0_level <= 0.0 or self.v0_level <= 0.0:
            raise ValueError("u0_level and v0_level must be positive")
        if not (0.0 < self.t0 < self.T0):
            raise ValueError("need 0 < t0 < T0")
        if self.T0 * self.d3 ** 2 >= self.t0 * self.d2 ** 2:
            raise ValueError(
                "need T0 < (d2/d3)^2 t0 so one slope covers the whole window")
        if self.m < 1.0:
            raise ValueError("m must be >= 1")
        if self.k <= 0.0:
            raise ValueError("k must be positive")

    @property
    def sigma(self) -> float:
        return 1.0 + (self.dim - 1) / self.d1

    @property
    def u_star(self) -> float:
        return math.exp(-self.sigma * (self.d2 - self.d1)) * self.u0_level


def choose_iota_star(spec: AnnulusBarrierSpec) -> tuple[float, float]:
    """Similarity slope inside the admissible window and the v-scale delta.

    The window (d3/sqrt(t0), d2/sqrt(T0)) is nonempty by the spec invariant;
    the geometric mean keeps a symmetric multiplicative margin to both ends.
    The slope of the interval problem with data (u_star, delta V0) equals
    iota exactly when 2 u_star / (delta V0) = iota e^{iota^2/4} F(iota) with
    F the Gaussian quarter-integral, which inverts in closed form for delta.
    """
    lo = spec.d3 / math.sqrt(spec.t0)
    hi = spec.d2 / math.sqrt(spec.T0)
    iota_star = math.sqrt(lo * hi)
    g = iota_star * math.exp(iota_star ** 2 / 4.0) \
        * gauss_quarter_integral(iota_star)
    delta = 2.0 * spec.u_star / (spec.v0_level * g)
    # cross-check against the root solve on the rescaled data
    check = solve_iota(spec.u_star, delta * spec.v0_level)
    if abs(check - iota_star) > 1e-9 * iota_star:
        raise RuntimeError(
            f"delta inversion mismatch: {check} vs {iota_star}")
    return iota_star, delta


def interval_problem(spec: AnnulusBarrierSpec, n_cells: int, dt: float,
                     sample_stride: int = 1,
                     backend: str | None = None) -> Trajectory:
    """Scaled one-phase run on (d1, d2) whose inflow at d1 is the trace of a
    half-line run on (0, d2) with constant inflow u_star.

    Staging through the half-line problem gives Dirichlet data at d1 that is
    already a solution trace (continuous, compatible with u(d1, 0) = 0), so
    the interval run has no artificial corner layer at the inflow.
    Both stages share the spatial resolution h = (d2 - d1)/n_cells.
    """
    _, delta = choose_iota_star(spec)
    h = (spec.d2 - spec.d1) / n_cells
    n_cells_a = round(spec.d2 / h)
    if abs(n_cells_a * h - spec.d2) > 1e-9 * spec.d2:
        raise ValueError("d1 and d2 must be commensurate with the grid "
                         f"spacing (d2/h = {spec.d2 / h})")
    grid_a = Grid1D(0.0, spec.d2, n_cells_a)
    bc_a = BoundarySpec(DirichletConst(spec.u_star), DirichletConst(0.0))
    prob_a = ProblemSpec(grid_a, bc_a, Field.zeros(grid_a),
                         Field.full(grid_a, spec.v0_level), m=1.0,
                         k=spec.k, T=spec.T0, dt=dt)
    traj_a = scaled_run(prob_a, delta, sample_stride=sample_stride,
                        backend=backend)
    trace_idx = round(spec.d1 / h)
    trace = np.array([s.u.values[trace_idx] for s in traj_a.states])

    grid_b = Grid1D(spec.d1, spec.d2, n_cells)
    bc_b = BoundarySpec(DirichletSeries(traj_a.times, trace),
                        DirichletConst(0.0))
    prob_b = ProblemSpec(grid_b, bc_b, Field.zeros(grid_b),
                         Field.full(grid_b, spec.v0_level), m=1.0,
                         k=spec.k, T=spec.T0, dt=dt)
    return scaled_run(prob_b, delta, sample_stride=sample_stride,
                      backend=backend)


@dataclass(frozen=True)
class SpaceTimeField:
    """Sampled space-time values: values[j, i] at (times[j], grid.nodes[i])."""

    grid: Grid1D
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.times.size, self.grid.n_nodes):
            raise ValueError("values must have shape (n_times, n_nodes)")


def build_annulus_subsolution(spec: AnnulusBarrierSpec, traj: Trajectory
                              ) -> tuple[SpaceTimeField, SpaceTimeField]:
    """Assemble (u_bar, v_bar) = (e^{sigma (d2 - r)} u, v) from the interval
    trajectory on (d1, d2)."""
    grid = traj.spec.grid
    if abs(grid.x_min - spec.d1) > 1e-12 or abs(grid.x_max - spec.d2) > 1e-12:
        raise ValueError("trajectory grid does not match (d1, d2)")
    envelope = np.exp(spec.sigma * (spec.d2 - grid.nodes))
    times = traj.times
    u_bar = np.stack([s.u.values * envelope for s in traj.states])
    v_bar = np.stack([v_field(s, traj.spec).values for s in traj.states])
    return (SpaceTimeField(grid, times, u_bar),
            SpaceTimeField(grid, times, v_bar))


@dataclass(frozen=True)
class ReactionMargin:
    """max over sampled (x, t) of k u^m v - lambda1 k u v - lambda2 u."""

    value: float
    t: float
    x: float


def reaction_inequality_margin(traj: Trajectory, lambda1: float,
                               lambda2: float, m: float) -> ReactionMargin:
    """Max over interior sampled (x, t) of k u^m v - lambda1 k u v
    - lambda2 u; nonpositive means the absorption-domination inequality
    holds everywhere sampled.

    Boundary nodes are excluded: they carry prescribed Dirichlet data, not
    scheme solutions, and the inequality is an open-interval statement.
    m is the exponent of the target problem (the trajectory itself may be a
    scaled m = 1 run); k is taken from the trajectory.
    """
    k = traj.spec.k
    nodes = traj.spec.grid.nodes
    best = -math.inf
    best_t = best_x = 0.0
    for state in traj.states:
        u = np.maximum(state.u.values[1:-1], 0.0)
        v = v_field(state, traj.spec).values[1:-1]
        with np.errstate(under="ignore"):
            margin = k * u ** m * v - lambda1 * k * u * v - lambda2 * u
        i = int(np.argmax(margin))
        if margin[i] > best:
            best = float(margin[i])
            best_t, best_x = float(state.t), float(nodes[1 + i])
    return ReactionMargin(best, best_t, best_x)


@dataclass(frozen=True)
class BarrierReport:
    """Verification summary for the assembled subsolution pair."""

    spec: AnnulusBarrierSpec
    iota_star: float
    delta: float
    sigma: float
    u_star: float
    disc_budget: float      # h^2 + sample dt: admissible defect scale
    sub_u_worst: float      # max over interior samples of du/dt - lap u_bar
    sub_u_at: tuple         # (t, r) attaining it
    sub_v_worst: float      # max of -(dv/dt) - k u_bar v_bar ... see below
    sub_v_at: tuple
    rho_hat: float          # min of u_bar on [d1, d3] x [t0, T0]
    reaction: ReactionMargin | None
    n_cells: int
    sample_dt: float

    def to_csv(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "barrier_report.csv"
        rows = [
            ("d1", self.spec.d1), ("d3", self.spec.d3), ("d2", self.spec.d2),
            ("dim", float(self.spec.dim)),
            ("u0_level", self.spec.u0_level),
            ("v0_level", self.spec.v0_level),
            ("t0", self.spec.t0), ("T0", self.spec.T0),
            ("m", self.spec.m), ("k", self.spec.k),
            ("iota_star", self.iota_star), ("delta", self.delta),
            ("sigma", self.sigma), ("u_star", self.u_star),
            ("disc_budget", self.disc_budget),
            ("sub_u_worst", self.sub_u_worst),
            ("sub_u_t", self.sub_u_at[0]), ("sub_u_r", self.sub_u_at[1]),
            ("sub_v_worst", self.sub_v_worst),
            ("sub_v_t", self.sub_v_at[0]), ("sub_v_r", self.sub_v_at[1]),
            ("rho_hat", self.rho_hat),
            ("n_cells", float(self.n_cells)),
            ("sample_dt", self.sample_dt),
        ]
        if self.reaction is not None:
            rows += [("reaction_margin", self.reaction.value),
                     ("reaction_t", self.reaction.t),
                     ("reaction_x", self.reaction.x)]
        from .lab import _write_table
        _write_table(path, ["quantity", "value"], rows)
        return [path]


def verify_subsolution(spec: AnnulusBarrierSpec, u_bar: SpaceTimeField,
                       v_bar: SpaceTimeField) -> tuple[float, tuple, float, tuple, float]:
    """Check the subsolution differential inequalities on the sampled grid.

    At interior nodes and interior sample times (centered differences in t,
    the dim-n radial second-difference in r):

      defect_u = du_bar/dt - lap_n u_bar + k u_bar^m v_bar   (want <= 0)
      defect_v = -dv_bar/dt - k u_bar v_bar                  (want <= 0)

    The v inequality holds with slack: -dv/dt = k u v <= k u_bar v_bar since
    u_bar = envelope * u with envelope >= 1. The u inequality is the
    large-k statement; positive defects are reported signed so callers can
    compare them against the discretization budget and across k.

    Returns (worst_u, (t, r), worst_v, (t, r), rho_hat).
    """
    grid = u_bar.grid
    times = u_bar.times
    if times.size < 3:
        raise ValueError("need at least three samples for centered d/dt")
    bc = BoundarySpec(DirichletConst(0.0), DirichletConst(0.0))
    lap = laplacian_tridiag(
        Grid1D(grid.x_min, grid.x_max, grid.n_cells, "radial", spec.dim), bc)
    k = spec.k

    worst_u, worst_v = -math.inf, -math.inf
    at_u = at_v = (0.0, 0.0)
    nodes = grid.nodes
    for j in range(1, times.size - 1):
        dt2 = times[j + 1] - times[j - 1]
        du_dt = (u_bar.values[j + 1] - u_bar.values[j - 1]) / dt2
        dv_dt = (v_bar.values[j + 1] - v_bar.values[j - 1]) / dt2
        lap_u = lap.apply(u_bar.values[j])
        with np.errstate(under="ignore"):
            reaction = k * u_bar.values[j] ** spec.m * v_bar.values[j]
        def_u = du_dt - lap_u + reaction
        def_v = -dv_dt - k * u_bar.values[j] * v_bar.values[j]
        iu = 1 + int(np.argmax(def_u[1:-1]))
        iv = 1 + int(np.argmax(def_v[1:-1]))
        if def_u[iu] > worst_u:
            worst_u, at_u = float(def_u[iu]), (float(times[j]), float(nodes[iu]))
        if def_v[iv] > worst_v:
            worst_v, at_v = float(def_v[iv]), (float(times[j]), float(nodes[iv]))

    sel_t = (times >= spec.t0 - 1e-12) & (times <= spec.T0 + 1e-12)
    sel_x = (nodes >= spec.d1 - 1e-12) & (nodes <= spec.d3 + 1e-12)
    if not sel_t.any() or not sel_x.any():
        raise ValueError("no samples inside [d1, d3] x [t0, T0]")
    rho_hat = float(np.min(u_bar.values[np.ix_(sel_t, sel_x)]))
    return worst_u, at_u, worst_v, at_v, rho_hat


def annulus_barrier_experiment(spec: AnnulusBarrierSpec, n_cells: int,
                               dt: float | None = None,
                               sample_dt: float | None = None,
                               lambda1: float | None = None,
                               lambda2: float | None = None,
                               backend: str | None = None) -> BarrierReport:
    """Full pipeline: choose the slope, run the staged interval problem,
    assemble the envelope pair, verify the inequalities, and (optionally)
    measure the reaction-domination margin for (lambda1, lambda2)."""
    h = (spec.d2 - spec.d1) / n_cells
    if dt is None:
        dt = h * h
    if sample_dt is None:
        sample_dt = max(dt, 5e-4)
    stride = max(1, round(sample_dt / dt))
    traj = interval_problem(spec, n_cells, dt, stride, backend)
    iota_star, delta = choose_iota_star(spec)
    u_bar, v_bar = build_annulus_subsolution(spec, traj)
    worst_u, at_u, worst_v, at_v, rho_hat = verify_subsolution(spec, u_bar,
                                                               v_bar)
    reaction = None
    if lambda1 is not None or lambda2 is not None:
        reaction = reaction_inequality_margin(traj, lambda1 or 0.0,
                                              lambda2 or 0.0, spec.m)
    actual_sample_dt = float(np.median(np.diff(traj.times)))
    return BarrierReport(spec, iota_star, delta, spec.sigma, spec.u_star,
                         h * h + actual_sample_dt, worst_u, at_u, worst_v,
                         at_v, rho_hat, reaction, n_cells, actual_sample_dt)
