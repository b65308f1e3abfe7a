"""Desk-scale experiments: k-ladder sweeps against the heat reference and
one-phase free-boundary (Stefan-type) experiments, with CSV emission.

Defaults follow the k-ladder {10^1 .. 10^5} with dt proportional to h^2 held
fixed across k: the semi-implicit reaction removes the dt ~ 1/k coupling, so
a fixed step isolates the k-limit from discretization drift.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
import warnings

import numpy as np

from .grid import BoundarySpec, DirichletConst, Field, Grid1D
from .reference import HeatSpec, heat_run, mass
from .selfsim import SelfSimilarProfile
from .solver import ProblemSpec, Trajectory, run, v_field

__all__ = [
    "DEFAULT_K_LADDER",
    "bump_profile",
    "segregated_bump_data",
    "interface_position",
    "SweepSpec",
    "SweepRow",
    "SweepReport",
    "sweep",
    "StefanRow",
    "StefanReport",
    "stefan_experiment",
    "emit_csv",
    "read_csv",
]

DEFAULT_K_LADDER = (1e1, 1e2, 1e3, 1e4, 1e5)

_TIME_MATCH_RTOL = 1e-9


def bump_profile(x, amp: float, center: float, halfwidth: float) -> np.ndarray:
    """Smooth compactly supported bump amp*exp(1 - 1/(1-y^2)), y=(x-c)/w.

    Vanishes with all derivatives at |y| = 1, so it satisfies both zero
    Dirichlet and zero Neumann data whenever its support avoids the
    boundary.
    """
    if amp < 0.0 or halfwidth <= 0.0:
        raise ValueError("bump needs amp >= 0 and halfwidth > 0")
    y = (np.asarray(x, dtype=np.float64) - center) / halfwidth
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    with np.errstate(under="ignore"):
        out[inside] = amp * np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
    return out


def segregated_bump_data(grid: Grid1D, u_amp: float, u_center: float,
                         u_halfwidth: float, v_level: float,
                         gap_cells: int = 1) -> tuple[Field, Field]:
    """Default segregated data: a smooth u-bump and a v-plateau to its right
    separated by gap_cells empty cells, so u0 v0 = 0 exactly on the grid."""
    x = grid.nodes
    u0 = Field(grid, bump_profile(x, u_amp, u_center, u_halfwidth))
    v_from = u_center + u_halfwidth + gap_cells * grid.spacing
    v0 = Field(grid, np.where(x >= v_from * (1.0 - 1e-12), v_level, 0.0))
    if np.any(u0.values * v0.values != 0.0):
        raise ValueError("bump and plateau overlap; widen the gap")
    return u0, v0


def interface_position(v_values: np.ndarray, x: np.ndarray, level: float) -> float:
    """Right edge of the depleted prefix: the crossing v = level between the
    last node of the depleted run and the first node with v >= level,
    linearly interpolated. Returns x[0] if nothing is depleted and x[-1] if
    everything is."""
    if level <= 0.0:
        raise ValueError("interface level must be positive")
    above = v_values >= level
    if above[0]:
        return float(x[0])
    if not above.any():
        return float(x[-1])
    i = int(np.argmax(above))
    v_lo, v_hi = v_values[i - 1], v_values[i]
    return float(x[i - 1] + (level - v_lo) / (v_hi - v_lo) * (x[i] - x[i - 1]))


def _sample_index(times: np.ndarray, t: float) -> int:
    i = int(np.argmin(np.abs(times - t)))
    if abs(times[i] - t) > _TIME_MATCH_RTOL * max(1.0, abs(t)):
        raise ValueError(f"t = {t} is not a sample time (nearest {times[i]})")
    return i


@dataclass(frozen=True)
class SweepSpec:
    """k-ladder sweep over the base problem (base.k is overridden)."""

    base: ProblemSpec
    k_values: tuple = DEFAULT_K_LADDER
    compact: tuple = (0.0, 0.0)       # closed subinterval for the v metric
    tau: float = 0.0                  # v metrics taken on [tau, T]
    interface_level: float | None = None  # default 0.5 * max(v0)
    probe_x: float | None = None          # default right end of compact
    sample_stride: int = 1

    def __post_init__(self):
        ks = tuple(float(k) for k in self.k_values)
        if len(ks) < 2 or any(k <= 0 for k in ks) or list(ks) != sorted(set(ks)):
            raise ValueError("k_values must be >= 2 distinct ascending positive reals")
        object.__setattr__(self, "k_values", ks)
        grid = self.base.grid
        a, b = self.compact
        if not (grid.x_min <= a < b <= grid.x_max):
            raise ValueError(f"compact subset [{a}, {b}] not inside the domain")
        if not (0.0 < self.tau < self.base.T):
            raise ValueError(f"tau must lie in (0, T), got {self.tau}")
        per_sample = self.base.dt * self.sample_stride
        if abs(self.tau / per_sample - round(self.tau / per_sample)) > 1e-6:
            raise ValueError(
                "tau must be a whole number of samples "
                f"(tau/(dt*stride) = {self.tau / per_sample})")
        if self.interface_level is None:
            object.__setattr__(self, "interface_level",
                               0.5 * float(np.max(self.base.v0.values)))
        if self.probe_x is None:
            object.__setattr__(self, "probe_x", float(b))
        if not (a <= self.probe_x <= b):
            raise ValueError("probe_x must lie in the compact subset")


@dataclass(frozen=True)
class SweepRow:
    k: float
    sup_u_err: float        # sup over all samples and nodes of |u_k - u_heat|
    sup_v_compact: float    # sup of v_k over compact x [tau, T]
    probe_v: float          # v_k(probe, tau)
    probe_decay: float      # -ln(probe_v / v0(probe)) / k, nan if underflowed
    mass_final: float
    mass_deficit: float     # mass(u0) - mass(u_final)


@dataclass(frozen=True)
class SweepReport:
    spec: SweepSpec
    rows: tuple
    interface_times: np.ndarray
    interface_curves: dict      # k -> x*(t) array over interface_times
    decay_slope: float          # fitted d ln v_k(probe, tau) / dk
    probe_z_heat: float         # int_0^tau u_heat(probe) ds from the heat z
    probe_node: float
    compact_nodes: tuple        # snapped [a, b]
    heat_mass_drift_rate: float  # max_t |mass(t)-mass(0)| / T, heat reference

    def first_k_below_cubic(self) -> float | None:
        """Smallest ladder k with sup_compact v_k < k^-3, None if absent."""
        for row in self.rows:
            if row.sup_v_compact < row.k ** -3:
                return row.k
        return None


def _compact_indices(grid: Grid1D, a: float, b: float) -> tuple[int, int]:
    # snap outward so the requested interval is covered
    h = grid.spacing
    i0 = max(0, int(math.floor((a - grid.x_min) / h + 1e-9)))
    i1 = min(grid.n_cells, int(math.ceil((b - grid.x_min) / h - 1e-9)))
    if i1 <= i0:
        raise ValueError("compact subset snaps to fewer than two nodes")
    return i0, i1


def sweep(spec: SweepSpec, threads: int = 1,
          backend: str | None = None) -> SweepReport:
    """Run the ladder, measure convergence to the heat reference and the
    vanishing of v, and extract interface curves.

    The heat reference is computed once (it does not depend on k); runs for
    different k are independent and may execute in parallel.
    """
    base = spec.base
    grid = base.grid
    nodes = grid.nodes
    heat = heat_run(HeatSpec(grid, base.bc, base.u0, base.T, base.dt,
                             base.theta), spec.sample_stride, backend)
    times = heat.times
    i_tau = _sample_index(times, spec.tau)
    ia, ib = _compact_indices(grid, *spec.compact)
    probe_idx = int(np.argmin(np.abs(nodes - spec.probe_x)))
    v0_probe = base.v0.values[probe_idx]
    if v0_probe <= 0.0:
        raise ValueError(f"probe at x = {nodes[probe_idx]} has v0 = 0")

    u_heat = np.stack([s.u.values for s in heat.states])
    z_probe_heat = float(heat.states[i_tau].z.values[probe_idx])
    masses = np.array([mass(s.u) for s in heat.states])
    drift_rate = float(np.max(np.abs(masses - masses[0])) / base.T)

    mass_u0 = mass(base.u0)
    level = spec.interface_level

    def one(k: float):
        traj = run(replace(base, k=k), spec.sample_stride, backend)
        if len(traj.states) != len(heat.states):
            raise RuntimeError("sampling mismatch between coupled and heat runs")
        sup_u = 0.0
        sup_v = 0.0
        curve = np.empty(len(traj.states))
        for j, state in enumerate(traj.states):
            sup_u = max(sup_u, float(np.max(np.abs(state.u.values - u_heat[j]))))
            v = v_field(state, traj.spec).values
            if j >= i_tau:
                sup_v = max(sup_v, float(np.max(v[ia:ib + 1])))
            curve[j] = interface_position(v, nodes, level)
        pv = float(v_field(traj.states[i_tau], traj.spec).values[probe_idx])
        decay = -math.log(pv / v0_probe) / k if pv > 0.0 else math.nan
        m_final = mass(traj.final.u)
        return SweepRow(k, sup_u, sup_v, pv, decay, m_final,
                        mass_u0 - m_final), curve

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, spec.k_values))
    else:
        results = [one(k) for k in spec.k_values]

    rows = tuple(r for r, _ in results)
    curves = {row.k: curve for row, (_, curve) in zip(rows, results)}

    ks = np.array([r.k for r in rows])
    lnv = np.array([math.log(r.probe_v) if r.probe_v > 0.0 else math.nan
                    for r in rows])
    ok = np.isfinite(lnv)
    slope = float(np.polyfit(ks[ok], lnv[ok], 1)[0]) if ok.sum() >= 2 else math.nan

    return SweepReport(spec, rows, times, curves, slope, z_probe_heat,
                       float(nodes[probe_idx]),
                       (float(nodes[ia]), float(nodes[ib])), drift_rate)


@dataclass(frozen=True)
class StefanRow:
    k: float
    sup_u_err: float        # sup |u_k - U| on the metric window
    interface_sup_err: float  # sup |x*(t) - x_min - iota sqrt(t)|
    fit_exponent: float     # p from x* - x_min ~ A t^p
    fit_prefactor: float    # A


@dataclass(frozen=True)
class StefanReport:
    profile: SelfSimilarProfile
    grid: Grid1D
    T: float
    dt: float
    t_min: float            # metric window start
    rows: tuple
    interface_times: np.ndarray
    interface_curves: dict


def stefan_experiment(u0_level: float, v0_level: float, k_values,
                      grid: Grid1D, T: float, dt: float | None = None,
                      theta: float = 1.0, sample_stride: int | None = None,
                      interface_level: float | None = None,
                      metric_t_min_frac: float = 0.01, threads: int = 1,
                      backend: str | None = None) -> StefanReport:
    """One-phase free-boundary experiment: u0 = 0, v0 = V0, inflow U0 at
    x_min, zero Dirichlet at x_max, m = 1. Compares u_k to the self-similar
    limit U(x,t) = f((x - x_min)/sqrt(t)) and fits the interface power law.

    Early samples t < metric_t_min_frac * T are excluded from the metrics
    (corner boundary layer at t = 0)."""
    profile = SelfSimilarProfile.from_data(u0_level, v0_level)
    width = grid.x_max - grid.x_min
    t_exit = (width / profile.iota) ** 2
    if T > t_exit * (1.0 + 1e-12):
        warnings.warn(
            f"free boundary exits the domain at t = {t_exit:g} < T = {T:g}; "
            "metrics are truncated to the contained window", stacklevel=2)
    t_cap = min(T, t_exit)

    h = grid.spacing
    if dt is None:
        dt = h * h
    if sample_stride is None:
        sample_stride = max(1, round(T / dt / 400))
    if interface_level is None:
        interface_level = 0.5 * v0_level

    bc = BoundarySpec(DirichletConst(u0_level), DirichletConst(0.0))
    base = ProblemSpec(grid, bc, Field.zeros(grid),
                       Field.full(grid, v0_level), m=1.0, k=1.0, T=T, dt=dt,
                       theta=theta)
    t_min = metric_t_min_frac * T
    xs = grid.nodes - grid.x_min

    def one(k: float):
        traj = run(replace(base, k=k), sample_stride, backend)
        times = traj.times
        curve = np.empty(times.size)
        sup_u = 0.0
        sup_if = 0.0
        for j, state in enumerate(traj.states):
            v = v_field(state, traj.spec).values
            curve[j] = interface_position(v, grid.nodes, interface_level)
            t = times[j]
            if t_min <= t <= t_cap * (1.0 + 1e-12):
                u_lim = profile.evaluate(xs / math.sqrt(t))
                sup_u = max(sup_u, float(np.max(np.abs(state.u.values - u_lim))))
                sup_if = max(sup_if, abs(curve[j] - grid.x_min
                                         - profile.iota * math.sqrt(t)))
        # power-law fit of the interface inside the metric window
        rel = curve - grid.x_min
        sel = ((times >= t_min) & (times <= t_cap)
               & (rel > 0.5 * h) & (rel < width - 0.5 * h))
        if sel.sum() >= 2:
            coef = np.polyfit(np.log(times[sel]), np.log(rel[sel]), 1)
            p_fit, prefactor = float(coef[0]), float(math.exp(coef[1]))
        else:
            p_fit, prefactor = math.nan, math.nan
        return StefanRow(k, sup_u, sup_if, p_fit, prefactor), (times, curve)

    ks = tuple(float(k) for k in k_values)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, ks))
    else:
        results = [one(k) for k in ks]
    rows = tuple(r for r, _ in results)
    curves = {row.k: curve for row, (_, curve) in zip(rows, results)}
    times = results[0][1][0]
    return StefanReport(profile, grid, T, dt, t_min, rows, times, curves)


# ---------------------------------------------------------------------------
# CSV emission: deterministic column order, 17-significant-digit reals,
# header row. %.17g round-trips float64 exactly.

def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_table(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path) -> tuple[list[str], list[list[float]]]:
    """Read back a table written by emit_csv; all cells parsed as floats."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(cell) for cell in line.strip().split(",")]
                for line in fh if line.strip()]
    return header, rows


def emit_csv(report, out_dir) -> list[Path]:
    """Write a report to CSV files under out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(report, SweepReport):
        return _emit_sweep(report, out)
    if isinstance(report, StefanReport):
        return _emit_stefan(report, out)
    from .barrier import BarrierReport
    if isinstance(report, BarrierReport):
        return report.to_csv(out)
    raise TypeError(f"no CSV emitter for {type(report).__name__}")


def _emit_sweep(report: SweepReport, out: Path) -> list[Path]:
    metrics = out / "sweep_metrics.csv"
    _write_table(metrics,
                 ["k", "sup_u_err", "sup_v_compact", "probe_v", "probe_decay",
                  "mass_final", "mass_deficit"],
                 [(r.k, r.sup_u_err, r.sup_v_compact, r.probe_v,
                   r.probe_decay, r.mass_final, r.mass_deficit)
                  for r in report.rows])
    interface = out / "sweep_interface.csv"
    _write_table(interface, ["k", "t", "x_star"],
                 [(k, t, x) for k in sorted(report.interface_curves)
                  for t, x in zip(report.interface_times,
                                  report.interface_curves[k])])
    summary = out / "sweep_summary.csv"
    _write_table(summary, ["quantity", "value"], [
        ("tau", report.spec.tau),
        ("compact_a", report.compact_nodes[0]),
        ("compact_b", report.compact_nodes[1]),
        ("interface_level", report.spec.interface_level),
        ("probe_x", report.probe_node),
        ("probe_z_heat", report.probe_z_heat),
        ("decay_slope", report.decay_slope),
        ("heat_mass_drift_rate", report.heat_mass_drift_rate),
    ])
    return [metrics, interface, summary]


def _emit_stefan(report: StefanReport, out: Path) -> list[Path]:
    metrics = out / "stefan_metrics.csv"
    _write_table(metrics,
                 ["k", "sup_u_err", "interface_sup_err", "fit_exponent",
                  "fit_prefactor"],
                 [(r.k, r.sup_u_err, r.interface_sup_err, r.fit_exponent,
                   r.fit_prefactor) for r in report.rows])
    interface = out / "stefan_interface.csv"
    _write_table(interface, ["k", "t", "x_star"],
                 [(k, t, x) for k in sorted(report.interface_curves)
                  for t, x in zip(report.interface_times,
                                  report.interface_curves[k])])
    summary = out / "stefan_summary.csv"
    _write_table(summary, ["quantity", "value"], [
        ("u0_level", report.profile.u0),
        ("v0_level", report.profile.v0),
        ("iota", report.profile.iota),
        ("T", report.T),
        ("dt", report.dt),
        ("metric_t_min", report.t_min),
    ])
    return [metrics, interface, summary]
