"""Semi-implicit theta-scheme solver for the asymmetric fast-reaction system

    u_t = Lap u - k u^m v,      v_t = -k u v,

where only u diffuses. v is never time-stepped: it is reconstructed exactly
as v = v0 exp(-k z) with z(x,t) = int_0^t u(x,s) ds, which removes the
k-stiffness from the v equation. For theta = 1 the implicit matrix is an
M-matrix, so the scheme is monotone and order-preserving.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import (BoundarySpec, DirichletConst, DirichletSeries, Field,
                   Grid1D, NeumannZero, TridiagLaplacian, laplacian_tridiag)
from . import backends

__all__ = [
    "ProblemSpec",
    "State",
    "Trajectory",
    "SchemeViolationError",
    "run",
    "step",
    "scaled_run",
    "v_field",
]


class SchemeViolationError(RuntimeError):
    """The discrete solution left the admissible cone (negative or
    non-finite u)."""


@dataclass(frozen=True)
class ProblemSpec:
    """Full description of one finite-k run.

    m >= 1 is accepted: the regime of interest has m > 1, but the scaled
    auxiliary system and the one-phase interval problem run with m = 1.
    k = 0 is accepted and decouples the system (pure heat flow for u).
    """

    grid: Grid1D
    bc: BoundarySpec
    u0: Field
    v0: Field
    m: float
    k: float
    T: float
    dt: float
    theta: float = 1.0

    def __post_init__(self):
        if self.u0.grid != self.grid or self.v0.grid != self.grid:
            raise ValueError("u0/v0 must live on the spec grid")
        if np.any(self.u0.values < 0.0) or np.any(self.v0.values < 0.0):
            raise ValueError("initial data must be nonnegative")
        if not (self.m >= 1.0):
            raise ValueError(f"reaction exponent m must be >= 1, got {self.m}")
        if not (self.k >= 0.0 and math.isfinite(self.k)):
            raise ValueError(f"reaction rate k must be finite and >= 0, got {self.k}")
        if not (self.T >= 0.0 and math.isfinite(self.T)):
            raise ValueError(f"final time T must be finite and >= 0, got {self.T}")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"time step dt must be positive, got {self.dt}")
        if self.T > 0.0 and self.dt > self.T * (1.0 + 1e-12):
            raise ValueError(f"dt = {self.dt} exceeds T = {self.T}")
        if not (0.5 <= self.theta <= 1.0):
            raise ValueError(f"theta must lie in [1/2, 1], got {self.theta}")
        if self.theta < 1.0:
            h = self.grid.spacing
            if self.dt * (1.0 - self.theta) * 2.0 / (h * h) > 1.0 + 1e-12:
                raise ValueError(
                    "explicit part violates the step bound "
                    f"dt (1-theta) 2/h^2 <= 1 (dt={self.dt}, h={h})")

    @property
    def segregated(self) -> bool:
        """True when u0 v0 == 0 at every node."""
        return bool(np.all(self.u0.values * self.v0.values == 0.0))


@dataclass(frozen=True)
class State:
    """Solution sample: u and the running integral z = int_0^t u ds.
    v is derived, v = v_scale * v0 * exp(-k z)."""

    t: float
    u: Field
    z: Field
    v0: Field
    v_scale: float = 1.0


@dataclass(frozen=True)
class Trajectory:
    spec: ProblemSpec
    states: tuple
    delta: float = 1.0  # v-rescale factor recorded by scaled_run

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> State:
        return self.states[-1]

    def v(self, i: int) -> Field:
        return v_field(self.states[i], self.spec)


def v_field(state: State, spec: ProblemSpec) -> Field:
    """v at a sampled state: v_scale * (v0 * exp(-k z)).

    IEEE underflow is the intended behavior: once k z exceeds ~745 the
    factor is exactly 0.0, never NaN.
    """
    with np.errstate(under="ignore"):
        raw = state.v0.values * np.exp(-spec.k * state.z.values)
        if state.v_scale != 1.0:
            raw = state.v_scale * raw
    return Field(state.u.grid, raw)


def _plan_steps(T: float, dt: float) -> tuple[int, float]:
    """Number of steps and the (possibly shortened) final step landing on T."""
    if T == 0.0:
        return 0, dt
    n = int(math.floor(T / dt + 1e-9))
    rem = T - n * dt
    if rem > 1e-9 * dt:
        n += 1
    dt_last = T - (n - 1) * dt
    return n, dt_last


def _boundary_values(bc_side, t_ends: np.ndarray, kind: int) -> np.ndarray:
    if kind == 1:
        return np.zeros_like(t_ends)
    return np.asarray(bc_side.sample(t_ends), dtype=np.float64)


def run(spec: ProblemSpec, sample_stride: int = 1,
        backend: str | None = None) -> Trajectory:
    """Integrate to T, sampling every sample_stride steps plus the final step.

    Identical specs produce bit-identical trajectories on a given backend;
    sampling only changes which states are retained, not the computed path.
    """
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    advance = backends.get_advance(backend)
    lap = laplacian_tridiag(spec.grid, spec.bc)

    u = spec.u0.values.copy()
    z = np.zeros_like(u)
    v0 = spec.v0.values

    n_total, dt_last = _plan_steps(spec.T, spec.dt)
    short_last = dt_last != spec.dt
    t_ends = np.minimum(np.arange(1, n_total + 1) * spec.dt, spec.T)
    if n_total:
        t_ends[-1] = spec.T
    left_vals = _boundary_values(spec.bc.left, t_ends, lap.left_kind)
    right_vals = _boundary_values(spec.bc.right, t_ends, lap.right_kind)

    grid = spec.grid
    states = [State(0.0, Field(grid, u.copy()), Field(grid, z.copy()), spec.v0)]

    done = 0
    while done < n_total:
        stop = min(done + sample_stride, n_total)
        n_full = stop - done
        if short_last and stop == n_total:
            n_full -= 1
        if n_full > 0:
            taken, status = advance(
                u, z, v0, lap.lower, lap.diag, lap.upper,
                lap.left_kind, lap.right_kind,
                left_vals[done:done + n_full], right_vals[done:done + n_full],
                spec.k, spec.m, spec.theta, spec.dt, n_full)
            _check_status(status, t_ends, done + taken)
        if short_last and stop == n_total:
            taken, status = advance(
                u, z, v0, lap.lower, lap.diag, lap.upper,
                lap.left_kind, lap.right_kind,
                left_vals[n_total - 1:n_total], right_vals[n_total - 1:n_total],
                spec.k, spec.m, spec.theta, dt_last, 1)
            _check_status(status, t_ends, n_total - 1 + taken)
        done = stop
        states.append(State(float(t_ends[done - 1]), Field(grid, u.copy()),
                            Field(grid, z.copy()), spec.v0))
    return Trajectory(spec, tuple(states))


def _check_status(status: int, t_ends: np.ndarray, step_index: int) -> None:
    if status == 0:
        return
    t_bad = float(t_ends[min(step_index, t_ends.size - 1)]) if t_ends.size else 0.0
    if status == 1:
        raise SchemeViolationError(
            f"u dropped below -1e-12 at step {step_index + 1} (t ~ {t_bad:g})")
    raise SchemeViolationError(
        f"non-finite u at step {step_index + 1} (t ~ {t_bad:g})")


def step(state: State, spec: ProblemSpec, backend: str | None = None) -> State:
    """One theta-scheme step of size spec.dt from the given state."""
    advance = backends.get_advance(backend)
    lap = laplacian_tridiag(spec.grid, spec.bc)
    u = state.u.values.copy()
    z = state.z.values.copy()
    t_end = np.array([state.t + spec.dt])
    left_vals = _boundary_values(spec.bc.left, t_end, lap.left_kind)
    right_vals = _boundary_values(spec.bc.right, t_end, lap.right_kind)
    taken, status = advance(
        u, z, state.v0.values, lap.lower, lap.diag, lap.upper,
        lap.left_kind, lap.right_kind, left_vals, right_vals,
        spec.k, spec.m, spec.theta, spec.dt, 1)
    _check_status(status, t_end, taken)
    return State(float(t_end[0]), Field(spec.grid, u), Field(spec.grid, z),
                 state.v0, state.v_scale)


def scaled_run(spec: ProblemSpec, delta: float, sample_stride: int = 1,
               backend: str | None = None) -> Trajectory:
    """Integrate the rescaled system u_t = Lap u - (delta k) u v,
    v_t = -k u v.

    Implemented by running the standard system with m = 1 and v0 -> delta v0
    (substituting w = delta v), then rescaling the reported v by 1/delta.
    u and z are those of the inner run, bit for bit; v values equal
    (1/delta) times the inner run's v values, bit for bit.
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise ValueError(f"delta must be positive and finite, got {delta}")
    inner = replace(spec, m=1.0,
                    v0=Field(spec.grid, delta * spec.v0.values))
    traj = run(inner, sample_stride, backend)
    states = tuple(replace(s, v_scale=1.0 / delta) for s in traj.states)
    return Trajectory(inner, states, delta=delta)
