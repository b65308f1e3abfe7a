"""Uniform node-centered 1D grids, fields, boundary conditions and the
discrete Laplacian in Cartesian or radial geometry.

The radial Laplacian is u_rr + ((n-1)/r) u_r for dimension n >= 1; at n = 1
it reduces, coefficient by coefficient, to the Cartesian stencil.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

__all__ = [
    "Grid1D",
    "Field",
    "DirichletConst",
    "DirichletSeries",
    "NeumannZero",
    "BoundarySpec",
    "TridiagLaplacian",
    "laplacian_tridiag",
    "sup_norm_diff",
    "restrict",
]

# Node-snapping fuzz for restrict(), relative to one spacing.
_SNAP_RTOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n_cells + 1 nodes on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_cells: int
    geometry: str = "cartesian"  # "cartesian" | "radial"
    dim: int = 1                 # radial dimension n (radial only)

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.n_cells < 1:
            raise ValueError(f"need n_cells >= 1, got {self.n_cells}")
        if self.geometry not in ("cartesian", "radial"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "radial":
            if self.dim < 1:
                raise ValueError(f"radial dimension must be >= 1, got {self.dim}")
            if self.x_min < 0.0:
                raise ValueError("radial grid requires x_min >= 0")
        elif self.dim != 1:
            raise ValueError("cartesian geometry has dim = 1")

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_nodes)


@dataclass(frozen=True)
class Field:
    """Nodal values on a grid. The array contents may be written in place;
    everything else is immutable."""

    grid: Grid1D
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"field shape {values.shape} does not match grid with "
                f"{self.grid.n_nodes} nodes")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid1D) -> "Field":
        return cls(grid, np.zeros(grid.n_nodes))

    @classmethod
    def full(cls, grid: Grid1D, value: float) -> "Field":
        return cls(grid, np.full(grid.n_nodes, float(value)))

    @classmethod
    def from_function(cls, grid: Grid1D, fn: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=np.float64))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


@dataclass(frozen=True)
class DirichletConst:
    value: float

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError("Dirichlet value must be nonnegative")

    def sample(self, t: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(t, dtype=np.float64), self.value)


@dataclass(frozen=True)
class DirichletSeries:
    """Time-dependent Dirichlet data as a sampled series, linearly
    interpolated; queries outside [times[0], times[-1]] clamp to the ends."""

    times: np.ndarray = field(compare=False)
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise ValueError("series needs matching 1D times/values with >= 2 samples")
        if not np.all(np.diff(times) > 0):
            raise ValueError("series times must be strictly increasing")
        if np.any(values < 0.0):
            raise ValueError("series values must be nonnegative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def sample(self, t: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(t, dtype=np.float64), self.times, self.values)


@dataclass(frozen=True)
class NeumannZero:
    def sample(self, t: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(t, dtype=np.float64))


BoundaryCondition = Union[DirichletConst, DirichletSeries, NeumannZero]


@dataclass(frozen=True)
class BoundarySpec:
    left: BoundaryCondition
    right: BoundaryCondition


def _kind(bc: BoundaryCondition) -> int:
    # 0 = Dirichlet (pinned node), 1 = Neumann (reflected stencil)
    return 1 if isinstance(bc, NeumannZero) else 0


@dataclass(frozen=True)
class TridiagLaplacian:
    """Three-point Laplacian rows. Dirichlet rows are stored as zeros; the
    solver pins those nodes instead. lower[0] and upper[-1] are unused."""

    lower: np.ndarray = field(compare=False)
    diag: np.ndarray = field(compare=False)
    upper: np.ndarray = field(compare=False)
    left_kind: int = 0
    right_kind: int = 0

    def apply(self, values: np.ndarray) -> np.ndarray:
        out = self.diag * values
        out[1:] += self.lower[1:] * values[:-1]
        out[:-1] += self.upper[:-1] * values[1:]
        return out

    def as_dense(self) -> np.ndarray:
        n = self.diag.size
        a = np.zeros((n, n))
        a[np.arange(n), np.arange(n)] = self.diag
        a[np.arange(1, n), np.arange(n - 1)] = self.lower[1:]
        a[np.arange(n - 1), np.arange(1, n)] = self.upper[:-1]
        return a


def laplacian_tridiag(grid: Grid1D, bc: BoundarySpec) -> TridiagLaplacian:
    """Second-order three-point Laplacian for the grid geometry.

    Interior radial rows carry off-diagonals (1/h^2)(1 -/+ (n-1)h/(2r));
    Neumann rows use ghost reflection, under which the first-order radial
    term cancels; at r = 0 the symmetry-regularized stencil 2n(u1-u0)/h^2
    is used. Raises if the grid is too coarse for the radial stencil to
    keep nonnegative off-diagonals (monotonicity would be lost).
    """
    n = grid.n_nodes
    h = grid.spacing
    inv_h2 = 1.0 / (h * h)
    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)

    if grid.geometry == "radial" and grid.dim != 1:
        r = grid.nodes[1:-1]
        gamma = (grid.dim - 1) * h / (2.0 * r)
        lower[1:-1] = (1.0 - gamma) * inv_h2
        upper[1:-1] = (1.0 + gamma) * inv_h2
        if np.any(lower[1:-1] < 0.0):
            raise ValueError(
                "radial stencil has a negative off-diagonal: refine the grid "
                f"so (dim-1)h/(2r) <= 1 at the first interior node (h={h})")
    else:
        lower[1:-1] = inv_h2
        upper[1:-1] = inv_h2
    diag[1:-1] = -2.0 * inv_h2

    left_kind = _kind(bc.left)
    right_kind = _kind(bc.right)

    if left_kind == 1:
        if grid.geometry == "radial" and grid.x_min == 0.0:
            # origin row: symmetry regularization, lim 2n (u1 - u0)/h^2
            diag[0] = -2.0 * grid.dim * inv_h2
            upper[0] = 2.0 * grid.dim * inv_h2
        else:
            # ghost reflection; the (n-1)/r term cancels exactly
            diag[0] = -2.0 * inv_h2
            upper[0] = 2.0 * inv_h2
    if right_kind == 1:
        diag[-1] = -2.0 * inv_h2
        lower[-1] = 2.0 * inv_h2

    return TridiagLaplacian(lower, diag, upper, left_kind, right_kind)


def sup_norm_diff(a: Field, b: Field) -> float:
    """max_i |a_i - b_i| on a shared grid."""
    if a.grid != b.grid:
        raise ValueError("sup_norm_diff requires fields on the same grid")
    return float(np.max(np.abs(a.values - b.values)))


def restrict(fld: Field, a: float, b: float, snap: bool = True) -> Field:
    """Restriction of a field to [a, b].

    With snap=True the endpoints snap outward to the nearest nodes (the
    returned field's grid records the snapped interval); with snap=False
    endpoints must already lie on nodes.
    """
    grid = fld.grid
    if b <= a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if b < grid.x_min or a > grid.x_max:
        raise ValueError(f"[{a}, {b}] does not intersect [{grid.x_min}, {grid.x_max}]")
    h = grid.spacing
    pos_a = (a - grid.x_min) / h
    pos_b = (b - grid.x_min) / h
    if snap:
        i0 = int(np.floor(pos_a + _SNAP_RTOL))
        i1 = int(np.ceil(pos_b - _SNAP_RTOL))
    else:
        i0 = int(round(pos_a))
        i1 = int(round(pos_b))
        if abs(pos_a - i0) > _SNAP_RTOL or abs(pos_b - i1) > _SNAP_RTOL:
            raise ValueError(f"endpoints [{a}, {b}] do not lie on grid nodes")
    i0 = max(i0, 0)
    i1 = min(i1, grid.n_cells)
    if i1 <= i0:
        raise ValueError(f"restriction to [{a}, {b}] leaves fewer than two nodes")
    nodes = grid.nodes
    sub = Grid1D(float(nodes[i0]), float(nodes[i1]), i1 - i0, grid.geometry, grid.dim)
    return Field(sub, fld.values[i0:i1 + 1].copy())
