"""Heat-flow reference solutions and mass bookkeeping.

The heat path reuses the solver's tridiagonal kernel with the reaction
coefficient identically zero (v0 = 0), so a coupled run with v0 = 0 or
k = 0 matches heat_run bit for bit. Independent validation of that shared
kernel comes from analytic eigenmode decay tests.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BoundarySpec, Field, Grid1D
from .solver import ProblemSpec, Trajectory, run

__all__ = ["HeatSpec", "heat_run", "mass"]

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class HeatSpec:
    """ProblemSpec minus the reaction."""

    grid: Grid1D
    bc: BoundarySpec
    u0: Field
    T: float
    dt: float
    theta: float = 1.0

    def to_problem(self) -> ProblemSpec:
        return ProblemSpec(self.grid, self.bc, self.u0,
                           Field.zeros(self.grid), m=2.0, k=1.0,
                           T=self.T, dt=self.dt, theta=self.theta)


def heat_run(spec: HeatSpec, sample_stride: int = 1,
             backend: str | None = None) -> Trajectory:
    """Heat flow u_t = Lap u via the solver kernel with zero reaction.

    The trajectory's z fields carry int_0^t u ds (trapezoid in time), used
    as the quadrature oracle for the v-decay exponents.
    """
    return run(spec.to_problem(), sample_stride, backend)


def mass(fld: Field) -> float:
    """Trapezoid mass with the geometry measure: int u dx on Cartesian
    grids, int u r^{n-1} dr on radial ones (no angular factor)."""
    x = fld.grid.nodes
    if fld.grid.geometry == "radial" and fld.grid.dim != 1:
        return float(_trapezoid(fld.values * x ** (fld.grid.dim - 1), x))
    return float(_trapezoid(fld.values, x))
