"""Pure numpy/scipy advance kernel (fallback backend).

Same step semantics as the numba kernel: semi-implicit theta scheme with the
reaction linearized as k u^{m-1} v on the implicit diagonal, v reconstructed
from the running integral z, trapezoid z update.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

NEG_TOL = -1e-12


def advance(u, z, v0, lower, diag, upper, left_kind, right_kind,
            left_vals, right_vals, k, m, theta, dt, n_steps):
    n = u.shape[0]
    ab = np.empty((3, n))
    em1 = m - 1.0
    theta_dt = theta * dt
    for s in range(n_steps):
        with np.errstate(under="ignore"):
            v = v0 * np.exp(-k * z)
            c = k * np.power(np.maximum(u, 0.0), em1) * v
        if theta == 1.0:
            b = u.copy()
        else:
            lap = diag * u
            lap[1:] += lower[1:] * u[:-1]
            lap[:-1] += upper[:-1] * u[1:]
            b = u + ((1.0 - theta) * dt) * lap
        ab[0, 1:] = -theta_dt * upper[:-1]
        ab[1, :] = 1.0 + dt * c - theta_dt * diag
        ab[2, :-1] = -theta_dt * lower[1:]
        if left_kind == 0:
            ab[1, 0] = 1.0
            ab[0, 1] = 0.0
            b[0] = left_vals[s]
        if right_kind == 0:
            ab[1, -1] = 1.0
            ab[2, -2] = 0.0
            b[-1] = right_vals[s]
        unew = solve_banded((1, 1), ab, b, check_finite=False, overwrite_b=True)
        if not np.isfinite(unew).all():
            return s, 2
        if np.min(unew) < NEG_TOL:
            return s, 1
        z += (0.5 * dt) * (u + unew)
        u[:] = unew
    return n_steps, 0
