"""Numba-compiled advance kernel (default backend).

One theta-scheme step solves

    (I - theta dt L + dt k (u^n)^{m-1} v^n I) u^{n+1}
        = u^n + (1-theta) dt L u^n

with v^n = v0 exp(-k z^n) and the trapezoid update
z^{n+1} = z^n + dt (u^n + u^{n+1})/2. Dirichlet rows are pinned to the
per-step boundary values; the tridiagonal system is solved by the Thomas
algorithm (diagonally dominant, no pivoting needed).
"""
from __future__ import annotations

import numpy as np
from numba import njit

NEG_TOL = -1e-12


@njit(cache=True, nogil=True)
def advance(u, z, v0, lower, diag, upper, left_kind, right_kind,
            left_vals, right_vals, k, m, theta, dt, n_steps):
    n = u.shape[0]
    al = np.empty(n)
    ad = np.empty(n)
    au = np.empty(n)
    b = np.empty(n)
    cp = np.empty(n)
    dp = np.empty(n)
    unew = np.empty(n)
    em1 = m - 1.0
    theta_dt = theta * dt
    for s in range(n_steps):
        for i in range(n):
            vi = v0[i] * np.exp(-k * z[i])
            ui = u[i] if u[i] > 0.0 else 0.0
            ci = k * ui ** em1 * vi
            ad[i] = 1.0 + dt * ci - theta_dt * diag[i]
            al[i] = -theta_dt * lower[i]
            au[i] = -theta_dt * upper[i]
        if theta == 1.0:
            for i in range(n):
                b[i] = u[i]
        else:
            ex = (1.0 - theta) * dt
            b[0] = u[0] + ex * (diag[0] * u[0] + upper[0] * u[1])
            for i in range(1, n - 1):
                b[i] = u[i] + ex * (lower[i] * u[i - 1] + diag[i] * u[i]
                                    + upper[i] * u[i + 1])
            b[n - 1] = u[n - 1] + ex * (lower[n - 1] * u[n - 2]
                                        + diag[n - 1] * u[n - 1])
        if left_kind == 0:
            ad[0] = 1.0
            au[0] = 0.0
            b[0] = left_vals[s]
        if right_kind == 0:
            ad[n - 1] = 1.0
            al[n - 1] = 0.0
            b[n - 1] = right_vals[s]
        # Thomas sweep
        cp[0] = au[0] / ad[0]
        dp[0] = b[0] / ad[0]
        for i in range(1, n):
            denom = ad[i] - al[i] * cp[i - 1]
            cp[i] = au[i] / denom
            dp[i] = (b[i] - al[i] * dp[i - 1]) / denom
        unew[n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            unew[i] = dp[i] - cp[i] * unew[i + 1]
        for i in range(n):
            if not np.isfinite(unew[i]):
                return s, 2
            if unew[i] < NEG_TOL:
                return s, 1
        for i in range(n):
            z[i] += 0.5 * dt * (u[i] + unew[i])
            u[i] = unew[i]
    return n_steps, 0
