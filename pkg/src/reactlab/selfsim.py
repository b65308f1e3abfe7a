"""Self-similar limit profile of the one-phase interval problem.

The free-boundary constant iota = iota(U0, V0) is the unique positive root of

    2 U0 / V0 = iota * int_0^iota exp((iota^2 - s^2)/4) ds,

and the profile is

    f(eta) = U0 (1 - F(eta)/F(iota))  for eta <= iota,   0 beyond,

with F(eta) = int_0^eta exp(-s^2/4) ds. U(x,t) = f(x/sqrt(t)) solves the
heat equation inside {x < iota sqrt(t)} with U(0,t) = U0, vanishes on the
free boundary x = iota sqrt(t), and has zero initial trace for x > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

__all__ = [
    "ConvergenceError",
    "gauss_quarter_integral",
    "solve_iota",
    "SelfSimilarProfile",
    "profile_eval",
    "limit_solution",
]

_SQRT_PI = math.sqrt(math.pi)
# solve_iota initial bracket, expanded geometrically until the sign changes
_BRACKET_LO = 1e-8
_BRACKET_HI = 1.0
_LO_LIMIT = 1e-250
_HI_LIMIT = 1e6


class ConvergenceError(RuntimeError):
    """Root isolation for iota failed or left too large a residual."""


def gauss_quarter_integral(eta):
    """F(eta) = int_0^eta exp(-s^2/4) ds = sqrt(pi) erf(eta/2), eta >= 0."""
    eta_arr = np.asarray(eta, dtype=np.float64)
    if np.any(eta_arr < 0.0):
        raise ValueError("gauss_quarter_integral requires eta >= 0")
    out = _SQRT_PI * erf(eta_arr / 2.0)
    return float(out) if np.isscalar(eta) or eta_arr.ndim == 0 else out


def _log_lhs(iota: float) -> float:
    # log of iota e^{iota^2/4} F(iota); safe across the whole double range
    return math.log(iota) + iota * iota / 4.0 + math.log(
        _SQRT_PI * math.erf(iota / 2.0))


def solve_iota(u0: float, v0: float) -> float:
    """Unique positive root of iota e^{iota^2/4} F(iota) = 2 U0/V0.

    Solved in log form (the left side is increasing, and the log form never
    overflows), bracketing from [1e-8, 1] by geometric expansion and then
    refining with a guarded hybrid root finder to machine precision.
    """
    if not (u0 > 0.0 and math.isfinite(u0)):
        raise ValueError(f"U0 must be positive and finite, got {u0}")
    if not (v0 > 0.0 and math.isfinite(v0)):
        raise ValueError(f"V0 must be positive and finite, got {v0}")
    log_target = math.log(2.0) + math.log(u0) - math.log(v0)

    def phi(iota: float) -> float:
        return _log_lhs(iota) - log_target

    lo, hi = _BRACKET_LO, _BRACKET_HI
    while phi(lo) > 0.0:
        lo /= 16.0
        if lo < _LO_LIMIT:
            raise ConvergenceError(
                f"no bracket below {_LO_LIMIT} for U0/V0 = {u0 / v0:g}")
    while phi(hi) < 0.0:
        hi *= 2.0
        if hi > _HI_LIMIT:
            raise ConvergenceError(
                f"no bracket above {_HI_LIMIT} for U0/V0 = {u0 / v0:g}")
    iota = brentq(phi, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps,
                  maxiter=300)

    # residual of the defining equation, |g| <= 1e-12 (1 + 2 U0/V0)
    rel_residual = abs(math.expm1(phi(iota)))
    target_inv = 0.5 * v0 / u0
    if rel_residual > 1e-12 * (1.0 + target_inv):
        raise ConvergenceError(
            f"iota residual {rel_residual:g} exceeds tolerance for "
            f"U0/V0 = {u0 / v0:g}")
    return iota


@dataclass(frozen=True)
class SelfSimilarProfile:
    """Profile f^{(U0,V0)} with its free-boundary constant iota."""

    u0: float
    v0: float
    iota: float

    @classmethod
    def from_data(cls, u0: float, v0: float) -> "SelfSimilarProfile":
        return cls(u0, v0, solve_iota(u0, v0))

    def evaluate(self, eta):
        """f(eta) = U0 (1 - F(eta)/F(iota)) for eta <= iota, else 0.

        f(0) = U0 and f(iota) = 0 hold exactly (F(0) = 0 and F(iota)/F(iota)
        = 1 in floating point).
        """
        eta_arr = np.asarray(eta, dtype=np.float64)
        if np.any(eta_arr < 0.0):
            raise ValueError("profile argument eta must be >= 0")
        f_iota = gauss_quarter_integral(self.iota)
        vals = np.where(eta_arr <= self.iota,
                        self.u0 * (1.0 - gauss_quarter_integral(eta_arr) / f_iota),
                        0.0)
        return float(vals) if np.isscalar(eta) or eta_arr.ndim == 0 else vals

    def limit(self, x, t: float):
        """U(x, t) = f(x/sqrt(t)) for t > 0."""
        if not t > 0.0:
            raise ValueError(f"limit solution requires t > 0, got t = {t}")
        return self.evaluate(np.asarray(x, dtype=np.float64) / math.sqrt(t))


def profile_eval(profile: SelfSimilarProfile, eta):
    return profile.evaluate(eta)


def limit_solution(profile: SelfSimilarProfile, x, t: float):
    return profile.limit(x, t)
