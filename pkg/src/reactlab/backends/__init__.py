"""Time-stepping kernel backends.

Two implementations of the same `advance` contract: a numba-compiled kernel
and a pure numpy/scipy fallback. The default is chosen by the
REACTLAB_BACKEND environment variable ("numba" or "numpy"); unset, numba is
used when importable.

advance(u, z, v0, lower, diag, upper, left_kind, right_kind,
        left_vals, right_vals, k, m, theta, dt, n_steps) -> (steps_done, status)

mutates u and z in place, one theta-scheme step per entry of
left_vals/right_vals. status: 0 ok, 1 negative-u scheme violation,
2 non-finite values.
"""
from __future__ import annotations

import os

__all__ = ["BACKEND_ENV", "backend_names", "default_backend", "get_advance"]

BACKEND_ENV = "REACTLAB_BACKEND"

_advance_cache: dict[str, object] = {}


def backend_names() -> tuple[str, ...]:
    return ("numba", "numpy")


def default_backend() -> str:
    env = os.environ.get(BACKEND_ENV, "").strip().lower()
    if env:
        if env not in backend_names():
            raise ValueError(
                f"{BACKEND_ENV}={env!r} is not one of {backend_names()}")
        return env
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def get_advance(name: str | None = None):
    """Resolve an advance kernel by backend name (default: env selection)."""
    if name is None:
        name = default_backend()
    if name not in _advance_cache:
        if name == "numba":
            from .numba_kernels import advance
        elif name == "numpy":
            from .numpy_kernels import advance
        else:
            raise ValueError(f"unknown backend {name!r}")
        _advance_cache[name] = advance
    return _advance_cache[name]
