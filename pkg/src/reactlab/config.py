"""Flat key = value run-configuration files.

One assignment per line, ``key = value``; blank lines and ``#`` comments are
ignored.  Keys mirror ProblemSpec plus harness settings.  Structured values
(boundary conditions, initial data) are space-separated words:

    bc_left = dirichlet 0.0          constant-value Dirichlet
    bc_left = neumann                zero-flux

    u0 = zero
    u0 = const 1.0                   constant level
    u0 = bump 32.0 0.3 0.2           smooth bump: amp, center, halfwidth
    u0 = sin 1.0 2                   amp * sin(n pi (x-x_min)/(x_max-x_min))
    u0 = step 0.05 0.5 1.0           level on [from, to], zero outside

Each builder consumes exactly the keys it understands and rejects leftovers,
so typos fail loudly instead of silently falling back to defaults.
"""
from __future__ import annotations

import math

import numpy as np

from .grid import (BoundarySpec, DirichletConst, Field, Grid1D, NeumannZero)
from .lab import SweepSpec, bump_profile
from .reference import HeatSpec
from .barrier import AnnulusBarrierSpec
from .solver import ProblemSpec

__all__ = [
    "ConfigError",
    "parse_config_text",
    "load_config",
    "build_field",
    "build_problem",
    "build_heat",
    "build_sweep",
    "build_stefan_kwargs",
    "build_barrier",
]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into an ordered dict of strings."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _float(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = cfg.pop(key)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {raw!r}") from None


def _int(cfg: dict, key: str, default=None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = cfg.pop(key)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {raw!r}") from None
    return value

def _floats(words) -> list:
    try:
        return [float(w) for w in words]
    except ValueError:
        raise ConfigError(f"expected numbers, got {' '.join(words)!r}") from None


def _reject_leftovers(cfg: dict, context: str) -> None:
    if cfg:
        raise ConfigError(f"unknown {context} keys: {', '.join(sorted(cfg))}")


def build_field(grid: Grid1D, spec: str, key: str) -> Field:
    """Initial-data vocabulary: zero | const | bump | sin | step."""
    words = spec.split()
    kind, args = words[0], words[1:]
    if kind == "zero":
        if args:
            raise ConfigError(f"key {key!r}: 'zero' takes no arguments")
        return Field.zeros(grid)
    if kind == "const":
        (level,) = _check_arity(key, kind, args, 1)
        return Field.full(grid, level)
    if kind == "bump":
        amp, center, halfwidth = _check_arity(key, kind, args, 3)
        return Field(grid, bump_profile(grid.nodes, amp, center, halfwidth))
    if kind == "sin":
        if len(args) == 1:
            (amp,), n = _floats(args), 1
        else:
            amp, n = _check_arity(key, kind, args, 2)
            if n != round(n):
                raise ConfigError(f"key {key!r}: sin mode count must be integral")
        width = grid.x_max - grid.x_min
        values = amp * np.sin(round(n) * math.pi * (grid.nodes - grid.x_min) / width)
        return Field(grid, values)
    if kind == "step":
        if len(args) == 2:
            (level, lo), hi = _floats(args), grid.x_max
        else:
            level, lo, hi = _check_arity(key, kind, args, 3)
        values = np.where((grid.nodes >= lo) & (grid.nodes <= hi), level, 0.0)
        return Field(grid, values)
    raise ConfigError(f"key {key!r}: unknown initial-data kind {kind!r}")


def _check_arity(key: str, kind: str, args, n: int) -> list:
    if len(args) != n:
        raise ConfigError(
            f"key {key!r}: {kind!r} takes {n} argument(s), got {len(args)}")
    return _floats(args)


def _build_bc(spec: str, key: str):
    words = spec.split()
    if words[0] == "neumann":
        if len(words) != 1:
            raise ConfigError(f"key {key!r}: 'neumann' takes no arguments")
        return NeumannZero()
    if words[0] == "dirichlet":
        (value,) = _check_arity(key, "dirichlet", words[1:], 1)
        return DirichletConst(value)
    raise ConfigError(f"key {key!r}: unknown boundary kind {words[0]!r}")


def _build_grid(cfg: dict) -> Grid1D:
    return Grid1D(
        _float(cfg, "x_min"),
        _float(cfg, "x_max"),
        _int(cfg, "n_cells"),
        cfg.pop("geometry", "cartesian"),
        _int(cfg, "dim", 1),
    )


def build_problem(cfg: dict) -> tuple:
    """(ProblemSpec, sample_stride) from a config dict; consumes the dict."""
    cfg = dict(cfg)
    grid = _build_grid(cfg)
    bc = BoundarySpec(_build_bc(cfg.pop("bc_left", "neumann"), "bc_left"),
                      _build_bc(cfg.pop("bc_right", "neumann"), "bc_right"))
    u0 = build_field(grid, cfg.pop("u0", "zero"), "u0")
    v0 = build_field(grid, cfg.pop("v0", "zero"), "v0")
    spec = ProblemSpec(grid, bc, u0, v0,
                       m=_float(cfg, "m"), k=_float(cfg, "k"),
                       T=_float(cfg, "T"), dt=_float(cfg, "dt"),
                       theta=_float(cfg, "theta", 1.0))
    stride = _int(cfg, "sample_stride", 1)
    _reject_leftovers(cfg, "simulate")
    return spec, stride


def build_heat(cfg: dict) -> tuple:
    """(HeatSpec, sample_stride); tolerates and ignores m/k/v0 so the same
    file can drive both `simulate` and `heat`."""
    cfg = dict(cfg)
    for ignored in ("m", "k", "v0"):
        cfg.pop(ignored, None)
    grid = _build_grid(cfg)
    bc = BoundarySpec(_build_bc(cfg.pop("bc_left", "neumann"), "bc_left"),
                      _build_bc(cfg.pop("bc_right", "neumann"), "bc_right"))
    u0 = build_field(grid, cfg.pop("u0", "zero"), "u0")
    spec = HeatSpec(grid, bc, u0, T=_float(cfg, "T"), dt=_float(cfg, "dt"),
                    theta=_float(cfg, "theta", 1.0))
    stride = _int(cfg, "sample_stride", 1)
    _reject_leftovers(cfg, "heat")
    return spec, stride


def build_sweep(cfg: dict) -> SweepSpec:
    cfg = dict(cfg)
    k_values = tuple(_floats(cfg.pop("k_values").split())) \
        if "k_values" in cfg else None
    if not k_values:
        raise ConfigError("missing required key 'k_values'")
    compact = (_float(cfg, "compact_a"), _float(cfg, "compact_b"))
    tau = _float(cfg, "tau")
    interface_level = (_float(cfg, "interface_level")
                       if "interface_level" in cfg else None)
    probe_x = _float(cfg, "probe_x") if "probe_x" in cfg else None
    cfg.setdefault("k", repr(k_values[0]))
    base, stride = build_problem(cfg)
    return SweepSpec(base, k_values, compact, tau,
                     interface_level=interface_level, probe_x=probe_x,
                     sample_stride=stride)


def build_stefan_kwargs(cfg: dict) -> dict:
    """Keyword arguments for stefan_experiment."""
    cfg = dict(cfg)
    out = {
        "u0_level": _float(cfg, "u0_level"),
        "v0_level": _float(cfg, "v0_level"),
        "k_values": tuple(_floats(cfg.pop("k_values").split())
                          if "k_values" in cfg else ()),
        "grid": _build_grid(cfg),
        "T": _float(cfg, "T"),
        "theta": _float(cfg, "theta", 1.0),
    }
    if not out["k_values"]:
        raise ConfigError("missing required key 'k_values'")
    if "dt" in cfg:
        out["dt"] = _float(cfg, "dt")
    if "sample_stride" in cfg:
        out["sample_stride"] = _int(cfg, "sample_stride")
    if "interface_level" in cfg:
        out["interface_level"] = _float(cfg, "interface_level")
    if "metric_t_min_frac" in cfg:
        out["metric_t_min_frac"] = _float(cfg, "metric_t_min_frac")
    _reject_leftovers(cfg, "stefan")
    return out


def build_barrier(cfg: dict) -> tuple:
    """(AnnulusBarrierSpec, kwargs for annulus_barrier_experiment)."""
    cfg = dict(cfg)
    spec = AnnulusBarrierSpec(
        d1=_float(cfg, "d1"), d3=_float(cfg, "d3"), d2=_float(cfg, "d2"),
        dim=_int(cfg, "dim", 1),
        u0_level=_float(cfg, "u0_level"), v0_level=_float(cfg, "v0_level"),
        t0=_float(cfg, "t0"), T0=_float(cfg, "T0"),
        m=_float(cfg, "m"), k=_float(cfg, "k"),
    )
    kwargs = {"n_cells": _int(cfg, "n_cells")}
    if "dt" in cfg:
        kwargs["dt"] = _float(cfg, "dt")
    if "sample_dt" in cfg:
        kwargs["sample_dt"] = _float(cfg, "sample_dt")
    has_l1, has_l2 = "lambda1" in cfg, "lambda2" in cfg
    if has_l1 != has_l2:
        raise ConfigError("lambda1 and lambda2 must be given together")
    if has_l1:
        kwargs["lambda1"] = _float(cfg, "lambda1")
        kwargs["lambda2"] = _float(cfg, "lambda2")
    _reject_leftovers(cfg, "barrier")
    return spec, kwargs
