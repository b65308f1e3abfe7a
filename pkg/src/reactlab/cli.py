"""Command-line front end.

Subcommands: simulate, heat, profile, sweep, stefan, verify-barrier.
Shared flags: --config <path>, --out <dir>, --threads <n>.  All outputs are
CSV; single-trajectory commands stream to stdout unless --out is given,
multi-file reports always write into the --out directory (default '.').
Exit code 0 on success, nonzero with a diagnostic on stderr otherwise.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (ConfigError, build_barrier, build_heat, build_problem,
                     build_stefan_kwargs, build_sweep, load_config)
from .barrier import annulus_barrier_experiment
from .lab import _fmt, emit_csv, stefan_experiment, sweep
from .reference import heat_run
from .selfsim import SelfSimilarProfile
from .solver import run, v_field

__all__ = ["main"]


def _common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument("--config", required=config_required, metavar="FILE",
                        help="flat key = value run configuration")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (default: stdout for single "
                             "trajectories, '.' for reports)")
    parser.add_argument("--threads", type=int, default=1, metavar="N",
                        help="parallel runs for sweep/stefan (default 1)")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reactlab",
        description="Fast-reaction limit laboratory for "
                    "u_t = Lap u - k u^m v, v_t = -k u v.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser(
        "simulate", help="one finite-k run; CSV columns t, x, u, v, z"))
    _common(sub.add_parser(
        "heat", help="heat reference run; CSV columns t, x, u"))

    prof = sub.add_parser(
        "profile", help="self-similar profile; iota plus CSV (eta, f)")
    prof.add_argument("--u0", type=float, required=True, help="far-field level U0")
    prof.add_argument("--v0", type=float, required=True, help="static level V0")
    prof.add_argument("--samples", type=int, default=201,
                      help="number of eta samples on [0, 1.25 iota] (default 201)")
    prof.add_argument("--out", metavar="DIR")

    _common(sub.add_parser(
        "sweep", help="k-ladder limit experiment; writes sweep_*.csv"))
    _common(sub.add_parser(
        "stefan", help="free-boundary limit experiment; writes stefan_*.csv"))
    _common(sub.add_parser(
        "verify-barrier", help="annulus subsolution check; writes "
                               "barrier_report.csv"))
    return parser


def _open_out(out_dir: str | None, name: str):
    if out_dir is None:
        return sys.stdout, False
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return open(path / name, "w", encoding="utf-8", newline=""), True


def _emit_trajectory(traj, out_dir: str | None, name: str,
                     with_reaction: bool) -> None:
    fh, close = _open_out(out_dir, name)
    try:
        fh.write("t,x,u,v,z\n" if with_reaction else "t,x,u\n")
        nodes = traj.spec.grid.nodes
        for state in traj.states:
            t_txt = _fmt(state.t)
            if with_reaction:
                v = v_field(state, traj.spec).values
                for i in range(nodes.size):
                    fh.write(f"{t_txt},{_fmt(nodes[i])},{_fmt(state.u.values[i])},"
                             f"{_fmt(v[i])},{_fmt(state.z.values[i])}\n")
            else:
                for i in range(nodes.size):
                    fh.write(f"{t_txt},{_fmt(nodes[i])},{_fmt(state.u.values[i])}\n")
    finally:
        if close:
            fh.close()


def _cmd_simulate(args) -> int:
    spec, stride = build_problem(load_config(args.config))
    traj = run(spec, sample_stride=stride)
    _emit_trajectory(traj, args.out, "simulate.csv", with_reaction=True)
    return 0


def _cmd_heat(args) -> int:
    spec, stride = build_heat(load_config(args.config))
    traj = heat_run(spec, sample_stride=stride)
    _emit_trajectory(traj, args.out, "heat.csv", with_reaction=False)
    return 0


def _cmd_profile(args) -> int:
    if args.samples < 2:
        raise ConfigError("--samples must be at least 2")
    profile = SelfSimilarProfile.from_data(args.u0, args.v0)
    print(f"iota = {_fmt(profile.iota)}")
    etas = np.linspace(0.0, 1.25 * profile.iota, args.samples)
    values = profile.evaluate(etas)
    fh, close = _open_out(args.out, "profile.csv")
    try:
        fh.write("eta,f\n")
        for eta, val in zip(etas, values):
            fh.write(f"{_fmt(eta)},{_fmt(val)}\n")
    finally:
        if close:
            fh.close()
    return 0


def _cmd_sweep(args) -> int:
    spec = build_sweep(load_config(args.config))
    report = sweep(spec, threads=args.threads)
    emit_csv(report, args.out or ".")
    for row in report.rows:
        print(f"k = {row.k:g}: sup|u_k - u_inf| = {row.sup_u_err:.6e}, "
              f"sup v (compact, t >= tau) = {row.sup_v_compact:.6e}")
    print(f"decay slope = {report.decay_slope:.6e} "
          f"(heat oracle -z = {-report.probe_z_heat:.6e})")
    first = report.first_k_below_cubic()
    print(f"smallest k with sup v < k^-3: "
          f"{'none in ladder' if first is None else f'{first:g}'}")
    return 0


def _cmd_stefan(args) -> int:
    kwargs = build_stefan_kwargs(load_config(args.config))
    report = stefan_experiment(threads=args.threads, **kwargs)
    emit_csv(report, args.out or ".")
    print(f"iota = {_fmt(report.profile.iota)}")
    for row in report.rows:
        print(f"k = {row.k:g}: sup|u_k - U| = {row.sup_u_err:.6e}, "
              f"interface exponent = {row.fit_exponent:.4f}, "
              f"prefactor = {row.fit_prefactor:.6f}")
    return 0


def _cmd_verify_barrier(args) -> int:
    spec, kwargs = build_barrier(load_config(args.config))
    report = annulus_barrier_experiment(spec, **kwargs)
    report.to_csv(args.out or ".")
    print(f"iota* = {_fmt(report.iota_star)}  delta = {_fmt(report.delta)}  "
          f"u* = {_fmt(report.u_star)}")
    print(f"sub-u worst = {report.sub_u_worst:+.6e} at "
          f"(t, x) = {report.sub_u_at}")
    print(f"sub-v worst = {report.sub_v_worst:+.6e} at "
          f"(t, x) = {report.sub_v_at}")
    print(f"rho_hat = {report.rho_hat:.6e}  "
          f"discretization budget = {report.disc_budget:.3e}")
    if report.reaction is not None:
        print(f"reaction margin = {report.reaction.value:+.6e} at "
              f"(t, x) = ({report.reaction.t:.6g}, {report.reaction.x:.6g})")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "heat": _cmd_heat,
    "profile": _cmd_profile,
    "sweep": _cmd_sweep,
    "stefan": _cmd_stefan,
    "verify-barrier": _cmd_verify_barrier,
}


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        # Downstream consumer (e.g. head) closed our output early.
        try:
            sys.stdout.close()
        except OSError:
            pass
        return 0
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"reactlab {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
