"""reactlab: a desk-scale numerical laboratory for the fast-reaction limit
of the asymmetric system u_t = Lap u - k u^m v, v_t = -k u v."""

from .grid import (BoundarySpec, DirichletConst, DirichletSeries, Field,
                   Grid1D, NeumannZero, TridiagLaplacian, laplacian_tridiag,
                   restrict, sup_norm_diff)
from .selfsim import (ConvergenceError, SelfSimilarProfile,
                      gauss_quarter_integral, limit_solution, profile_eval,
                      solve_iota)
from .solver import (ProblemSpec, SchemeViolationError, State, Trajectory,
                     run, scaled_run, step, v_field)
from .reference import HeatSpec, heat_run, mass
from .lab import (DEFAULT_K_LADDER, StefanReport, StefanRow, SweepReport,
                  SweepRow, SweepSpec, bump_profile, emit_csv,
                  interface_position, read_csv, segregated_bump_data,
                  stefan_experiment, sweep)
from .barrier import (AnnulusBarrierSpec, BarrierReport, ReactionMargin,
                      SpaceTimeField, annulus_barrier_experiment,
                      build_annulus_subsolution, choose_iota_star,
                      interval_problem, reaction_inequality_margin,
                      verify_subsolution)

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec", "DirichletConst", "DirichletSeries", "Field", "Grid1D",
    "NeumannZero", "TridiagLaplacian", "laplacian_tridiag", "restrict",
    "sup_norm_diff",
    "ConvergenceError", "SelfSimilarProfile", "gauss_quarter_integral",
    "limit_solution", "profile_eval", "solve_iota",
    "ProblemSpec", "SchemeViolationError", "State", "Trajectory", "run",
    "scaled_run", "step", "v_field",
    "HeatSpec", "heat_run", "mass",
    "DEFAULT_K_LADDER", "SweepSpec", "SweepRow", "SweepReport", "sweep",
    "StefanRow", "StefanReport", "stefan_experiment", "bump_profile",
    "segregated_bump_data", "interface_position", "emit_csv", "read_csv",
    "AnnulusBarrierSpec", "BarrierReport", "ReactionMargin",
    "SpaceTimeField", "annulus_barrier_experiment",
    "build_annulus_subsolution", "choose_iota_star", "interval_problem",
    "reaction_inequality_margin", "verify_subsolution",
    "__version__",
]
