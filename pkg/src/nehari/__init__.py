"""Two-branch variational solver for the indefinite-weight p-Laplacian.

The package discretizes the quasilinear problem

    -div(|grad u|^(p-2) grad u) - lam * h(x) |u|^(p-2) u = f(x) |u|^(gamma-2) u

on a truncated box with zero boundary values and computes, via Nehari-set
and fibering machinery, the first eigenpair, the extreme value of the
constrained Rayleigh quotient, the two solution branches below the extreme
value, and the restricted first solution plus min-max second solution
slightly beyond it.
"""

from ._kernels import backend as kernel_backend
from .branches import (
    Branch,
    BranchPoint,
    SolveContext,
    SweepRow,
    prepare_context,
    solve_at_star,
    solve_nminus,
    solve_nplus,
    solve_past_star,
    sweep,
)
from .domain import Domain, Field, WeightField, build_domain, e_norm, grad_norm_powers, integrate
from .eigensolve import EigenResult, HypothesesReport, lambda1, validate_hypotheses
from .extremal import (
    ExtremeResult,
    PlateauEdge,
    RestrictedMin,
    critical_rescale,
    degenerate_probe,
    lambda_star,
    plateau_edge,
    restricted_min,
    separation_threshold,
)
from .functionals import (
    ConeFlags,
    EnergyReport,
    NehariClass,
    ProblemData,
    cone_membership,
    energy,
    energy_grad,
    energy_report,
    fiber_scale,
    gamma_part,
    nehari_class,
    p_part,
    pde_residual,
    reduced_energy,
    tail_fraction,
)
from .mountainpass import (
    GeometryChecks,
    PassResult,
    Path,
    boundary_endpoint,
    geometry_checklist,
    optimize_path,
    refine_saddle,
    second_solution,
)
from .presets import template_1d, template_2d, weight_from_profile

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "__version__",
    # domain
    "Domain", "Field", "WeightField", "build_domain", "e_norm",
    "grad_norm_powers", "integrate",
    # functionals
    "ProblemData", "NehariClass", "EnergyReport", "ConeFlags",
    "p_part", "gamma_part", "energy", "energy_grad", "energy_report",
    "nehari_class", "fiber_scale", "reduced_energy", "pde_residual",
    "tail_fraction", "cone_membership",
    # eigensolve
    "EigenResult", "HypothesesReport", "lambda1", "validate_hypotheses",
    # extremal
    "ExtremeResult", "RestrictedMin", "PlateauEdge", "lambda_star",
    "critical_rescale", "restricted_min", "separation_threshold",
    "plateau_edge", "degenerate_probe",
    # branches
    "Branch", "BranchPoint", "SweepRow", "SolveContext", "prepare_context",
    "solve_nplus", "solve_nminus", "solve_at_star", "solve_past_star", "sweep",
    # mountain pass
    "Path", "GeometryChecks", "PassResult", "boundary_endpoint",
    "optimize_path", "geometry_checklist", "refine_saddle", "second_solution",
    # presets
    "template_1d", "template_2d", "weight_from_profile",
]
