"""Solution branches across the parameter range.

Below the extreme value the two Nehari branches come from minimizing the
ray-reduced energy over the two sign cones; at the extreme value the (-,-)
branch is continued with a geometric parameter schedule and warm starts;
beyond it the first solution comes from the separation-restricted
minimization.  A sweep driver dispatches per parameter value, records
failures row by row, and never aborts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import Field
from .eigensolve import EigenResult, lambda1
from .errors import BoundaryHit, ContinuationStall, NehariError, NoConvergence
from .extremal import (
    ExtremeResult,
    _adaptive_cone_guard,
    _fibered_residual,
    lambda_star,
    restricted_min,
    separation_threshold,
)
from .functionals import EnergyReport, Forms, ProblemData, energy_report
from .optim import minimize_homogeneous
from .seeds import cone_start

__all__ = [
    "Branch",
    "BranchPoint",
    "SweepRow",
    "SolveContext",
    "prepare_context",
    "solve_nplus",
    "solve_nminus",
    "solve_at_star",
    "solve_past_star",
    "sweep",
]


class Branch(enum.Enum):
    NPLUS = "NPLUS"
    NMINUS = "NMINUS"
    RESTRICTED = "RESTRICTED"
    MOUNTAIN_PASS = "MOUNTAIN_PASS"


@dataclass(frozen=True, eq=False)
class BranchPoint:
    """One converged solution record (a bifurcation-diagram row)."""

    lam: float
    branch: Branch
    u: Field
    report: EnergyReport
    iterations: int
    warm_started: bool


def _minimize_cone(
    forms: Forms,
    lam: float,
    plus_cone: bool,
    x0: np.ndarray,
    r_tol: float,
    max_iter: int,
):
    """Reduced-energy descent inside one sign cone."""
    if plus_cone:
        feasible = _adaptive_cone_guard(forms, lam, forms.fmass(x0)[0])
    else:
        def feasible(x: np.ndarray) -> bool:
            return forms.p_part_smooth(x, lam)[0] > 0 and forms.fmass(x)[0] > 0

    def vg(x: np.ndarray):
        j, gj, _, _ = forms.reduced(x, lam)
        return j, gj

    return minimize_homogeneous(
        x0, vg, forms.enorm, feasible=feasible,
        residual=lambda z: _fibered_residual(forms, z, lam),
        r_tol=r_tol, g_tol=1e-12, max_iter=max_iter, polish_iter=300,
    )


def _finalize(
    forms: Forms,
    data: ProblemData,
    lam: float,
    x: np.ndarray,
    branch: Branch,
    iterations: int,
    warm_started: bool,
    tol_accept: float,
    plus_cone: bool,
    r_tol: float,
) -> BranchPoint:
    """Fiber, symmetrize, and validate a converged cone minimizer."""
    v = x / forms.enorm(x)
    if np.min(v) < -1e-10 * np.max(np.abs(v)):
        w = np.abs(v)
        w /= forms.enorm(w)
        res = _minimize_cone(forms, lam, plus_cone, w, r_tol, 1000)
        v = res.x / forms.enorm(res.x)
        iterations += res.iterations
    hv = forms.p_part_smooth(v, lam)[0]
    fv = forms.fmass(v)[0]
    if hv * fv <= 0:
        raise NoConvergence("minimizer left the sign cone during finalization")
    s = (hv / fv) ** (1.0 / (data.gamma - data.p))
    u = Field(data.domain, s * v)
    report = energy_report(u, lam, data)
    if report.residual > tol_accept:
        raise NoConvergence(
            f"residual {report.residual:.3e} above tolerance {tol_accept:.1e} at lam={lam:.6g}"
        )
    return BranchPoint(
        lam=lam, branch=branch, u=u, report=report,
        iterations=iterations, warm_started=warm_started,
    )


def solve_nplus(
    lam: float,
    data: ProblemData,
    warm: Optional[Field] = None,
    phi1: Optional[Field] = None,
    seed: int = 0,
    r_tol: float = 1e-9,
    tol_accept: float = 1e-6,
    max_iter: int = 8000,
) -> BranchPoint:
    """Minimizer of the energy over the (-,-) Nehari branch at ``lam``.

    The energy at the returned point is negative and equals the branch
    infimum; the point satisfies the stationarity equation to ``tol_accept``.
    Raises :class:`EmptyCone` below the first eigenvalue (the cone is
    infeasible there) and :class:`NoConvergence` on a failed polish.
    """
    forms = Forms(data)
    rng = np.random.default_rng(seed)
    extra = [w.values for w in (warm, phi1) if w is not None]
    x0 = cone_start(forms, lam, h_negative=True, rng=rng, extra=extra)
    res = _minimize_cone(forms, lam, True, x0, r_tol, max_iter)
    return _finalize(
        forms, data, lam, res.x, Branch.NPLUS, res.iterations,
        warm is not None, tol_accept, True, r_tol,
    )


def solve_nminus(
    lam: float,
    data: ProblemData,
    warm: Optional[Field] = None,
    seed: int = 0,
    r_tol: float = 1e-9,
    tol_accept: float = 1e-6,
    max_iter: int = 8000,
) -> BranchPoint:
    """Minimizer of the energy over the (+,+) Nehari branch at ``lam``.

    Starts from a bump in the largest component of the positivity set of f
    (the branch needs gamma-mass there); the energy at the returned point is
    positive.
    """
    forms = Forms(data)
    rng = np.random.default_rng(seed)
    extra = [warm.values] if warm is not None else []
    x0 = cone_start(forms, lam, h_negative=False, rng=rng, extra=extra)
    res = _minimize_cone(forms, lam, False, x0, r_tol, max_iter)
    return _finalize(
        forms, data, lam, res.x, Branch.NMINUS, res.iterations,
        warm is not None, tol_accept, False, r_tol,
    )


def solve_at_star(
    data: ProblemData,
    lam_star: float,
    steps: int = 8,
    lam1: Optional[float] = None,
    phi1: Optional[Field] = None,
    seed: int = 0,
    r_tol: float = 1e-9,
    tol_accept: float = 1e-6,
    drift_limit: float = 0.75,
) -> tuple[BranchPoint, list[tuple[float, float]]]:
    """Continuation of the (-,-) branch up to the extreme value.

    Runs the geometric schedule ``lam_n = lam_star - span * 2^-n`` with warm
    starts, then solves at the extreme value itself from the last warm
    start.  Returns the final point and the ``(lam, branch value)`` history;
    the values are nonincreasing along the schedule.  Raises
    :class:`ContinuationStall` when consecutive minimizers drift apart by
    more than ``drift_limit`` in relative field distance.
    """
    if lam1 is None:
        eig = lambda1(data, seed=seed)
        lam1, phi1 = eig.lam1, eig.phi1
    span = lam_star - lam1
    if span <= 0:
        raise ValueError("lam_star must exceed lam1")
    history: list[tuple[float, float]] = []
    warm: Optional[Field] = None
    prev_dir: Optional[np.ndarray] = None
    total_it = 0
    for k in range(1, steps + 1):
        lam_k = lam_star - span * 2.0 ** (-k)
        point = solve_nplus(lam_k, data, warm=warm, phi1=phi1, seed=seed + k, r_tol=r_tol,
                            tol_accept=tol_accept)
        total_it += point.iterations
        direction = point.u.values / np.linalg.norm(point.u.values)
        if prev_dir is not None:
            drift = float(np.linalg.norm(direction - prev_dir))
            if drift > drift_limit:
                raise ContinuationStall(
                    f"minimizer drift {drift:.3f} above {drift_limit} at lam={lam_k:.6g}"
                )
        prev_dir = direction
        warm = point.u
        history.append((lam_k, point.report.energy))

    forms = Forms(data)
    x0 = warm.values / forms.enorm(warm.values)
    res = _minimize_cone(forms, lam_star, True, x0, r_tol, 8000)
    final = _finalize(
        forms, data, lam_star, res.x, Branch.NPLUS, total_it + res.iterations,
        True, tol_accept, True, r_tol,
    )
    hv = final.report.p_part
    fv = final.report.gamma_part
    if not (hv < 0 and fv < 0):
        raise NoConvergence(
            f"extreme-value limit left the open cone (H={hv:.3e}, F={fv:.3e})"
        )
    history.append((lam_star, final.report.energy))
    return final, history


def solve_past_star(
    lam: float,
    mu0: float,
    data: ProblemData,
    warm: Optional[Field] = None,
    lam1: Optional[float] = None,
    lam_star: Optional[float] = None,
    seed: int = 0,
    tol_accept: float = 1e-6,
) -> BranchPoint:
    """First solution beyond the extreme value via the mu0-restricted problem.

    Requires ``lam > lam_star``.  Raises :class:`BoundaryHit` when the
    restricted minimizer lands on the cone boundary, which signals that the
    parameter moved past the empirical validity window.
    """
    if lam_star is not None and not lam > lam_star:
        raise ValueError(f"need lam > lam_star, got lam={lam}, lam_star={lam_star}")
    r = restricted_min(lam, mu0, data, warm=warm, seed=seed, lam1=lam1, lam_star=lam_star)
    if r.on_boundary:
        raise BoundaryHit(
            f"restricted minimizer sits on the boundary face at lam={lam:.6g}"
        )
    forms = Forms(data)
    point = _finalize(
        forms, data, lam, r.minimizer.values, Branch.RESTRICTED,
        r.iterations, warm is not None, tol_accept, True, 1e-9,
    )
    h_mu0 = forms.p_part_exact(point.u.values, mu0)
    if not h_mu0 < 0:
        raise NoConvergence(f"returned point has nonnegative mu0-part {h_mu0:.3e}")
    return point


@dataclass(frozen=True, eq=False)
class SolveContext:
    """Precomputed pipeline state shared by sweep rows."""

    data: ProblemData
    eigen: EigenResult
    extreme: ExtremeResult
    at_star: BranchPoint
    continuation: tuple
    mu0: float
    j_hat_star: float


def prepare_context(
    data: ProblemData,
    seed: int = 0,
    restarts: int = 8,
    continuation_steps: int = 8,
) -> SolveContext:
    """Run the eigen, extreme-value, continuation, and separation stages."""
    eigen = lambda1(data, seed=seed)
    extreme = lambda_star(data, eigen=eigen, restarts=restarts, seed=seed)
    at_star, history = solve_at_star(
        data, extreme.lam_star, steps=continuation_steps,
        lam1=eigen.lam1, phi1=eigen.phi1, seed=seed,
    )
    mu0 = separation_threshold(data, extreme.lam_star, [at_star.u], eigen.lam1)
    return SolveContext(
        data=data,
        eigen=eigen,
        extreme=extreme,
        at_star=at_star,
        continuation=tuple(history),
        mu0=mu0,
        j_hat_star=at_star.report.energy,
    )


@dataclass(frozen=True, eq=False)
class SweepRow:
    """One (parameter, branch) record; failures carry the error name."""

    lam: float
    branch: Branch
    status: str
    point: Optional[BranchPoint]
    message: str = ""


def _row_from_error(lam: float, branch: Branch, exc: Exception) -> SweepRow:
    return SweepRow(lam, branch, type(exc).__name__, None, str(exc))


def sweep(
    lam_grid: Sequence[float],
    data: ProblemData,
    ctx: SolveContext,
    mountain_pass: bool = True,
    seed: int = 0,
    knots: int = 25,
) -> list[SweepRow]:
    """Dispatch solvers over a sorted parameter grid, one row per branch.

    Below the extreme value each parameter gets the two Nehari branches;
    at and beyond it, the restricted first solution and (optionally) the
    mountain-pass second solution.  Warm starts chain along the grid and
    skip duplicate parameters, so duplicated entries produce identical
    rows.  Per-row errors are recorded; the sweep itself never aborts.
    """
    lams = [float(v) for v in lam_grid]
    if lams != sorted(lams):
        raise ValueError("lam_grid must be sorted ascending")
    from . import mountainpass as mp

    rows: list[SweepRow] = []
    lam_star = ctx.extreme.lam_star
    warm_plus: Optional[Field] = None
    warm_minus: Optional[Field] = None
    warm_rest: Optional[Field] = ctx.at_star.u
    prev_lam: Optional[float] = None
    prev_plus, prev_minus, prev_rest = None, None, None

    for lam in lams:
        fresh = prev_lam is None or lam != prev_lam
        if fresh:
            warm_plus = prev_plus if prev_plus is not None else warm_plus
            warm_minus = prev_minus if prev_minus is not None else warm_minus
            warm_rest = prev_rest if prev_rest is not None else warm_rest
        if lam < lam_star:
            try:
                pt = solve_nplus(lam, data, warm=warm_plus, phi1=ctx.eigen.phi1, seed=seed)
                rows.append(SweepRow(lam, Branch.NPLUS, "ok", pt))
                if fresh:
                    prev_plus = pt.u
            except NehariError as exc:
                rows.append(_row_from_error(lam, Branch.NPLUS, exc))
            try:
                pt = solve_nminus(lam, data, warm=warm_minus, seed=seed)
                rows.append(SweepRow(lam, Branch.NMINUS, "ok", pt))
                if fresh:
                    prev_minus = pt.u
            except NehariError as exc:
                rows.append(_row_from_error(lam, Branch.NMINUS, exc))
        else:
            try:
                pt = solve_past_star(
                    lam, ctx.mu0, data, warm=warm_rest,
                    lam1=ctx.eigen.lam1, lam_star=lam_star, seed=seed,
                )
                rows.append(SweepRow(lam, Branch.RESTRICTED, "ok", pt))
                if fresh:
                    prev_rest = pt.u
                first = pt
            except (NehariError, ValueError) as exc:
                rows.append(_row_from_error(lam, Branch.RESTRICTED, exc))
                first = None
            if not mountain_pass:
                rows.append(SweepRow(
                    lam, Branch.MOUNTAIN_PASS, "Skipped", None,
                    "mountain pass disabled",
                ))
            else:
                if first is None:
                    rows.append(SweepRow(
                        lam, Branch.MOUNTAIN_PASS, "Skipped", None,
                        "no first solution at this parameter",
                    ))
                else:
                    try:
                        _, saddle_pt = mp.second_solution(
                            lam, data, ctx.mu0, first,
                            lam1=ctx.eigen.lam1, lam_star=lam_star,
                            u_star=ctx.extreme.u_star, seed=seed, knots=knots,
                        )
                        rows.append(SweepRow(lam, Branch.MOUNTAIN_PASS, "ok", saddle_pt))
                    except (NehariError, ValueError) as exc:
                        rows.append(_row_from_error(lam, Branch.MOUNTAIN_PASS, exc))
        prev_lam = lam
    return rows
