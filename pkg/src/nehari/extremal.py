"""Extreme value of the constrained Rayleigh quotient and its machinery.

This module computes

* the extreme value: the infimum of ``int|grad u|^p / int h|u|^p`` over
  fields with ``int f|u|^gamma >= 0`` and positive h-mass (attained on the
  equality face ``int f|u|^gamma = 0`` whenever the first eigenfunction is
  infeasible),
* the scalar rescaling of its minimizer to a degenerate-class solution,
* the mu-restricted minimization of the ray-reduced energy (the tool for
  parameters at and beyond the extreme value),
* the separation threshold below the extreme value,
* the plateau edge ``sup { mu : restricted value unchanged }``, and
* a probe for degenerate Nehari points below the extreme value.

The nonconvex equality-constrained solves use a multistart augmented
Lagrangian on scale-invariant constraint forms; restarts are seeded and the
reduction is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import Field
from .eigensolve import EigenResult, lambda1
from .errors import (
    BoundaryMinimizerNotFound,
    DegenerateScaling,
    EmptyCone,
    InfeasibleConstraint,
    PlateauNotFound,
    SeparationFailed,
)
from .functionals import Forms, ProblemData, gamma_part
from .optim import minimize_homogeneous, minimize_with_equality, scalar_log_min
from .seeds import cone_start, gaussian_bump

__all__ = [
    "ExtremeResult",
    "RestrictedMin",
    "PlateauEdge",
    "lambda_star",
    "critical_rescale",
    "restricted_min",
    "separation_threshold",
    "plateau_edge",
    "face_min",
    "degenerate_probe",
]


@dataclass(frozen=True, eq=False)
class ExtremeResult:
    """Minimizer data for the extreme value.

    ``t0`` is the scale making ``t0 * u_star`` a degenerate-class solution at
    ``lam_star``; it is None when the sign constraint was inactive (the
    unconstrained minimizer was already feasible, so ``lam_star == lam1``).
    """

    lam_star: float
    u_star: Field
    f_at_min: float
    t0: Optional[float]
    constraint_residual: float
    constraint_active: bool
    lam1: float
    iterations: int


def _fibered_residual(forms: Forms, x: np.ndarray, lam: float) -> float:
    hv = forms.p_part_smooth(x, lam)[0]
    fv = forms.fmass(x)[0]
    if hv * fv <= 0:
        return np.inf
    s = (hv / fv) ** (1.0 / (forms.gamma - forms.p))
    return forms.residual(s * x, lam)


def _sign_constraint(forms: Forms):
    """Scale-invariant equality form  c = f-mass / gamma-mass."""

    def constraint(x: np.ndarray):
        fv, fg = forms.fmass(x)
        gv, gg = forms.gmass(x)
        c = fv / gv
        gc = (fg - c * gg) / gv
        return c, gc

    return constraint


def _feasibility_seeds(forms: Forms, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    """Bump fields biased toward the nonnegativity set of f with positive h-mass."""
    dom = forms.dom
    f_int = forms.f_int
    coords = dom.axis()[1:-1]
    if dom.dim == 2:
        xi = np.repeat(coords, dom.n_interior_axis)
        yi = np.tile(coords, dom.n_interior_axis)
        pts = np.stack([xi, yi], axis=1)
    else:
        pts = coords[:, None]
    pos = np.nonzero(f_int > 0)[0]
    if pos.size == 0:
        pos = np.nonzero((np.abs(f_int) <= 1e-12) & (forms.h_int > 0))[0]
    if pos.size == 0:
        raise InfeasibleConstraint("f is negative wherever h is positive")
    seeds = []
    peak = pos[int(np.argmax(f_int[pos]))]
    seeds.append(gaussian_bump(forms, pts[peak], 3.0 * dom.spacing))
    while len(seeds) < count:
        k = pos[int(rng.integers(0, pos.size))]
        width = dom.spacing * float(rng.uniform(1.0, 8.0))
        seeds.append(gaussian_bump(forms, pts[k], width))
    out = []
    for s in seeds:
        if forms.hmass(s)[0] > 0:
            out.append(s / forms.enorm(s))
    if not out:
        raise InfeasibleConstraint("no admissible seed with positive h-mass")
    return out


def _constrained_quotient_min(
    forms: Forms,
    seeds: Sequence[np.ndarray],
    c_tol: float,
    inner_kwargs: dict,
):
    """Run the augmented Lagrangian from every seed; return all outcomes."""
    constraint = _sign_constraint(forms)

    def quotient(x: np.ndarray):
        return forms.quotient(x)

    def feasible(x: np.ndarray) -> bool:
        return forms.hmass(x)[0] > 0

    results = []
    for k, s in enumerate(seeds):
        res = minimize_with_equality(
            s, quotient, constraint, forms.enorm,
            feasible=feasible, c_tol=c_tol, inner_kwargs=inner_kwargs,
        )
        r_exact = forms.grad_energy_exact(res.x) / forms.hmass(res.x)[0]
        results.append((r_exact, k, res))
    return results


def lambda_star(
    data: ProblemData,
    eigen: Optional[EigenResult] = None,
    restarts: int = 8,
    seed: int = 0,
    c_tol: float = 1e-9,
    accept_tol: float = 1e-7,
) -> ExtremeResult:
    """Extreme value of the sign-constrained Rayleigh quotient.

    When the first eigenfunction already satisfies the sign constraint the
    constraint is inactive and the result is the first eigenpair itself.
    Otherwise the minimizer is sought on the equality face with a multistart
    augmented Lagrangian (best feasible quotient wins; ties break by seed
    order), made nonnegative by modulus replacement, and rescaled to a
    degenerate-class solution.

    Raises :class:`InfeasibleConstraint` when no field with nonnegative
    f-mass and positive h-mass exists (e.g. f < 0 everywhere); callers
    encode that as an explicit "infeasible" flag, never as a float infinity.
    """
    if eigen is None:
        eigen = lambda1(data, seed=seed)
    forms = Forms(data)
    f_phi = gamma_part(eigen.phi1, data)
    if f_phi >= 0.0:
        return ExtremeResult(
            lam_star=eigen.lam1,
            u_star=eigen.phi1,
            f_at_min=f_phi,
            t0=None,
            constraint_residual=0.0,
            constraint_active=False,
            lam1=eigen.lam1,
            iterations=eigen.iterations,
        )

    if not np.any(data.f.positive) and not np.any(data.f.zero):
        raise InfeasibleConstraint("f is strictly negative on every node")

    rng = np.random.default_rng(seed)
    seeds = _feasibility_seeds(forms, rng, max(1, restarts))
    inner = {"g_tol": 1e-10, "max_iter": 3000, "polish_iter": 150}
    results = _constrained_quotient_min(forms, seeds, c_tol, inner)

    constraint = _sign_constraint(forms)
    feasible_results = [
        (r, k, res) for (r, k, res) in results if abs(res.extra["constraint"]) <= accept_tol
    ]
    if not feasible_results:
        raise InfeasibleConstraint(
            "no restart reached the sign-constraint face; feasible set appears empty"
        )
    feasible_results.sort(key=lambda t: (t[0], t[1]))
    _, _, best = feasible_results[0]
    total_it = sum(res.iterations for _, _, res in results) + eigen.iterations

    x = np.abs(best.x)
    x /= forms.enorm(x)
    repolish = minimize_with_equality(
        x, forms.quotient, constraint, forms.enorm,
        feasible=lambda z: forms.hmass(z)[0] > 0,
        c_tol=c_tol, max_outer=8, inner_kwargs=inner,
    )
    x = np.abs(repolish.x)
    x /= forms.enorm(x)
    total_it += repolish.iterations

    lam_s = forms.grad_energy_exact(x) / forms.hmass(x)[0]
    u_star = Field(data.domain, x)
    f_min = gamma_part(u_star, data)
    t0, _ = critical_rescale(u_star, lam_s, data)
    return ExtremeResult(
        lam_star=float(lam_s),
        u_star=u_star,
        f_at_min=float(f_min),
        t0=t0,
        constraint_residual=abs(constraint(x)[0]),
        constraint_active=True,
        lam1=eigen.lam1,
        iterations=total_it,
    )


def critical_rescale(
    u_star: Field,
    lam_star: float,
    data: ProblemData,
    t_lo: float = 1e-6,
    t_hi: float = 1e6,
) -> tuple[float, Field]:
    """Scale the extreme minimizer to minimize the stationarity residual.

    Both forms already vanish on the minimizer (up to solver tolerance), so
    every scaling stays in the degenerate class by homogeneity; the scalar
    search only tunes stationarity of the full equation.  Along the ray the
    gradient is ``t^(p-1) A - t^(gamma-1) B`` with fixed fields A, B, so the
    raw residual vanishes trivially as t -> 0; the search therefore
    minimizes the cancellation measure ``|t^(p-1)A - t^(gamma-1)B|`` scaled
    by the term magnitudes, seeded by the least-squares ray multiplier.
    Raises :class:`DegenerateScaling` when no interior minimum exists in
    ``[t_lo, t_hi]`` (multiplier of the wrong sign).
    """
    forms = Forms(data)
    x = u_star.values
    hv, hg = forms.p_part_smooth(x, lam_star)
    fv, fg = forms.fmass(x)
    a = hg / data.p
    b = fg / data.gamma
    bb = float(np.dot(b, b))
    if bb == 0.0:
        raise DegenerateScaling("gamma-part gradient vanishes at the minimizer")
    s_ls = float(np.dot(a, b)) / bb
    if not np.isfinite(s_ls) or s_ls <= 0:
        raise DegenerateScaling(
            f"ray multiplier {s_ls:.3e} is not positive; no interior rescaling"
        )
    t_guess = s_ls ** (1.0 / (data.gamma - data.p))
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))

    def rho(t: float) -> float:
        num = float(np.linalg.norm(t ** (data.p - 1) * a - t ** (data.gamma - 1) * b))
        den = t ** (data.p - 1) * na + t ** (data.gamma - 1) * nb
        return num / den

    lo = max(t_lo, 1e-2 * t_guess)
    hi = min(t_hi, 1e2 * t_guess)
    if not lo < hi:
        raise DegenerateScaling(f"ray scale {t_guess:.3e} outside [{t_lo}, {t_hi}]")
    t0, _, interior = scalar_log_min(rho, lo, hi)
    if not interior:
        raise DegenerateScaling(
            f"stationarity measure has no interior minimum in [{t_lo}, {t_hi}]"
        )
    return float(t0), u_star.scaled(t0)


@dataclass(frozen=True, eq=False)
class RestrictedMin:
    """Outcome of one mu-restricted reduced-energy minimization.

    ``minimizer`` has unit e-norm; ``on_boundary`` marks membership in the
    boundary face (p-part at mu vanishing within tolerance).
    """

    mu: float
    value: float
    minimizer: Field
    on_boundary: bool
    h_mu: float
    iterations: int


def _adaptive_cone_guard(forms: Forms, mu: float, f_start: float):
    """Feasibility test for the open cone with a ratcheting f-mass guard.

    Any candidate with negative mu-part belongs to the feasible set, so its
    f-mass legitimately updates the reference; individual steps may move the
    f-mass at most halfway toward zero, which blocks single-step excursions
    toward the degenerate face.
    """
    state = [f_start]

    def feasible(x: np.ndarray) -> bool:
        hv = forms.p_part_smooth(x, mu)[0]
        if hv >= 0:
            return False
        fv = forms.fmass(x)[0]
        if fv >= 0.5 * state[0]:
            return False
        state[0] = max(state[0], fv)
        return True

    return feasible


def restricted_min(
    lam: float,
    mu: float,
    data: ProblemData,
    warm: Optional[Field] = None,
    seed: int = 0,
    lam1: Optional[float] = None,
    lam_star: Optional[float] = None,
    r_tol: float = 1e-9,
    g_tol: float = 1e-11,
    max_iter: int = 8000,
    boundary_tol: float = 1e-6,
    force_boundary: bool = False,
) -> RestrictedMin:
    """Minimize the ray-reduced energy at ``lam`` over the mu-cone closure.

    The interior solve is a guarded descent (steps shrinking until the
    iterate stays in the open cone).  When the iterate lands near the
    boundary face, or on request, an equality-constrained solve on that face
    runs as well and the better value wins; this resolves minimizers that
    genuinely sit on the face, where plain descent stalls.
    """
    if lam1 is not None and not lam1 < mu:
        raise ValueError(f"need lam1 < mu, got lam1={lam1}, mu={mu}")
    if lam_star is not None and not mu < lam_star:
        raise ValueError(f"need mu < lam_star, got mu={mu}, lam_star={lam_star}")
    if lam1 is not None and not lam >= lam1:
        raise ValueError(f"need lam >= lam1, got lam={lam}, lam1={lam1}")
    if not mu > 0:
        raise ValueError("mu must be positive")

    forms = Forms(data)
    rng = np.random.default_rng(seed)
    extra = [warm.values] if warm is not None else []
    x0 = cone_start(forms, mu, h_negative=True, rng=rng, extra=extra)
    feasible = _adaptive_cone_guard(forms, mu, forms.fmass(x0)[0])

    def vg(x: np.ndarray):
        j, gj, _, _ = forms.reduced(x, lam)
        return j, gj

    res = minimize_homogeneous(
        x0, vg, forms.enorm, feasible=feasible,
        residual=lambda z: _fibered_residual(forms, z, lam),
        r_tol=r_tol, g_tol=g_tol, max_iter=max_iter, polish_iter=300,
    )
    x = res.x / forms.enorm(res.x)
    j_int = forms.reduced(x, lam)[0]
    iters = res.iterations

    def h_scale(z: np.ndarray) -> float:
        return forms.grad_energy_exact(z) + abs(mu) * abs(forms.hmass(z)[0]) + 1.0

    h_mu = forms.p_part_exact(x, mu)
    near = abs(h_mu) <= 1e-3 * h_scale(x)

    x_best, j_best, hit_boundary = x, j_int, False
    if force_boundary or near or not res.converged:
        xb, jb, it_b = _boundary_face_min(forms, lam, mu, x)
        iters += it_b
        if xb is not None and (force_boundary or jb < j_best - 1e-12 * abs(j_best)):
            x_best, j_best, hit_boundary = xb, jb, True
    h_mu_best = forms.p_part_exact(x_best, mu)
    on_boundary = hit_boundary or abs(h_mu_best) <= boundary_tol * h_scale(x_best)
    return RestrictedMin(
        mu=mu,
        value=float(j_best),
        minimizer=Field(data.domain, x_best),
        on_boundary=bool(on_boundary),
        h_mu=float(h_mu_best),
        iterations=iters,
    )


def _face_guard(forms: Forms, lam: float, mu: float, f_start: float):
    """Feasibility test for face solves with an f-mass cap off the cone.

    Off the constraint face the reduced energy is unbounded below through
    the corner of near-degenerate fields (mu-part positive, f-mass tending
    to zero), so finite penalties cannot hold the constraint on their own.
    Genuine cone members (nonpositive mu-part) have f-mass bounded away
    from zero by the cone supremum automatically, so they are always
    admitted and ratchet the cap; off-cone candidates must stay below half
    the best cone value seen, which blocks the corner dive while never
    excluding true face minimizers (their f-mass lies below the supremum).
    The cap only loosens over time, so iterates never fail a later
    re-check.
    """
    state = [min(f_start, -1e-300)]
    gamma = forms.gamma

    def feasible(x: np.ndarray) -> bool:
        if forms.p_part_smooth(x, lam)[0] >= 0:
            return False
        n = forms.enorm(x)
        if not np.isfinite(n) or n <= 0:
            return False
        fv = forms.fmass(x)[0] / n**gamma
        if fv >= 0:
            return False
        if forms.p_part_smooth(x, mu)[0] <= 0:
            state[0] = max(state[0], fv)
            return True
        return fv < 0.5 * state[0]

    return feasible


def _boundary_face_min(forms: Forms, lam: float, mu: float, x0: np.ndarray,
                       tight: bool = False):
    """Equality-constrained reduced-energy solve on the face H_mu = 0."""

    def constraint(x: np.ndarray):
        hv, hg = forms.p_part_smooth(x, mu)
        ev, eg = forms.grad_energy(x)
        c = hv / ev
        gc = (hg - c * eg) / ev
        return c, gc

    n0 = forms.enorm(x0)
    feasible = _face_guard(forms, lam, mu, forms.fmass(x0)[0] / n0**forms.gamma)

    def vg(x: np.ndarray):
        j, gj, _, _ = forms.reduced(x, lam)
        return j, gj

    inner = ({"g_tol": 1e-11, "max_iter": 3000, "polish_iter": 200} if tight
             else {"g_tol": 1e-9, "max_iter": 1500, "polish_iter": 80})
    try:
        res = minimize_with_equality(
            x0, vg, constraint, forms.enorm, feasible=feasible,
            c_tol=1e-10, max_outer=20, inner_kwargs=inner,
        )
    except (ValueError, EmptyCone):
        return None, np.inf, 0
    if not res.converged and abs(res.extra.get("constraint", np.inf)) > 1e-8:
        return None, np.inf, res.iterations
    x = res.x / forms.enorm(res.x)
    return x, forms.reduced(x, lam)[0], res.iterations


def separation_threshold(
    data: ProblemData,
    lam_star: float,
    minimizers: Sequence[Field],
    lam1: float,
    grid_count: int = 16,
    margin_frac: float = 0.05,
) -> float:
    """Largest grid value separating the given minimizers from the boundary.

    Each minimizer has quotient q below the extreme value; the returned mu0
    is the largest of ``grid_count`` equispaced values in (lam1, lam_star)
    exceeding every quotient by the margin, so the mu0-part of every
    supplied minimizer is strictly negative.  Raises
    :class:`SeparationFailed` when no grid value qualifies, which signals
    discretization trouble (a quotient too close to the extreme value).
    """
    if not minimizers:
        raise ValueError("need at least one minimizer")
    forms = Forms(data)
    span = lam_star - lam1
    if span <= 0:
        raise SeparationFailed("extreme value does not exceed the first eigenvalue")
    quotients = []
    for v in minimizers:
        m = forms.hmass(v.values)[0]
        if m <= 0:
            raise SeparationFailed("minimizer with nonpositive h-mass")
        quotients.append(forms.grad_energy_exact(v.values) / m)
    need = max(quotients) + margin_frac * span
    grid = lam1 + span * np.arange(1, grid_count) / grid_count
    ok = grid[grid > need]
    if ok.size == 0:
        raise SeparationFailed(
            f"no grid value in (lam1, lam_star) clears max quotient {max(quotients):.6g}"
        )
    return float(ok[-1])


def _dive_start(
    forms: Forms,
    u_star_dir: np.ndarray,
    mu: float,
) -> Optional[np.ndarray]:
    """Near-face field obtained by perturbing the extreme minimizer.

    Beyond the extreme value the restricted infimum is carried by
    near-degenerate directions around the extreme minimizer (small f-mass,
    quotient just below mu).  Moving against the f-mass gradient lowers both
    the f-mass and the quotient at first order; the scalar is bisected until
    the quotient sits just below mu, i.e. the field lies essentially on the
    boundary face.
    """
    d = forms.fmass(u_star_dir)[1]
    nd = float(np.linalg.norm(d))
    if nd == 0:
        return None
    d = d / nd

    def quotient_at(t: float) -> float:
        v = u_star_dir - t * d
        m = forms.hmass(v)[0]
        if m <= 0:
            return np.inf
        return forms.grad_energy_exact(v) / m

    t_lo, t_hi = 0.0, 1e-6
    found = False
    for _ in range(60):
        if quotient_at(t_hi) < mu:
            found = True
            break
        t_lo = t_hi
        t_hi *= 2.0
    if not found:
        return None
    for _ in range(60):
        t_mid = 0.5 * (t_lo + t_hi)
        if quotient_at(t_mid) < mu:
            t_hi = t_mid
        else:
            t_lo = t_mid
    v = u_star_dir - t_hi * d
    if forms.fmass(v)[0] >= 0 or forms.hmass(v)[0] <= 0:
        return None
    return v / forms.enorm(v)


def face_min(
    lam: float,
    mu: float,
    data: ProblemData,
    starts: Sequence[np.ndarray],
    tight: bool = False,
) -> tuple[Optional[Field], float, int]:
    """Best reduced-energy value on the face H_mu = 0 over multiple starts."""
    forms = Forms(data)
    best_x, best_j, iters = None, np.inf, 0
    for x0 in starts:
        if x0 is None:
            continue
        xb, jb, it = _boundary_face_min(forms, lam, mu, x0, tight=tight)
        iters += it
        if xb is not None and jb < best_j:
            best_x, best_j = xb, jb
    if best_x is None:
        return None, np.inf, iters
    return Field(data.domain, best_x), float(best_j), iters


@dataclass(frozen=True, eq=False)
class PlateauEdge:
    """Plateau edge with its boundary-face minimizer and face value."""

    mu: float
    boundary_minimizer: Field
    face_value: float
    j_mu0: float


def plateau_edge(
    lam: float,
    mu0: float,
    data: ProblemData,
    lam1: float,
    lam_star: float,
    u_star: Field,
    j_mu0: Optional[float] = None,
    warm: Optional[Field] = None,
    seed: int = 0,
    value_rtol: float = 1e-4,
    max_bisect: int = 48,
) -> PlateauEdge:
    """Largest mu at which the restricted value still equals its mu0 value.

    Equivalent formulation used here: the restricted value stays on its
    plateau exactly while the boundary-face minimum exceeds it, and starts
    to fall once minimizers reach the face, so the edge is the mu where the
    face minimum crosses the plateau value.  The crossing is bisected; face
    solves are seeded both by the previous face minimizer and by the
    near-degenerate perturbations of the extreme minimizer that carry the
    fall.  Raises :class:`PlateauNotFound` when the face value is already
    below the plateau at mu0 (no plateau to speak of) and
    :class:`BoundaryMinimizerNotFound` when no crossing exists below the
    extreme value (parameter too close to it; shrink lam toward the extreme
    value is not applicable here, enlarging it is).
    """
    if not lam > lam_star:
        raise ValueError(f"need lam > lam_star, got lam={lam}, lam_star={lam_star}")
    if not lam1 < mu0 < lam_star:
        raise ValueError("mu0 must lie between lam1 and lam_star")

    forms = Forms(data)
    if j_mu0 is None:
        base = restricted_min(lam, mu0, data, warm=warm, seed=seed,
                              lam1=lam1, lam_star=lam_star)
        j_mu0 = base.value

    u_dir = u_star.values / forms.enorm(u_star.values)
    face_warm: Optional[np.ndarray] = None

    def face_value(mu: float, tight: bool = False) -> tuple[float, Optional[Field]]:
        nonlocal face_warm
        seed = _dive_start(forms, u_dir, mu)
        starts = [seed]
        if face_warm is not None:
            starts.append(face_warm)
        fld, val, _ = face_min(lam, mu, data, starts, tight=tight)
        # The dive seed sits on the face exactly, so its value is a valid
        # upper bound even when the constrained solve fails to settle.
        if seed is not None:
            hv = forms.p_part_smooth(seed, lam)[0]
            fv = forms.fmass(seed)[0]
            if hv < 0 and fv < 0:
                seed_val = forms.reduced(seed, lam)[0]
                if seed_val < val:
                    val, fld = seed_val, Field(data.domain, seed)
        if fld is not None:
            face_warm = fld.values
        return val, fld

    hi = lam_star - 1e-4 * (lam_star - mu0)
    val_hi, fld_hi = face_value(hi)
    if not val_hi < j_mu0:
        raise BoundaryMinimizerNotFound(
            f"face value {val_hi:.6g} never falls below the plateau {j_mu0:.6g} "
            f"below the extreme value"
        )
    lo = mu0
    val_lo, fld_lo = face_value(lo)
    if val_lo < j_mu0 - value_rtol * abs(j_mu0):
        raise PlateauNotFound(
            f"face value at mu0 already below the plateau ({val_lo:.6g} < {j_mu0:.6g})"
        )
    mu_edge, fld_edge, val_edge = hi, fld_hi, val_hi
    span = lam_star - mu0
    for _ in range(max_bisect):
        if abs(val_edge - j_mu0) <= value_rtol * abs(j_mu0):
            break
        mid = 0.5 * (lo + hi)
        tight = (hi - lo) <= 0.02 * span
        val_mid, fld_mid = face_value(mid, tight=tight)
        if val_mid < j_mu0:
            hi, mu_edge, fld_edge, val_edge = mid, mid, fld_mid, val_mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * span:
            break
    # One final tight solve pins the reported face value and minimizer.
    if fld_edge is not None:
        val_tight, fld_tight = face_value(mu_edge, tight=True)
        if fld_tight is not None and abs(val_tight - j_mu0) <= abs(val_edge - j_mu0):
            val_edge, fld_edge = val_tight, fld_tight
    if fld_edge is None:
        raise BoundaryMinimizerNotFound("face solve failed at the crossing")
    return PlateauEdge(
        mu=float(mu_edge),
        boundary_minimizer=fld_edge,
        face_value=float(val_edge),
        j_mu0=float(j_mu0),
    )


def degenerate_probe(
    data: ProblemData,
    seed: int = 0,
    restarts: int = 4,
    c_tol: float = 1e-9,
) -> dict:
    """Search for a degenerate-class candidate below the extreme value.

    Reruns the sign-constrained quotient minimization from fresh seeds and
    reports the best feasible quotient.  Below the extreme value the search
    must terminate at the extreme value itself (no unit field with vanishing
    f-mass, positive h-mass, and smaller quotient exists), which is the
    emptiness statement this probe checks numerically.
    """
    forms = Forms(data)
    rng = np.random.default_rng(seed)
    seeds = _feasibility_seeds(forms, rng, restarts)
    inner = {"g_tol": 1e-10, "max_iter": 3000, "polish_iter": 150}
    results = _constrained_quotient_min(forms, seeds, c_tol, inner)
    feasible = [(r, k) for (r, k, res) in results if abs(res.extra["constraint"]) <= 1e-7]
    if not feasible:
        return {"found": False, "quotient": None, "constraint": None}
    best_r, _ = min(feasible)
    return {"found": True, "quotient": float(best_r), "constraint": None}
