"""Second solution beyond the extreme value via a min-max path level.

Pipeline: locate the plateau edge, fix a nonnegative boundary minimizer as
the far endpoint, relax a discretized path between the first solution and
that endpoint with the string method (descent transverse to the path,
equal-arc-length reparametrization per sweep, then a climbing phase that
drives the top knot to the interior maximum), verify the min-max geometry
checklist, and polish the top knot to a genuine critical point.

The level found this way is an upper-bound estimate: one optimized path
stands in for the infimum over all paths, with a knot-doubling study as the
resolution control.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import root

from .branches import Branch, BranchPoint
from .domain import Field
from .errors import (
    BoundaryMinimizerNotFound,
    ConvergedToFirstSolution,
    MaxSweepsExceeded,
    NoConvergence,
    PathCollapse,
)
from .extremal import _dive_start, face_min, plateau_edge, restricted_min
from .functionals import Forms, NehariClass, ProblemData, energy_report
from .optim import minimize_homogeneous

__all__ = [
    "Path",
    "GeometryChecks",
    "PassResult",
    "boundary_endpoint",
    "optimize_path",
    "geometry_checklist",
    "refine_saddle",
    "second_solution",
]


@dataclass(frozen=True, eq=False)
class Path:
    """Ordered path knots; endpoints are fixed by construction."""

    knots: tuple[Field, ...]

    def __post_init__(self) -> None:
        if len(self.knots) < 8:
            raise ValueError("a path needs at least 8 knots")

    def as_array(self) -> np.ndarray:
        return np.stack([k.values for k in self.knots])


@dataclass(frozen=True)
class GeometryChecks:
    """Booleans mirroring the six min-max geometry statements.

    ``None`` entries mean not applicable (parameter at or below the extreme
    value).
    """

    ordering: Optional[bool]          # (i)   mu0 < mu_lam < lam_star
    plateau: Optional[bool]           # (ii)  restricted values equal, boundary face inhabited
    barrier: Optional[bool]           # (iii) boundary of the mu0-cone lies above the level
    crossing: Optional[bool]          # (iv)  the optimized path crosses that boundary
    negative_band: Optional[bool]     # (v)   extreme-value p-part stays negative along the path
    level_window: Optional[bool]      # (vi)  restricted value < path level < 0
    details: dict

    def all_hold(self) -> bool:
        flags = (self.ordering, self.plateau, self.barrier,
                 self.crossing, self.negative_band, self.level_window)
        return all(bool(f) for f in flags)


@dataclass(frozen=True, eq=False)
class PassResult:
    c_lambda: float
    saddle: Field
    residual: float
    geometry_checks: Optional[GeometryChecks]
    path: Path
    sweeps: int
    descent_history: tuple[float, ...]


def boundary_endpoint(
    lam: float,
    mu_lam: float,
    data: ProblemData,
    warm: Optional[Field] = None,
    u_star: Optional[Field] = None,
    seed: int = 0,
    face_tol: float = 1e-6,
) -> Field:
    """Nonnegative minimizer on the boundary face at the plateau edge.

    Runs the equality-constrained face solve seeded by ``warm`` and by the
    near-degenerate perturbation of the extreme minimizer, then replaces the
    result by its modulus (re-solving if that left the face).  Returns a
    unit e-norm field whose mu_lam-part vanishes within tolerance and whose
    gamma-part is negative.  Raises :class:`BoundaryMinimizerNotFound` when
    the face solve fails; the caller should shrink the parameter toward the
    extreme value.
    """
    forms = Forms(data)
    starts = []
    if warm is not None:
        starts.append(warm.values)
    if u_star is not None:
        u_dir = u_star.values / forms.enorm(u_star.values)
        starts.append(_dive_start(forms, u_dir, mu_lam))
    fld, _, _ = face_min(lam, mu_lam, data, starts, tight=True)
    if fld is None:
        raise BoundaryMinimizerNotFound(f"face solve failed at mu={mu_lam:.6g}")

    def face_defect(z: np.ndarray) -> float:
        scale = forms.grad_energy_exact(z) + abs(mu_lam) * abs(forms.hmass(z)[0]) + 1.0
        return abs(forms.p_part_exact(z, mu_lam)) / scale

    x = np.abs(fld.values)
    x /= forms.enorm(x)
    if face_defect(x) > face_tol:
        fld2, _, _ = face_min(lam, mu_lam, data, [x], tight=True)
        if fld2 is not None:
            x = np.abs(fld2.values)
            x /= forms.enorm(x)
    if face_defect(x) > face_tol:
        raise BoundaryMinimizerNotFound(
            f"no boundary minimizer at mu={mu_lam:.6g} (face defect {face_defect(x):.3e})"
        )
    if not forms.fmass(x)[0] < 0:
        raise BoundaryMinimizerNotFound("boundary candidate has nonnegative gamma-part")
    return Field(data.domain, x)


def _resample(y: np.ndarray, keep: Optional[int] = None) -> np.ndarray:
    """Equal-chord-length resampling of a polyline, optionally through a knot."""
    def seg(yy: np.ndarray, n_out: int) -> np.ndarray:
        d = np.linalg.norm(np.diff(yy, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(d)])
        if s[-1] <= 0:
            raise PathCollapse("path knots merged")
        t = np.linspace(0.0, s[-1], n_out)
        idx = np.clip(np.searchsorted(s, t, side="right"), 1, len(s) - 1)
        d_safe = np.where(d[idx - 1] > 0, d[idx - 1], 1.0)
        w = (t - s[idx - 1]) / d_safe
        return yy[idx - 1] + w[:, None] * (yy[idx] - yy[idx - 1])

    m = y.shape[0]
    if keep is None or keep in (0, m - 1):
        return seg(y, m)
    left = seg(y[: keep + 1], keep + 1)
    right = seg(y[keep:], m - keep)
    return np.vstack([left, right[1:]])


def optimize_path(
    lam: float,
    endpoints: tuple[Field, Field],
    knots: int,
    data: ProblemData,
    max_sweeps: int = 3000,
    climb_sweeps: int = 800,
    c_rtol: float = 1e-10,
    stall_sweeps: int = 15,
    climb_residual: float = 1e-7,
    polish_tol: float = 1e-6,
    seed: int = 0,
) -> PassResult:
    """String-method estimate of the min-max level between two endpoints.

    Phase one relaxes interior knots transversally with monotone control of
    the path maximum (steps halve when the maximum would rise), so the level
    estimate is nonincreasing across sweeps.  Phase two turns the top knot
    into a climbing image within its own sweep budget, then finishes it with
    a Newton accelerator accepted only when it stays local to the knot (the
    discrete knot maximum underestimates the ridge top otherwise).
    Geometry checks are left unset here; the caller fills them in.  Raises
    :class:`MaxSweepsExceeded` when the descent phase never stalls within
    the budget.
    """
    if knots < 8:
        raise ValueError("need at least 8 knots")
    forms = Forms(data)
    ua, ub = endpoints
    m = knots
    y = np.linspace(0.0, 1.0, m)[:, None] * (ub.values - ua.values)[None, :] + ua.values
    ndof = y.shape[1]

    def phi_and_grads(yy: np.ndarray):
        vals = np.empty(m)
        grads = np.empty((m, ndof))
        for i in range(m):
            vals[i], grads[i] = forms.energy_smooth(yy[i], lam)
        return vals, grads

    def top_residual(yy: np.ndarray, gg: np.ndarray, k: int) -> float:
        return float(np.linalg.norm(gg[k])) / max(1.0, float(np.linalg.norm(yy[k])))

    vals, grads = phi_and_grads(y)
    c = float(np.max(vals))
    history = [c]
    spacing = float(np.linalg.norm(ub.values - ua.values)) / (m - 1)
    step = 0.05 * spacing / max(
        1e-30, float(np.max(np.linalg.norm(grads[1:-1], axis=1)))
    )
    climb_idx = int(np.argmax(vals[1:-1])) + 1
    sweeps = 0
    stall = 0
    climbing = False
    res_top = top_residual(y, grads, climb_idx)
    budget = max_sweeps
    settled = False

    while sweeps < budget:
        sweeps += 1
        tang = y[2:] - y[:-2]
        tnorm = np.linalg.norm(tang, axis=1, keepdims=True)
        tnorm[tnorm == 0] = 1.0
        tang /= tnorm
        g_int = grads[1:-1]
        gt = np.sum(g_int * tang, axis=1, keepdims=True)
        force = -(g_int - gt * tang)
        if climbing:
            k = climb_idx - 1
            force[k] = -(g_int[k] - 2.0 * gt[k] * tang[k])
        # Cap the largest knot displacement at a fraction of the knot spacing.
        fmax = float(np.max(np.linalg.norm(force, axis=1)))
        if fmax <= 0 or not np.isfinite(fmax):
            settled = True
            break
        step = min(step, 0.25 * spacing / fmax)
        trial = y.copy()
        trial[1:-1] += step * force
        trial = _resample(trial, keep=climb_idx if climbing else None)
        trial[0], trial[-1] = y[0], y[-1]
        t_vals, t_grads = phi_and_grads(trial)
        c_new = float(np.max(t_vals))
        finite = np.all(np.isfinite(t_vals))
        if not finite or (not climbing and c_new > c + 1e-14 * (1.0 + abs(c))):
            step *= 0.5
            if step < 1e-16 * spacing:
                settled = True
                break
            continue
        if climbing:
            k_new = int(np.argmax(t_vals[1:-1])) + 1
            res_new = top_residual(trial, t_grads, k_new)
            if res_new > 1.5 * res_top + 1e-16:
                step *= 0.5
                if step < 1e-16 * spacing:
                    settled = True
                    break
                continue
            res_top = res_new
        y, vals, grads = trial, t_vals, t_grads
        climb_idx = int(np.argmax(vals[1:-1])) + 1
        moved = abs(c_new - c)
        c = c_new
        step *= 1.05
        if not climbing:
            history.append(c)
            stall = stall + 1 if moved <= c_rtol * (1.0 + abs(c)) else 0
            if stall >= stall_sweeps:
                climbing = True
                settled = True
                res_top = top_residual(y, grads, climb_idx)
                budget = sweeps + climb_sweeps
        else:
            if res_top <= climb_residual:
                break
    if not settled:
        raise MaxSweepsExceeded(
            f"descent phase did not stall within {max_sweeps} sweeps"
        )

    # The discrete knot maximum underestimates the ridge top; finish the
    # climbing image with a Newton accelerator, accepted only if it stays
    # local to the knot it started from.
    if res_top > climb_residual:
        polished = _root_polish(forms, y[climb_idx], lam, polish_tol, 300)
        if polished is not None:
            dist = float(np.linalg.norm(polished - y[climb_idx]))
            path_len = float(np.sum(np.linalg.norm(np.diff(y, axis=0), axis=1)))
            if dist <= 0.25 * path_len:
                y[climb_idx] = polished
                vals[climb_idx], grads[climb_idx] = forms.energy_smooth(polished, lam)

    saddle = Field(data.domain, y[climb_idx])
    res = forms.residual(saddle.values, lam)
    return PassResult(
        c_lambda=float(vals[climb_idx]),
        saddle=saddle,
        residual=float(res),
        geometry_checks=None,
        path=Path(tuple(Field(data.domain, row) for row in y)),
        sweeps=sweeps,
        descent_history=tuple(history),
    )


def _boundary_samples(
    forms: Forms,
    mu0: float,
    anchor: np.ndarray,
    rng: np.random.Generator,
    count: int,
) -> list[np.ndarray]:
    """Unit fields on the face H_mu0 = 0 with negative gamma-part.

    Mixes the anchor (negative mu0-part) with rough random fields (positive
    mu0-part) and bisects the segment onto the face.
    """
    out: list[np.ndarray] = []
    n = anchor.size
    attempts = 0
    while len(out) < count and attempts < 20 * count:
        attempts += 1
        yr = rng.standard_normal(n)
        if forms.p_part_smooth(yr, mu0)[0] <= 0:
            continue
        lo, hi = 0.0, 1.0  # h(anchor) < 0, h(yr) > 0
        z = None
        for _ in range(60):
            th = 0.5 * (lo + hi)
            z = (1.0 - th) * anchor + th * yr
            hv = forms.p_part_smooth(z, mu0)[0]
            if abs(hv) <= 1e-12 * (abs(hv) + 1.0):
                break
            if hv < 0:
                lo = th
            else:
                hi = th
        if z is None:
            continue
        z = z / forms.enorm(z)
        if forms.fmass(z)[0] < 0 and abs(forms.p_part_smooth(z, mu0)[0]) < 1e-6:
            out.append(z)
    return out


def geometry_checklist(
    lam: float,
    mu0: float,
    mu_lam: float,
    u_first: Field,
    v_boundary: Field,
    path: Path,
    data: ProblemData,
    lam_star: float,
    j_mu0: float,
    j_mu_lam: float,
    c_lambda: float,
    seed: int = 0,
    samples: int = 32,
) -> GeometryChecks:
    """Evaluate the six min-max geometry statements at the discrete level.

    Sampled statements (the barrier estimate) report their sample size in
    the details; the crossing statement is checked by a sign change of the
    mu0-part along the optimized path.
    """
    if not lam > lam_star:
        return GeometryChecks(None, None, None, None, None, None,
                              {"note": "not applicable at or below the extreme value"})
    forms = Forms(data)
    details: dict = {}

    ordering = bool(mu0 < mu_lam < lam_star)

    plateau = bool(abs(j_mu_lam - j_mu0) <= 1e-3 * abs(j_mu0) and v_boundary is not None)
    details["j_mu0"] = j_mu0
    details["j_mu_lam"] = j_mu_lam

    rng = np.random.default_rng(seed)
    anchor = u_first.values / forms.enorm(u_first.values)
    samps = _boundary_samples(forms, mu0, anchor, rng, samples)
    j_vals = []
    for z in samps:
        hv = forms.p_part_smooth(z, lam)[0]
        fv = forms.fmass(z)[0]
        if hv < 0 and fv < 0:
            j_vals.append(forms.reduced(z, lam)[0])
    barrier = None
    if j_vals:
        j_bar = float(np.min(j_vals))
        barrier = bool(j_bar > j_mu0 + 1e-9 * abs(j_mu0))
        details["barrier_level"] = j_bar
        details["barrier_samples"] = len(j_vals)

    knot_h = np.array([forms.p_part_exact(k.values, mu0) for k in path.knots])
    crossing = bool(knot_h[0] < 0 and np.any(knot_h > 0))
    details["h_mu0_endpoints"] = (float(knot_h[0]), float(knot_h[-1]))

    # (v) is an existence statement; the witness is the three-segment path
    # scale down / rotate between the two directions / scale up.  Along the
    # scaling segments the sign of the extreme-value p-part is fixed by
    # p-homogeneity, so checking the directional arc is exact.
    a_dir = u_first.values / forms.enorm(u_first.values)
    b_dir = v_boundary.values / forms.enorm(v_boundary.values)
    arc_max = -np.inf
    for theta in np.linspace(0.0, 1.0, 65):
        mix = (1.0 - theta) * a_dir + theta * b_dir
        nrm = forms.enorm(mix)
        if nrm <= 0:
            arc_max = np.inf
            break
        arc_max = max(arc_max, forms.p_part_exact(mix / nrm, lam_star))
    negative_band = bool(arc_max < 0)
    details["witness_arc_max_h_star"] = float(arc_max)
    knot_hstar = np.array([forms.p_part_exact(k.values, lam_star) for k in path.knots])
    details["max_h_star_on_path"] = float(np.max(knot_hstar))

    level_window = bool(j_mu0 < c_lambda < 0)

    if np.any(data.f.zero):
        warnings.warn(
            "zero set of f has grid interior; the compactness argument assumes the "
            "parameter avoids the spectrum on a ball inside it, which is not certified",
            stacklevel=2,
        )
        details["spectrum_exclusion"] = "not certified (zero set nonempty)"

    return GeometryChecks(
        ordering=ordering,
        plateau=plateau,
        barrier=barrier,
        crossing=crossing,
        negative_band=negative_band,
        level_window=level_window,
        details=details,
    )


def _gradnorm_descent(forms: Forms, x0: np.ndarray, lam: float, iters: int) -> np.ndarray:
    """BB descent on half the squared gradient norm.

    The objective gradient is the Hessian applied to the energy gradient,
    evaluated matrix-free with central differences of gradients.  Used as a
    pre-polisher when the Newton-Krylov solve stalls far from the critical
    point; returns the best-gradient iterate.
    """

    def grad(z: np.ndarray) -> np.ndarray:
        return forms.energy_smooth(z, lam)[1]

    def hess_apply(z: np.ndarray, v: np.ndarray) -> np.ndarray:
        nv = float(np.linalg.norm(v))
        if nv == 0:
            return np.zeros_like(v)
        eps = 1e-7 * (1.0 + float(np.linalg.norm(z))) / nv
        return (grad(z + eps * v) - grad(z - eps * v)) / (2.0 * eps)

    x = np.array(x0, dtype=float)
    g = grad(x)
    best = (x.copy(), float(np.linalg.norm(g)))
    r_grad = hess_apply(x, g)
    alpha = 1e-3 / max(1.0, float(np.linalg.norm(r_grad)))
    s_prev = y_prev = None
    for _ in range(iters):
        if s_prev is not None:
            sy = float(np.dot(s_prev, y_prev))
            if sy > 1e-300:
                alpha = min(max(float(np.dot(s_prev, s_prev)) / sy, 1e-14), 1e6)
        xn = x - alpha * r_grad
        gn = grad(xn)
        if not np.all(np.isfinite(gn)):
            alpha *= 0.25
            continue
        rn_grad = hess_apply(xn, gn)
        s_prev, y_prev = xn - x, rn_grad - r_grad
        x, g, r_grad = xn, gn, rn_grad
        norm_g = float(np.linalg.norm(g))
        if norm_g < best[1]:
            best = (x.copy(), norm_g)
    return best[0]


def _root_polish(
    forms: Forms,
    x0: np.ndarray,
    lam: float,
    tol: float,
    max_iter: int,
) -> Optional[np.ndarray]:
    """Newton-Krylov solve of the stationarity equation from a nearby start.

    Falls back to a gradient-norm descent pre-polish plus one retry when the
    direct solve stalls.
    """

    def grad(z: np.ndarray) -> np.ndarray:
        return forms.energy_smooth(z, lam)[1]

    def attempt(z0: np.ndarray, iters: int) -> Optional[np.ndarray]:
        fatol = 0.2 * tol * max(1.0, float(np.linalg.norm(z0)))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                sol = root(grad, z0, method="krylov",
                           options={"fatol": fatol, "maxiter": iters, "disp": False})
        except Exception:
            return None
        z = np.asarray(sol.x)
        if not np.all(np.isfinite(z)) or forms.residual(z, lam) > tol:
            return None
        return z

    x = attempt(x0, max_iter)
    if x is not None:
        return x
    x1 = _gradnorm_descent(forms, x0, lam, 250)
    return attempt(x1, 2 * max_iter)


def refine_saddle(
    candidate: Field,
    lam: float,
    data: ProblemData,
    u_first: Optional[Field] = None,
    c_lambda: Optional[float] = None,
    tol: float = 1e-6,
    distinct_tol: float = 1e-2,
    level_rtol: float = 1e-4,
    max_iter: int = 400,
) -> BranchPoint:
    """Polish a path maximum to a genuine critical point.

    Newton-Krylov on the energy gradient, followed by modulus symmetrization
    and a re-polish.  Raises :class:`ConvergedToFirstSolution` when the
    refined point collapses onto the first solution and
    :class:`NoConvergence` when the residual or the level agreement is not
    met.
    """
    forms = Forms(data)
    x = _root_polish(forms, candidate.values, lam, tol, max_iter)
    if x is None:
        raise NoConvergence(f"saddle polish failed to reach residual {tol:.1e}")
    if np.min(x) < -1e-10 * np.max(np.abs(x)):
        x2 = _root_polish(forms, np.abs(x), lam, tol, max_iter)
        if x2 is not None:
            x = x2
    x = np.abs(x)
    # push toward the classification gate; keep the coarser point when the
    # deep solve does not engage
    x_deep = _root_polish(forms, x, lam, max(1e-3 * tol, 2e-10), max_iter)
    if x_deep is not None:
        x = np.abs(x_deep)
    u = Field(data.domain, x)
    report = energy_report(u, lam, data)
    if report.nehari is NehariClass.OFF:
        # classify at the precision the polish actually reached: the Euler
        # gap is bounded by the residual times the field norms
        u_norm = float(np.linalg.norm(x))
        implied = (3.0 * report.residual * max(1.0, u_norm) * u_norm
                   / (abs(report.p_part) + abs(report.gamma_part) + 1.0))
        report = energy_report(u, lam, data, tol=max(1e-8, implied))
    if report.residual > tol:
        raise NoConvergence(
            f"saddle polish stopped at residual {report.residual:.3e} (tol {tol:.1e})"
        )
    if c_lambda is not None and abs(report.energy - c_lambda) > level_rtol * abs(c_lambda):
        raise NoConvergence(
            f"refined level {report.energy:.6e} drifted from path level {c_lambda:.6e}"
        )
    if u_first is not None:
        dist = float(np.linalg.norm(x - u_first.values)) / max(
            float(np.linalg.norm(x)), float(np.linalg.norm(u_first.values))
        )
        if dist <= distinct_tol:
            raise ConvergedToFirstSolution(
                f"refined saddle within {dist:.2e} of the first solution"
            )
    return BranchPoint(
        lam=lam, branch=Branch.MOUNTAIN_PASS, u=u, report=report,
        iterations=0, warm_started=True,
    )


def second_solution(
    lam: float,
    data: ProblemData,
    mu0: float,
    first: BranchPoint,
    lam1: float,
    lam_star: float,
    u_star: Field,
    seed: int = 0,
    knots: int = 25,
    saddle_tol: float = 1e-6,
) -> tuple[PassResult, BranchPoint]:
    """Full min-max pipeline for the second solution beyond the extreme value.

    The far path endpoint is the fibered boundary minimizer (ray-projected
    onto the Nehari set); the unit-sphere element itself always has positive
    energy, which would leave no room for a negative min-max level.
    Returns the pass result (level, geometry checks, optimized path) and the
    refined saddle as a branch point.
    """
    j_mu0 = first.report.energy
    forms = Forms(data)
    warm_dir = Field(data.domain, first.u.values / forms.enorm(first.u.values))
    edge = plateau_edge(
        lam, mu0, data, lam1=lam1, lam_star=lam_star, u_star=u_star,
        j_mu0=j_mu0, warm=warm_dir, seed=seed,
    )
    v_b = boundary_endpoint(
        lam, edge.mu, data, warm=edge.boundary_minimizer, u_star=u_star, seed=seed,
    )
    hv = forms.p_part_smooth(v_b.values, lam)[0]
    fv = forms.fmass(v_b.values)[0]
    if not (hv < 0 and fv < 0):
        raise BoundaryMinimizerNotFound("boundary endpoint left the fibering cone")
    s_b = (hv / fv) ** (1.0 / (data.gamma - data.p))
    endpoint = Field(data.domain, s_b * v_b.values)
    passres = optimize_path(lam, (first.u, endpoint), knots, data, seed=seed)
    checks = geometry_checklist(
        lam, mu0, edge.mu, first.u, v_b, passres.path, data,
        lam_star=lam_star, j_mu0=j_mu0, j_mu_lam=edge.face_value,
        c_lambda=passres.c_lambda, seed=seed,
    )
    passres = replace(passres, geometry_checks=checks)
    saddle = refine_saddle(
        passres.saddle, lam, data, u_first=first.u,
        c_lambda=passres.c_lambda, tol=saddle_tol,
    )
    return passres, saddle
