"""Shared minimization machinery for the variational solvers.

Everything the solvers minimize (Rayleigh quotients, ray-reduced energies,
augmented Lagrangians of scale-invariant constraints) is 0-homogeneous and
smooth away from cone boundaries, so one descent loop serves all of them:
Barzilai-Borwein steps with Armijo backtracking, an optional feasibility
guard enforced inside the line search (steps shrink until the iterate stays
in the open cone), and renormalization of the iterate whenever its norm
drifts (free by homogeneity, keeps conditioning).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

Array = np.ndarray
ValueGrad = Callable[[Array], tuple[float, Array]]


@dataclass
class MinimizeResult:
    x: Array
    f: float
    iterations: int
    converged: bool
    grad_norm: float
    message: str = ""
    extra: dict = field(default_factory=dict)


def minimize_homogeneous(
    x0: Array,
    value_and_grad: ValueGrad,
    enorm: Callable[[Array], float],
    feasible: Optional[Callable[[Array], bool]] = None,
    residual: Optional[Callable[[Array], float]] = None,
    r_tol: float = 1e-8,
    g_tol: float = 1e-10,
    f_tol: float = 1e-12,
    max_iter: int = 4000,
    check_every: int = 10,
    polish_iter: int = 0,
) -> MinimizeResult:
    """Minimize a smooth 0-homogeneous function over a cone.

    ``feasible`` guards an open cone; the backtracking line search rejects
    steps that leave it, so a feasible ``x0`` yields feasible iterates.
    Convergence is declared when ``residual`` (if given) drops below
    ``r_tol``, otherwise when the gradient norm drops below ``g_tol``; a run
    of tiny decreases terminates the loop as a stall.

    Value comparisons saturate at float roundoff before the gradient does,
    so an optional polish phase of up to ``polish_iter`` raw BB steps (no
    line search, best-gradient iterate kept) runs after the monotone loop.
    """
    x = np.array(x0, dtype=float)
    n0 = enorm(x)
    if not np.isfinite(n0) or n0 <= 0:
        raise ValueError("starting point must be nonzero")
    x /= n0
    if feasible is not None and not feasible(x):
        raise ValueError("starting point is not feasible")

    f, g = value_and_grad(x)
    gn = float(np.linalg.norm(g))
    alpha = 1.0 / max(1.0, gn)
    s_prev: Optional[Array] = None
    y_prev: Optional[Array] = None
    n_small = 0
    restarts = 0
    it = 0
    message = "iteration budget reached"

    def _res_ok(z: Array) -> bool:
        return residual is not None and residual(z) <= r_tol

    done = False
    while it < max_iter:
        if gn <= g_tol or (it % check_every == 0 and _res_ok(x)):
            return MinimizeResult(x, f, it, True, gn)
        if s_prev is not None:
            sy = float(np.dot(s_prev, y_prev))
            ss = float(np.dot(s_prev, s_prev))
            if sy > 1e-300 and np.isfinite(sy):
                alpha = min(max(ss / sy, 1e-13), 1e13)
        t = alpha
        accepted = False
        for _ in range(60):
            xn = x - t * g
            nn = enorm(xn)
            if np.isfinite(nn) and nn > 0:
                xn = xn / nn if not 0.5 < nn < 2.0 else xn
                if feasible is None or feasible(xn):
                    fn, gnew = value_and_grad(xn)
                    if np.isfinite(fn) and fn <= f - 1e-4 * t * gn * gn:
                        accepted = True
                        break
            t *= 0.5
        if not accepted:
            if restarts < 2:
                restarts += 1
                alpha = 1e-3 / max(1.0, gn)
                s_prev = y_prev = None
                it += 1
                continue
            message = "line search exhausted"
            done = True
            break
        s_prev = xn - x
        y_prev = gnew - g
        decrease = f - fn
        x, f, g = xn, fn, gnew
        gn = float(np.linalg.norm(g))
        n_small = n_small + 1 if decrease <= f_tol * (1.0 + abs(f)) else 0
        it += 1
        if n_small >= 8:
            message = "stalled decrease"
            done = True
            break
    del done

    if polish_iter > 0 and gn > g_tol and not _res_ok(x):
        x, f, g, gn, extra_it = _bb_polish(
            x, f, g, gn, value_and_grad, enorm, feasible,
            s_prev, y_prev, polish_iter, g_tol,
        )
        it += extra_it
    ok = gn <= g_tol or _res_ok(x)
    return MinimizeResult(x, f, it, ok, gn, message)


def _bb_polish(x, f, g, gn, value_and_grad, enorm, feasible, s_prev, y_prev,
               polish_iter, g_tol):
    """Raw BB steps without line search; keeps the best-gradient iterate."""
    best = (x, f, g, gn)
    it = 0
    alpha = None
    if s_prev is not None and y_prev is not None:
        sy = float(np.dot(s_prev, y_prev))
        if sy > 1e-300:
            alpha = float(np.dot(s_prev, s_prev)) / sy
    if alpha is None:
        alpha = 1e-3 / max(1.0, gn)
    for _ in range(polish_iter):
        t = alpha
        stepped = False
        for _ in range(50):
            xn = x - t * g
            nn = enorm(xn)
            if np.isfinite(nn) and nn > 0:
                xn = xn / nn if not 0.5 < nn < 2.0 else xn
                if feasible is None or feasible(xn):
                    fn, gnew = value_and_grad(xn)
                    if np.isfinite(fn):
                        stepped = True
                        break
            t *= 0.5
        if not stepped:
            break
        s = xn - x
        y = gnew - g
        x, f, g = xn, fn, gnew
        gn = float(np.linalg.norm(g))
        it += 1
        if gn < best[3]:
            best = (x, f, g, gn)
        if gn <= g_tol:
            break
        sy = float(np.dot(s, y))
        if sy > 1e-300 and np.isfinite(sy):
            alpha = min(max(float(np.dot(s, s)) / sy, 1e-15), 1e15)
    x, f, g, gn = best
    return x, f, g, gn, it


def minimize_with_equality(
    x0: Array,
    value_and_grad: ValueGrad,
    constraint: ValueGrad,
    enorm: Callable[[Array], float],
    feasible: Optional[Callable[[Array], bool]] = None,
    c_tol: float = 1e-9,
    max_outer: int = 30,
    rho0: float = 10.0,
    inner_kwargs: Optional[dict] = None,
) -> MinimizeResult:
    """Augmented Lagrangian for a scale-invariant equality constraint.

    Both ``value_and_grad`` and ``constraint`` must be 0-homogeneous; each
    outer iteration minimizes ``f + nu*c + rho/2 c^2`` with the homogeneous
    descent loop, then updates the multiplier.
    """
    inner_kwargs = dict(inner_kwargs or {})
    nu = 0.0
    rho = rho0
    x = np.array(x0, dtype=float)
    x_feasible = x.copy()
    c_prev = np.inf
    hits = 0
    retries = 0
    total_it = 0
    last = None
    for _ in range(max_outer):
        def lagrangian(z: Array, _nu=nu, _rho=rho):
            fv, fg = value_and_grad(z)
            cv, cg = constraint(z)
            return fv + _nu * cv + 0.5 * _rho * cv * cv, fg + (_nu + _rho * cv) * cg

        try:
            last = minimize_homogeneous(x, lagrangian, enorm, feasible=feasible,
                                        **inner_kwargs)
            x_feasible = x.copy()
        except ValueError:
            # A guarded inner solve can end on the cap edge and fail its own
            # re-entry; restart from the last accepted entry with a stiffer
            # penalty instead of giving up.
            retries += 1
            if retries > 4 or np.array_equal(x, x_feasible):
                break
            x = x_feasible.copy()
            rho = min(rho * 10.0, 1e12)
            continue
        x = last.x
        total_it += last.iterations
        cv = constraint(x)[0]
        if abs(cv) <= c_tol:
            hits += 1
            if hits >= 2:
                break
        else:
            hits = 0
        nu += rho * cv
        if abs(cv) > 0.5 * abs(c_prev):
            rho = min(rho * 5.0, 1e12)
        c_prev = cv
    fv = value_and_grad(x)[0]
    cv = constraint(x)[0]
    ok = abs(cv) <= c_tol and last is not None
    return MinimizeResult(
        x, fv, total_it, ok, last.grad_norm if last else np.inf,
        extra={"constraint": cv, "multiplier": nu, "penalty": rho},
    )


def scalar_log_min(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    samples: int = 49,
) -> tuple[float, float, bool]:
    """Minimize ``fn(t)`` for ``t`` in ``[lo, hi]`` on a log scale.

    Coarse log-spaced scan followed by a bounded refinement around the best
    sample.  Returns ``(t, fn(t), interior)`` where ``interior`` is False
    when the minimum sits on the scanned range boundary.
    """
    ts = np.geomspace(lo, hi, samples)
    vals = np.array([fn(t) for t in ts])
    k = int(np.argmin(vals))
    interior = 0 < k < samples - 1
    if not interior:
        return float(ts[k]), float(vals[k]), False
    res = minimize_scalar(
        lambda w: fn(float(np.exp(w))),
        bounds=(np.log(ts[k - 1]), np.log(ts[k + 1])),
        method="bounded",
        options={"xatol": 1e-12},
    )
    t_best = float(np.exp(res.x))
    f_best = float(res.fun)
    if f_best > vals[k]:
        t_best, f_best = float(ts[k]), float(vals[k])
    return t_best, f_best, True
