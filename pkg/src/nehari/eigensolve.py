"""First eigenpair of the weighted p-Laplacian and hypothesis validation.

The first eigenvalue is the minimum of the Rayleigh quotient
``int |grad u|^p / int h |u|^p`` over fields vanishing outside an optional
node mask, found by the homogeneous descent loop (projected-gradient-like
behaviour with Barzilai-Borwein steps; for p = 2 this reduces to an inverse
power style iteration).  Initialization is a strictly positive bump plus
seeded jitter, which biases the solve toward the sign-definite first
eigenfunction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .domain import Field, full_to_interior
from .errors import NoAdmissibleField
from .functionals import Forms, ProblemData, gamma_part
from .optim import minimize_homogeneous

__all__ = ["EigenResult", "HypothesesReport", "lambda1", "validate_hypotheses"]


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Converged first eigenpair; ``phi1`` has unit e-norm and is nonnegative."""

    lam1: float
    phi1: Field
    iterations: int
    residual: float
    normalization: str = "unit_e_norm"


def _bump_start(forms: Forms, mask: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Positive bump centered on the admissible region, with seeded jitter."""
    dom = forms.dom
    coords = full_to_interior(dom, dom.node_radii())
    x = dom.axis()[1:-1]
    admissible = mask & (forms.h_int > 0)
    if not np.any(admissible):
        admissible = mask
    if dom.dim == 1:
        pts = x[admissible]
        center = float(np.mean(pts))
        width = max(float(np.max(pts) - np.min(pts)), dom.spacing) / 3.0
        dist2 = (x - center) ** 2
    else:
        xi = np.repeat(x, dom.n_interior_axis)
        yi = np.tile(x, dom.n_interior_axis)
        cx = float(np.mean(xi[admissible]))
        cy = float(np.mean(yi[admissible]))
        spread = max(
            float(np.max(np.abs(xi[admissible] - cx))),
            float(np.max(np.abs(yi[admissible] - cy))),
            dom.spacing,
        )
        width = spread / 1.5
        dist2 = (xi - cx) ** 2 + (yi - cy) ** 2
    del coords
    bump = np.exp(-dist2 / (2.0 * width**2))
    jitter = 0.01 * rng.uniform(0.0, 1.0, bump.shape)
    return (bump + jitter) * mask


def lambda1(
    data: ProblemData,
    mask: Optional[np.ndarray] = None,
    seed: int = 0,
    g_tol: float = 1e-9,
    max_iter: int = 40000,
) -> EigenResult:
    """Minimize the Rayleigh quotient over fields supported on ``mask``.

    ``mask`` is a boolean array over interior nodes (flat); ``None`` means
    the whole domain.  Deterministic for a given seed.  Raises
    :class:`NoAdmissibleField` when ``h <= 0`` on the mask.
    """
    forms = Forms(data)
    dom = data.domain
    if mask is None:
        mask = np.ones(dom.n_interior, dtype=bool)
    else:
        mask = np.asarray(mask, dtype=bool).ravel()
        if mask.size != dom.n_interior:
            raise ValueError("mask must cover the interior nodes")
    if not np.any(mask):
        raise NoAdmissibleField("mask selects no interior nodes")
    if float(np.max(forms.h_int[mask], initial=-np.inf)) <= 0.0:
        raise NoAdmissibleField("h is nonpositive on the masked region")

    maskf = mask.astype(float)

    def quotient(x: np.ndarray):
        r, gr = forms.quotient(x)
        return r, gr * maskf

    def feasible(x: np.ndarray) -> bool:
        return forms.hmass(x)[0] > 0.0

    rng = np.random.default_rng(seed)
    x0 = _bump_start(forms, mask, rng)
    res = minimize_homogeneous(
        x0, quotient, forms.enorm, feasible=feasible,
        g_tol=g_tol, max_iter=max_iter, f_tol=1e-15, polish_iter=400,
    )
    x = np.abs(res.x)
    polish = minimize_homogeneous(
        x, quotient, forms.enorm, feasible=feasible,
        g_tol=g_tol, max_iter=max_iter // 4, f_tol=1e-15, polish_iter=400,
    )
    x = polish.x
    x[np.abs(x) < 1e-14 * np.max(np.abs(x))] = 0.0
    x = np.abs(x)
    x /= forms.enorm(x)
    lam, grad = quotient(x)
    return EigenResult(
        lam1=float(lam),
        phi1=Field(dom, x),
        iterations=res.iterations + polish.iterations,
        residual=float(np.linalg.norm(grad)),
    )


@dataclass(frozen=True)
class HypothesesReport:
    """Outcome of the structural weight checks; ``f2`` is None when not applicable."""

    f1: bool
    f2: Optional[bool]
    f_inf: bool
    f_phi1: bool
    details: dict

    def all_hold(self) -> bool:
        return self.f1 and self.f_inf and self.f_phi1 and (self.f2 is not False)

    def to_dict(self) -> dict:
        return {
            "F1": self.f1,
            "F2": "NA" if self.f2 is None else self.f2,
            "F_inf": self.f_inf,
            "F_phi1": self.f_phi1,
            "details": self.details,
        }


def _erode(mask_full: np.ndarray) -> np.ndarray:
    """Grid interior of a node set: nodes whose cross neighborhood stays inside."""
    return ndimage.binary_erosion(mask_full, border_value=0)


def _boundary_shell(dom) -> np.ndarray:
    shell = np.ones((dom.n,) * dom.dim, dtype=bool)
    if dom.dim == 1:
        shell[1:-1] = False
    else:
        shell[1:-1, 1:-1] = False
    return shell


def validate_hypotheses(
    data: ProblemData,
    eigen: Optional[EigenResult] = None,
    seed: int = 0,
) -> HypothesesReport:
    """Check the structural hypotheses on the weights; report only.

    * F1: positive and negative sets of f both carry nodes.
    * F2: first eigenvalue on the interior of (f >= 0) is strictly below the
      one on the interior of (f = 0); NA when the zero set has empty grid
      interior.  Interiors are eroded node masks; when eroded and plain
      masks give eigenvalues differing by more than 5 percent, both are
      reported in the details.
    * F_inf: f is negative on the outermost node shell (truncation stand-in
      for a negative limit at infinity).
    * F_phi1: the f-weighted gamma-mass of the first eigenfunction is
      negative.
    """
    dom = data.domain
    f = data.f
    details: dict = {}

    n_pos = int(np.count_nonzero(f.positive))
    n_neg = int(np.count_nonzero(f.negative))
    f1 = n_pos > 0 and n_neg > 0
    details["f_positive_nodes"] = n_pos
    details["f_negative_nodes"] = n_neg

    shell = _boundary_shell(dom)
    f_inf = bool(np.all(f.values[shell] < 0))
    details["f_boundary_max"] = float(np.max(f.values[shell]))

    if eigen is None:
        eigen = lambda1(data, seed=seed)
    fphi = gamma_part(eigen.phi1, data)
    f_phi1 = bool(fphi < 0)
    details["lambda1"] = eigen.lam1
    details["f_phi1_integral"] = fphi

    f2: Optional[bool] = None
    zero_full = f.zero
    nonneg_full = f.zero | f.positive
    zero_int = _erode(zero_full)
    nonneg_int = _erode(nonneg_full)
    interior = dom.interior_mask()
    zero_mask = full_to_interior(dom, (zero_int & interior).astype(float)) > 0.5
    nonneg_mask = full_to_interior(dom, (nonneg_int & interior).astype(float)) > 0.5
    details["zero_interior_nodes"] = int(np.count_nonzero(zero_mask))
    if np.any(zero_mask):
        try:
            lam_a = lambda1(data, mask=nonneg_mask, seed=seed).lam1
            lam_b = lambda1(data, mask=zero_mask, seed=seed).lam1
            f2 = bool(lam_a < lam_b)
            details["lambda1_nonneg_interior"] = lam_a
            details["lambda1_zero_interior"] = lam_b
            for name, eroded_mask, plain_full in (
                ("nonneg", nonneg_mask, nonneg_full),
                ("zero", zero_mask, zero_full),
            ):
                plain_mask = full_to_interior(dom, (plain_full & interior).astype(float)) > 0.5
                if np.array_equal(plain_mask, eroded_mask):
                    continue
                lam_plain = lambda1(data, mask=plain_mask, seed=seed).lam1
                lam_eroded = details[f"lambda1_{name}_interior"]
                if abs(lam_plain - lam_eroded) > 0.05 * abs(lam_eroded):
                    details[f"lambda1_{name}_plain_mask"] = lam_plain
        except NoAdmissibleField as exc:
            f2 = None
            details["f2_note"] = f"masked eigenvalue unavailable: {exc}"
    return HypothesesReport(f1=f1, f2=f2, f_inf=f_inf, f_phi1=f_phi1, details=details)
