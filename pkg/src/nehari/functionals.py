"""Scalar functionals of the indefinite-weight problem and their derivatives.

For a state ``u``, a parameter ``lam``, exponents ``p < gamma`` and weights
``h``, ``f``, the module evaluates

* the p-homogeneous part  ``int |grad u|^p - lam * int h |u|^p``,
* the gamma-homogeneous part  ``int f |u|^gamma``,
* the energy  ``(p-part)/p - (gamma-part)/gamma``  and its exact discrete
  derivative,
* the Nehari classification, the fibering scale, the ray-reduced energy,
* a cheap dual-norm residual, tail-mass diagnostics, and cone membership.

Reported values use the exact power integrands.  Derivatives differentiate
the ``eps_reg``-regularized energy (the two agree up to ``O(eps_reg^2)``),
which keeps the gradient well defined for ``p < 2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .domain import (
    Domain,
    Field,
    WeightField,
    full_to_interior,
    grad_norm_powers,
    interior_to_full,
    nodal_power_integral,
)
from .errors import SignMismatch

__all__ = [
    "ProblemData",
    "NehariClass",
    "EnergyReport",
    "ConeFlags",
    "p_part",
    "gamma_part",
    "energy",
    "energy_grad",
    "nehari_class",
    "fiber_scale",
    "reduced_energy",
    "pde_residual",
    "tail_fraction",
    "cone_membership",
    "energy_report",
    "Forms",
]


def critical_exponent(dim: int, p: float) -> float:
    """Sobolev exponent ``dim*p/(dim-p)`` for ``p < dim``, else infinity."""
    if p < dim:
        return dim * p / (dim - p)
    return np.inf


@dataclass(frozen=True, eq=False)
class ProblemData:
    """Exponents and weights defining one problem instance.

    ``gamma`` must lie in ``(p, p*)`` with ``p*`` the Sobolev exponent of the
    domain dimension.  ``eps_reg`` regularizes the energy derivative near
    vanishing gradients; it is reported alongside results so that
    ``eps_reg -> 0`` studies are possible.
    """

    p: float
    gamma: float
    h: WeightField
    f: WeightField
    eps_reg: float = 1e-10

    def __post_init__(self) -> None:
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if self.h.domain is not self.f.domain and (
            self.h.domain.dim != self.f.domain.dim
            or self.h.domain.n != self.f.domain.n
            or self.h.domain.half_width != self.f.domain.half_width
        ):
            raise ValueError("h and f must live on the same domain")
        pstar = critical_exponent(self.domain.dim, self.p)
        if not (self.p < self.gamma < pstar):
            raise ValueError(
                f"gamma must lie in (p, p*) = ({self.p}, {pstar}), got {self.gamma}"
            )
        if self.eps_reg < 0:
            raise ValueError("eps_reg must be nonnegative")
        if self.p < 2 and self.eps_reg == 0:
            raise ValueError("eps_reg must be positive when p < 2")

    @property
    def domain(self) -> Domain:
        return self.h.domain

    @property
    def fiber_constant(self) -> float:
        """``(gamma - p) / (p * gamma)``, the ray-minimum energy prefactor."""
        return (self.gamma - self.p) / (self.p * self.gamma)


class NehariClass(enum.Enum):
    PLUS = "PLUS"
    MINUS = "MINUS"
    ZERO = "ZERO"
    OFF = "OFF"


@dataclass(frozen=True)
class ConeFlags:
    in_l_minus: bool
    in_b_plus: bool
    in_theta_plus: bool


@dataclass(frozen=True)
class EnergyReport:
    """Snapshot of the functional values for a field at one parameter."""

    lam: float
    p_part: float
    gamma_part: float
    energy: float
    nehari: NehariClass
    residual: float
    tail_fraction: float


class Forms:
    """Evaluations of all forms on flat interior arrays.

    The solvers work with raw arrays for speed; this class caches the
    interior weight arrays and the quadrature factor, and exposes
    value/gradient pairs for the smooth (regularized) functionals.
    """

    def __init__(self, data: ProblemData):
        self.data = data
        self.dom = data.domain
        self.p = data.p
        self.gamma = data.gamma
        self.eps = data.eps_reg
        self.vol = self.dom.cell_volume
        self.dx = self.dom.spacing
        self.h_int = data.h.interior()
        self.f_int = data.f.interior()
        self._ones = np.ones(self.dom.n_interior)

    # -- building blocks -------------------------------------------------

    def full(self, x: np.ndarray) -> np.ndarray:
        return interior_to_full(self.dom, x)

    def grad_energy(self, x: np.ndarray, eps: float | None = None):
        """``int (eps^2+|grad u|^2)^(p/2)`` and its interior derivative."""
        e = self.eps if eps is None else eps
        full = self.full(x)
        if self.dom.dim == 1:
            val, g = K.dirichlet_energy_grad_1d(full, self.dx, self.p, e)
        else:
            val, g = K.dirichlet_energy_grad_2d(full, self.dx, self.p, e)
        return val, full_to_interior(self.dom, g)

    def grad_energy_exact(self, x: np.ndarray) -> float:
        full = self.full(x)
        if self.dom.dim == 1:
            cells = K.grad_pow_cells_1d(full, self.dx, self.p, 0.0)
        else:
            cells = K.grad_pow_cells_2d(full, self.dx, self.p, 0.0)
        return float(np.sum(cells)) * self.vol

    def hmass(self, x: np.ndarray):
        s, g = K.power_sum_grad(x, self.h_int, self.p)
        return s * self.vol, g * self.vol

    def fmass(self, x: np.ndarray):
        s, g = K.power_sum_grad(x, self.f_int, self.gamma)
        return s * self.vol, g * self.vol

    def gmass(self, x: np.ndarray):
        s, g = K.power_sum_grad(x, self._ones, self.gamma)
        return s * self.vol, g * self.vol

    # -- composite forms --------------------------------------------------

    def p_part_exact(self, x: np.ndarray, lam: float) -> float:
        return self.grad_energy_exact(x) - lam * self.hmass(x)[0]

    def p_part_smooth(self, x: np.ndarray, lam: float):
        e, ge = self.grad_energy(x)
        m, gm = self.hmass(x)
        return e - lam * m, ge - lam * gm

    def energy_smooth(self, x: np.ndarray, lam: float):
        hv, hg = self.p_part_smooth(x, lam)
        fv, fg = self.fmass(x)
        val = hv / self.p - fv / self.gamma
        grad = hg / self.p - fg / self.gamma
        return val, grad

    def reduced(self, x: np.ndarray, lam: float):
        """Ray-reduced energy and gradient; raises SignMismatch off-cone.

        Returns ``(J, gJ, H, F)``.  ``J`` is negative on the (-,-) cone and
        positive on the (+,+) cone; its gradient follows from logarithmic
        differentiation, ``gJ = J * (a gH/H - b gF/F)``.
        """
        hv, hg = self.p_part_smooth(x, lam)
        fv, fg = self.fmass(x)
        if hv * fv <= 0.0:
            raise SignMismatch(
                f"field lies outside the fibering cones (H={hv:.3e}, F={fv:.3e})"
            )
        a = self.gamma / (self.gamma - self.p)
        b = self.p / (self.gamma - self.p)
        sign = -1.0 if hv < 0 else 1.0
        c = self.data.fiber_constant
        j = sign * c * abs(hv) ** a / abs(fv) ** b
        gj = j * (a / hv * hg - b / fv * fg)
        return j, gj, hv, fv

    def enorm(self, x: np.ndarray) -> float:
        g = self.grad_energy_exact(x)
        m = self.gmass(x)[0]
        return float((g + m ** (self.p / self.gamma)) ** (1.0 / self.p))

    def enorm_smooth(self, x: np.ndarray):
        e, ge = self.grad_energy(x)
        m, gm = self.gmass(x)
        val = (e + m ** (self.p / self.gamma)) ** (1.0 / self.p)
        inner = ge + (self.p / self.gamma) * m ** (self.p / self.gamma - 1.0) * gm
        grad = (1.0 / self.p) * val ** (1.0 - self.p) * inner
        return float(val), grad

    def residual(self, x: np.ndarray, lam: float) -> float:
        _, g = self.energy_smooth(x, lam)
        nx = float(np.linalg.norm(x))
        return float(np.linalg.norm(g)) / max(1.0, nx)

    def quotient(self, x: np.ndarray):
        """Rayleigh quotient grad-energy / h-mass with gradient.

        Caller must ensure the h-mass is positive.
        """
        e, ge = self.grad_energy(x)
        m, gm = self.hmass(x)
        r = e / m
        gr = (ge - r * gm) / m
        return r, gr

    def normalize(self, x: np.ndarray) -> np.ndarray:
        n = self.enorm(x)
        if n == 0:
            raise ValueError("cannot normalize the zero field")
        return x / n


# -- public field-level operations ----------------------------------------


def p_part(u: Field, lam: float, data: ProblemData) -> float:
    """``int |grad u|^p - lam int h |u|^p`` (exact integrands)."""
    grad_term = float(np.sum(grad_norm_powers(u, data.p, 0.0))) * u.domain.cell_volume
    mass = nodal_power_integral(u, data.h.interior(), data.p)
    return grad_term - lam * mass


def gamma_part(u: Field, data: ProblemData) -> float:
    """``int f |u|^gamma``."""
    return nodal_power_integral(u, data.f.interior(), data.gamma)


def energy(u: Field, lam: float, data: ProblemData) -> float:
    """``p_part/p - gamma_part/gamma``."""
    return p_part(u, lam, data) / data.p - gamma_part(u, data) / data.gamma


def energy_grad(u: Field, lam: float, data: ProblemData) -> Field:
    """Exact derivative of the regularized discrete energy.

    This is the derivative of the discrete functional itself, not a
    discretization of the continuous Euler-Lagrange operator.
    """
    forms = Forms(data)
    _, g = forms.energy_smooth(u.values, lam)
    return Field(u.domain, g)


def _require_nonzero(u: Field) -> None:
    if not np.any(u.values):
        raise ValueError("the zero field is not admissible here")


def nehari_class(u: Field, lam: float, data: ProblemData, tol: float = 1e-8) -> NehariClass:
    """Classify a field against the Nehari set split.

    The tolerance is relative (scale aware): both the membership gate
    ``|H - F| <= tol*(|H|+|F|+1)`` and the sign calls use the same scaled
    tolerance, since H and F are p- and gamma-homogeneous and absolute
    thresholds would be meaningless.
    """
    _require_nonzero(u)
    hv = p_part(u, lam, data)
    fv = gamma_part(u, data)
    scale = tol * (abs(hv) + abs(fv) + 1.0)
    if abs(hv - fv) > scale:
        return NehariClass.OFF
    if hv < -scale:
        return NehariClass.PLUS
    if hv > scale:
        return NehariClass.MINUS
    if abs(fv) <= scale:
        return NehariClass.ZERO
    return NehariClass.OFF


def fiber_scale(u: Field, lam: float, data: ProblemData) -> float:
    """Ray scale ``(H/F)^(1/(gamma-p))`` projecting onto the Nehari set."""
    hv = p_part(u, lam, data)
    fv = gamma_part(u, data)
    if hv * fv <= 0.0:
        raise SignMismatch(
            f"fiber scale needs H and F of equal sign (H={hv:.3e}, F={fv:.3e})"
        )
    return float((hv / fv) ** (1.0 / (data.gamma - data.p)))


def reduced_energy(u: Field, lam: float, data: ProblemData) -> float:
    """Energy at the fibered point, in closed form; 0-homogeneous.

    Negative on the (-,-) cone, positive on the (+,+) cone; equals
    ``energy(fiber_scale(u)*u)``.
    """
    hv = p_part(u, lam, data)
    fv = gamma_part(u, data)
    if hv * fv <= 0.0:
        raise SignMismatch(
            f"reduced energy needs H and F of equal sign (H={hv:.3e}, F={fv:.3e})"
        )
    a = data.gamma / (data.gamma - data.p)
    b = data.p / (data.gamma - data.p)
    sign = -1.0 if hv < 0 else 1.0
    return sign * data.fiber_constant * abs(hv) ** a / abs(fv) ** b


def pde_residual(u: Field, lam: float, data: ProblemData) -> float:
    """Euclidean dual-norm surrogate ``|grad Phi(u)|_2 / max(1, |u|_2)``.

    Zero exactly at discrete critical points.  Measured in the plain
    Euclidean dual norm on the fixed grid, which is cheap and monotone with
    the true dual norm there.
    """
    _require_nonzero(u)
    return Forms(data).residual(u.values, lam)


def tail_fraction(u: Field, radius: float, data: ProblemData) -> float:
    """Share of ``int |u|^gamma + int |grad u|^p`` beyond ``|x| > radius``.

    Finite-domain analogue of the concentration-at-infinity quantities; a
    value near zero certifies that the truncation radius is adequate.
    """
    dom = u.domain
    cells = grad_norm_powers(u, data.p, 0.0)
    cell_tail = dom.cell_center_radii() > radius
    grad_tot = float(np.sum(cells)) * dom.cell_volume
    grad_tail = float(np.sum(cells[cell_tail])) * dom.cell_volume

    full = u.to_full()
    node_tail = dom.node_radii() > radius
    mass_all = np.abs(full) ** data.gamma
    mass_tot = float(np.sum(mass_all)) * dom.cell_volume
    mass_tail = float(np.sum(mass_all[node_tail])) * dom.cell_volume

    denom = grad_tot + mass_tot
    if denom == 0.0:
        return 0.0
    return (grad_tail + mass_tail) / denom


def cone_membership(u: Field, lam: float, mu: float, data: ProblemData) -> ConeFlags:
    """Sign tests behind the sets L^-(lam), B^+(lam) and Theta^+(mu).

    The L^-/B^+ tests are evaluated after normalizing the gradient term to
    one (the tests are 0-homogeneous, so this only fixes the reported
    scale).
    """
    _require_nonzero(u)
    grad_term = float(np.sum(grad_norm_powers(u, data.p, 0.0))) * u.domain.cell_volume
    if grad_term <= 0:
        raise ValueError("field has vanishing gradient term")
    scale = grad_term ** (-1.0 / data.p)
    un = u.scaled(scale)
    h_lam = p_part(un, lam, data)
    f_val = gamma_part(un, data)
    h_mu = p_part(u, mu, data)
    f_raw = gamma_part(u, data)
    return ConeFlags(
        in_l_minus=bool(h_lam < 0),
        in_b_plus=bool(f_val > 0),
        in_theta_plus=bool(h_mu < 0 and f_raw < 0),
    )


def energy_report(
    u: Field,
    lam: float,
    data: ProblemData,
    tol: float = 1e-8,
    tail_radius: float | None = None,
) -> EnergyReport:
    """Assemble the standard per-solution report."""
    hv = p_part(u, lam, data)
    fv = gamma_part(u, data)
    radius = 0.8 * u.domain.half_width if tail_radius is None else tail_radius
    return EnergyReport(
        lam=lam,
        p_part=hv,
        gamma_part=fv,
        energy=hv / data.p - fv / data.gamma,
        nehari=nehari_class(u, lam, data, tol),
        residual=pde_residual(u, lam, data),
        tail_fraction=tail_fraction(u, radius, data),
    )
