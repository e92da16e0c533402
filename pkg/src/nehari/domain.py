"""Grid, fields, quadrature, and the discrete p-Dirichlet energy.

The box ``[-L, L]^dim`` truncates the whole space; every state field carries
zero Dirichlet values on the boundary nodes.  Weight fields live on all
nodes.  The discrete gradient is built from first-order differences per cell
(in 2D, the squared cell gradient is the mean of the squared one-sided
differences in each direction), so the p-Dirichlet energy is a smooth
function of the nodal values with an exactly computable derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K

__all__ = [
    "Domain",
    "Field",
    "WeightField",
    "build_domain",
    "grad_norm_powers",
    "integrate",
    "e_norm",
    "dirichlet_energy",
    "dirichlet_energy_grad",
]


@dataclass(frozen=True, eq=False)
class Domain:
    """Uniform tensor grid on ``[-L, L]^dim`` with zero-boundary convention.

    Attributes
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    half_width : float
        Half side length L; the box is ``[-L, L]^dim``.
    n : int
        Nodes per axis (including the two boundary nodes).
    """

    dim: int
    half_width: float
    n: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dim}")
        if not self.half_width > 0:
            raise ValueError(f"half width must be positive, got {self.half_width}")
        if self.n < 3:
            raise ValueError(f"need at least 3 nodes per axis, got {self.n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def n_interior_axis(self) -> int:
        return self.n - 2

    @property
    def n_interior(self) -> int:
        return (self.n - 2) ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis(self) -> np.ndarray:
        """Node coordinates along one axis, shape ``(n,)``."""
        return np.linspace(-self.half_width, self.half_width, self.n)

    def node_radii(self) -> np.ndarray:
        """Euclidean distance of every node from the origin (full grid shape)."""
        x = self.axis()
        if self.dim == 1:
            return np.abs(x)
        return np.sqrt(x[:, None] ** 2 + x[None, :] ** 2)

    def cell_center_radii(self) -> np.ndarray:
        """Distance of cell centers from the origin (cell-array shape)."""
        x = self.axis()
        c = 0.5 * (x[:-1] + x[1:])
        if self.dim == 1:
            return np.abs(c)
        return np.sqrt(c[:, None] ** 2 + c[None, :] ** 2)

    def interior_mask(self) -> np.ndarray:
        """Boolean full-grid array marking interior nodes."""
        m = np.zeros((self.n,) * self.dim, dtype=bool)
        if self.dim == 1:
            m[1:-1] = True
        else:
            m[1:-1, 1:-1] = True
        return m


def build_domain(dim: int, half_width: float, n: int) -> Domain:
    """Build the uniform grid; coordinates are reproducible from the inputs."""
    return Domain(dim=dim, half_width=float(half_width), n=int(n))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Field:
    """Nodal values of a state on the interior nodes (flat array).

    Boundary nodes are implicitly zero.  Instances are immutable; operations
    return new fields.
    """

    domain: Domain
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = _readonly(np.asarray(self.values, dtype=np.float64).ravel())
        object.__setattr__(self, "values", vals)
        if vals.size != self.domain.n_interior:
            raise ValueError(
                f"expected {self.domain.n_interior} interior values, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")

    @classmethod
    def zeros(cls, domain: Domain) -> "Field":
        return cls(domain, np.zeros(domain.n_interior))

    @classmethod
    def from_full(cls, domain: Domain, full: np.ndarray) -> "Field":
        full = np.asarray(full, dtype=np.float64)
        if domain.dim == 1:
            return cls(domain, full[1:-1])
        return cls(domain, full[1:-1, 1:-1].ravel())

    def to_full(self) -> np.ndarray:
        """Full-grid array with zero boundary entries."""
        return interior_to_full(self.domain, self.values)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.domain, values)

    def scaled(self, t: float) -> "Field":
        return Field(self.domain, t * self.values)


def interior_to_full(domain: Domain, interior: np.ndarray) -> np.ndarray:
    m = domain.n_interior_axis
    if domain.dim == 1:
        full = np.zeros(domain.n)
        full[1:-1] = interior
    else:
        full = np.zeros((domain.n, domain.n))
        full[1:-1, 1:-1] = np.reshape(interior, (m, m))
    return full


def full_to_interior(domain: Domain, full: np.ndarray) -> np.ndarray:
    if domain.dim == 1:
        return np.array(full[1:-1])
    return np.array(full[1:-1, 1:-1]).ravel()


@dataclass(frozen=True, eq=False)
class WeightField:
    """Coefficient values on all nodes, with cached sign partition masks.

    A node belongs to the zero set when ``|value| <= tau_sign``; the three
    masks partition the node set.
    """

    domain: Domain
    values: np.ndarray
    tau_sign: float = 1e-12
    positive: np.ndarray = field(init=False, repr=False)
    negative: np.ndarray = field(init=False, repr=False)
    zero: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        shape = (self.domain.n,) * self.domain.dim
        if vals.shape != shape:
            raise ValueError(f"weight values must have shape {shape}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("weight values must be finite")
        object.__setattr__(self, "values", _readonly(vals))
        zero = np.abs(vals) <= self.tau_sign
        object.__setattr__(self, "zero", zero)
        object.__setattr__(self, "positive", (vals > 0) & ~zero)
        object.__setattr__(self, "negative", (vals < 0) & ~zero)

    @classmethod
    def from_function(cls, domain: Domain, fn, tau_sign: float = 1e-12) -> "WeightField":
        """Sample ``fn`` on the nodes; 1D gets ``fn(x)``, 2D gets ``fn(x, y)``."""
        x = domain.axis()
        if domain.dim == 1:
            vals = np.asarray(fn(x), dtype=np.float64)
        else:
            vals = np.asarray(fn(x[:, None], x[None, :]), dtype=np.float64)
        return cls(domain, np.broadcast_to(vals, (domain.n,) * domain.dim).copy(), tau_sign)

    @classmethod
    def constant(cls, domain: Domain, value: float, tau_sign: float = 1e-12) -> "WeightField":
        return cls(domain, np.full((domain.n,) * domain.dim, float(value)), tau_sign)

    def interior(self) -> np.ndarray:
        """Weight values restricted to interior nodes, flat."""
        return full_to_interior(self.domain, self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def grad_norm_powers(u: Field, p: float, eps_reg: float = 0.0) -> np.ndarray:
    """Per-cell ``(eps_reg^2 + |grad u|^2)^(p/2)``.

    With ``eps_reg = 0`` this is exactly ``|grad u|^p`` cell by cell.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if eps_reg < 0:
        raise ValueError("eps_reg must be nonnegative")
    dom = u.domain
    full = u.to_full()
    if dom.dim == 1:
        return K.grad_pow_cells_1d(full, dom.spacing, p, eps_reg)
    return K.grad_pow_cells_2d(full, dom.spacing, p, eps_reg)


def cell_grad_sq(u: Field) -> np.ndarray:
    """Per-cell squared gradient (no regularization)."""
    dom = u.domain
    full = u.to_full()
    if dom.dim == 1:
        return K.cell_grad_sq_1d(full, dom.spacing)
    return K.cell_grad_sq_2d(full, dom.spacing)


def integrate(domain: Domain, values: np.ndarray) -> float:
    """Quadrature over the box, dispatched on the array layout.

    Cell arrays (shape ``(n-1,)`` per axis) integrate as midpoint sums; full
    nodal arrays (shape ``(n,)`` per axis) use the trapezoid weights.
    Summation order is fixed, so results are reproducible.
    """
    values = np.asarray(values, dtype=np.float64)
    n, dim = domain.n, domain.dim
    if values.shape == (n - 1,) * dim:
        return float(np.sum(values)) * domain.cell_volume
    if values.shape == (n,) * dim:
        w = np.ones(n)
        w[0] = w[-1] = 0.5
        if dim == 1:
            return float(np.sum(w * values)) * domain.spacing
        return float(np.sum(w[:, None] * w[None, :] * values)) * domain.cell_volume
    raise ValueError(f"cannot infer layout from shape {values.shape}")


def nodal_power_integral(u: Field, weight: np.ndarray | None, q: float) -> float:
    """``int w |u|^q`` by nodal quadrature (w = 1 when weight is None).

    The integrand vanishes on the boundary, so the trapezoid rule reduces to
    a plain interior sum times the cell volume.
    """
    w = np.ones_like(u.values) if weight is None else weight
    s, _ = K.power_sum_grad(u.values, w, q)
    return s * u.domain.cell_volume


def nodal_power_integral_grad(u: Field, weight: np.ndarray | None, q: float):
    """Value and nodal derivative of ``int w |u|^q``."""
    w = np.ones_like(u.values) if weight is None else weight
    s, g = K.power_sum_grad(u.values, w, q)
    vol = u.domain.cell_volume
    return s * vol, g * vol


def dirichlet_energy(u: Field, p: float, eps_reg: float = 0.0) -> float:
    """``int (eps^2 + |grad u|^2)^(p/2)`` over the box."""
    return integrate(u.domain, grad_norm_powers(u, p, eps_reg))


def dirichlet_energy_grad(u: Field, p: float, eps_reg: float):
    """Energy and its exact derivative with respect to interior nodal values."""
    dom = u.domain
    full = u.to_full()
    if dom.dim == 1:
        e, g = K.dirichlet_energy_grad_1d(full, dom.spacing, p, eps_reg)
    else:
        e, g = K.dirichlet_energy_grad_2d(full, dom.spacing, p, eps_reg)
    return e, full_to_interior(dom, g)


def e_norm(u: Field, p: float, gamma: float) -> float:
    """Norm ``[ int |grad u|^p + (int |u|^gamma)^(p/gamma) ]^(1/p)``."""
    if not (p > 1 and gamma > p):
        raise ValueError("need p > 1 and gamma > p")
    grad_part = dirichlet_energy(u, p, 0.0)
    mass = nodal_power_integral(u, None, gamma)
    return float((grad_part + mass ** (p / gamma)) ** (1.0 / p))
