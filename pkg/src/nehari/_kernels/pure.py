"""Reference numpy implementation of the hot kernels.

The compiled twin in ``_core.pyx`` implements the same signatures with fused
loops; this module is the fallback selected at import time when the extension
is unavailable (or when ``NEHARI_FORCE_PURE`` is set).

Conventions shared by both backends:

* 1D fields are full-grid arrays of shape ``(n,)``; 2D fields are ``(n, n)``,
  C-contiguous, ``float64``.  Boundary entries are included (zero for states).
* Cell gradients use first-order differences.  In 2D the squared gradient of
  a cell is the mean of the squared one-sided differences per direction,
  which leaves no checkerboard null mode.
* All sums run in a fixed order so results are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def cell_grad_sq_1d(u: np.ndarray, dx: float) -> np.ndarray:
    """Squared cell gradients ``((u[i+1]-u[i])/dx)**2``, shape ``(n-1,)``."""
    g = np.diff(u) / dx
    return g * g


def cell_grad_sq_2d(u: np.ndarray, dx: float) -> np.ndarray:
    """Mean-square cell gradient, shape ``(n-1, n-1)``.

    Per cell: ``(d1^2 + d2^2 + e1^2 + e2^2) / 2`` with ``d*`` the two
    one-sided x-differences and ``e*`` the two y-differences.
    """
    d = np.diff(u, axis=0) / dx          # (n-1, n)
    e = np.diff(u, axis=1) / dx          # (n, n-1)
    d1 = d[:, :-1]
    d2 = d[:, 1:]
    e1 = e[:-1, :]
    e2 = e[1:, :]
    return 0.5 * (d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2)


def grad_pow_cells_1d(u: np.ndarray, dx: float, p: float, eps: float) -> np.ndarray:
    q = eps * eps + cell_grad_sq_1d(u, dx)
    if p == 2.0:
        return q
    return q ** (0.5 * p)


def grad_pow_cells_2d(u: np.ndarray, dx: float, p: float, eps: float) -> np.ndarray:
    q = eps * eps + cell_grad_sq_2d(u, dx)
    if p == 2.0:
        return q
    return q ** (0.5 * p)


def dirichlet_energy_grad_1d(u: np.ndarray, dx: float, p: float, eps: float):
    """Return ``(E, dE/du)`` for ``E = sum_cells (eps^2+g^2)^(p/2) * dx``."""
    g = np.diff(u) / dx
    q = eps * eps + g * g
    if p == 2.0:
        energy = float(np.sum(q)) * dx
        wg = 2.0 * g
    else:
        qp = q ** (0.5 * p)
        energy = float(np.sum(qp)) * dx
        wg = p * q ** (0.5 * p - 1.0) * g
    grad = np.zeros_like(u)
    grad[:-1] -= wg
    grad[1:] += wg
    return energy, grad


def dirichlet_energy_grad_2d(u: np.ndarray, dx: float, p: float, eps: float):
    """Return ``(E, dE/du)`` for the 2D cell energy scaled by ``dx**2``."""
    d = np.diff(u, axis=0) / dx
    e = np.diff(u, axis=1) / dx
    d1 = d[:, :-1]
    d2 = d[:, 1:]
    e1 = e[:-1, :]
    e2 = e[1:, :]
    q = eps * eps + 0.5 * (d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2)
    if p == 2.0:
        energy = float(np.sum(q)) * dx * dx
        w = np.full_like(q, dx)
    else:
        qp = q ** (0.5 * p)
        energy = float(np.sum(qp)) * dx * dx
        w = p * q ** (0.5 * p - 1.0) * (0.5 * dx)
    a1 = w * d1
    a2 = w * d2
    b1 = w * e1
    b2 = w * e2
    grad = np.zeros_like(u)
    grad[:-1, :-1] += -a1 - b1
    grad[1:, :-1] += a1 - b2
    grad[:-1, 1:] += -a2 + b1
    grad[1:, 1:] += a2 + b2
    return energy, grad


def power_sum_grad(u: np.ndarray, w: np.ndarray, q: float):
    """Return ``(sum_i w_i |u_i|^q, d/du of it)`` over flat nodal arrays."""
    au = np.abs(u)
    if q == 2.0:
        s = float(np.sum(w * au * au))
        grad = 2.0 * w * u
    else:
        s = float(np.sum(w * au**q))
        grad = q * w * au ** (q - 1.0) * np.sign(u)
    return s, grad
