# Fused-loop kernels; signatures mirror nehari._kernels.pure exactly.
# Sums are sequential left-to-right, so each backend is bit-reproducible
# with itself (backends may differ from each other at rounding level).

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

NAME = "cython"


def cell_grad_sq_1d(const double[::1] u, double dx):
    cdef Py_ssize_t n = u.shape[0], i
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double g
    for i in range(n - 1):
        g = (u[i + 1] - u[i]) / dx
        o[i] = g * g
    return out


def cell_grad_sq_2d(const double[:, ::1] u, double dx):
    cdef Py_ssize_t n = u.shape[0], i, j
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n - 1, n - 1), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double d1, d2, e1, e2
    for i in range(n - 1):
        for j in range(n - 1):
            d1 = (u[i + 1, j] - u[i, j]) / dx
            d2 = (u[i + 1, j + 1] - u[i, j + 1]) / dx
            e1 = (u[i, j + 1] - u[i, j]) / dx
            e2 = (u[i + 1, j + 1] - u[i + 1, j]) / dx
            o[i, j] = 0.5 * (d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2)
    return out


def grad_pow_cells_1d(const double[::1] u, double dx, double p, double eps):
    cdef Py_ssize_t n = u.shape[0], i
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double g, q
    cdef bint plain = p == 2.0
    for i in range(n - 1):
        g = (u[i + 1] - u[i]) / dx
        q = eps * eps + g * g
        o[i] = q if plain else pow(q, 0.5 * p)
    return out


def grad_pow_cells_2d(const double[:, ::1] u, double dx, double p, double eps):
    cdef Py_ssize_t n = u.shape[0], i, j
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n - 1, n - 1), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double d1, d2, e1, e2, q
    cdef bint plain = p == 2.0
    for i in range(n - 1):
        for j in range(n - 1):
            d1 = (u[i + 1, j] - u[i, j]) / dx
            d2 = (u[i + 1, j + 1] - u[i, j + 1]) / dx
            e1 = (u[i, j + 1] - u[i, j]) / dx
            e2 = (u[i + 1, j + 1] - u[i + 1, j]) / dx
            q = eps * eps + 0.5 * (d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2)
            o[i, j] = q if plain else pow(q, 0.5 * p)
    return out


def dirichlet_energy_grad_1d(const double[::1] u, double dx, double p, double eps):
    cdef Py_ssize_t n = u.shape[0], i
    cdef cnp.ndarray[double, ndim=1] grad = np.zeros(n, dtype=np.float64)
    cdef double[::1] gr = grad
    cdef double g, q, qp, energy = 0.0, wg
    cdef double inv_dx = 1.0 / dx, e2 = eps * eps, half_pm1 = 0.5 * p - 1.0
    cdef bint plain = p == 2.0
    for i in range(n - 1):
        g = (u[i + 1] - u[i]) * inv_dx
        q = e2 + g * g
        if plain:
            energy += q
            wg = 2.0 * g
        else:
            qp = pow(q, half_pm1)
            energy += qp * q
            wg = p * qp * g
        gr[i] -= wg
        gr[i + 1] += wg
    return energy * dx, grad


def dirichlet_energy_grad_2d(const double[:, ::1] u, double dx, double p, double eps):
    cdef Py_ssize_t n = u.shape[0], i, j
    cdef cnp.ndarray[double, ndim=2] grad = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] gr = grad
    cdef double d1, d2, e1, e2, q, qp, energy = 0.0, w, a1, a2, b1, b2
    cdef double inv_dx = 1.0 / dx, eps2 = eps * eps, half_pm1 = 0.5 * p - 1.0
    cdef bint plain = p == 2.0
    for i in range(n - 1):
        for j in range(n - 1):
            d1 = (u[i + 1, j] - u[i, j]) * inv_dx
            d2 = (u[i + 1, j + 1] - u[i, j + 1]) * inv_dx
            e1 = (u[i, j + 1] - u[i, j]) * inv_dx
            e2 = (u[i + 1, j + 1] - u[i + 1, j]) * inv_dx
            q = eps2 + 0.5 * (d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2)
            if plain:
                energy += q
                w = dx
            else:
                qp = pow(q, half_pm1)
                energy += qp * q
                w = p * qp * (0.5 * dx)
            a1 = w * d1
            a2 = w * d2
            b1 = w * e1
            b2 = w * e2
            gr[i, j] += -a1 - b1
            gr[i + 1, j] += a1 - b2
            gr[i, j + 1] += -a2 + b1
            gr[i + 1, j + 1] += a2 + b2
    return energy * dx * dx, grad


def power_sum_grad(const double[::1] u, const double[::1] w, double q):
    cdef Py_ssize_t n = u.shape[0], i
    cdef cnp.ndarray[double, ndim=1] grad = np.empty(n, dtype=np.float64)
    cdef double[::1] gr = grad
    cdef double s = 0.0, au, aq
    cdef bint plain = q == 2.0
    for i in range(n):
        au = fabs(u[i])
        if plain:
            s += w[i] * au * au
            gr[i] = 2.0 * w[i] * u[i]
        else:
            aq = pow(au, q - 1.0)
            s += w[i] * aq * au
            gr[i] = q * w[i] * aq * (1.0 if u[i] > 0.0 else (-1.0 if u[i] < 0.0 else 0.0))
    return s, grad
