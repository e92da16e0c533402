"""Independent oracles used by the tests.

Everything here is assembled from scratch (sparse matrices from explicit
stencil loops, plain finite differences), not by calling back into the
package kernels, so the dual-route checks stay meaningful.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def stiffness_1d(n, dx):
    """Interior stiffness of  sum_cells ((u_{i+1}-u_i)/dx)^2 dx  (zero boundary)."""
    m = n - 2
    main = 2.0 * np.ones(m) / dx
    off = -1.0 * np.ones(m - 1) / dx
    return sp.diags([off, main, off], [-1, 0, 1], format="csc")


def stiffness_2d(n, dx):
    """Interior stiffness of the cell energy with per-direction averaged
    squared one-sided differences (four half-weight edge terms per cell)."""
    idx = -np.ones((n, n), dtype=int)
    k = 0
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            idx[i, j] = k
            k += 1
    rows, cols, vals = [], [], []

    def add_edge(a, b):
        # contribution 0.5*(u_a - u_b)^2, boundary values are zero
        ia, ib = idx[a], idx[b]
        if ia >= 0:
            rows.append(ia); cols.append(ia); vals.append(0.5)
        if ib >= 0:
            rows.append(ib); cols.append(ib); vals.append(0.5)
        if ia >= 0 and ib >= 0:
            rows.append(ia); cols.append(ib); vals.append(-0.5)
            rows.append(ib); cols.append(ia); vals.append(-0.5)

    for i in range(n - 1):
        for j in range(n - 1):
            add_edge((i, j), (i + 1, j))
            add_edge((i, j + 1), (i + 1, j + 1))
            add_edge((i, j), (i, j + 1))
            add_edge((i + 1, j), (i + 1, j + 1))
    m = (n - 2) ** 2
    return sp.coo_matrix((vals, (rows, cols)), shape=(m, m)).tocsc()


def first_eigenvalue_p2(domain, h_interior):
    """Generalized symmetric eigensolve for the p = 2 Rayleigh quotient."""
    n, dx = domain.n, domain.spacing
    if domain.dim == 1:
        k_mat = stiffness_1d(n, dx)
        m_mat = sp.diags(h_interior * dx, format="csc")
    else:
        k_mat = stiffness_2d(n, dx)
        m_mat = sp.diags(h_interior * dx * dx, format="csc")
    vals = spla.eigsh(k_mat, k=1, M=m_mat, sigma=0, which="LM",
                      return_eigenvectors=False)
    return float(vals[0])


def central_diff(fn, x, steps=None):
    """Componentwise central finite differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        d = 1e-6 * (1.0 + abs(x[i])) if steps is None else steps[i]
        xp = x.copy(); xp[i] += d
        xm = x.copy(); xm[i] -= d
        g[i] = (fn(xp) - fn(xm)) / (2.0 * d)
    return g
