"""Kernel backend selection.

The compiled extension (``nehari._kernels._core``) is preferred; the numpy
fallback (``nehari._kernels.pure``) is used when the extension is missing or
when the environment variable ``NEHARI_FORCE_PURE`` is set to a non-empty
value.  Both expose the same functions; see ``pure`` for the contract.
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("NEHARI_FORCE_PURE"):
    _impl = pure
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

cell_grad_sq_1d = _impl.cell_grad_sq_1d
cell_grad_sq_2d = _impl.cell_grad_sq_2d
grad_pow_cells_1d = _impl.grad_pow_cells_1d
grad_pow_cells_2d = _impl.grad_pow_cells_2d
dirichlet_energy_grad_1d = _impl.dirichlet_energy_grad_1d
dirichlet_energy_grad_2d = _impl.dirichlet_energy_grad_2d
power_sum_grad = _impl.power_sum_grad


def backend() -> str:
    """Name of the active kernel backend ("cython" or "pure")."""
    return _impl.NAME
