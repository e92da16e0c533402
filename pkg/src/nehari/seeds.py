"""Starting-field construction for the cone minimizations.

The sign cones require specific sign patterns of the two forms: the (-,-)
cone wants spread-out fields with mass where f < 0 and Rayleigh quotient
below the spectral parameter; the (+,+) cone wants concentrated bumps on the
positivity set of f.  Candidates are tried in a deterministic order (warm
start, structural guesses, then seeded random bumps) and the first one
inside the cone wins.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np
from scipy import ndimage

from .domain import full_to_interior
from .errors import EmptyCone
from .functionals import Forms

__all__ = ["gaussian_bump", "cone_start", "largest_component_center"]


def gaussian_bump(forms: Forms, center: np.ndarray, width: float) -> np.ndarray:
    """Interior array of a gaussian bump at ``center`` with scale ``width``."""
    dom = forms.dom
    x = dom.axis()[1:-1]
    if dom.dim == 1:
        d2 = (x - center[0]) ** 2
    else:
        xi = np.repeat(x, dom.n_interior_axis)
        yi = np.tile(x, dom.n_interior_axis)
        d2 = (xi - center[0]) ** 2 + (yi - center[1]) ** 2
    return np.exp(-d2 / (2.0 * width**2))


def _interior_coords(forms: Forms) -> np.ndarray:
    dom = forms.dom
    x = dom.axis()[1:-1]
    if dom.dim == 1:
        return x[:, None]
    xi = np.repeat(x, dom.n_interior_axis)
    yi = np.tile(x, dom.n_interior_axis)
    return np.stack([xi, yi], axis=1)


def largest_component_center(forms: Forms, node_mask_full: np.ndarray) -> Optional[np.ndarray]:
    """Coordinates of the centroid of the largest connected mask component."""
    labels, count = ndimage.label(node_mask_full)
    if count == 0:
        return None
    sizes = ndimage.sum_labels(np.ones_like(labels, dtype=float), labels, range(1, count + 1))
    best = int(np.argmax(sizes)) + 1
    dom = forms.dom
    ax = dom.axis()
    idx = np.nonzero(labels == best)
    if dom.dim == 1:
        return np.array([float(np.mean(ax[idx[0]]))])
    return np.array([float(np.mean(ax[idx[0]])), float(np.mean(ax[idx[1]]))])


def cone_start(
    forms: Forms,
    lam: float,
    h_negative: bool,
    rng: np.random.Generator,
    extra: Iterable[np.ndarray] = (),
    tries: int = 48,
) -> np.ndarray:
    """First field found inside the requested sign cone.

    ``h_negative=True`` targets the (-,-) cone (p-part and gamma-part both
    negative); ``False`` targets (+,+).  Raises :class:`EmptyCone` when no
    candidate qualifies, which is the expected outcome e.g. for the (-,-)
    cone below the first eigenvalue.
    """

    def in_cone(x: np.ndarray) -> bool:
        if not np.any(x):
            return False
        hv = forms.p_part_smooth(x, lam)[0]
        fv = forms.fmass(x)[0]
        scale = 1e-12 * (abs(hv) + abs(fv) + 1.0)
        if h_negative:
            return hv < -scale and fv < -scale
        return hv > scale and fv > scale

    candidates: list[np.ndarray] = []
    for e in extra:
        if e is not None:
            candidates.append(np.asarray(e, dtype=float))

    dom = forms.dom
    L = dom.half_width
    f_int = forms.f_int
    coords = _interior_coords(forms)
    origin = np.zeros(dom.dim)

    if h_negative:
        # Wide, low-quotient profiles with gamma-mass in the f<0 region.
        for w in (0.6 * L, 0.4 * L, 0.8 * L, 0.25 * L):
            candidates.append(gaussian_bump(forms, origin, w))
        neg_nodes = np.nonzero(f_int < 0)[0]
        if neg_nodes.size:
            center = coords[neg_nodes[np.argmin(np.abs(coords[neg_nodes, 0]))]]
            candidates.append(gaussian_bump(forms, center, 0.5 * L))
    else:
        # Narrow bumps on the positivity set of f.
        pos_full = forms.data.f.positive
        center = largest_component_center(forms, pos_full)
        if center is not None:
            for w in (2 * dom.spacing, 4 * dom.spacing, 8 * dom.spacing):
                candidates.append(gaussian_bump(forms, center, w))
        pos_nodes = np.nonzero(f_int > 0)[0]
        for _ in range(max(0, tries - len(candidates))):
            if pos_nodes.size == 0:
                break
            k = int(rng.integers(0, pos_nodes.size))
            width = dom.spacing * float(rng.uniform(1.5, 6.0))
            candidates.append(gaussian_bump(forms, coords[pos_nodes[k]], width))

    while len(candidates) < tries:
        center = rng.uniform(-0.7 * L, 0.7 * L, dom.dim)
        width = float(rng.uniform(0.05 * L, 0.7 * L))
        candidates.append(gaussian_bump(forms, center, width))

    for cand in candidates[:tries]:
        if in_cone(cand):
            return cand / forms.enorm(cand)
    kind = "(-,-)" if h_negative else "(+,+)"
    raise EmptyCone(f"no starting field found in the {kind} cone at lam={lam:.6g}")
