"""Built-in weight profiles and reference problem setups.

The template preset realizes the structural hypotheses on a truncated box:
h is a nonnegative plateau around the origin (localizing the quotient), f is
a positive bump at the origin, optionally an exact-zero annulus (so the
thickness check has something to do), then a smooth ramp down to a strictly
negative far-field value.  All radii are absolute lengths, so enlarging the
box does not change the weights and truncation studies are meaningful.
"""

from __future__ import annotations

import numpy as np

from .domain import Domain, WeightField, build_domain
from .functionals import ProblemData

__all__ = ["weight_from_profile", "template_1d", "template_2d", "WEIGHT_PROFILES"]


def _radii(domain: Domain) -> np.ndarray:
    return domain.node_radii()


def _smoothstep(t: np.ndarray) -> np.ndarray:
    s = np.clip(t, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def _profile_constant(domain: Domain, value: float = 1.0) -> np.ndarray:
    return np.full((domain.n,) * domain.dim, float(value))


def _profile_plateau(domain: Domain, r: float = 2.5, taper: float = 1.0,
                     height: float = 1.0) -> np.ndarray:
    rr = _radii(domain)
    t = _smoothstep((rr - r) / taper)
    return height * (1.0 - t)


def _profile_bump_annulus(
    domain: Domain,
    peak: float = 1.0,
    r_plus: float = 0.6,
    r_zero: float = 0.9,
    r_ramp: float = 0.6,
    f_neg: float = 4.0,
) -> np.ndarray:
    """Positive core, exact-zero annulus [r_plus, r_zero], negative far field."""
    rr = _radii(domain)
    out = np.zeros_like(rr)
    core = rr < r_plus
    out[core] = peak * np.cos(0.5 * np.pi * rr[core] / r_plus) ** 2
    ramp = rr > r_zero
    out[ramp] = -f_neg * _smoothstep((rr[ramp] - r_zero) / r_ramp)
    return out


def _profile_bump_crossing(
    domain: Domain,
    peak: float = 1.0,
    r_cross: float = 0.75,
    width: float = 0.6,
    f_neg: float = 4.0,
) -> np.ndarray:
    """Sign change without an exact zero set (generic grids miss the crossing)."""
    rr = _radii(domain)
    return peak - (peak + f_neg) * _smoothstep((rr - r_cross + 0.5 * width) / width)


WEIGHT_PROFILES = {
    "constant": _profile_constant,
    "plateau": _profile_plateau,
    "bump_annulus": _profile_bump_annulus,
    "bump_crossing": _profile_bump_crossing,
}


def weight_from_profile(domain: Domain, profile: str, params: dict | None = None,
                        tau_sign: float = 1e-12) -> WeightField:
    """Build a named weight profile on the domain."""
    if profile not in WEIGHT_PROFILES:
        raise ValueError(f"unknown weight profile {profile!r}; known: {sorted(WEIGHT_PROFILES)}")
    values = WEIGHT_PROFILES[profile](domain, **(params or {}))
    return WeightField(domain, values, tau_sign=tau_sign)


def template_1d(
    n: int = 241,
    half_width: float = 8.0,
    p: float = 2.0,
    gamma: float = 3.0,
    annulus: bool = True,
    eps_reg: float = 1e-10,
) -> ProblemData:
    """Reference 1D configuration satisfying the structural hypotheses."""
    dom = build_domain(1, half_width, n)
    h = weight_from_profile(dom, "plateau", {"r": 3.5, "taper": 1.0})
    if annulus:
        f = weight_from_profile(dom, "bump_annulus", {"f_neg": 16.0})
    else:
        f = weight_from_profile(dom, "bump_crossing", {"f_neg": 16.0})
    return ProblemData(p=p, gamma=gamma, h=h, f=f, eps_reg=eps_reg)


def template_2d(
    n: int = 81,
    half_width: float = 3.0,
    p: float = 2.0,
    gamma: float = 3.0,
    annulus: bool = True,
    eps_reg: float = 1e-10,
) -> ProblemData:
    """Reference 2D configuration (smaller radii to fit the box)."""
    dom = build_domain(2, half_width, n)
    h = weight_from_profile(dom, "plateau", {"r": 1.2, "taper": 0.6})
    if annulus:
        f = weight_from_profile(
            dom, "bump_annulus",
            {"peak": 1.0, "r_plus": 0.5, "r_zero": 0.8, "r_ramp": 0.5, "f_neg": 16.0},
        )
    else:
        f = weight_from_profile(
            dom, "bump_crossing", {"peak": 1.0, "r_cross": 0.65, "width": 0.5, "f_neg": 16.0},
        )
    return ProblemData(p=p, gamma=gamma, h=h, f=f, eps_reg=eps_reg)
