import warnings

import numpy as np
import pytest

from nehari.branches import prepare_context, solve_past_star
from nehari.domain import Field, WeightField, build_domain
from nehari.functionals import ProblemData
from nehari.presets import template_1d


@pytest.fixture(scope="session")
def preset_data():
    return template_1d()


@pytest.fixture(scope="session")
def preset_ctx(preset_data):
    return prepare_context(preset_data, seed=0)


@pytest.fixture(scope="session")
def mp_pipeline(preset_data, preset_ctx):
    """Min-max pipeline at one past-extreme parameter, intermediates exposed.

    Shared between the mountain-pass unit tests and the acceptance suite;
    the steps mirror ``second_solution``.
    """
    from dataclasses import replace

    from nehari.extremal import plateau_edge
    from nehari.functionals import Forms
    from nehari.mountainpass import (
        boundary_endpoint,
        geometry_checklist,
        optimize_path,
        refine_saddle,
    )

    e = preset_ctx.extreme
    lam = e.lam_star * 1.02
    first = solve_past_star(lam, preset_ctx.mu0, preset_data,
                            warm=preset_ctx.at_star.u,
                            lam1=e.lam1, lam_star=e.lam_star, seed=0)
    forms = Forms(preset_data)
    warm_dir = Field(preset_data.domain,
                     first.u.values / forms.enorm(first.u.values))
    edge = plateau_edge(lam, preset_ctx.mu0, preset_data,
                        lam1=e.lam1, lam_star=e.lam_star, u_star=e.u_star,
                        j_mu0=first.report.energy, warm=warm_dir, seed=0)
    v_b = boundary_endpoint(lam, edge.mu, preset_data,
                            warm=edge.boundary_minimizer, u_star=e.u_star, seed=0)
    hv = forms.p_part_smooth(v_b.values, lam)[0]
    fv = forms.fmass(v_b.values)[0]
    s_b = (hv / fv) ** (1.0 / (preset_data.gamma - preset_data.p))
    endpoint = Field(preset_data.domain, s_b * v_b.values)
    passres = optimize_path(lam, (first.u, endpoint), 25, preset_data, seed=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        checks = geometry_checklist(
            lam, preset_ctx.mu0, edge.mu, first.u, v_b, passres.path,
            preset_data, lam_star=e.lam_star, j_mu0=first.report.energy,
            j_mu_lam=edge.face_value, c_lambda=passres.c_lambda, seed=0,
        )
    passres = replace(passres, geometry_checks=checks)
    saddle = refine_saddle(passres.saddle, lam, preset_data, u_first=first.u,
                           c_lambda=passres.c_lambda, tol=1e-6)
    return {
        "lam": lam, "first": first, "edge": edge, "v_b": v_b,
        "endpoint": endpoint, "passres": passres, "checks": checks,
        "saddle": saddle, "forms": forms,
    }


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def make_data(dim=1, half_width=1.0, n=17, p=2.0, gamma=4.0, h_fn=None, f_fn=None,
              eps_reg=1e-10):
    """Small problem instance for unit tests; h defaults to 1, f to -1."""
    dom = build_domain(dim, half_width, n)
    if h_fn is None:
        h = WeightField.constant(dom, 1.0)
    else:
        h = WeightField.from_function(dom, h_fn)
    if f_fn is None:
        f = WeightField.constant(dom, -1.0)
    else:
        f = WeightField.from_function(dom, f_fn)
    return ProblemData(p=p, gamma=gamma, h=h, f=f, eps_reg=eps_reg)


def random_field(domain, rng, scale=1.0, smooth=0):
    vals = rng.standard_normal(domain.n_interior) * scale
    if smooth:
        full = np.zeros((domain.n,) * domain.dim)
        if domain.dim == 1:
            full[1:-1] = vals
            for _ in range(smooth):
                full[1:-1] = 0.25 * full[:-2] + 0.5 * full[1:-1] + 0.25 * full[2:]
            vals = full[1:-1]
        else:
            m = domain.n_interior_axis
            full[1:-1, 1:-1] = vals.reshape(m, m)
            for _ in range(smooth):
                inner = (full[:-2, 1:-1] + full[2:, 1:-1]
                         + full[1:-1, :-2] + full[1:-1, 2:])
                full[1:-1, 1:-1] = 0.5 * full[1:-1, 1:-1] + 0.125 * inner
            vals = full[1:-1, 1:-1].ravel()
    return Field(domain, vals)
