import numpy as np
import pytest

from nehari.domain import Field
from nehari.eigensolve import lambda1
from nehari.errors import DegenerateScaling, InfeasibleConstraint, SeparationFailed
from nehari.extremal import (
    critical_rescale,
    degenerate_probe,
    lambda_star,
    plateau_edge,
    restricted_min,
    separation_threshold,
)
from nehari.functionals import (
    Forms,
    NehariClass,
    gamma_part,
    nehari_class,
    pde_residual,
)

from .conftest import make_data


@pytest.fixture(scope="module")
def preset_extreme(preset_ctx):
    return preset_ctx.extreme


class TestLambdaStar:
    def test_dominates_lambda1(self, preset_extreme):
        assert preset_extreme.lam_star >= preset_extreme.lam1 - 1e-8

    def test_strict_gap_under_sign_hypothesis(self, preset_extreme, preset_ctx,
                                              preset_data):
        assert gamma_part(preset_ctx.eigen.phi1, preset_data) < 0
        assert preset_extreme.lam_star >= 1.05 * preset_extreme.lam1

    def test_equality_face(self, preset_extreme):
        assert abs(preset_extreme.f_at_min) <= 1e-6
        assert preset_extreme.constraint_active

    def test_feasibility_certificate(self, preset_extreme, preset_data):
        forms = Forms(preset_data)
        u = preset_extreme.u_star
        assert forms.hmass(u.values)[0] > 0
        assert np.all(u.values >= 0)

    def test_infeasible_when_f_negative(self):
        data = make_data(n=41)  # f = -1 everywhere
        with pytest.raises(InfeasibleConstraint):
            lambda_star(data, restarts=2, seed=0)

    def test_inactive_constraint_returns_eigenpair(self):
        # f >= 0 everywhere makes the first eigenfunction feasible
        data = make_data(n=81, half_width=0.5, f_fn=lambda x: 1.0 + 0.0 * x)
        eig = lambda1(data, seed=0)
        ext = lambda_star(data, eigen=eig, restarts=2, seed=0)
        assert not ext.constraint_active
        assert ext.lam_star == eig.lam1
        assert np.array_equal(ext.u_star.values, eig.phi1.values)
        assert ext.t0 is None


class TestCriticalRescale:
    def test_degenerate_class_member(self, preset_extreme, preset_data):
        w = preset_extreme.u_star.scaled(preset_extreme.t0)
        assert nehari_class(w, preset_extreme.lam_star, preset_data) is NehariClass.ZERO

    def test_residual_small(self, preset_extreme, preset_data):
        w = preset_extreme.u_star.scaled(preset_extreme.t0)
        assert pde_residual(w, preset_extreme.lam_star, preset_data) <= 1e-5

    def test_scale_covariance(self, preset_extreme, preset_data):
        t2, w2 = critical_rescale(preset_extreme.u_star.scaled(2.0),
                                  preset_extreme.lam_star, preset_data)
        assert t2 == pytest.approx(0.5 * preset_extreme.t0, rel=1e-9)
        w1 = preset_extreme.u_star.scaled(preset_extreme.t0)
        assert np.allclose(w2.values, w1.values, rtol=1e-8)

    def test_homogeneity_keeps_class(self, preset_extreme, preset_data):
        # every scaling of the minimizer stays in the degenerate class; the
        # gamma-homogeneous amplification of the tiny constraint residual
        # requires a tolerance matching the solve precision at large t
        for t in (0.3, 1.0, 4.0):
            w = preset_extreme.u_star.scaled(t)
            assert nehari_class(w, preset_extreme.lam_star, preset_data,
                                tol=1e-6) is NehariClass.ZERO
        assert nehari_class(preset_extreme.u_star, preset_extreme.lam_star,
                            preset_data) is NehariClass.ZERO

    def test_out_of_window_rejected(self, preset_extreme, preset_data):
        # a scan window that excludes the known scale has no interior
        # minimum to report
        with pytest.raises(DegenerateScaling):
            critical_rescale(preset_extreme.u_star, preset_extreme.lam_star,
                             preset_data, t_lo=1e-6, t_hi=2e-6)


class TestRestrictedMin:
    def test_value_negative_and_interior(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        lam = ext.lam_star * 1.01
        r = restricted_min(lam, preset_ctx.mu0, preset_data,
                           warm=preset_ctx.at_star.u, seed=0,
                           lam1=ext.lam1, lam_star=ext.lam_star)
        assert r.value < 0
        assert r.on_boundary is False
        assert r.h_mu < 0

    def test_monotone_in_lam(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        mu0 = preset_ctx.mu0
        vals = []
        for lam in (ext.lam_star * 1.005, ext.lam_star * 1.015, ext.lam_star * 1.025):
            r = restricted_min(lam, mu0, preset_data, warm=preset_ctx.at_star.u,
                               seed=0, lam1=ext.lam1, lam_star=ext.lam_star)
            vals.append(r.value)
        assert vals[0] >= vals[1] >= vals[2]

    def test_fibered_point_is_solution(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        lam = ext.lam_star * 1.01
        r = restricted_min(lam, preset_ctx.mu0, preset_data,
                           warm=preset_ctx.at_star.u, seed=0,
                           lam1=ext.lam1, lam_star=ext.lam_star)
        forms = Forms(preset_data)
        hv = forms.p_part_smooth(r.minimizer.values, lam)[0]
        fv = forms.fmass(r.minimizer.values)[0]
        s = (hv / fv) ** (1.0 / (preset_data.gamma - preset_data.p))
        assert pde_residual(r.minimizer.scaled(s), lam, preset_data) <= 1e-6

    def test_preconditions(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        with pytest.raises(ValueError):
            restricted_min(ext.lam_star, ext.lam1 * 0.5, preset_data,
                           lam1=ext.lam1, lam_star=ext.lam_star)
        with pytest.raises(ValueError):
            restricted_min(ext.lam_star, ext.lam_star * 1.1, preset_data,
                           lam1=ext.lam1, lam_star=ext.lam_star)


class TestSeparationThreshold:
    def test_exceeds_quotient(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        forms = Forms(preset_data)
        v = preset_ctx.at_star.u
        q = forms.grad_energy_exact(v.values) / forms.hmass(v.values)[0]
        mu0 = preset_ctx.mu0
        assert q < mu0 < ext.lam_star
        assert forms.p_part_exact(v.values, mu0) < 0

    def test_empty_list_rejected(self, preset_data, preset_ctx):
        with pytest.raises(ValueError):
            separation_threshold(preset_data, preset_ctx.extreme.lam_star, [],
                                 preset_ctx.eigen.lam1)

    def test_quotient_too_close_fails(self, preset_data, preset_ctx):
        # a synthetic minimizer whose quotient equals the extreme value
        # leaves no admissible grid value
        ext = preset_ctx.extreme
        with pytest.raises(SeparationFailed):
            separation_threshold(preset_data, ext.lam_star, [ext.u_star],
                                 preset_ctx.eigen.lam1)


class TestPlateauEdge:
    def test_requires_lam_beyond_star(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        with pytest.raises(ValueError):
            plateau_edge(ext.lam_star, preset_ctx.mu0, preset_data,
                         lam1=ext.lam1, lam_star=ext.lam_star,
                         u_star=ext.u_star)

    def test_edge_between_mu0_and_star(self, preset_data, preset_ctx):
        ext = preset_ctx.extreme
        lam = ext.lam_star * 1.02
        from nehari.branches import solve_past_star

        first = solve_past_star(lam, preset_ctx.mu0, preset_data,
                                warm=preset_ctx.at_star.u, lam1=ext.lam1,
                                lam_star=ext.lam_star, seed=0)
        edge = plateau_edge(lam, preset_ctx.mu0, preset_data,
                            lam1=ext.lam1, lam_star=ext.lam_star,
                            u_star=ext.u_star, j_mu0=first.report.energy,
                            warm=preset_ctx.at_star.u, seed=0)
        assert preset_ctx.mu0 < edge.mu < ext.lam_star
        assert edge.face_value == pytest.approx(first.report.energy, rel=2e-3)
        forms = Forms(preset_data)
        h_face = forms.p_part_exact(edge.boundary_minimizer.values, edge.mu)
        scale = forms.grad_energy_exact(edge.boundary_minimizer.values) + 1.0
        assert abs(h_face) <= 1e-6 * scale


class TestDegenerateProbe:
    def test_no_candidate_below_star(self, preset_data, preset_ctx):
        probe = degenerate_probe(preset_data, seed=7, restarts=4)
        assert probe["found"]
        assert probe["quotient"] >= preset_ctx.extreme.lam_star - 1e-3
