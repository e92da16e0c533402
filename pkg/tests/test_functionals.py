import numpy as np
import pytest

from nehari.domain import Field, WeightField, build_domain, dirichlet_energy_grad
from nehari.errors import SignMismatch
from nehari.functionals import (
    Forms,
    NehariClass,
    ProblemData,
    cone_membership,
    energy,
    energy_grad,
    energy_report,
    fiber_scale,
    gamma_part,
    nehari_class,
    p_part,
    pde_residual,
    reduced_energy,
    tail_fraction,
)

from .conftest import make_data, random_field
from .helpers import central_diff, stiffness_1d


@pytest.fixture()
def data_mixed():
    # indefinite f: positive bump at the origin, negative outside
    return make_data(n=33, p=2.0, gamma=4.0,
                     f_fn=lambda x: 1.0 - 5.0 * x**2)


class TestPPart:
    def test_zero_field(self, data_mixed):
        assert p_part(Field.zeros(data_mixed.domain), 1.3, data_mixed) == 0.0

    def test_lam_zero_nonnegative(self, data_mixed, rng):
        u = random_field(data_mixed.domain, rng)
        assert p_part(u, 0.0, data_mixed) >= 0.0

    def test_sine_rayleigh_identity(self):
        # sampled first Dirichlet mode at lam = pi^2 gives H = O(dx^2)
        data = make_data(half_width=0.5, n=101)
        dom = data.domain
        u = Field(dom, np.sin(np.pi * (dom.axis()[1:-1] + 0.5)))
        dx = dom.spacing
        assert abs(p_part(u, np.pi**2, data)) <= 10.0 * dx**2

    def test_p_homogeneous(self, data_mixed, rng):
        u = random_field(data_mixed.domain, rng)
        h1 = p_part(u, 0.7, data_mixed)
        h2 = p_part(u.scaled(3.0), 0.7, data_mixed)
        assert h2 == pytest.approx(3.0**data_mixed.p * h1, rel=1e-12)


class TestGammaPart:
    def test_zero_field(self, data_mixed):
        assert gamma_part(Field.zeros(data_mixed.domain), data_mixed) == 0.0

    def test_negative_weight_sign(self, rng):
        data = make_data(n=21)  # f = -1
        u = random_field(data.domain, rng)
        assert gamma_part(u, data) < 0.0

    def test_gamma_homogeneous(self, data_mixed, rng):
        u = random_field(data_mixed.domain, rng)
        f1 = gamma_part(u, data_mixed)
        assert f1 != 0.0
        assert gamma_part(u.scaled(2.0), data_mixed) == pytest.approx(
            2.0**data_mixed.gamma * f1, rel=1e-12
        )


class TestEnergy:
    def test_definition(self, data_mixed, rng):
        u = random_field(data_mixed.domain, rng)
        lam = 0.9
        expected = (p_part(u, lam, data_mixed) / data_mixed.p
                    - gamma_part(u, data_mixed) / data_mixed.gamma)
        assert energy(u, lam, data_mixed) == pytest.approx(expected, rel=1e-14)

    def test_zero_field(self, data_mixed):
        assert energy(Field.zeros(data_mixed.domain), 2.0, data_mixed) == 0.0

    def test_nehari_point_closed_form(self, preset_data, preset_ctx):
        # on the Nehari set H = F, so Phi = (1/p - 1/gamma) H
        pt = preset_ctx.at_star
        hv = pt.report.p_part
        expected = (1.0 / preset_data.p - 1.0 / preset_data.gamma) * hv
        assert pt.report.energy == pytest.approx(expected, rel=1e-6)


class TestEnergyGrad:
    def test_zero_critical_for_p_ge_2(self, data_mixed):
        g = energy_grad(Field.zeros(data_mixed.domain), 1.0, data_mixed)
        assert np.all(g.values == 0.0)

    def test_euler_identity(self, data_mixed, rng):
        lam = 1.1
        for _ in range(100):
            u = random_field(data_mixed.domain, rng)
            g = energy_grad(u, lam, data_mixed)
            lhs = float(np.dot(g.values, u.values))
            rhs = p_part(u, lam, data_mixed) - gamma_part(u, data_mixed)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)

    @pytest.mark.parametrize("p,eps", [(1.5, 1e-6), (2.0, 1e-10), (3.0, 1e-10)])
    def test_matches_finite_differences(self, p, eps, rng):
        data = make_data(n=9, p=p, gamma=4.0, eps_reg=eps,
                         f_fn=lambda x: 1.0 - 5.0 * x**2)
        forms = Forms(data)
        lam = 0.8
        u = random_field(data.domain, rng)
        g = energy_grad(u, lam, data).values
        fd = central_diff(lambda x: forms.energy_smooth(x, lam)[0], u.values)
        denom = np.abs(g) + np.abs(fd) + 1e-10
        assert np.max(np.abs(g - fd) / denom) <= 1e-6

    def test_p2_matches_independent_assembly(self, rng):
        data = make_data(n=41, p=2.0, gamma=4.0,
                         f_fn=lambda x: np.cos(3 * x))
        dom = data.domain
        u = random_field(dom, rng)
        lam = 1.7
        g = energy_grad(u, lam, data).values
        k_mat = stiffness_1d(dom.n, dom.spacing)
        dx = dom.spacing
        h_i = data.h.interior()
        f_i = data.f.interior()
        x = u.values
        expected = (k_mat @ x) - lam * h_i * x * dx - f_i * np.abs(x) ** 2 * x * dx
        assert np.allclose(g, expected, rtol=1e-11, atol=1e-13)


class TestNehariClass:
    def test_zero_rejected(self, data_mixed):
        with pytest.raises(ValueError):
            nehari_class(Field.zeros(data_mixed.domain), 1.0, data_mixed)

    def test_generic_field_off(self, data_mixed, rng):
        u = random_field(data_mixed.domain, rng)
        assert nehari_class(u, 0.9, data_mixed) is NehariClass.OFF

    def test_fibered_signs(self, preset_data, preset_ctx):
        # (-,-) fibered minimizer classifies PLUS; both signs negative
        pt = preset_ctx.at_star
        lam = pt.lam
        assert nehari_class(pt.u, lam, preset_data) is NehariClass.PLUS
        assert pt.report.p_part < 0 and pt.report.gamma_part < 0

    def test_minus_cone(self, data_mixed, rng):
        # narrow spike on the f-positive core: H > 0, F > 0 after fibering
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        lam = 0.1
        s = fiber_scale(u, lam, data_mixed)
        w = u.scaled(s)
        assert nehari_class(w, lam, data_mixed) is NehariClass.MINUS
        assert p_part(w, lam, data_mixed) > 0 and gamma_part(w, data_mixed) > 0


class TestFiberScale:
    def test_sign_mismatch(self, rng):
        data = make_data(n=21)  # f = -1 so F < 0, lam = 0 so H >= 0
        u = random_field(data.domain, rng)
        with pytest.raises(SignMismatch):
            fiber_scale(u, 0.0, data)

    def test_formula_and_stationarity(self, data_mixed, rng):
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        lam = 0.1
        hv = p_part(u, lam, data_mixed)
        fv = gamma_part(u, data_mixed)
        s = fiber_scale(u, lam, data_mixed)
        assert s == pytest.approx((hv / fv) ** (1.0 / (data_mixed.gamma - data_mixed.p)),
                                  rel=1e-13)
        # stationarity along the ray: <grad Phi(su), su> = 0
        w = u.scaled(s)
        g = energy_grad(w, lam, data_mixed)
        pairing = float(np.dot(g.values, w.values))
        scale = abs(p_part(w, lam, data_mixed)) + abs(gamma_part(w, data_mixed))
        assert abs(pairing) <= 1e-10 * scale

    def test_closed_form_scaling(self, data_mixed):
        # p=2, gamma=4: scaling u by t multiplies H by t^2 and F by t^4,
        # hence the fiber scale by 1/t
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        s1 = fiber_scale(u, 0.1, data_mixed)
        s2 = fiber_scale(u.scaled(2.0), 0.1, data_mixed)
        assert s2 == pytest.approx(0.5 * s1, rel=1e-12)


class TestReducedEnergy:
    def test_matches_energy_at_fibered_point(self, data_mixed):
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        lam = 0.1
        s = fiber_scale(u, lam, data_mixed)
        assert reduced_energy(u, lam, data_mixed) == pytest.approx(
            energy(u.scaled(s), lam, data_mixed), rel=1e-10
        )

    def test_zero_homogeneous(self, data_mixed):
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        j = reduced_energy(u, 0.1, data_mixed)
        for t in (0.5, 2.0, 10.0):
            assert reduced_energy(u.scaled(t), 0.1, data_mixed) == pytest.approx(
                j, rel=5e-12
            )

    def test_closed_form_p2_gamma4(self, data_mixed):
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        lam = 0.1
        hv = p_part(u, lam, data_mixed)
        fv = gamma_part(u, data_mixed)
        # c_{p,gamma} = (4-2)/(2*4) = 1/4; J = +c H^2/F on the (+,+) cone
        assert data_mixed.fiber_constant == pytest.approx(0.25)
        assert reduced_energy(u, lam, data_mixed) == pytest.approx(
            0.25 * hv**2 / fv, rel=1e-12
        )

    def test_sign_mismatch(self, data_mixed, rng):
        u = random_field(data_mixed.domain, rng)
        with pytest.raises(SignMismatch):
            reduced_energy(u, 0.9, data_mixed)


class TestResidual:
    def test_zero_rejected(self, data_mixed):
        with pytest.raises(ValueError):
            pde_residual(Field.zeros(data_mixed.domain), 1.0, data_mixed)

    def test_reduces_to_plaplacian_norm(self, rng):
        # lam = 0 and f = 0 on the nodes that matter: residual is the norm
        # of the energy-gradient term alone
        dom = build_domain(1, 1.0, 21)
        h = WeightField.constant(dom, 1.0)
        f = WeightField.constant(dom, 0.0)
        data = ProblemData(p=3.0, gamma=4.0, h=h, f=f)
        u = random_field(dom, rng)
        _, g = dirichlet_energy_grad(u, 3.0, data.eps_reg)
        expected = np.linalg.norm(g / 3.0) / max(1.0, np.linalg.norm(u.values))
        assert pde_residual(u, 0.0, data) == pytest.approx(expected, rel=1e-12)

    def test_converged_point_small(self, preset_ctx, preset_data):
        pt = preset_ctx.at_star
        assert pde_residual(pt.u, pt.lam, preset_data) <= 1e-6


class TestTailFraction:
    def test_inside_support(self, data_mixed):
        dom = data_mixed.domain
        vals = np.zeros(dom.n_interior)
        vals[dom.n_interior // 2] = 1.0
        u = Field(dom, vals)
        assert tail_fraction(u, 0.9, data_mixed) == 0.0

    def test_outside_support(self, data_mixed):
        dom = data_mixed.domain
        x = dom.axis()[1:-1]
        u = Field(dom, np.where(np.abs(x) > 0.5, 1.0, 0.0))
        assert tail_fraction(u, 0.25, data_mixed) == pytest.approx(1.0)

    def test_tiny_radius_whole_mass(self, data_mixed):
        dom = data_mixed.domain
        x = dom.axis()[1:-1]
        u = Field(dom, np.where(np.abs(x) > 0.2, 1.0, 0.0))
        assert tail_fraction(u, 1e-12, data_mixed) == pytest.approx(1.0)


class TestConeMembership:
    def test_negative_f_never_bplus(self, rng):
        data = make_data(n=21)  # f = -1
        u = random_field(data.domain, rng)
        flags = cone_membership(u, 1.0, 1.0, data)
        assert flags.in_b_plus is False

    def test_below_lambda1_never_lminus(self, rng):
        # Rayleigh bound: with h = 1, H_lam >= (lam1 - lam) * mass > 0
        data = make_data(half_width=0.5, n=51)
        lam1 = np.pi**2  # continuum value; discrete is within O(dx^2)
        for _ in range(10):
            u = random_field(data.domain, rng)
            flags = cone_membership(u, 0.5 * lam1, 0.5 * lam1, data)
            assert flags.in_l_minus is False

    def test_theta_plus(self, preset_data, preset_ctx):
        pt = preset_ctx.at_star
        flags = cone_membership(pt.u, pt.lam, preset_ctx.mu0, preset_data)
        assert flags.in_theta_plus is True


class TestMonotonicityEstimate:
    @pytest.mark.parametrize("p", [2.0, 3.0])
    def test_plaplacian_monotone(self, p, rng):
        # <A(u)-A(v), u-v> >= c_p * int |grad(u-v)|^p with a healthy margin
        from nehari.domain import dirichlet_energy

        dom = build_domain(1, 1.0, 31)
        for _ in range(20):
            u = random_field(dom, rng)
            v = random_field(dom, rng)
            _, gu = dirichlet_energy_grad(u, p, 0.0)
            _, gv = dirichlet_energy_grad(v, p, 0.0)
            lhs = float(np.dot(gu / p - gv / p, u.values - v.values))
            diff = Field(dom, u.values - v.values)
            rhs = dirichlet_energy(diff, p, 0.0)
            assert lhs >= 1e-3 * rhs


class TestSymmetrization:
    def test_reduced_energy_modulus(self, rng):
        # H is invariant under u -> |u| except at sign-change cells, so the
        # reduced energy agrees within discretization tolerance
        data = make_data(n=201, p=2.0, gamma=4.0,
                         f_fn=lambda x: 1.0 - 5.0 * x**2)
        dom = data.domain
        x = dom.axis()[1:-1]
        base = np.exp(-8 * x**2)
        made = 0
        for k in range(12):
            wig = base * (1.0 + 0.35 * np.sin((k + 2) * np.pi * x))
            mixed = wig - 0.12 * base * np.sin((k + 3) * x * 7)
            u = Field(dom, mixed - 0.05)
            lam = 0.05
            try:
                j_u = reduced_energy(u, lam, data)
                j_abs = reduced_energy(Field(dom, np.abs(u.values)), lam, data)
            except SignMismatch:
                continue
            made += 1
            assert j_abs == pytest.approx(j_u, rel=50 * dom.spacing)
        assert made >= 3


class TestEnergyReport:
    def test_consistency(self, preset_data, preset_ctx):
        pt = preset_ctx.at_star
        rep = energy_report(pt.u, pt.lam, preset_data)
        assert rep.energy == pytest.approx(
            rep.p_part / preset_data.p - rep.gamma_part / preset_data.gamma, rel=1e-12
        )
        assert rep.nehari is NehariClass.PLUS
        assert 0.0 <= rep.tail_fraction <= 1.0


class TestProblemData:
    def test_gamma_window_enforced(self):
        dom = build_domain(2, 1.0, 9)
        h = WeightField.constant(dom, 1.0)
        f = WeightField.constant(dom, -1.0)
        with pytest.raises(ValueError):
            ProblemData(p=1.5, gamma=7.0, h=h, f=f)  # p* = 6 in 2D
        ProblemData(p=1.5, gamma=5.0, h=h, f=f)

    def test_p_lower_bound(self):
        dom = build_domain(1, 1.0, 9)
        h = WeightField.constant(dom, 1.0)
        f = WeightField.constant(dom, -1.0)
        with pytest.raises(ValueError):
            ProblemData(p=1.0, gamma=2.0, h=h, f=f)

    def test_eps_required_below_two(self):
        dom = build_domain(1, 1.0, 9)
        h = WeightField.constant(dom, 1.0)
        f = WeightField.constant(dom, -1.0)
        with pytest.raises(ValueError):
            ProblemData(p=1.5, gamma=3.0, h=h, f=f, eps_reg=0.0)
