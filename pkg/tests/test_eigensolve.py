import numpy as np
import pytest

from nehari.domain import WeightField, build_domain
from nehari.eigensolve import lambda1, validate_hypotheses
from nehari.errors import NoAdmissibleField
from nehari.functionals import ProblemData

from .conftest import make_data
from .helpers import first_eigenvalue_p2


class TestLambda1:
    def test_1d_dirichlet_pi_squared(self):
        data = make_data(half_width=0.5, n=201)
        res = lambda1(data, seed=0)
        assert res.lam1 == pytest.approx(np.pi**2, rel=0.01)
        assert res.residual <= 1e-6
        assert np.all(res.phi1.values >= 0.0)

    def test_1d_matches_sparse_oracle(self):
        data = make_data(half_width=0.5, n=201)
        res = lambda1(data, seed=0)
        oracle = first_eigenvalue_p2(data.domain, data.h.interior())
        assert res.lam1 == pytest.approx(oracle, rel=1e-6)

    def test_2d_unit_square(self):
        data = make_data(dim=2, half_width=0.5, n=61)
        res = lambda1(data, seed=0)
        assert res.lam1 == pytest.approx(2 * np.pi**2, rel=0.02)
        oracle = first_eigenvalue_p2(data.domain, data.h.interior())
        assert res.lam1 == pytest.approx(oracle, rel=1e-6)

    def test_indefinite_h_matches_oracle(self):
        data = make_data(half_width=0.5, n=101,
                         h_fn=lambda x: 1.0 - 3.0 * x**2)
        res = lambda1(data, seed=0)
        # h changes sign but stays positive near the center, where the
        # ground state concentrates; the sparse pencil handles the sign
        trial = res.phi1.values
        k_dx = data.domain.spacing
        num = float(np.sum(np.diff(np.concatenate([[0], trial, [0]]))**2)) / k_dx
        den = float(np.sum(data.h.interior() * trial**2)) * k_dx
        assert res.lam1 == pytest.approx(num / den, rel=1e-10)

    def test_weight_doubling_halves(self):
        base = make_data(half_width=0.5, n=101)
        double = make_data(half_width=0.5, n=101, h_fn=lambda x: 2.0 * np.ones_like(x))
        a = lambda1(base, seed=0)
        b = lambda1(double, seed=0)
        assert b.lam1 == pytest.approx(0.5 * a.lam1, rel=1e-8)

    def test_domain_monotone_under_mask(self):
        data = make_data(half_width=1.0, n=101)
        dom = data.domain
        x = dom.axis()[1:-1]
        small = np.abs(x) < 0.4
        large = np.abs(x) < 0.8
        lam_small = lambda1(data, mask=small, seed=0).lam1
        lam_large = lambda1(data, mask=large, seed=0).lam1
        lam_full = lambda1(data, seed=0).lam1
        assert lam_small >= lam_large >= lam_full > 0

    def test_seed_independence(self):
        data = make_data(half_width=0.5, n=101)
        a = lambda1(data, seed=3)
        b = lambda1(data, seed=11)
        assert a.lam1 == pytest.approx(b.lam1, rel=1e-9)
        na = a.phi1.values / np.linalg.norm(a.phi1.values)
        nb = b.phi1.values / np.linalg.norm(b.phi1.values)
        assert np.linalg.norm(na - nb) <= 1e-4

    def test_deterministic_given_seed(self):
        data = make_data(half_width=0.5, n=101)
        a = lambda1(data, seed=5)
        b = lambda1(data, seed=5)
        assert a.lam1 == b.lam1
        assert np.array_equal(a.phi1.values, b.phi1.values)

    def test_no_admissible_field(self):
        data = make_data(n=41, h_fn=lambda x: -np.ones_like(x))
        with pytest.raises(NoAdmissibleField):
            lambda1(data, seed=0)

    def test_p3_sanity(self):
        data = make_data(half_width=0.5, n=101, p=3.0, gamma=4.0)
        res = lambda1(data, seed=0)
        assert res.lam1 > 0
        assert res.residual <= 1e-6
        assert np.all(res.phi1.values >= 0)


class TestValidateHypotheses:
    def test_template_passes(self, preset_data, preset_ctx):
        rep = validate_hypotheses(preset_data, eigen=preset_ctx.eigen)
        assert rep.f1 and rep.f_inf and rep.f_phi1
        assert rep.f2 is True
        assert rep.all_hold()

    def test_negative_f_fails_f1(self):
        data = make_data(n=41)  # f = -1 everywhere
        rep = validate_hypotheses(data, seed=0)
        assert rep.f1 is False
        assert rep.f_inf is True
        assert not rep.all_hold()

    def test_no_zero_nodes_gives_na(self):
        from nehari.presets import template_1d

        data = template_1d(n=121, annulus=False)
        rep = validate_hypotheses(data, seed=0)
        assert rep.f2 is None
        assert rep.to_dict()["F2"] == "NA"

    def test_template_2d(self):
        from nehari.presets import template_2d

        data = template_2d(n=41)
        rep = validate_hypotheses(data, seed=0)
        assert rep.f1 and rep.f_inf and rep.f_phi1
        assert rep.f2 is not False

    def test_boundary_shell_sign(self):
        data = make_data(n=41, f_fn=lambda x: 1.0 - x**2)  # f > 0 at center, 0 at edge
        rep = validate_hypotheses(data, seed=0)
        assert rep.f_inf is False
