"""First jets: charts, contact forms, holonomic lifts, prolongations."""

import numpy as np
import pytest

from liejet import forms, jet, lie, numdiff, oracles, verify

SEED = 42


def rng():
    return np.random.default_rng(SEED)


def flat_point(g, n1=2, N=3):
    return jet.JetPoint(g.normal(size=n1), g.normal(size=N), g.normal(size=(N, n1)))


def group_point(g, n1=2):
    return jet.GJetPoint(g.normal(size=n1), verify.random_group(g), g.normal(size=(n1, 6)) * 0.5)


class TestJetChart:
    def test_pack_round_trip(self):
        g = rng()
        p = flat_point(g)
        chart = jet.JetChart(2, 3)
        q = chart.unpack(chart.coords(p))
        np.testing.assert_array_equal(q.v, p.v)
        np.testing.assert_array_equal(q.y, p.y)

    def test_v_index(self):
        chart = jet.JetChart(2, 3)
        p = flat_point(rng())
        assert chart.coords(p)[chart.v_index(1, 0)] == p.v[1, 0]

    def test_group_chart_boundary(self):
        chart = jet.GroupChart()
        g = lie.exp_group(np.array([np.pi, 0, 0, 0, 0, 0]))
        with pytest.raises(jet.ChartError):
            chart.coords(g)

    def test_group_chart_round_trip(self):
        chart = jet.GroupChart(reference=verify.random_group(rng()))
        g = verify.random_group(rng())
        np.testing.assert_allclose(chart.point(chart.coords(g)), g, atol=1e-12)


class TestContactForm:
    def test_evaluations(self):
        p = flat_point(rng())
        chart = jet.JetChart(2, 3)
        theta = jet.contact_form(p)
        np.testing.assert_array_equal(theta[:, chart.y_slice], np.eye(3))
        np.testing.assert_array_equal(theta[:, chart.x_slice], -p.v)
        np.testing.assert_array_equal(theta[:, chart.v_slice], 0.0)

    def test_kills_normalized_tangents(self):
        p = flat_point(rng())
        for X in jet.normalized_tangents(p):
            np.testing.assert_array_equal(jet.contact_form(p) @ X, 0.0)

    def test_reduced_dual_basis(self):
        p = group_point(rng())
        c = jet.reduced_contact_form(p)
        np.testing.assert_array_equal(c[:, 2:8], np.eye(6))

    def test_reduced_kills_normalized_tangents(self):
        p = group_point(rng())
        for X in jet.normalized_tangents_frame(p):
            np.testing.assert_array_equal(jet.reduced_contact_form(p) @ X, 0.0)

    def test_reduced_form_on_chart_tangent(self):
        # lambda(d/dy) in chart coordinates equals L = T^-1
        g = rng()
        gchart = jet.GJetChart(2)
        p = group_point(g)
        z = gchart.coords(p)
        coeffs = np.stack([f(z) for f in jet.reduced_contact_forms(gchart)])
        np.testing.assert_allclose(coeffs[:, gchart.y_slice] @ jet.change_of_basis(p.g).T, np.eye(6), atol=1e-8)

    def test_pullback_richardson(self):
        checks = verify.check_contact(SEED)
        assert all(c.passed for c in checks), [c.line() for c in checks]

    def test_holonomic_tangent_reduced(self):
        sec = verify.random_section_se3(rng())
        x = np.array([0.1, -0.2])

        def res(h):
            p = jet.holonomic_lift(sec, x, h, lie.SE3)
            q = jet.holonomic_lift(sec, x, 1e-6, lie.SE3)
            return p.xi - q.xi

        assert 3.0 <= numdiff.richardson_ratio(res, 1e-2) <= 5.0


class TestHolonomicLift:
    def test_constant(self):
        p = jet.holonomic_lift(lambda x: np.array([1.0, 2.0]), np.array([0.3, 0.4]))
        np.testing.assert_array_equal(p.v, 0.0)

    def test_linear(self):
        a = np.array([[1.0, -2.0], [0.5, 3.0]])
        p = jet.holonomic_lift(lambda x: a @ x, np.array([0.3, 0.4]), 0.5)
        np.testing.assert_allclose(p.v, a, rtol=1e-14)

    def test_one_parameter_subgroup(self):
        xi0 = np.array([0.3, -0.2, 0.5, 1.0, 0.1, 0.0])
        p = jet.holonomic_lift(lambda x: lie.exp_group(x[0] * xi0), np.array([0.7]), 1e-4, lie.SE3)
        np.testing.assert_allclose(p.xi[0], xi0, atol=1e-9)


class TestChangeOfBasis:
    def test_identity(self):
        np.testing.assert_allclose(jet.change_of_basis(np.eye(4)).T, np.eye(6), atol=1e-9)

    def test_inverse(self):
        g = rng()
        for H in verify.random_group(g, 100):
            cb = jet.change_of_basis(H)
            np.testing.assert_allclose(cb.L @ cb.T, np.eye(6), atol=1e-8)

    def test_left_right_relation(self):
        g = rng()
        for H in verify.random_group(g, 10):
            cb = jet.change_of_basis(H)
            np.testing.assert_allclose(cb.T_right, cb.T @ lie.Ad_matrix(lie.inverse(H)), atol=1e-8)


def constant_field(alpha, beta):
    return jet.BundleVectorField(alpha=lambda x, y: np.asarray(alpha, float), beta=lambda x, y: np.asarray(beta, float))


class TestProlongation:
    def test_constant_vertical(self):
        p = flat_point(rng())
        v = jet.prolong_vector(constant_field([0.0, 0.0], [1.0, 2.0, 3.0]), p)
        np.testing.assert_array_equal(v[5:], 0.0)

    def test_coordinate_field(self):
        p = flat_point(rng())
        v = jet.prolong_vector(constant_field([1.0, 0.0], [0.0, 0.0, 0.0]), p)
        np.testing.assert_allclose(v[5:], 0.0, atol=1e-12)

    def test_bracket_oracle(self):
        g = rng()
        for _ in range(5):
            Z = verify.random_flat_field(g, 2, 2)
            p = flat_point(g, 2, 2)
            gamma = jet.prolong_vector(Z, p)[4:].reshape(2, 2)
            np.testing.assert_allclose(gamma, oracles.prolongation_by_bracket(Z, p), atol=1e-6)

    def test_group_constant_beta(self):
        g = rng()
        p = group_point(g)
        beta = g.normal(size=6)
        v = jet.prolong_vector_group(constant_field([0.0, 0.0], beta), p)
        np.testing.assert_allclose(v[8:].reshape(2, 6), lie.ad(p.xi, beta), atol=1e-9)

    def test_group_constant_alpha(self):
        g = rng()
        p = group_point(g)
        v = jet.prolong_vector_group(constant_field([0.4, -1.0], np.zeros(6)), p)
        # zeta = -xi alpha is constant in (x, g)
        np.testing.assert_allclose(v[8:], 0.0, atol=1e-9)

    def test_abelian_reduces_to_flat(self):
        g = rng()
        G = lie.TranslationGroup(3)
        chart = jet.GroupChart(G)
        Zf = verify.random_flat_field(g, 2, 3)
        Zg = jet.BundleVectorField(alpha=lambda x, h: Zf.alpha(x, G.log(h)), beta=lambda x, h: Zf.beta(x, G.log(h)))
        p = flat_point(g, 2, 3)
        flat = jet.prolong_vector(Zf, p)[5:].reshape(3, 2)
        grp = jet.prolong_vector_group(Zg, jet.GJetPoint(p.x, G.exp(p.y), p.v.T), chart)[5:].reshape(2, 3)
        np.testing.assert_allclose(grp, flat.T, atol=1e-8)

    def test_transport_oracle(self):
        check = verify.check_prolongation(SEED)
        assert check.passed, check.line()
