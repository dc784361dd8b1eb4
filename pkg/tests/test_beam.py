"""Reissner beam on SE(3): configuration, right-hand side, stepping and diagnostics."""

from dataclasses import replace

import numpy as np
import pytest

from liejet import beam, jet, lie, verify

SEED = 42
E1 = np.array([1.0, 0, 0])


def small_config(**kw):
    base = dict(n_s=21, n_t=20, dt=0.02, output_every=1)
    base.update(kw)
    return beam.BeamConfig(**base)


class TestConfig:
    def test_defaults(self):
        cfg = beam.BeamConfig()
        assert (cfg.length, cfg.n_s) == (1.0, 100)
        np.testing.assert_array_equal(cfg.eps0, [0, 0, 0, 1, 0, 0])
        assert cfg.validate() is cfg

    def test_wave_speed(self):
        cfg = beam.BeamConfig(J=np.diag([1, 1, 1, 2, 2, 2.0]), C=np.diag([1, 1, 1, 8, 1, 1.0]))
        assert cfg.wave_speed == pytest.approx(np.sqrt(8.0))

    def test_cfl_message(self):
        cfg = beam.BeamConfig(n_s=11, dt=0.5)
        with pytest.raises(ValueError, match=r"CFL bound dt <= c_safety\*ds/v_max = 1\*0.1/1 = 0.1"):
            cfg.validate()

    def test_rejects_indefinite_inertia(self):
        with pytest.raises(ValueError, match="Cholesky"):
            beam.BeamConfig(J=np.diag([1, 1, 1, 1, 1, -1.0])).validate()

    def test_rejects_asymmetric(self):
        C = np.eye(6)
        C[0, 1] = 0.5
        with pytest.raises(ValueError, match="symmetric"):
            beam.BeamConfig(C=C).validate()

    @pytest.mark.parametrize("bc", [("free",), ("free", "pinned")])
    def test_rejects_boundary(self, bc):
        with pytest.raises(ValueError, match="bc"):
            beam.BeamConfig(bc=bc).validate()

    def test_refined(self):
        cfg = beam.BeamConfig(n_s=21, n_t=10, dt=0.01).refined()
        assert (cfg.n_s, cfg.n_t, cfg.dt) == (41, 20, 0.005)


class TestInitialReference:
    def test_undeformed(self):
        cfg = beam.BeamConfig()
        st = beam.initial_reference(cfg)
        np.testing.assert_array_equal(st.eps - cfg.eps0, 0.0)
        pi, sigma = beam.momenta(cfg, st.chi, st.eps)
        np.testing.assert_array_equal(sigma, 0.0)

    def test_straight_line(self):
        cfg = beam.BeamConfig()
        H = beam.initial_reference(cfg).H
        np.testing.assert_allclose(H[:, :3, :3], np.broadcast_to(np.eye(3), (cfg.n_s, 3, 3)), atol=1e-15)
        np.testing.assert_allclose(H[:, :3, 3], np.outer(cfg.s, E1), atol=1e-15)

    def test_strain_from_configuration(self):
        cfg = beam.BeamConfig()
        p = jet.holonomic_lift(lambda x: lie.exp_group(x[0] * cfg.eps0), np.array([0.4]), 1e-4, lie.SE3)
        np.testing.assert_allclose(p.xi[0], cfg.eps0, atol=1e-9)

    def test_velocity_profile(self):
        cfg = beam.BeamConfig(n_s=5)
        chi = beam.initial_reference(cfg).chi
        np.testing.assert_allclose(chi, np.outer(np.cos(np.pi * cfg.s), cfg.chi_cosine), atol=1e-15)


class TestRHS:
    def test_equilibrium(self):
        cfg = replace(beam.BeamConfig(), chi_cosine=np.zeros(6))
        st = beam.initial_reference(cfg)
        dchi, deps = beam.rhs(cfg, st.chi, st.eps)
        np.testing.assert_array_equal(dchi, 0.0)
        np.testing.assert_array_equal(deps, 0.0)

    def test_rigid_body_euler(self):
        J = np.diag([1, 2, 3, 1, 1, 1.0])
        cfg = beam.BeamConfig(n_s=11, J=J, C=np.zeros((6, 6)))
        chi = np.tile([0.3, -1.0, 0.5, 0.2, 0.0, 0.1], (11, 1))
        eps = np.tile(cfg.eps0, (11, 1))
        dchi, _ = beam.rhs(cfg, chi, eps)
        expected = np.linalg.solve(J, lie.ad_star(chi[0], J @ chi[0]))
        np.testing.assert_allclose(dchi, np.tile(expected, (11, 1)), atol=1e-14)

    @pytest.mark.parametrize("bc", [("free", "free"), ("clamped", "free"), ("clamped", "clamped")])
    def test_fast_path_matches_reference(self, bc):
        g = np.random.default_rng(SEED)
        A, B = g.normal(size=(2, 6, 6))
        cfg = beam.BeamConfig(n_s=15, J=A @ A.T + 6 * np.eye(6), C=B @ B.T + np.eye(6), bc=bc)
        chi, eps = g.normal(size=(2, 15, 6))
        chi, eps = beam.apply_boundary(cfg, chi, eps)
        dchi, deps = beam.rhs(cfg, chi, eps)
        Y = beam._System(cfg)(np.hstack([chi, eps]))
        np.testing.assert_allclose(Y[:, :6], dchi, atol=1e-12)
        np.testing.assert_allclose(Y[:, 6:], deps, atol=1e-12)

    def test_derivative_stencil(self):
        s = np.linspace(0, 1, 11)
        f = 1 + 2 * s - 3 * s**2
        np.testing.assert_allclose(beam.d_s(f[:, None], 0.1)[:, 0], 2 - 6 * s, atol=1e-12)

    def test_dissipation_kills_checkerboard(self):
        f = np.tile([1.0, -1.0], 10)[:, None]
        assert np.abs(beam.fourth_difference(f)[2:-2]).min() == 16.0


def pulse_speed(component, C_diag, n_s=401, fraction=0.25):
    """Centroid speed of the right-moving half of a small strain pulse."""
    C = np.diag(C_diag)
    cfg = beam.BeamConfig(n_s=n_s, C=C, chi_cosine=np.zeros(6), output_every=1, n_t=1, dt=1.0)
    s = cfg.s
    c = np.sqrt(C_diag[component])
    eps = np.tile(cfg.eps0, (n_s, 1))
    eps[:, component] += 1e-6 * np.exp(-(((s - 0.5) / 0.03) ** 2))
    dt = 0.5 * cfg.dt_max
    T = fraction / c
    cfg = replace(cfg, dt=dt, n_t=int(round(T / dt)), eps_initial=eps)
    res = beam.run(cfg, monitor=False)
    dev = np.abs(res.final.eps[:, component] - cfg.eps0[component])
    right = s > 0.5
    centroid = np.sum(s[right] * dev[right]) / np.sum(dev[right])
    return (centroid - 0.5) / res.final.t, c


class TestLinearWaves:
    @pytest.mark.parametrize("component", [0, 3])
    def test_decoupled_speeds(self, component):
        # torsion and axial stretch decouple from the Timoshenko pair at the reference
        measured, c = pulse_speed(component, np.array([2.0, 1, 1, 3.0, 1, 1]))
        assert measured == pytest.approx(c, rel=0.02)


class TestStep:
    def test_equilibrium_unchanged(self):
        check = verify.check_beam_equilibrium()
        assert check.passed, check.line()

    def test_principal_rotation(self):
        check = verify.check_principal_rotation(1000)
        assert check.passed, check.line()

    def test_clamped_end(self):
        cfg = small_config(bc=("clamped", "free"))
        res = beam.run(cfg)
        H0 = res.snapshots[0].H[0]
        for st in res.snapshots:
            np.testing.assert_array_equal(st.H[0], H0)
            np.testing.assert_array_equal(st.chi[0], 0.0)

    def test_free_end_strain(self):
        res = beam.run(small_config())
        np.testing.assert_allclose(res.final.eps[[0, -1]], np.tile(res.cfg.eps0, (2, 1)), atol=1e-15)

    def test_group_invariants(self):
        res = beam.run(small_config(n_t=200))
        assert max(res.diagnostics.ortho) <= 1e-9

    def test_local_order(self):
        # one step against two half steps: error ratio ~ 2^5 for a fourth order stage scheme
        cfg = small_config(chi_cosine=np.array([0.5, 0.2, 0.1, 0.3, 0.4, 0.2]))
        st = beam.initial_reference(cfg)
        errs = []
        for dt in (0.02, 0.01):
            one = beam.step(cfg, st, dt)
            two = beam.step(cfg, beam.step(cfg, st, dt / 2), dt / 2)
            errs.append(np.abs(one.chi - two.chi).max())
        assert errs[0] / errs[1] > 8.0

    def test_refinement_ratios(self):
        checks = verify.check_beam_refinement()
        assert all(c.passed for c in checks), [c.line() for c in checks]

    def test_instability_detector(self):
        cfg = small_config(n_t=400, dt=0.2, c_safety=5.0, dissipation=0.0)
        with pytest.raises(beam.BeamInstability, match="energy grew"):
            beam.run(cfg)

    def test_rigid_energy_order(self):
        check = verify.check_rigid_energy()
        assert check.passed, check.line()


class TestSpatialMomenta:
    def test_identity_configuration(self):
        cfg = small_config()
        g = np.random.default_rng(SEED)
        st = beam.BeamState(0.0, np.broadcast_to(np.eye(4), (21, 4, 4)).copy(), g.normal(size=(21, 6)), g.normal(size=(21, 6)))
        sR, pR = beam.spatial_momenta(cfg, st)
        pi, sigma = beam.momenta(cfg, st.chi, st.eps)
        np.testing.assert_array_equal(sR, sigma)
        np.testing.assert_array_equal(pR, pi)

    def test_pure_translation(self):
        cfg = small_config(n_s=3)
        r = np.array([[0.0, 0, 0], [1.0, 2.0, -1.0], [0.5, 0, 3.0]])
        H = np.stack([lie.make_group(np.eye(3), ri) for ri in r])
        chi = np.random.default_rng(SEED).normal(size=(3, 6))
        st = beam.BeamState(0.0, H, chi, np.tile(cfg.eps0, (3, 1)))
        _, pR = beam.spatial_momenta(cfg, st)
        m, n = chi[:, :3], chi[:, 3:]
        np.testing.assert_allclose(pR, np.hstack([m + np.cross(r, n), n]), atol=1e-15)


class TestConservation:
    def test_equilibrium_residuals(self):
        cfg = replace(small_config(), chi_cosine=np.zeros(6))
        d = beam.run(cfg).diagnostics
        for k in ("conservation", "compatibility", "cell"):
            assert beam._nanmax(getattr(d, k)) <= 1e-13

    def test_report_needs_three_levels(self):
        cfg = small_config()
        with pytest.raises(ValueError):
            beam.conservation_report(cfg, [beam.initial_reference(cfg)] * 2)

    def test_report_matches_monitor(self):
        res = beam.run(small_config(n_t=10))
        d = beam.conservation_report(res.cfg, res.snapshots)
        np.testing.assert_allclose(d.conservation[2:], res.diagnostics.conservation[2:], rtol=1e-12)

    def test_momentum_drift(self):
        check = verify.check_beam_momentum(beam.BeamConfig(n_s=101, n_t=2000, dt=0.005, output_every=100))
        assert check.passed, check.line()

    def test_energy_drift_small(self):
        d = beam.run(beam.BeamConfig(n_s=41, n_t=800, dt=0.0125)).diagnostics
        assert d.energy_excursion <= 1e-2

    def test_casimir(self):
        cfg = beam.rigid_body_config(chi=np.array([0.3, 1.0, -0.5, 0, 0, 0]), dt=0.01, n_t=500)
        res = beam.run(cfg)
        assert abs(beam.casimir(res.final, cfg) - beam.casimir(res.snapshots[0], cfg)) <= 1e-10


class TestVariationalBridge:
    def test_grid_section_nodes(self):
        cfg = small_config()
        res = beam.run(cfg)
        gs = beam.GridSection(cfg, res.snapshots)
        x = np.array([cfg.s[4], 3 * cfg.dt])
        np.testing.assert_array_equal(gs.configuration(x), res.snapshots[3].H[4])

    def test_lagrangian_momenta_match_solver(self):
        from liejet import variational as var

        cfg = small_config(J=np.diag([1, 2, 3, 1, 1, 1.0]))
        st = beam.initial_reference(cfg)
        mm = var.legendre_reduced(beam.beam_lagrangian(cfg), jet.GJetPoint(np.zeros(2), st.H[3], np.stack([st.eps[3], st.chi[3]])))
        pi, sigma = beam.momenta(cfg, st.chi, st.eps)
        np.testing.assert_allclose(mm.momenta, np.stack([sigma[3], pi[3]]), atol=1e-9)

    def test_noether_cancellation(self):
        checks = verify.check_noether_cancellation()
        assert all(c.passed for c in checks), [c.line() for c in checks]
