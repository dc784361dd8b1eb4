"""Property suites behind ``liejet verify``.

Every check draws its cases from a generator seeded with ``seed`` (default
42) and returns a :class:`Check` with the measured quantity; the CLI prints
one line per check. The random case generators are shared with the tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import beam, forms, jet, lie, numdiff, oracles
from . import variational as var

DEFAULT_SEED = 42
SUITES = ("lie", "forms", "jet", "variational", "beam")
RICHARDSON_BAND = (3.0, 5.0)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    value: float = float("nan")

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def in_band(r, band=RICHARDSON_BAND) -> bool:
    return bool(band[0] <= r <= band[1])


# Seeded case generators


def random_algebra(rng, n=None, scale=1.0):
    shape = (6,) if n is None else (n, 6)
    return scale * rng.normal(size=shape)


def random_group(rng, n=None, max_angle=2.5):
    """Group elements with rotation angle below ``max_angle``."""
    xi = random_algebra(rng, n)
    w = xi[..., :3]
    norm = np.linalg.norm(w, axis=-1, keepdims=True)
    xi[..., :3] = w / np.maximum(norm, 1e-12) * rng.uniform(0, max_angle, size=norm.shape)
    return lie.exp_group(xi)


def random_section_se3(rng, n_base=2, scale=0.4):
    """Smooth ``x -> exp(P(x)) exp(Q(x))`` with polynomial ``P``, ``Q``."""
    P = rng.normal(size=(4, 6)) * scale
    Q = rng.normal(size=(4, 6)) * scale

    def poly(A, x):
        x = np.resize(np.asarray(x, float), 2)
        return A[0] + A[1] * x[0] + A[2] * x[1] + A[3] * x[0] * x[1]

    return lambda x: lie.exp_group(poly(P, x)) @ lie.exp_group(poly(Q, x))


def random_flat_section(rng, n_base, n_fiber):
    A = rng.normal(size=(n_fiber, n_base))
    B = rng.normal(size=(n_fiber, n_base))
    c = rng.normal(size=n_fiber)
    return lambda x: c + np.sin(A @ x) + 0.5 * np.cos(B @ x) * (x @ x)


def random_flat_field(rng, n_base, n_fiber):
    """Polynomial bundle field on ``R^{n+1} x R^N``."""
    n = n_base + n_fiber
    a0, A1 = rng.normal(size=n_base), rng.normal(size=(n_base, n)) * 0.5
    b0, B1, B2 = rng.normal(size=n_fiber), rng.normal(size=(n_fiber, n)) * 0.5, rng.normal(size=(n_fiber, n)) * 0.3

    def z(x, y):
        return np.concatenate([np.atleast_1d(x), np.atleast_1d(y)])

    return jet.BundleVectorField(
        alpha=lambda x, y: a0 + A1 @ z(x, y) + 0.2 * np.sin(A1 @ z(x, y)),
        beta=lambda x, y: b0 + B1 @ z(x, y) + B2 @ z(x, y) ** 2,
    )


def random_group_field(rng, n_base):
    """Bundle field on ``R^{n+1} x SE(3)`` depending on ``x`` and the entries of ``g``."""
    a0, A = rng.normal(size=n_base), rng.normal(size=(n_base, n_base)) * 0.5
    b0, B = rng.normal(size=6), rng.normal(size=(6, n_base)) * 0.5
    G = rng.normal(size=(6, 12)) * 0.3
    Ga = rng.normal(size=(n_base, 12)) * 0.2
    return jet.BundleVectorField(
        alpha=lambda x, g: a0 + A @ x + Ga @ g[:3].ravel(),
        beta=lambda x, g: b0 + B @ x + G @ g[:3].ravel(),
    )


# lie


def check_duality(seed=DEFAULT_SEED, n=1000) -> list:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    xi, eta, mu = (random_algebra(rng, n) for _ in range(3))
    H = random_group(rng, n)
    dual = np.abs(np.sum(lie.ad_star(xi, mu) * eta, -1) - np.sum(mu * lie.ad(xi, eta), -1)).max()
    comm = np.abs(lie.hat(lie.ad(xi, eta)) - (lie.hat(xi) @ lie.hat(eta) - lie.hat(eta) @ lie.hat(xi))).max()
    # <Ad*_{H^-1} mu, eta> = <mu, Ad_{H^-1} eta>, with Ad by conjugation
    Hinv = lie.inverse(H)
    conj = lie.vee(Hinv @ lie.hat(eta) @ H)
    coad = np.abs(np.sum(lie.Ad_star_inv(H, mu) * eta, -1) - np.sum(mu * conj, -1)).max()
    elapsed = time.perf_counter() - t0
    return [
        Check("ad* duality", dual <= 1e-12, f"max {dual:.2e} over {n} triples", dual),
        Check("ad vs commutator", comm <= 1e-12, f"max {comm:.2e}", comm),
        Check("Ad* closed form vs duality", coad <= 1e-12, f"max {coad:.2e}", coad),
        Check("operator suite runtime", elapsed < 1.0, f"{elapsed:.3f} s", elapsed),
    ]


def check_jacobi(seed=DEFAULT_SEED, n=1000) -> Check:
    rng = np.random.default_rng(seed)
    a, b, c = (random_algebra(rng, n) for _ in range(3))
    r = lie.ad(a, lie.ad(b, c)) + lie.ad(b, lie.ad(c, a)) + lie.ad(c, lie.ad(a, b))
    err = np.abs(r).max()
    return Check("Jacobi identity", err <= 1e-12, f"max {err:.2e}", err)


def check_exp_log(seed=DEFAULT_SEED, n=200) -> list:
    rng = np.random.default_rng(seed)
    xi = random_algebra(rng, n)
    w = xi[:, :3]
    xi[:, :3] = w / np.linalg.norm(w, axis=1, keepdims=True) * rng.uniform(0, 3.0, size=(n, 1))
    xi[: n // 4, :3] *= 1e-6  # small-angle branch
    H = lie.exp_group(xi)
    series = np.array([oracles.matrix_exponential_series(lie.hat(x), 40) for x in xi])
    e_series = np.abs(H - series).max()
    e_log = np.abs(lie.log_group(H) - xi).max()
    return [
        Check("exp vs power series", e_series <= 1e-12, f"max {e_series:.2e}", e_series),
        Check("log(exp(xi)) round trip", e_log <= 1e-9, f"max {e_log:.2e} (angles < 3 rad)", e_log),
    ]


def maurer_cartan_residual(sec, x, h):
    """``d_0 xi_1 - d_1 xi_0 + [xi_0, xi_1]`` for ``xi = g^-1 dg`` by central differences."""
    x = np.asarray(x, float)
    E = np.eye(2)

    def xi(xx):
        return jet.holonomic_lift(sec, xx, h, lie.SE3).xi

    d0 = (xi(x + h * E[0])[1] - xi(x - h * E[0])[1]) / (2 * h)
    d1 = (xi(x + h * E[1])[0] - xi(x - h * E[1])[0]) / (2 * h)
    x0 = xi(x)
    return d0 - d1 + lie.ad(x0[0], x0[1])


def check_maurer_cartan(seed=DEFAULT_SEED, n=20, h=2e-2) -> list:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    ratios = []
    for _ in range(n):
        sec = random_section_se3(rng)
        x = rng.uniform(-0.5, 0.5, size=2)
        ratios.append(numdiff.richardson_ratio(lambda hh: maurer_cartan_residual(sec, x, hh), h))
    elapsed = time.perf_counter() - t0
    ratios = np.array(ratios)
    ok = bool(np.all((ratios >= 3.0) & (ratios <= 5.0)))
    return [
        Check("Maurer-Cartan Richardson", ok, f"ratios in [{ratios.min():.3f}, {ratios.max():.3f}] over {n} sections", ratios.min()),
        Check("Maurer-Cartan runtime", elapsed < 5.0, f"{elapsed:.3f} s", elapsed),
    ]


def suite_lie(seed=DEFAULT_SEED) -> list:
    return check_duality(seed) + [check_jacobi(seed)] + check_exp_log(seed) + check_maurer_cartan(seed)


# forms


def random_form(rng, degree, dim):
    """Form field with trigonometric coefficients."""
    size = forms.comb(dim, degree)
    A = rng.normal(size=(size, dim))
    b = rng.normal(size=size)
    return forms.FormField(degree, dim, lambda z: np.sin(A @ z) + b * np.cos(z.sum()))


def check_form_identities(seed=DEFAULT_SEED, dim=4) -> list:
    rng = np.random.default_rng(seed)
    out = []
    # d d = 0
    dd = 0.0
    for k in range(dim - 1):
        a = random_form(rng, k, dim)
        z = rng.normal(size=dim)
        dd = max(dd, np.abs(forms.ext_deriv(forms.ext_deriv(a, 1e-3), 1e-3)(z)).max())
    out.append(Check("d(d a) = 0", dd <= 1e-9, f"max {dd:.2e}", dd))
    # volume family
    n1 = 3
    omega = forms.volume_form(dim, range(n1))
    err = 0.0
    z = np.zeros(dim)
    for mu in range(n1):
        lhs = forms.dnx(mu, dim, range(n1))(z)
        rhs = forms.interior(forms.unit_vector(mu, dim), omega)(z)
        err = max(err, np.abs(lhs - rhs).max())
        for nu in range(n1):
            lhs = forms.dn1x(mu, nu, dim, range(n1))(z)
            rhs = forms.interior(forms.unit_vector(nu, dim), forms.dnx(mu, dim, range(n1)))(z)
            err = max(err, np.abs(lhs - rhs).max())
            # dx^nu ^ d^n x_mu = delta omega
            w = forms.wedge(forms.coordinate_form(nu, dim), forms.dnx(mu, dim, range(n1)))(z)
            err = max(err, np.abs(w - (mu == nu) * omega(z)).max())
    out.append(Check("volume contractions", err == 0.0, f"max {err:.2e}", err))
    # graded antisymmetry and Leibniz rule
    a, b = random_form(rng, 1, dim), random_form(rng, 2, dim)
    z = rng.normal(size=dim)
    anti = np.abs(forms.wedge(a, b)(z) - forms.wedge(b, a)(z)).max()
    out.append(Check("a^b = (-1)^pq b^a", anti <= 1e-14, f"max {anti:.2e}", anti))
    lhs = forms.ext_deriv(forms.wedge(a, b), 1e-4)(z)
    rhs = (forms.wedge(forms.ext_deriv(a, 1e-4), b) - forms.wedge(a, forms.ext_deriv(b, 1e-4)))(z)
    leib = np.abs(lhs - rhs).max()
    out.append(Check("Leibniz rule", leib <= 1e-7, f"max {leib:.2e}", leib))
    # Cartan formula vs flow oracle
    Z = lambda w: np.sin(w[::-1]) + 0.3 * w
    vecs = [rng.normal(size=dim) for _ in range(2)]
    lie_d = forms.lie_derivative(Z, b, 1e-4).evaluate(z, vecs)
    flow = oracles.lie_derivative_by_flow(Z, b, z, vecs, eps=1e-4)
    cart = abs(lie_d - flow)
    out.append(Check("Cartan formula vs flow", cart <= 1e-6, f"|diff| {cart:.2e}", cart))
    # pullback commutes with d
    phi = lambda x: np.array([np.sin(x[0]) + x[1], x[0] * x[1], np.cos(x[1]), x[0] ** 2 - x[1], x[0]])[:dim]
    x0 = rng.normal(size=2)
    c1 = forms.pullback(phi, forms.ext_deriv(a, 1e-4), 2, 1e-4)(x0)
    c2 = forms.ext_deriv(forms.pullback(phi, a, 2, 1e-4), 1e-4)(x0)
    pb = np.abs(c1 - c2).max()
    out.append(Check("pullback commutes with d", pb <= 1e-6, f"max {pb:.2e}", pb))
    return out


def check_structure_equation(seed=DEFAULT_SEED) -> Check:
    """``d lambda + [lambda, lambda] = 0`` for the Maurer-Cartan form on the group chart."""
    rng = np.random.default_rng(seed)
    chart = jet.GroupChart()
    lam = forms.AlgebraForm(
        1, 6, 6, lambda y: jet.left_form_matrix(chart, y, 1e-5), lie.ad
    )
    res = forms.algebra_ext_deriv(lam, 1e-3) + forms.self_bracket(lam)
    err = max(np.abs(res(random_algebra(rng, scale=0.5))).max() for _ in range(3))
    return Check("structure equation of lambda", err <= 1e-5, f"max {err:.2e}", err)


def suite_forms(seed=DEFAULT_SEED) -> list:
    return check_form_identities(seed) + [check_structure_equation(seed)]


# jet


def check_contact(seed=DEFAULT_SEED, h=1e-2) -> list:
    rng = np.random.default_rng(seed)
    out = []
    flat_ratios, red_ratios, exact = [], [], 0.0
    for _ in range(5):
        n1, N = 2, 2
        chart = jet.JetChart(n1, N)
        sec = random_flat_section(rng, n1, N)
        x = rng.uniform(-0.5, 0.5, n1)
        thetas = jet.contact_forms(chart)

        def res_flat(hh):
            lift = lambda xx: chart.coords(jet.holonomic_lift(sec, xx, hh))
            return np.array([forms.pullback(lift, th, n1, 1e-5)(x) for th in thetas])

        flat_ratios.append(numdiff.richardson_ratio(res_flat, h))
        p = jet.holonomic_lift(sec, x, h)
        exact = max(exact, np.abs(jet.contact_form(p) @ np.array(jet.normalized_tangents(p)).T).max())

        gchart = jet.GJetChart(n1)
        gsec = random_section_se3(rng)
        varthetas = jet.reduced_contact_forms(gchart)

        def res_red(hh):
            lift = lambda xx: gchart.coords(jet.holonomic_lift(gsec, xx, hh, lie.SE3))
            return np.array([forms.pullback(lift, th, n1, 1e-5)(x) for th in varthetas])

        red_ratios.append(numdiff.richardson_ratio(res_red, h))
        gp = jet.holonomic_lift(gsec, x, h, lie.SE3)
        exact = max(exact, np.abs(jet.reduced_contact_form(gp) @ np.array(jet.normalized_tangents_frame(gp)).T).max())
    fr, rr = np.array(flat_ratios), np.array(red_ratios)
    out.append(Check("theta pullback Richardson", bool(all(map(in_band, fr))), f"ratios [{fr.min():.3f}, {fr.max():.3f}]", fr.min()))
    out.append(Check("vartheta pullback Richardson", bool(all(map(in_band, rr))), f"ratios [{rr.min():.3f}, {rr.max():.3f}]", rr.min()))
    out.append(Check("contact forms kill normalized tangents", exact == 0.0, f"max {exact:.1e}", exact))
    return out


def prolongation_cases(seed=DEFAULT_SEED, n=50):
    """Half flat, half on ``R^2 x SE(3)``; returns ``(max error, cases with bracket term)``."""
    rng = np.random.default_rng(seed)
    worst, bracket_cases = 0.0, 0
    for k in range(n):
        if k % 2 == 0:
            n1, N = 2, 2
            Z = random_flat_field(rng, n1, N)
            p = jet.JetPoint(rng.uniform(-0.5, 0.5, n1), rng.normal(size=N), rng.normal(size=(N, n1)))
            gamma = jet.prolong_vector(Z, p, 1e-4)[n1 + N :].reshape(N, n1)
            ref = oracles.prolongation_by_transport(Z, p, 1e-4, 1e-4)
        else:
            n1 = 2
            Z = random_group_field(rng, n1)
            p = jet.GJetPoint(rng.uniform(-0.5, 0.5, n1), random_group(rng), rng.normal(size=(n1, 6)) * 0.5)
            gamma = jet.prolong_vector_group(Z, p, h=1e-4)[n1 + 6 :].reshape(n1, 6)
            ref = oracles.prolongation_by_transport_group(Z, p, lie.SE3, 1e-4, 1e-4)
            if np.abs(lie.ad(p.xi, Z.beta(p.x, p.g))).max() > 1e-3:
                bracket_cases += 1
        worst = max(worst, np.abs(gamma - ref).max())
    return worst, bracket_cases


def check_prolongation(seed=DEFAULT_SEED, n=50) -> Check:
    worst, nb = prolongation_cases(seed, n)
    ok = worst <= 1e-5 and nb >= 10
    return Check("prolongation vs transport", ok, f"max {worst:.2e} on {n} cases, {nb} with bracket term", worst)


def suite_jet(seed=DEFAULT_SEED) -> list:
    return check_contact(seed) + [check_prolongation(seed)]


# variational


WAVE_SPEED = 2.0


def wave_lagrangian(c=WAVE_SPEED) -> var.LagrangianDensity:
    """``1/2 (v_t^2 - c^2 v_s^2)`` on the base ``(s, t)``."""
    return var.LagrangianDensity(lambda x, y, v: 0.5 * (v[0, 1] ** 2 - c**2 * v[0, 0] ** 2), 2, 1)


def wave_solution(c=WAVE_SPEED):
    return lambda x: np.array([np.sin(x[0] - c * x[1])])


def wave_non_solution():
    return lambda x: np.array([np.sin(x[0]) * np.sin(x[1])])


RIGID_J = np.diag([1.0, 2.0, 3.0, 1.0, 1.0, 1.0])


def rigid_lagrangian(J=RIGID_J) -> var.ReducedLagrangian:
    return var.ReducedLagrangian(lambda x, g, xi: 0.5 * xi[0] @ J @ xi[0], 1, depends_on_g=False)


def relative_equilibrium(xi=(0.0, 1.0, 0.0, 0.0, 0.3, 0.0)):
    """Rotation about a principal axis with parallel translation."""
    xi = np.asarray(xi, float)
    return lambda x: lie.exp_group(x[0] * xi)


def rigid_non_solution(xi=(0.3, 1.0, 0.2, 0.2, 0.0, 0.0)):
    xi = np.asarray(xi, float)
    return lambda x: lie.exp_group(x[0] * xi)


def check_variation_theorem(h=1e-2) -> list:
    out = []
    L = wave_lagrangian()
    Om = var.multisymplectic(var.poincare_cartan(L))
    x = np.array([0.3, 0.2])
    res = lambda sec, hh: var.variation_theorem_residual(Om, var.jet_section(sec, L.chart, hh), x, h=hh)
    r1, r2 = res(wave_solution(), h), res(wave_solution(), h / 2)
    bad = res(wave_non_solution(), h / 2)
    out.append(Check("variation theorem, wave", in_band(r1 / r2) and bad >= 1e3 * r2,
                     f"ratio {r1 / r2:.3f}, non-solution/solution {bad / r2:.2e}", r1 / r2))
    l = rigid_lagrangian()
    Om = var.multisymplectic(var.poincare_cartan_reduced(l))
    x = np.array([0.4])
    res = lambda sec, hh: var.variation_theorem_residual(Om, var.jet_section(sec, l.jet_chart, hh), x, h=hh)
    r1, r2 = res(relative_equilibrium(), h), res(relative_equilibrium(), h / 2)
    bad = res(rigid_non_solution(), h / 2)
    out.append(Check("variation theorem, rigid body", in_band(r1 / r2) and bad >= 1e3 * r2,
                     f"ratio {r1 / r2:.3f}, non-solution/solution {bad / r2:.2e}", r1 / r2))
    return out


def check_legendre(seed=DEFAULT_SEED) -> list:
    rng = np.random.default_rng(seed)
    out = []
    L = wave_lagrangian()
    H = var.hamiltonian_from_lagrangian(L)
    err = 0.0
    for _ in range(5):
        p = jet.JetPoint(rng.normal(size=2), rng.normal(size=1), rng.normal(size=(1, 2)))
        mm = var.legendre(L, p)
        err = max(err, np.abs(numdiff.gradient(lambda q: H(p.x, p.y, q), mm.momenta) - p.v).max())
        err = max(err, abs(H(p.x, p.y, mm.momenta) - mm.hamiltonian))
    l = rigid_lagrangian()
    hr = var.reduced_hamiltonian_from_lagrangian(l)
    for _ in range(5):
        p = jet.GJetPoint(rng.normal(size=1), random_group(rng), rng.normal(size=(1, 6)))
        mm = var.legendre_reduced(l, p)
        err = max(err, np.abs(numdiff.gradient(lambda q: hr(p.x, p.g, q), mm.momenta) - p.xi).max())
    out.append(Check("Legendre round trip", err <= 1e-6, f"max {err:.2e}", err))
    return out


def check_ddw(h=1e-2) -> list:
    out = []
    L = wave_lagrangian()
    H = var.hamiltonian_from_lagrangian(L)
    x = np.array([0.3, 0.2])
    worst = 0.0
    for sec in (wave_solution(), wave_non_solution()):
        r = var.ddw_residuals(H, var.conjugate_section(L, sec, h), x, h)
        worst = max(worst, np.abs(r.momentum - var.euler_lagrange_residual(L, sec, x, h)).max())
    out.append(Check("DDW momentum = Euler-Lagrange", worst <= 1e-6, f"max {worst:.2e}", worst))
    l = rigid_lagrangian()
    hr = var.reduced_hamiltonian_from_lagrangian(l)
    x = np.array([0.4])
    worst = 0.0
    for sec in (relative_equilibrium(), rigid_non_solution()):
        r = var.ddwp_residuals(hr, var.conjugate_section_reduced(l, sec, h), x, h)
        worst = max(worst, np.abs(r.momentum - var.euler_poincare_residual(l, sec, x, h)).max())
    out.append(Check("reduced DDW momentum = Euler-Poincare", worst <= 1e-6, f"max {worst:.2e}", worst))
    r1 = var.ddw_residuals(H, var.conjugate_section(L, wave_solution(), h), np.array([0.3, 0.2]), h)
    r2 = var.ddw_residuals(H, var.conjugate_section(L, wave_solution(), h / 2), np.array([0.3, 0.2]), h / 2)
    ratio = np.abs(r1.energy).max() / np.abs(r2.energy).max()
    out.append(Check("DDW energy balance Richardson", in_band(ratio), f"ratio {ratio:.3f}", ratio))
    return out


def check_euler_lagrange(h=1e-2) -> list:
    L = wave_lagrangian()
    x = np.array([0.3, 0.2])
    r = numdiff.richardson_ratio(lambda hh: var.euler_lagrange_residual(L, wave_solution(), x, hh), h)
    return [Check("Euler-Lagrange residual Richardson", in_band(r), f"ratio {r:.3f}", r)]


def suite_variational(seed=DEFAULT_SEED) -> list:
    return check_euler_lagrange() + check_variation_theorem() + check_legendre(seed) + check_ddw()


# beam


def beam_quick_config() -> beam.BeamConfig:
    """A short free-free run for the property suite."""
    return beam.BeamConfig(n_s=41, n_t=400, dt=0.0125, output_every=1)


def check_beam_equilibrium() -> Check:
    cfg = replace(beam.BeamConfig(n_s=21, n_t=50, dt=0.02), chi_cosine=np.zeros(6))
    res = beam.run(cfg)
    st0 = beam.initial_reference(cfg)
    err = max(np.abs(res.final.chi - st0.chi).max(), np.abs(res.final.eps - st0.eps).max(), np.abs(res.final.H - st0.H).max())
    return Check("equilibrium unchanged", err <= 1e-14, f"max change {err:.2e}", err)


def check_principal_rotation(steps=1000) -> Check:
    cfg = beam.rigid_body_config(n_t=steps)
    res = beam.run(cfg)
    err = np.abs(res.final.chi - cfg.chi_uniform).max()
    return Check("principal-axis rotation", err <= 1e-9, f"chi change {err:.2e} over {steps} steps", err)


def rigid_energy_order(dt=0.025, T=20.0, chi=(0.3, 1.0, -0.5, 0.0, 0.0, 0.0)) -> float:
    """``log2`` of the energy excursion ratio between ``dt`` and ``dt/2``."""
    exc = []
    for d in (dt, dt / 2):
        cfg = beam.rigid_body_config(chi=np.asarray(chi, float), dt=d, n_t=int(round(T / d)))
        exc.append(beam.run(cfg).diagnostics.energy_excursion)
    return float(np.log2(exc[0] / exc[1]))


def check_rigid_energy() -> Check:
    order = rigid_energy_order()
    return Check("rigid-body energy drift order", 3.5 <= order <= 4.5, f"log2 ratio {order:.3f} (RK4)", order)


def check_beam_refinement(cfg=None) -> list:
    cfg = beam_quick_config() if cfg is None else cfg
    ratios = beam.refinement_ratios(cfg)
    return [Check(f"beam {k} refinement", in_band(r), f"ratio {r:.3f}", r) for k, r in ratios.items()]


def check_beam_momentum(cfg=None, tol=1e-4) -> Check:
    cfg = beam_quick_config() if cfg is None else cfg
    d = beam.run(cfg).diagnostics
    return Check("beam total momentum drift", d.momentum_drift < tol,
                 f"net {d.momentum_drift:.2e}, max excursion {d.momentum_excursion:.2e}", d.momentum_drift)


def noether_cancellation_ratio(n_s=41, steps=40, potential=False):
    """Residual at a fixed ``(s, t)`` on two grids; returns ``(coarse, fine)`` maxima."""
    base = beam.BeamConfig(n_s=n_s, n_t=steps, J=np.diag([1, 1.5, 2, 1, 1, 1.0]), C=np.diag([1, 1.5, 2, 2, 1, 1.0]), output_every=1)
    base = replace(base, dt=0.5 * base.dt_max)
    x = np.array([0.5, (steps // 2) * base.dt])
    hR = var.right_hamiltonian(beam.beam_hamiltonian(base))
    if potential:
        h0 = hR
        hR = var.ReducedHamiltonian(lambda xx, g, P: h0(xx, g, P) + 0.5 * g[:3, 3] @ g[:3, 3], 2)
    out = []
    for cfg in (base, replace(base.refined(), output_every=1)):
        gs = beam.GridSection(cfg, beam.run(cfg).snapshots)
        out.append(np.abs(var.hamiltonian_noether_cancellation(hR, lambda xx: gs.dual(xx, right=True), x, gs.steps)).max())
    return tuple(out)


def check_noether_cancellation() -> list:
    c, f = noether_cancellation_ratio()
    _, fv = noether_cancellation_ratio(potential=True)
    return [
        Check("Hamiltonian Noether cancellation", in_band(c / f), f"ratio {c / f:.3f}, residual {f:.2e}", c / f),
        Check("g-dependent potential breaks cancellation", fv > 1e3 * f, f"residual {fv:.2e}", fv),
    ]


def check_beam_euler_poincare() -> Check:
    out = []
    for n_s in (21, 41):
        cfg = beam.BeamConfig(n_s=n_s, n_t=(n_s - 1) * 2, output_every=1)
        cfg = replace(cfg, dt=0.5 * cfg.dt_max)
        gs = beam.GridSection(cfg, beam.run(cfg).snapshots)
        x = np.array([0.5, (n_s - 1) * cfg.dt])
        out.append(np.abs(var.euler_poincare_residual(beam.beam_lagrangian(cfg), gs.configuration, x, gs.steps)).max())
    r = out[0] / out[1]
    return Check("Euler-Poincare residual on solver output", in_band(r), f"ratio {r:.3f}", r)


def suite_beam(seed=DEFAULT_SEED) -> list:
    return (
        [check_beam_equilibrium(), check_principal_rotation(), check_rigid_energy()]
        + check_beam_refinement()
        + [check_beam_momentum(beam.BeamConfig(n_s=101, n_t=2000, dt=0.005, output_every=100)), check_beam_euler_poincare()]
        + check_noether_cancellation()
    )


SUITE_FUNCTIONS: dict[str, Callable] = {
    "lie": suite_lie,
    "forms": suite_forms,
    "jet": suite_jet,
    "variational": suite_variational,
    "beam": suite_beam,
}


def run_suite(name: str, seed=DEFAULT_SEED, echo: Callable | None = print) -> list:
    names = SUITES if name == "all" else (name,)
    results = []
    for n in names:
        if echo:
            echo(f"[{n}]")
        for chk in SUITE_FUNCTIONS[n](seed):
            results.append(chk)
            if echo:
                echo("  " + chk.line())
    return results
