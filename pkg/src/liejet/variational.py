"""Covariant Lagrangian and Hamiltonian formalism on first jets.

Densities only supply values. Every partial derivative is a central
difference with per-variable step scaling, so the results here are accurate
to the finite-difference tolerance, never exactly.

Base axes are the first ``n+1`` chart coordinates; the volume form is
``dx^0 ^ ... ^ dx^n`` and ``d^n x_mu`` is its contraction with ``d/dx^mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import forms, lie, numdiff
from .jet import GJetChart, GJetPoint, GroupChart, JetChart, JetPoint, change_of_basis, holonomic_lift, left_form_matrix

FD_STEP = numdiff.DEFAULT_STEP
OUTER_STEP = 1e-4


@dataclass(frozen=True)
class LagrangianDensity:
    """``func(x, y, v)`` with ``v[A, mu]``."""

    func: Callable
    n_base: int
    n_fiber: int

    def __call__(self, x, y, v) -> float:
        return float(self.func(x, y, v))

    @property
    def chart(self) -> JetChart:
        return JetChart(self.n_base, self.n_fiber)


@dataclass(frozen=True)
class ReducedLagrangian:
    """``func(x, g, xi)`` with ``xi[mu]`` an algebra element."""

    func: Callable
    n_base: int
    chart: GroupChart = field(default_factory=GroupChart)
    depends_on_g: bool = True

    def __call__(self, x, g, xi) -> float:
        return float(self.func(x, g, xi))

    @property
    def group(self):
        return self.chart.group

    @property
    def jet_chart(self) -> GJetChart:
        return GJetChart(self.n_base, self.chart)


@dataclass(frozen=True)
class CovariantHamiltonian:
    """``func(x, y, p)`` with multimomenta ``p[A, mu]``."""

    func: Callable
    n_base: int
    n_fiber: int

    def __call__(self, x, y, p) -> float:
        return float(self.func(x, y, p))

    @property
    def chart(self) -> JetChart:
        return JetChart(self.n_base, self.n_fiber)


@dataclass(frozen=True)
class ReducedHamiltonian:
    """``func(x, g, pi)`` with ``pi[mu]`` an algebra covector."""

    func: Callable
    n_base: int
    chart: GroupChart = field(default_factory=GroupChart)
    depends_on_g: bool = True

    def __call__(self, x, g, pi) -> float:
        return float(self.func(x, g, pi))

    @property
    def group(self):
        return self.chart.group

    @property
    def jet_chart(self) -> GJetChart:
        return GJetChart(self.n_base, self.chart)


@dataclass(frozen=True)
class Multimomenta:
    momenta: np.ndarray
    hamiltonian: float


@dataclass(frozen=True)
class SymmetryGenerator:
    eta: np.ndarray


# Partial derivatives of densities


def fiber_derivative(L: LagrangianDensity, p: JetPoint, h=FD_STEP) -> np.ndarray:
    """``dL/dv[A, mu]``."""
    return numdiff.gradient(lambda v: L(p.x, p.y, v), p.v, h)


def fiber_gradient(L: LagrangianDensity, p: JetPoint, h=FD_STEP) -> np.ndarray:
    """``dL/dy^A``."""
    return numdiff.gradient(lambda y: L(p.x, y, p.v), p.y, h)


def reduced_fiber_derivative(l: ReducedLagrangian, p: GJetPoint, h=FD_STEP) -> np.ndarray:
    """``dl/dxi[mu, A]``."""
    return numdiff.gradient(lambda xi: l(p.x, p.g, xi), p.xi, h)


def left_group_gradient(func: Callable, x, g, chart: GroupChart, h=FD_STEP, right=False) -> np.ndarray:
    """``T[B, A] d func/dy^B``: the derivative along left-invariant ``e_A``
    (right-invariant with ``right=True``), through the group chart."""
    y0 = chart.coords(g)
    grad_y = numdiff.gradient(lambda y: func(x, chart.point(y)), y0, h)
    cob = change_of_basis(g, chart, h)
    return (cob.T_right if right else cob.T).T @ grad_y


def _reduced_y_term(density, p_x, g, second, h):
    if not density.depends_on_g:
        return np.zeros(density.group.dim)
    return left_group_gradient(lambda x, gg: density(x, gg, second), p_x, g, density.chart, h)


# Legendre transforms


def legendre(L: LagrangianDensity, p: JetPoint, h=FD_STEP) -> Multimomenta:
    mom = fiber_derivative(L, p, h)
    return Multimomenta(mom, float(np.sum(mom * p.v) - L(p.x, p.y, p.v)))


def legendre_reduced(l: ReducedLagrangian, p: GJetPoint, h=FD_STEP) -> Multimomenta:
    mom = reduced_fiber_derivative(l, p, h)
    return Multimomenta(mom, float(np.sum(mom * p.xi) - l(p.x, p.g, p.xi)))


def _invert_gradient(grad: Callable, target, guess, tol=1e-12, maxiter=60, h=OUTER_STEP):
    """Newton solve of ``grad(z) = target`` with a finite-difference Hessian."""
    target = np.asarray(target, dtype=float)
    z = np.array(guess, dtype=float)
    shape = z.shape
    for _ in range(maxiter):
        r = (np.asarray(grad(z), float) - target).ravel()
        if np.max(np.abs(r)) <= tol * (1.0 + np.max(np.abs(target))):
            break
        Hm = numdiff.jacobian(grad, z, h).reshape(r.size, r.size)
        z = z - np.linalg.solve(Hm, r).reshape(shape)
    return z


def hamiltonian_from_lagrangian(L: LagrangianDensity, h=FD_STEP) -> CovariantHamiltonian:
    """Covariant Hamiltonian by numerically inverting the fiber derivative."""

    def H(x, y, p):
        p = np.asarray(p, float)
        v = _invert_gradient(lambda v: numdiff.gradient(lambda w: L(x, y, w), v, h), p, np.zeros_like(p))
        return float(np.sum(p * v) - L(x, y, v))

    return CovariantHamiltonian(H, L.n_base, L.n_fiber)


def lagrangian_from_hamiltonian(H: CovariantHamiltonian, h=FD_STEP) -> LagrangianDensity:
    """Inverse Legendre transform."""

    def Lf(x, y, v):
        v = np.asarray(v, float)
        p = _invert_gradient(lambda p: numdiff.gradient(lambda w: H(x, y, w), p, h), v, np.zeros_like(v))
        return float(np.sum(p * v) - H(x, y, p))

    return LagrangianDensity(Lf, H.n_base, H.n_fiber)


def reduced_hamiltonian_from_lagrangian(l: ReducedLagrangian, h=FD_STEP) -> ReducedHamiltonian:
    def hfun(x, g, pi):
        pi = np.asarray(pi, float)
        xi = _invert_gradient(lambda xi: numdiff.gradient(lambda w: l(x, g, w), xi, h), pi, np.zeros_like(pi))
        return float(np.sum(pi * xi) - l(x, g, xi))

    return ReducedHamiltonian(hfun, l.n_base, l.chart, l.depends_on_g)


def right_hamiltonian(hl: ReducedHamiltonian) -> ReducedHamiltonian:
    """Express a Hamiltonian in right momenta ``Pi = Ad*_{g^-1} pi``."""
    G = hl.group

    def hr(x, g, Pi):
        return hl(x, g, G.Ad_star(g, np.asarray(Pi, float)))

    return ReducedHamiltonian(hr, hl.n_base, hl.chart, True)


# Section residuals


def euler_lagrange_residual(L: LagrangianDensity, sec: Callable, x, h) -> np.ndarray:
    """``d/dx^mu dL/dv^A_mu - dL/dy^A`` along the finite-difference lift."""
    x = np.asarray(x, dtype=float)
    n1 = x.size
    hs = numdiff.axis_steps(h, n1)
    E = np.eye(n1)
    div = 0.0
    for mu in range(n1):
        pp = fiber_derivative(L, holonomic_lift(sec, x + hs[mu] * E[mu], hs))
        pm = fiber_derivative(L, holonomic_lift(sec, x - hs[mu] * E[mu], hs))
        div = div + (pp[:, mu] - pm[:, mu]) / (2 * hs[mu])
    return div - fiber_gradient(L, holonomic_lift(sec, x, hs))


def euler_poincare_residual(l: ReducedLagrangian, sec: Callable, x, h) -> np.ndarray:
    """``d/dx^mu dl/dxi_mu - ad*_{xi_mu} dl/dxi_mu - T^T dl/dy`` along the lift."""
    x = np.asarray(x, dtype=float)
    n1 = x.size
    G = l.group
    hs = numdiff.axis_steps(h, n1)
    E = np.eye(n1)
    div = 0.0
    for mu in range(n1):
        pp = reduced_fiber_derivative(l, holonomic_lift(sec, x + hs[mu] * E[mu], hs, G))
        pm = reduced_fiber_derivative(l, holonomic_lift(sec, x - hs[mu] * E[mu], hs, G))
        div = div + (pp[mu] - pm[mu]) / (2 * hs[mu])
    p0 = holonomic_lift(sec, x, hs, G)
    pi = reduced_fiber_derivative(l, p0)
    coad = sum(G.ad_star(p0.xi[mu], pi[mu]) for mu in range(n1))
    return div - coad - _reduced_y_term(l, p0.x, p0.g, p0.xi, FD_STEP)


# Constant base forms embedded in a jet chart


@lru_cache(maxsize=None)
def _base_forms(dim: int, n1: int):
    axes = tuple(range(n1))
    omega = forms.volume_form(dim, axes)(np.zeros(dim))
    dnx = [forms.dnx(mu, dim, axes)(np.zeros(dim)) for mu in range(n1)]
    if n1 >= 2:
        dn1x = [[forms.dn1x(mu, nu, dim, axes)(np.zeros(dim)) for nu in range(n1)] for mu in range(n1)]
    else:
        dn1x = None
    return omega, dnx, dn1x


def _unit(i, dim):
    return forms.unit_vector(i, dim)


@lru_cache(maxsize=None)
def _dy_dnx(dim: int, n1: int, first: int, count: int):
    """Coefficients of ``dz^{first+B} ^ d^n x_mu`` as an array ``[B, mu, :]``."""
    _, dnx, _ = _base_forms(dim, n1)
    return np.array(
        [[forms.wedge_coefficients(_unit(first + B, dim), 1, dnx[mu], n1 - 1, dim) for mu in range(n1)] for B in range(count)]
    )


def poincare_cartan(L: LagrangianDensity, h=FD_STEP) -> forms.FormField:
    """``dL/dv^A_mu dy^A ^ d^n x_mu - H omega`` on the jet chart."""
    chart = L.chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, _, _ = _base_forms(dim, n1)
    basis = _dy_dnx(dim, n1, n1, N)

    def coeffs(z):
        mm = legendre(L, chart.unpack(z), h)
        return np.einsum("am,amk->k", mm.momenta, basis) - mm.hamiltonian * omega

    return forms.FormField(n1, dim, coeffs)


def poincare_cartan_reduced(l: ReducedLagrangian, h=FD_STEP) -> forms.FormField:
    """``dl/dxi^A_mu lambda^A ^ d^n x_mu - h omega`` on the group jet chart."""
    chart = l.jet_chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, _, _ = _base_forms(dim, n1)
    basis = _dy_dnx(dim, n1, n1, N)

    def coeffs(z):
        x, y, xi = chart.split(z)
        p = GJetPoint(x, chart.chart.point(y), xi)
        mm = legendre_reduced(l, p, h)
        K = mm.momenta @ left_form_matrix(chart.chart, y, h)  # K[mu, B]
        return np.einsum("mb,bmk->k", K, basis) - mm.hamiltonian * omega

    return forms.FormField(n1, dim, coeffs)


def poincare_cartan_hamiltonian(H: CovariantHamiltonian) -> forms.FormField:
    """``p^mu_A dy^A ^ d^n x_mu - H omega`` on the multimomentum chart."""
    chart = H.chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, _, _ = _base_forms(dim, n1)
    basis = _dy_dnx(dim, n1, n1, N)

    def coeffs(z):
        q = chart.unpack(z)
        return np.einsum("am,amk->k", q.v, basis) - H(q.x, q.y, q.v) * omega

    return forms.FormField(n1, dim, coeffs)


def poincare_cartan_reduced_hamiltonian(hr: ReducedHamiltonian, h=FD_STEP) -> forms.FormField:
    """``pi^mu_A lambda^A ^ d^n x_mu - h omega`` on the reduced multimomentum chart."""
    chart = hr.jet_chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, _, _ = _base_forms(dim, n1)
    basis = _dy_dnx(dim, n1, n1, N)

    def coeffs(z):
        x, y, pi = chart.split(z)
        K = pi @ left_form_matrix(chart.chart, y, h)
        return np.einsum("mb,bmk->k", K, basis) - hr(x, chart.chart.point(y), pi) * omega

    return forms.FormField(n1, dim, coeffs)


def multisymplectic(theta: forms.FormField, h=OUTER_STEP) -> forms.FormField:
    """``Omega = -d Theta``."""
    return -forms.ext_deriv(theta, h)


def multisymplectic_hamiltonian_closed(H: CovariantHamiltonian, h=FD_STEP) -> forms.FormField:
    """``dy^A ^ dp^mu_A ^ d^n x_mu + dH ^ omega`` with ``dH`` by central differences."""
    chart = H.chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, dnx, _ = _base_forms(dim, n1)
    const = np.zeros(forms.comb(dim, n1 + 1))
    for A in range(N):
        for mu in range(n1):
            dydp = forms.wedge_coefficients(
                _unit(chart.y_index(A), dim), 1, _unit(chart.v_index(A, mu), dim), 1, dim
            )
            const += forms.wedge_coefficients(dydp, 2, dnx[mu], n1 - 1, dim)

    def coeffs(z):
        q = chart.unpack(z)
        dH = numdiff.gradient(lambda w: H(*_split_flat(chart, w)), z, h)
        return const + forms.wedge_coefficients(dH, 1, omega, n1, dim)

    return forms.FormField(n1 + 1, dim, coeffs)


def _split_flat(chart: JetChart, z):
    q = chart.unpack(z)
    return q.x, q.y, q.v


def multisymplectic_reduced_hamiltonian_closed(hr: ReducedHamiltonian, h=FD_STEP) -> forms.FormField:
    """``(lambda^A ^ dpi^mu_A + pi^mu_A [lambda, lambda]^A) ^ d^n x_mu + dh ^ omega``.

    ``[lambda, lambda](X, Y) = [lambda(X), lambda(Y)]``, i.e. half of
    ``[lambda ^ lambda]``.
    """
    chart = hr.jet_chart
    G = hr.group
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, dnx, _ = _base_forms(dim, n1)
    c = forms.structure_constants(G.ad, N)

    def coeffs(z):
        x, y, pi = chart.split(z)
        lam = np.zeros((N, dim))
        lam[:, chart.y_slice] = left_form_matrix(chart.chart, y, h)
        pair = np.array([[forms.wedge_coefficients(lam[b], 1, lam[e], 1, dim) for e in range(N)] for b in range(N)])
        half_bracket = 0.5 * np.einsum("abe,bek->ak", c, pair)
        out = np.zeros(forms.comb(dim, n1 + 1))
        for mu in range(n1):
            two = half_bracket.T @ pi[mu]
            for A in range(N):
                two = two + forms.wedge_coefficients(lam[A], 1, _unit(chart.xi_index(mu, A), dim), 1, dim)
            out += forms.wedge_coefficients(two, 2, dnx[mu], n1 - 1, dim)
        dh = numdiff.gradient(lambda w: hr(*_split_group(chart, w)), z, h)
        return out + forms.wedge_coefficients(dh, 1, omega, n1, dim)

    return forms.FormField(n1 + 1, dim, coeffs)


def _split_group(chart: GJetChart, z):
    x, y, pi = chart.split(z)
    return x, chart.chart.point(y), pi


def euler_lagrange_forms(L: LagrangianDensity, h=OUTER_STEP) -> list:
    """``T^mu_A = d(dL/dv^A_mu) - (1/(n+1)) dL/dy^A dx^mu`` as ``[A][mu]`` 1-forms."""
    chart = L.chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    out = []
    for A in range(N):
        row = []
        for mu in range(n1):
            mom = forms.scalar_field(lambda z, A=A, mu=mu: fiber_derivative(L, chart.unpack(z))[A, mu], dim)
            dy = forms.FormField(
                1, dim, lambda z, A=A, mu=mu: fiber_gradient(L, chart.unpack(z))[A] / n1 * _unit(mu, dim)
            )
            row.append(forms.ext_deriv(mom, h) - dy)
        out.append(row)
    return out


def euler_lagrange_wedge(L: LagrangianDensity, h=OUTER_STEP) -> list:
    """``T^mu_A ^ d^n x_mu`` (summed over mu) for each A."""
    chart = L.chart
    n1, dim = chart.n_base, chart.dim
    _, dnx, _ = _base_forms(dim, n1)
    out = []
    for row in euler_lagrange_forms(L, h):
        total = forms.wedge(row[0], forms.constant_form(n1 - 1, dim, dnx[0]))
        for mu in range(1, n1):
            total = total + forms.wedge(row[mu], forms.constant_form(n1 - 1, dim, dnx[mu]))
        out.append(total)
    return out


def reduced_euler_lagrange_wedge(l: ReducedLagrangian, h=OUTER_STEP) -> list:
    """``dpi^mu_A ^ d^n x_mu - (ad*_{xi_nu} pi^nu)_A omega - T^B_A dl/dy^B omega``."""
    chart = l.jet_chart
    G = l.group
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    omega, dnx, _ = _base_forms(dim, n1)

    def point(z):
        x, y, xi = chart.split(z)
        return GJetPoint(x, chart.chart.point(y), xi)

    def source(z):
        p = point(z)
        pi = reduced_fiber_derivative(l, p)
        coad = sum(G.ad_star(p.xi[nu], pi[nu]) for nu in range(n1))
        return coad + _reduced_y_term(l, p.x, p.g, p.xi, FD_STEP)

    out = []
    for A in range(N):
        total = forms.FormField(n1, dim, lambda z, A=A: -source(z)[A] * omega)
        for mu in range(n1):
            mom = forms.scalar_field(lambda z, A=A, mu=mu: reduced_fiber_derivative(l, point(z))[mu, A], dim)
            total = total + forms.wedge(forms.ext_deriv(mom, h), forms.constant_form(n1 - 1, dim, dnx[mu]))
        out.append(total)
    return out


# Variation theorem


def jet_section(sec: Callable, chart, h) -> Callable:
    """``x -> chart coordinates of the finite-difference lift of sec``."""
    if isinstance(chart, GJetChart):
        return lambda x: chart.coords(holonomic_lift(sec, x, h, chart.group))
    return lambda x: chart.coords(holonomic_lift(sec, x, h))


def test_vector_fields(dim: int, seed: int = 42, count: int = 3) -> list:
    """Coordinate fields plus ``count`` seeded quadratic polynomial fields."""
    rng = np.random.default_rng(seed)
    fields = [lambda z, i=i: _unit(i, dim) for i in range(dim)]
    for _ in range(count):
        a = rng.normal(size=dim)
        B = rng.normal(size=(dim, dim)) / dim
        C = rng.normal(size=(dim, dim)) / dim
        fields.append(lambda z, a=a, B=B, C=C: a + B @ z + C @ (z * z))
    return fields


def section_tangents(section_map: Callable, x, h=FD_STEP) -> list:
    """Images of the base coordinate vectors under the differential of a section."""
    D = numdiff.jacobian(section_map, x, h)
    return [D[:, mu] for mu in range(np.size(x))]


def variation_theorem_residual(omega: forms.FormField, section_map: Callable, x, fields=None, h=FD_STEP) -> float:
    """``max_W |(W _| Omega)(X_0, ..., X_n)|`` along a jet section.

    ``section_map`` sends base points to jet-chart coordinates; the
    tangents ``X_mu`` are its central-difference derivatives.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(section_map(x), dtype=float)
    fields = fields if fields is not None else test_vector_fields(omega.dim)
    X = section_tangents(section_map, x, h)
    c = omega(z)
    return max(
        abs(forms.evaluate_coefficients(c, [np.asarray(W(z), float)] + X, omega.dim, omega.degree)) for W in fields
    )


# Hamiltonian side


def conjugate_section(L: LagrangianDensity, sec: Callable, h) -> Callable:
    """``x -> (y, p)`` with ``p`` the Legendre image of the lift."""

    def dual(x):
        p = holonomic_lift(sec, x, h)
        return p.y, legendre(L, p).momenta

    return dual


def conjugate_section_reduced(l: ReducedLagrangian, sec: Callable, h, right=False) -> Callable:
    """``x -> (g, pi)``, or ``(g, Pi)`` with ``Pi = Ad*_{g^-1} pi`` when ``right``."""
    G = l.group

    def dual(x):
        p = holonomic_lift(sec, x, h, G)
        pi = legendre_reduced(l, p).momenta
        return p.g, (G.Ad_star_inv(p.g, pi) if right else pi)

    return dual


@dataclass(frozen=True)
class DDWResiduals:
    energy: np.ndarray  # (a), one per base direction
    momentum: np.ndarray  # (b), one per fiber component
    contact: np.ndarray  # (c), [A, mu] flat or [mu, A] reduced
    momentum_form: np.ndarray | None = None


def _dual_tangents(dual_map, x, h):
    x = np.asarray(x, dtype=float)
    n1 = x.size
    hs = numdiff.axis_steps(h, n1)
    E = np.eye(n1)
    return [(dual_map(x + hs[mu] * E[mu]) - dual_map(x - hs[mu] * E[mu])) / (2 * hs[mu]) for mu in range(n1)]


def ddw_residuals(H: CovariantHamiltonian, dual_sec: Callable, x, h) -> DDWResiduals:
    """Pull back the three De Donder-Weyl (n+1)-forms along a dual section."""
    chart = H.chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    x = np.asarray(x, dtype=float)

    def dual_map(xx):
        y, p = dual_sec(xx)
        return chart.pack(xx, y, p)

    z = dual_map(x)
    X = _dual_tangents(dual_map, x, h)
    omega, dnx, dn1x = _base_forms(dim, n1)
    ev = lambda c, k: forms.evaluate_coefficients(c, X, dim, k)
    vol = ev(omega, n1)
    dH = numdiff.gradient(lambda w: H(*_split_flat(chart, w)), z)

    energy = np.empty(n1)
    for nu in range(n1):
        val = ev(forms.wedge_coefficients(dH, 1, dnx[nu], n1 - 1, dim), n1) - dH[nu] * vol
        if dn1x is not None:
            for mu in range(n1):
                psi = sum(
                    forms.wedge_coefficients(_unit(chart.y_index(A), dim), 1, _unit(chart.v_index(A, mu), dim), 1, dim)
                    for A in range(N)
                )
                val -= ev(forms.wedge_coefficients(psi, 2, dn1x[mu][nu], n1 - 2, dim), n1)
        energy[nu] = val

    momentum = np.empty(N)
    contact = np.empty((N, n1))
    for A in range(N):
        momentum[A] = sum(
            ev(forms.wedge_coefficients(_unit(chart.v_index(A, mu), dim), 1, dnx[mu], n1 - 1, dim), n1)
            for mu in range(n1)
        ) + dH[chart.y_index(A)] * vol
        for mu in range(n1):
            contact[A, mu] = (
                ev(forms.wedge_coefficients(_unit(chart.y_index(A), dim), 1, dnx[mu], n1 - 1, dim), n1)
                - dH[chart.v_index(A, mu)] * vol
            )
    return DDWResiduals(energy, momentum, contact)


def _reduced_dual_data(hr: ReducedHamiltonian, dual_sec, x, h):
    G = hr.group
    x = np.asarray(x, dtype=float)
    n1 = x.size
    hs = numdiff.axis_steps(h, n1)
    E = np.eye(n1)
    g, pi = dual_sec(x)
    pi = np.asarray(pi, dtype=float)
    dg, dpi = [], []
    for nu in range(n1):
        gp, pp = dual_sec(x + hs[nu] * E[nu])
        gm, pm = dual_sec(x - hs[nu] * E[nu])
        dg.append((np.asarray(gp) - np.asarray(gm)) / (2 * hs[nu]))
        dpi.append((np.asarray(pp) - np.asarray(pm)) / (2 * hs[nu]))
    dh_dpi = numdiff.gradient(lambda w: hr(x, g, w), pi)
    return G, x, n1, hs, g, pi, dg, np.array(dpi), dh_dpi


def ddwp_residuals(hr: ReducedHamiltonian, dual_sec: Callable, x, h) -> DDWResiduals:
    """Reduced De Donder-Weyl residuals in left variables.

    ``momentum`` is the scalar balance
    ``d pi^mu/dx^mu - ad*_{dh/dpi^mu} pi^mu + T^T dh/dy``; ``momentum_form``
    uses ``lambda(X_mu)`` in the coadjoint term instead and is only
    returned for bases of dimension at most two. ``contact[mu]`` is
    ``lambda(X_mu) - dh/dpi^mu``.
    """
    G, x, n1, hs, g, pi, dg, dpi, dh_dpi = _reduced_dual_data(hr, dual_sec, x, h)
    lam = np.array([G.maurer_cartan(g, dg[mu]) for mu in range(n1)])
    ygrad = _reduced_y_term(hr, x, g, pi, FD_STEP)
    div = sum(dpi[mu][mu] for mu in range(n1))

    momentum = div - sum(G.ad_star(dh_dpi[mu], pi[mu]) for mu in range(n1)) + ygrad
    momentum_form = None
    if n1 <= 2:
        momentum_form = div - sum(G.ad_star(lam[mu], pi[mu]) for mu in range(n1)) + ygrad

    def along(nu):
        return numdiff.directional(lambda t: hr(x + t * np.eye(n1)[nu], *dual_sec(x + t * np.eye(n1)[nu])), 0.0, 1.0, hs[nu])

    dh_dx = numdiff.gradient(lambda xx: hr(xx, g, pi), x)
    energy = np.empty(n1)
    for nu in range(n1):
        psi = 0.0
        for mu in range(n1):
            psi += lam[mu] @ dpi[nu][mu] - lam[nu] @ dpi[mu][mu] + pi[mu] @ G.ad(lam[mu], lam[nu])
        energy[nu] = along(nu) - dh_dx[nu] - psi
    return DDWResiduals(energy, momentum, lam - dh_dpi, momentum_form)


def ddwp_right_residual(hr_right: ReducedHamiltonian, dual_sec: Callable, x, h) -> np.ndarray:
    """``d Pi^mu/dx^mu + ad*_{dh'/dPi^mu} Pi^mu + Ttilde^T dh'/dy``."""
    G, x, n1, hs, g, Pi, dg, dPi, dh_dPi = _reduced_dual_data(hr_right, dual_sec, x, h)
    div = sum(dPi[mu][mu] for mu in range(n1))
    coad = sum(G.ad_star(dh_dPi[mu], Pi[mu]) for mu in range(n1))
    ygrad = left_group_gradient(lambda xx, gg: hr_right(xx, gg, Pi), x, g, hr_right.chart, right=True)
    return div + coad + ygrad


def hamiltonian_noether_cancellation(hr_right: ReducedHamiltonian, dual_sec: Callable, x, h) -> np.ndarray:
    """``ad*_{chi_mu} Pi^mu + Ttilde^T dh'/dy`` with ``chi_mu`` the right
    Maurer-Cartan form of the section tangents.

    Vanishes up to discretization error when ``h'`` comes from a
    left-invariant problem.
    """
    G, x, n1, hs, g, Pi, dg, dPi, _ = _reduced_dual_data(hr_right, dual_sec, x, h)
    chi = [G.maurer_cartan_right(g, dg[mu]) for mu in range(n1)]
    coad = sum(G.ad_star(chi[mu], Pi[mu]) for mu in range(n1))
    ygrad = left_group_gradient(lambda xx, gg: hr_right(xx, gg, Pi), x, g, hr_right.chart, right=True)
    return coad + ygrad


def dH_oneform(H: CovariantHamiltonian, z, tangents, h=FD_STEP) -> forms.FormField:
    """``DH = dH - dH/dx^a dx^a - Psi^mu(X_mu, X_a) dx^a`` on the multimomentum chart.

    ``Psi^mu = dy^A ^ dp^mu_A``; the tangents ``X_mu`` are those of a dual
    section through ``z``.
    """
    chart = H.chart
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    X = [np.asarray(t, float) for t in tangents]
    psi = np.zeros(n1)
    for a in range(n1):
        for mu in range(n1):
            for A in range(N):
                yi, pi = chart.y_index(A), chart.v_index(A, mu)
                psi[a] += X[mu][yi] * X[a][pi] - X[a][yi] * X[mu][pi]

    def coeffs(w):
        dH = numdiff.gradient(lambda u: H(*_split_flat(chart, u)), w, h)
        dH[:n1] = -psi
        return dH

    return forms.FormField(1, dim, coeffs)


def dh_oneform_reduced(hr: ReducedHamiltonian, z, tangents, h=FD_STEP) -> forms.FormField:
    """Reduced ``Dh = dh - dh/dx^a dx^a - psi^mu(X_mu, X_a) dx^a`` with
    ``psi^mu = lambda^A ^ dpi^mu_A + pi^mu_A [lambda, lambda]^A``."""
    chart = hr.jet_chart
    G = hr.group
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    X = [np.asarray(t, float) for t in tangents]
    x, y, pi = chart.split(z)
    Lm = left_form_matrix(chart.chart, y, h)
    lam = [Lm @ t[chart.y_slice] for t in X]
    dpi = [t[chart.xi_slice].reshape(n1, N) for t in X]
    psi = np.zeros(n1)
    for a in range(n1):
        for mu in range(n1):
            psi[a] += lam[mu] @ dpi[a][mu] - lam[a] @ dpi[mu][mu] + pi[mu] @ G.ad(lam[mu], lam[a])

    def coeffs(w):
        dh = numdiff.gradient(lambda u: hr(*_split_group(chart, u)), w, h)
        dh[:n1] = -psi
        return dh

    return forms.FormField(1, dim, coeffs)


def canonical_form(n_base: int, n_fiber: int) -> forms.FormField:
    """``Omega* = dy^A ^ dp^mu_A ^ d^n x_mu`` on the multimomentum chart."""
    chart = JetChart(n_base, n_fiber)
    n1, N, dim = chart.n_base, chart.n_fiber, chart.dim
    _, dnx, _ = _base_forms(dim, n1)
    c = np.zeros(forms.comb(dim, n1 + 1))
    for A in range(N):
        for mu in range(n1):
            dydp = forms.wedge_coefficients(_unit(chart.y_index(A), dim), 1, _unit(chart.v_index(A, mu), dim), 1, dim)
            c += forms.wedge_coefficients(dydp, 2, dnx[mu], n1 - 1, dim)
    return forms.constant_form(n1 + 1, dim, c)


# Noether currents


def noether_current(l: ReducedLagrangian, sec: Callable, x, h) -> np.ndarray:
    """Right momenta ``Pi^mu = Ad*_{g^-1} pi^mu`` along the lift; ``J = Pi^mu d^n x_mu``.

    The scalar current for a generator ``eta`` is ``Pi @ eta``.
    """
    G = l.group
    p = holonomic_lift(sec, x, h, G)
    return G.Ad_star_inv(p.g, legendre_reduced(l, p).momenta)


def current_form(Pi: np.ndarray, eta: SymmetryGenerator | np.ndarray, dim: int | None = None) -> forms.FormField:
    """``<Pi^mu, eta> d^n x_mu`` as a constant form on a chart whose first
    coordinates are the base."""
    eta = eta.eta if isinstance(eta, SymmetryGenerator) else eta
    n1 = Pi.shape[0]
    dim = dim or n1
    _, dnx, _ = _base_forms(dim, n1)
    return forms.constant_form(n1 - 1, dim, sum((Pi[mu] @ eta) * dnx[mu] for mu in range(n1)))


def noether_balance(current: Callable, x, h) -> np.ndarray:
    """``sum_mu d Pi^mu/dx^mu`` by central differences of ``current(x) -> Pi``."""
    x = np.asarray(x, dtype=float)
    n1 = x.size
    hs = numdiff.axis_steps(h, n1)
    E = np.eye(n1)
    return sum(
        (np.asarray(current(x + hs[mu] * E[mu]))[mu] - np.asarray(current(x - hs[mu] * E[mu]))[mu]) / (2 * hs[mu])
        for mu in range(n1)
    )


def symmetry_vector(eta: SymmetryGenerator | np.ndarray, p: GJetPoint, chart: GJetChart) -> np.ndarray:
    """Chart components of the prolonged right-invariant field ``S_eta`` at ``p``.

    In the left frame it reads ``Ad_{g^-1} eta``; the derivative block is
    zero because ``xi`` is invariant under left translations.
    """
    eta = eta.eta if isinstance(eta, SymmetryGenerator) else np.asarray(eta, float)
    G = chart.group
    n1, N = chart.n_base, chart.n_fiber
    vec = np.zeros(chart.dim)
    vec[n1 : n1 + N] = G.Ad(G.inverse(p.g), eta)
    return chart.frame_to_chart(p, vec)
