"""First jets of sections of trivial bundles ``M x F`` and ``M x G``.

Flat jet coordinates are packed as ``z = (x, y, v)`` with ``v[A, mu]``
flattened row-major. Group jets use ``z = (x, y, xi)`` where ``y`` are
canonical coordinates of the first kind of ``g`` around a reference element
and ``xi[mu]`` is the algebra element attached to base direction ``mu``.

Vectors on a group jet space are also used in the *left frame*: components
``(alpha, beta, gamma)`` against ``(d/dx, left-invariant e_B, d/dxi)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import forms, lie, numdiff

PI_MARGIN = 1e-6


class ChartError(ValueError):
    """Raised when a group element sits on the log-chart boundary."""


@dataclass(frozen=True)
class JetPoint:
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray  # v[A, mu]

    @property
    def n_base(self) -> int:
        return len(self.x)

    @property
    def n_fiber(self) -> int:
        return len(self.y)


@dataclass(frozen=True)
class GJetPoint:
    x: np.ndarray
    g: np.ndarray
    xi: np.ndarray  # xi[mu] is an algebra element

    @property
    def n_base(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class BundleVectorField:
    """``Z = alpha^mu d/dx^mu + beta^A e_A``.

    ``alpha(x, y)`` and ``beta(x, y)`` take the fiber point (a vector, or a
    group element in the group case, where ``beta`` is read in the
    left-invariant basis).
    """

    alpha: Callable
    beta: Callable


class JetChart:
    """Coordinates ``(x, y, v)`` on the first jet space of ``R^{n+1} x R^N``.

    The same layout serves the multimomentum space, with ``p[A, mu]`` in
    place of ``v``.
    """

    def __init__(self, n_base: int, n_fiber: int):
        self.n_base = int(n_base)
        self.n_fiber = int(n_fiber)
        n1, N = self.n_base, self.n_fiber
        self.dim = n1 + N + N * n1
        self.x_slice = slice(0, n1)
        self.y_slice = slice(n1, n1 + N)
        self.v_slice = slice(n1 + N, self.dim)
        self.base_axes = tuple(range(n1))

    def pack(self, x, y, v) -> np.ndarray:
        return np.concatenate(
            [np.ravel(np.asarray(x, float)), np.ravel(np.asarray(y, float)), np.ravel(np.asarray(v, float))]
        )

    def unpack(self, z) -> JetPoint:
        z = np.asarray(z, dtype=float)
        return JetPoint(
            z[self.x_slice], z[self.y_slice], z[self.v_slice].reshape(self.n_fiber, self.n_base)
        )

    def coords(self, p: JetPoint) -> np.ndarray:
        return self.pack(p.x, p.y, p.v)

    def x_index(self, mu):
        return mu

    def y_index(self, A):
        return self.n_base + A

    def v_index(self, A, mu):
        return self.n_base + self.n_fiber + A * self.n_base + mu

    def vector(self, alpha, beta, gamma) -> np.ndarray:
        return self.pack(alpha, beta, gamma)


@dataclass(frozen=True)
class GroupChart:
    """Canonical chart ``g = reference * exp(y)`` on a matrix group."""

    group: object = lie.SE3
    reference: np.ndarray | None = None

    def _ref(self):
        return self.group.identity() if self.reference is None else np.asarray(self.reference, float)

    def coords(self, g) -> np.ndarray:
        rel = self.group.inverse(self._ref()) @ np.asarray(g, dtype=float)
        if self.group.chart_angle(rel) > np.pi - PI_MARGIN:
            raise ChartError("rotation angle within 1e-6 of pi: outside the log chart")
        return self.group.log(rel)

    def point(self, y) -> np.ndarray:
        return self._ref() @ self.group.exp(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class ChangeOfBasis:
    """``T[A, B] = dy^A(e_B)`` for left-invariant ``e_B``, ``L = T^-1``; tilde
    versions use right-invariant fields."""

    T: np.ndarray
    L: np.ndarray
    T_right: np.ndarray
    L_right: np.ndarray


def change_of_basis(g, chart: GroupChart | None = None, h=numdiff.DEFAULT_STEP) -> ChangeOfBasis:
    chart = chart or GroupChart()
    G = chart.group
    g = np.asarray(g, dtype=float)
    chart.coords(g)  # raises on the chart boundary
    n = G.dim
    E = np.eye(n)
    T = np.empty((n, n))
    Tr = np.empty((n, n))
    for b in range(n):
        T[:, b] = numdiff.directional(lambda t: chart.coords(g @ G.exp(t * E[b])), 0.0, 1.0, h)
        Tr[:, b] = numdiff.directional(lambda t: chart.coords(G.exp(t * E[b]) @ g), 0.0, 1.0, h)
    return ChangeOfBasis(T, np.linalg.inv(T), Tr, np.linalg.inv(Tr))


class GJetChart:
    """Coordinates ``(x, y, xi)`` on the first jet space of ``R^{n+1} x G``.

    Also used for the reduced multimomentum space with ``pi[mu]`` in place
    of ``xi[mu]``.
    """

    def __init__(self, n_base: int, chart: GroupChart | None = None):
        self.chart = chart or GroupChart()
        self.group = self.chart.group
        self.n_base = int(n_base)
        n1, N = self.n_base, self.group.dim
        self.n_fiber = N
        self.dim = n1 + N + n1 * N
        self.x_slice = slice(0, n1)
        self.y_slice = slice(n1, n1 + N)
        self.xi_slice = slice(n1 + N, self.dim)
        self.base_axes = tuple(range(n1))

    def pack(self, x, g, xi) -> np.ndarray:
        return np.concatenate(
            [np.ravel(np.asarray(x, float)), self.chart.coords(g), np.ravel(np.asarray(xi, float))]
        )

    def unpack(self, z) -> GJetPoint:
        z = np.asarray(z, dtype=float)
        return GJetPoint(
            z[self.x_slice],
            self.chart.point(z[self.y_slice]),
            z[self.xi_slice].reshape(self.n_base, self.n_fiber),
        )

    def split(self, z):
        """Raw chart blocks ``(x, y, xi)`` without building ``g``."""
        z = np.asarray(z, dtype=float)
        return z[self.x_slice], z[self.y_slice], z[self.xi_slice].reshape(self.n_base, self.n_fiber)

    def coords(self, p: GJetPoint) -> np.ndarray:
        return self.pack(p.x, p.g, p.xi)

    def xi_index(self, mu, A):
        return self.n_base + self.n_fiber + mu * self.n_fiber + A

    def frame_to_chart(self, p: GJetPoint, vec, h=numdiff.DEFAULT_STEP) -> np.ndarray:
        """Convert left-frame components ``(alpha, beta, gamma)`` to chart components."""
        vec = np.asarray(vec, dtype=float)
        n1, N = self.n_base, self.n_fiber
        T = change_of_basis(p.g, self.chart, h).T
        out = vec.copy()
        out[n1 : n1 + N] = T @ vec[n1 : n1 + N]
        return out


def left_form_matrix(chart: GroupChart, y, h=numdiff.DEFAULT_STEP) -> np.ndarray:
    """``L[A, B] = lambda^A(d/dy^B)`` from Maurer-Cartan evaluation of chart tangents."""
    G = chart.group
    y = np.asarray(y, dtype=float)
    g = chart.point(y)
    cols = []
    for b in range(G.dim):
        tangent = numdiff.jacobian(lambda t: chart.point(y + t * np.eye(G.dim)[b]), np.zeros(1), h, scale=False)
        cols.append(G.maurer_cartan(g, tangent[..., 0]))
    return np.column_stack(cols)


# Contact forms


def contact_forms(chart: JetChart) -> list:
    """``theta^A = dy^A - v^A_mu dx^mu`` as form fields on the jet chart."""
    out = []
    for A in range(chart.n_fiber):

        def coeffs(z, A=A):
            c = np.zeros(chart.dim)
            c[chart.y_index(A)] = 1.0
            c[chart.x_slice] = -chart.unpack(z).v[A]
            return c

        out.append(forms.FormField(1, chart.dim, coeffs))
    return out


def contact_form(p: JetPoint) -> np.ndarray:
    """Coefficient matrix ``theta[A, :]`` of the contact forms at ``p``."""
    chart = JetChart(p.n_base, p.n_fiber)
    z = chart.coords(p)
    return np.stack([f(z) for f in contact_forms(chart)])


def reduced_contact_forms(gchart: GJetChart, h=numdiff.DEFAULT_STEP) -> list:
    """``vartheta^A = lambda^A - xi^A_mu dx^mu`` on the group jet chart.

    ``lambda^A = L[A, B](y) dy^B`` is obtained from Maurer-Cartan evaluation
    of the chart tangents, so it is accurate to the finite-difference step.
    """
    n1, N = gchart.n_base, gchart.n_fiber

    def all_coeffs(z):
        x, y, xi = gchart.split(z)
        c = np.zeros((N, gchart.dim))
        c[:, gchart.y_slice] = left_form_matrix(gchart.chart, y, h)
        c[:, gchart.x_slice] = -xi.T
        return c

    return [forms.FormField(1, gchart.dim, lambda z, A=A: all_coeffs(z)[A]) for A in range(N)]


def reduced_contact_form(p: GJetPoint) -> np.ndarray:
    """Matrix of ``vartheta^A`` at ``p`` acting on left-frame components.

    Since ``lambda^A(e_B) = delta^A_B`` exactly, this needs no differencing.
    """
    n1, N = p.xi.shape
    c = np.zeros((N, n1 + N + n1 * N))
    c[:, :n1] = -p.xi.T
    c[:, n1 : n1 + N] = np.eye(N)
    return c


def normalized_tangents(p: JetPoint) -> list:
    """``X_mu = d/dx^mu + v^B_mu d/dy^B`` as jet-chart vectors."""
    chart = JetChart(p.n_base, p.n_fiber)
    out = []
    for mu in range(p.n_base):
        X = np.zeros(chart.dim)
        X[mu] = 1.0
        X[chart.y_slice] = p.v[:, mu]
        out.append(X)
    return out


def normalized_tangents_frame(p: GJetPoint) -> list:
    """``X_mu = d/dx^mu + xi^B_mu e_B`` in left-frame components."""
    n1, N = p.xi.shape
    out = []
    for mu in range(n1):
        X = np.zeros(n1 + N + n1 * N)
        X[mu] = 1.0
        X[n1 : n1 + N] = p.xi[mu]
        out.append(X)
    return out


# Lifts


def holonomic_lift(sec: Callable, x, h=1e-4, group=None):
    """First-jet lift of a section by central differences with step ``h``.

    ``h`` is used exactly (scalar or one entry per base axis) so that lifts
    of gridded data land on grid nodes. With ``group`` given, ``sec``
    returns group elements and the velocities come from the left
    Maurer-Cartan form of the difference tangents.
    """
    x = np.asarray(x, dtype=float)
    n1 = x.size
    hs = numdiff.axis_steps(h, n1)
    E = np.eye(n1)
    y0 = np.asarray(sec(x), dtype=float)
    tangents = [
        (np.asarray(sec(x + hs[mu] * E[mu]), float) - np.asarray(sec(x - hs[mu] * E[mu]), float)) / (2 * hs[mu])
        for mu in range(n1)
    ]
    if group is None:
        return JetPoint(x, np.atleast_1d(y0), np.column_stack([np.atleast_1d(t) for t in tangents]))
    xi = np.stack([group.maurer_cartan(y0, T) for T in tangents])
    return GJetPoint(x, y0, xi)


def prolong_vector(Z: BundleVectorField, p: JetPoint, h=numdiff.DEFAULT_STEP) -> np.ndarray:
    """First prolongation ``j1Z`` at ``p`` as a jet-chart vector.

    The derivative block is ``gamma^A_mu = d zeta^A/dx^mu + v^B_mu d zeta^A/dy^B``
    with ``zeta^A = beta^A - v^A_nu alpha^nu`` at fixed ``v``.
    """
    chart = JetChart(p.n_base, p.n_fiber)
    v = p.v

    def zeta(x, y):
        return np.atleast_1d(Z.beta(x, y)) - v @ np.atleast_1d(Z.alpha(x, y))

    Dx = numdiff.jacobian(lambda x: zeta(x, p.y), p.x, h)
    Dy = numdiff.jacobian(lambda y: zeta(p.x, y), p.y, h)
    gamma = Dx + Dy @ v
    return chart.vector(np.atleast_1d(Z.alpha(p.x, p.y)), np.atleast_1d(Z.beta(p.x, p.y)), gamma)


def prolong_vector_group(
    Z: BundleVectorField, p: GJetPoint, chart: GroupChart | None = None, h=numdiff.DEFAULT_STEP
) -> np.ndarray:
    """First prolongation of ``Z`` on a group jet space, in left-frame components.

    ``gamma_mu = d zeta/dx^mu + xi^C_mu T[B, C] d zeta/dy^B + ad(xi_mu, beta)``.
    """
    chart = chart or GroupChart()
    G = chart.group
    xi = np.asarray(p.xi, dtype=float)
    y0 = chart.coords(p.g)

    def zeta(x, y):
        g = chart.point(y)
        return np.asarray(Z.beta(x, g), float) - xi.T @ np.asarray(Z.alpha(x, g), float)

    Dx = numdiff.jacobian(lambda x: zeta(x, y0), p.x, h)
    Dy = numdiff.jacobian(lambda y: zeta(p.x, y), y0, h)
    T = change_of_basis(p.g, chart, h).T
    alpha = np.asarray(Z.alpha(p.x, p.g), float)
    beta = np.asarray(Z.beta(p.x, p.g), float)
    gamma = Dx.T + (Dy @ T @ xi.T).T + G.ad(xi, beta)
    return np.concatenate([alpha, beta, gamma.ravel()])
