"""Independent reference computations used to cross-check the main modules.

Each routine takes a different numerical route than the code it checks:
truncated power series against closed-form exponentials, integral-curve
transport against coordinate prolongation formulas, flow pullbacks against
Cartan's formula.
"""

from __future__ import annotations

import numpy as np

from . import forms, lie
from .jet import GJetPoint, JetPoint


def matrix_exponential_series(X, terms=30):
    X = np.asarray(X, dtype=float)
    out = np.eye(X.shape[-1])
    term = np.eye(X.shape[-1])
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    return out


def rk4_flow(field, z, t, substeps=8):
    """Integrate ``z' = field(z)`` for time ``t`` with classical RK4."""
    z = np.asarray(z, dtype=float).copy()
    tau = t / substeps
    for _ in range(substeps):
        k1 = field(z)
        k2 = field(z + 0.5 * tau * k1)
        k3 = field(z + 0.5 * tau * k2)
        k4 = field(z + tau * k3)
        z = z + tau * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return z


def lie_derivative_by_flow(Z, a: forms.FormField, z, vectors, eps=1e-5, substeps=4):
    """``d/de (phi_e^* a)`` at ``e = 0`` by a central difference of flow pullbacks."""
    Z = forms.as_vector_field(Z)

    def pulled(e):
        phi = lambda w: rk4_flow(Z, w, e, substeps)
        return forms.pullback(phi, a, a.dim).evaluate(z, vectors)

    return (pulled(eps) - pulled(-eps)) / (2 * eps)


def prolongation_by_bracket(Z, p: JetPoint, h=1e-5):
    """``gamma^A_mu = theta^A([X_mu, Z])`` with a finite-difference bracket on the bundle."""
    n1, N = p.n_base, p.n_fiber

    def Zfield(w):
        return np.concatenate([np.atleast_1d(Z.alpha(w[:n1], w[n1:])), np.atleast_1d(Z.beta(w[:n1], w[n1:]))])

    w0 = np.concatenate([p.x, p.y])
    gamma = np.empty((N, n1))
    for mu in range(n1):
        X = np.zeros(n1 + N)
        X[mu] = 1.0
        X[n1:] = p.v[:, mu]
        br = forms.lie_bracket(X, Zfield, w0, h)
        gamma[:, mu] = br[n1:] - p.v @ br[:n1]
    return gamma


def prolongation_by_transport(Z, p: JetPoint, eps=1e-4, delta=1e-4, substeps=4):
    """Move the holonomic plane at ``p`` along the flow of ``Z`` and difference
    the resulting jet coordinates in the flow parameter."""
    n1, N = p.n_base, p.n_fiber

    def Zfield(w):
        return np.concatenate([np.atleast_1d(Z.alpha(w[:n1], w[n1:])), np.atleast_1d(Z.beta(w[:n1], w[n1:]))])

    def v_after(e):
        A = np.empty((n1, n1))
        Y = np.empty((N, n1))
        for mu in range(n1):
            d = np.zeros(n1 + N)
            d[mu] = 1.0
            d[n1:] = p.v[:, mu]
            w0 = np.concatenate([p.x, p.y])
            wp = rk4_flow(Zfield, w0 + delta * d, e, substeps)
            wm = rk4_flow(Zfield, w0 - delta * d, e, substeps)
            t = (wp - wm) / (2 * delta)
            A[mu] = t[:n1]
            Y[:, mu] = t[n1:]
        # dy(X_mu) = v dx(X_mu)  =>  Y = v A^T
        return np.linalg.solve(A, Y.T).T

    return (v_after(eps) - v_after(-eps)) / (2 * eps)


def _group_flow(Z, x, g, t, group, substeps):
    """Exponential midpoint rule for ``x' = alpha, g' = g hat(beta)``."""
    x = np.asarray(x, dtype=float).copy()
    g = np.asarray(g, dtype=float).copy()
    tau = t / substeps
    for _ in range(substeps):
        a1 = np.asarray(Z.alpha(x, g), float)
        b1 = np.asarray(Z.beta(x, g), float)
        xm = x + 0.5 * tau * a1
        gm = g @ group.exp(0.5 * tau * b1)
        x = x + tau * np.asarray(Z.alpha(xm, gm), float)
        g = g @ group.exp(tau * np.asarray(Z.beta(xm, gm), float))
    return x, g


def prolongation_by_transport_group(Z, p: GJetPoint, group=lie.SE3, eps=1e-4, delta=1e-4, substeps=4):
    """Chart-free transport of the holonomic plane on ``M x G``.

    The plane spanned by ``X_mu = d/dx^mu + xi^B_mu e_B`` is pushed forward by
    the flow of ``Z``; the new ``xi`` is read off with the Maurer-Cartan form
    at the transported point, and differenced in the flow time. Returns
    ``gamma[mu]`` as algebra elements.
    """
    n1 = p.n_base
    xi = np.asarray(p.xi, dtype=float)

    def xi_after(e):
        _, g_e = _group_flow(Z, p.x, p.g, e, group, substeps)
        A = np.empty((n1, n1))
        Lam = np.empty((n1, group.dim))
        for mu in range(n1):
            xp, gp = _group_flow(Z, p.x + delta * np.eye(n1)[mu], p.g @ group.exp(delta * xi[mu]), e, group, substeps)
            xm, gm = _group_flow(Z, p.x - delta * np.eye(n1)[mu], p.g @ group.exp(-delta * xi[mu]), e, group, substeps)
            A[mu] = (xp - xm) / (2 * delta)
            Lam[mu] = group.maurer_cartan(g_e, (gp - gm) / (2 * delta))
        return np.linalg.solve(A, Lam)

    return (xi_after(eps) - xi_after(-eps)) / (2 * eps)
