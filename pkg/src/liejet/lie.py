"""Closed-form linear algebra of SE(3) and se(3).

Conventions
-----------
Algebra elements are 6-vectors ``(omega, v)`` with the angular part first.
Covectors are 6-vectors ``(m, n)`` paired as ``m.omega + n.v``. Group
elements are 4x4 homogeneous matrices ``[[R, r], [0, 1]]``.

Every function broadcasts over leading axes, so a whole grid of elements
``(..., 6)`` or ``(..., 4, 4)`` can be processed in one call.
"""

from __future__ import annotations

import numpy as np

SMALL_ANGLE = 1e-4
ORTHO_TOL = 1e-9
SKEW_TOL = 1e-9


def skew(w):
    """Skew-symmetric matrix of a 3-vector (batched)."""
    w = np.asarray(w, dtype=float)
    S = np.zeros(w.shape[:-1] + (3, 3))
    S[..., 0, 1] = -w[..., 2]
    S[..., 0, 2] = w[..., 1]
    S[..., 1, 0] = w[..., 2]
    S[..., 1, 2] = -w[..., 0]
    S[..., 2, 0] = -w[..., 1]
    S[..., 2, 1] = w[..., 0]
    return S


def unskew(S):
    S = np.asarray(S, dtype=float)
    return np.stack([S[..., 2, 1], S[..., 0, 2], S[..., 1, 0]], axis=-1)


def cross(a, b):
    # np.cross is slow for small batches; this is the same formula
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack(
        [
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ],
        axis=-1,
    )


def hat(xi):
    """Map ``(omega, v)`` to the 4x4 matrix ``[[skew(omega), v], [0, 0]]``."""
    xi = np.asarray(xi, dtype=float)
    X = np.zeros(xi.shape[:-1] + (4, 4))
    X[..., :3, :3] = skew(xi[..., :3])
    X[..., :3, 3] = xi[..., 3:]
    return X


def vee(X):
    """Inverse of :func:`hat`.

    Raises
    ------
    ValueError
        If the rotational block is not skew-symmetric to within 1e-9.
    """
    X = np.asarray(X, dtype=float)
    W = X[..., :3, :3]
    asym = np.abs(W + np.swapaxes(W, -1, -2))
    if asym.size and asym.max() > SKEW_TOL:
        raise ValueError(f"rotation block is not skew-symmetric (defect {asym.max():.3e})")
    return np.concatenate([unskew(W), X[..., :3, 3]], axis=-1)


def identity(shape=()):
    return np.broadcast_to(np.eye(4), tuple(shape) + (4, 4)).copy()


def make_group(R, r):
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    H = np.zeros(np.broadcast_shapes(R.shape[:-2], r.shape[:-1]) + (4, 4))
    H[..., :3, :3] = R
    H[..., :3, 3] = r
    H[..., 3, 3] = 1.0
    return H


def inverse(H):
    H = np.asarray(H, dtype=float)
    R = H[..., :3, :3]
    Rt = np.swapaxes(R, -1, -2)
    return make_group(Rt, -np.einsum("...ij,...j->...i", Rt, H[..., :3, 3]))


def _rodrigues_coefficients(theta):
    """Return sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3 with a series near zero."""
    theta = np.asarray(theta, dtype=float)
    t2 = theta * theta
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1 - t2 / 6 + t2**2 / 120 - t2**3 / 5040, np.sin(safe) / safe)
    b = np.where(
        small,
        0.5 - t2 / 24 + t2**2 / 720 - t2**3 / 40320,
        (1 - np.cos(safe)) / safe**2,
    )
    c = np.where(
        small,
        1 / 6 - t2 / 120 + t2**2 / 5040 - t2**3 / 362880,
        (safe - np.sin(safe)) / safe**3,
    )
    return a, b, c


def exp_so3(w):
    w = np.asarray(w, dtype=float)
    a, b, _ = _rodrigues_coefficients(np.linalg.norm(w, axis=-1))
    W = skew(w)
    return np.eye(3) + a[..., None, None] * W + b[..., None, None] * (W @ W)


def exp_group(xi):
    """Group exponential of ``(omega, v)`` in closed form."""
    xi = np.asarray(xi, dtype=float)
    w = xi[..., :3]
    a, b, c = _rodrigues_coefficients(np.linalg.norm(w, axis=-1))
    W = skew(w)
    W2 = W @ W
    eye = np.eye(3)
    R = eye + a[..., None, None] * W + b[..., None, None] * W2
    V = eye + b[..., None, None] * W + c[..., None, None] * W2
    return make_group(R, np.einsum("...ij,...j->...i", V, xi[..., 3:]))


def rotation_angle(R):
    R = np.asarray(R, dtype=float)
    s = 0.5 * np.linalg.norm(unskew(R - np.swapaxes(R, -1, -2)), axis=-1)
    c = 0.5 * (np.trace(R, axis1=-2, axis2=-1) - 1.0)
    return np.arctan2(s, c)


def log_so3(R):
    """Rotation vector of ``R``.

    Near the angle pi the axis comes from the symmetric part of ``R``,
    with its sign taken from the (small) antisymmetric part.
    """
    R = np.asarray(R, dtype=float)
    batch = R.shape[:-2]
    Rf = R.reshape(-1, 3, 3)
    theta = rotation_angle(Rf)
    anti = 0.5 * unskew(Rf - np.swapaxes(Rf, -1, -2))
    out = np.empty((Rf.shape[0], 3))

    a, _, _ = _rodrigues_coefficients(theta)
    near_pi = theta > 2.5
    regular = ~near_pi
    out[regular] = anti[regular] / a[regular, None]

    for k in np.flatnonzero(near_pi):
        th = theta[k]
        sym = 0.5 * (Rf[k] + Rf[k].T)
        uu = (sym - np.cos(th) * np.eye(3)) / (1.0 - np.cos(th))
        i = int(np.argmax(np.diag(uu)))
        u = uu[:, i] / np.sqrt(uu[i, i])
        if np.dot(u, anti[k]) < 0:
            u = -u
        out[k] = th * u
    return out.reshape(batch + (3,))


def log_group(H):
    """Inverse of :func:`exp_group` for rotation angles below pi."""
    H = np.asarray(H, dtype=float)
    w = log_so3(H[..., :3, :3])
    theta = np.linalg.norm(w, axis=-1)
    t2 = theta * theta
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    half = 0.5 * safe
    d = np.where(
        small,
        1 / 12 + t2 / 720 + t2**2 / 30240 + t2**3 / 1209600,
        (1 - half * np.cos(half) / np.sin(half)) / safe**2,
    )
    W = skew(w)
    Vinv = np.eye(3) - 0.5 * W + d[..., None, None] * (W @ W)
    v = np.einsum("...ij,...j->...i", Vinv, H[..., :3, 3])
    return np.concatenate([w, v], axis=-1)


def ad(a, b):
    """Algebra bracket ``(w1 x w2, w1 x v2 - w2 x v1)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w1, v1 = a[..., :3], a[..., 3:]
    w2, v2 = b[..., :3], b[..., 3:]
    return np.concatenate([cross(w1, w2), cross(w1, v2) - cross(w2, v1)], axis=-1)


def ad_star(a, mu):
    """Coadjoint action ``(m x w + n x v, n x w)``; dual to ``ad(a, .)``."""
    a = np.asarray(a, dtype=float)
    mu = np.asarray(mu, dtype=float)
    w, v = a[..., :3], a[..., 3:]
    m, n = mu[..., :3], mu[..., 3:]
    return np.concatenate([cross(m, w) + cross(n, v), cross(n, w)], axis=-1)


def ad_matrix(a):
    """6x6 matrix of ``ad(a, .)``."""
    a = np.asarray(a, dtype=float)
    M = np.zeros(a.shape[:-1] + (6, 6))
    W = skew(a[..., :3])
    M[..., :3, :3] = W
    M[..., 3:, 3:] = W
    M[..., 3:, :3] = skew(a[..., 3:])
    return M


def Ad(H, xi):
    """Adjoint action, computed as ``vee(H hat(xi) H^-1)``."""
    H = np.asarray(H, dtype=float)
    X = H @ hat(xi) @ inverse(H)
    X[..., :3, :3] = 0.5 * (X[..., :3, :3] - np.swapaxes(X[..., :3, :3], -1, -2))
    return vee(X)


def Ad_matrix(H):
    """6x6 matrix of ``Ad(H, .)``: ``[[R, 0], [skew(r) R, R]]``."""
    H = np.asarray(H, dtype=float)
    R = H[..., :3, :3]
    M = np.zeros(H.shape[:-2] + (6, 6))
    M[..., :3, :3] = R
    M[..., 3:, 3:] = R
    M[..., 3:, :3] = skew(H[..., :3, 3]) @ R
    return M


def Ad_star_inv(H, mu):
    """Coadjoint action of ``H^-1``: ``(R m + r x R n, R n)``."""
    H = np.asarray(H, dtype=float)
    mu = np.asarray(mu, dtype=float)
    R = H[..., :3, :3]
    r = H[..., :3, 3]
    Rm = np.einsum("...ij,...j->...i", R, mu[..., :3])
    Rn = np.einsum("...ij,...j->...i", R, mu[..., 3:])
    return np.concatenate([Rm + cross(r, Rn), Rn], axis=-1)


def Ad_star(H, mu):
    """Coadjoint action of ``H`` itself, by inverting the argument."""
    return Ad_star_inv(inverse(H), mu)


def pairing(mu, xi):
    return np.sum(np.asarray(mu, dtype=float) * np.asarray(xi, dtype=float), axis=-1)


def _check_tangent(T):
    T = np.asarray(T, dtype=float)
    bottom = np.abs(T[..., 3, :])
    if bottom.size and bottom.max() > SKEW_TOL:
        raise ValueError(f"tangent has nonzero bottom row ({bottom.max():.3e})")
    return T


def maurer_cartan(H, tangent):
    """Left Maurer-Cartan form: ``vee(H^-1 tangent)``."""
    T = _check_tangent(tangent)
    X = inverse(H) @ T
    X[..., :3, :3] = 0.5 * (X[..., :3, :3] - np.swapaxes(X[..., :3, :3], -1, -2))
    return vee(X)


def maurer_cartan_right(H, tangent):
    """Right Maurer-Cartan form: ``vee(tangent H^-1)``."""
    T = _check_tangent(tangent)
    X = T @ inverse(H)
    X[..., :3, :3] = 0.5 * (X[..., :3, :3] - np.swapaxes(X[..., :3, :3], -1, -2))
    return vee(X)


def orthonormality_error(H):
    R = np.asarray(H, dtype=float)[..., :3, :3]
    E = np.swapaxes(R, -1, -2) @ R - np.eye(3)
    return np.abs(E).max(axis=(-2, -1))


def project(H, tol=ORTHO_TOL):
    """Repair rotation drift with one Newton step toward the polar factor.

    Only elements whose ``|R^T R - I|`` exceeds ``tol`` are touched.
    """
    H = np.array(H, dtype=float)
    bad = orthonormality_error(H) > tol
    if np.any(bad):
        R = H[..., :3, :3][bad]
        H[..., :3, :3][bad] = 0.5 * (R + np.swapaxes(np.linalg.inv(R), -1, -2))
    return H


class SE3Group:
    """SE(3) as a matrix group; bundles the module functions."""

    dim = 6
    size = 4
    name = "SE3"

    hat = staticmethod(hat)
    vee = staticmethod(vee)
    exp = staticmethod(exp_group)
    log = staticmethod(log_group)
    inverse = staticmethod(inverse)
    ad = staticmethod(ad)
    ad_star = staticmethod(ad_star)
    Ad = staticmethod(Ad)
    Ad_matrix = staticmethod(Ad_matrix)
    Ad_star_inv = staticmethod(Ad_star_inv)
    Ad_star = staticmethod(Ad_star)

    def identity(self):
        return np.eye(4)

    def maurer_cartan(self, g, tangent):
        return maurer_cartan(g, tangent)

    def maurer_cartan_right(self, g, tangent):
        return maurer_cartan_right(g, tangent)

    def chart_angle(self, g):
        return float(rotation_angle(np.asarray(g)[:3, :3]))


class TranslationGroup:
    """The abelian group (R^N, +) embedded as translations ``[[I, t], [0, 1]]``."""

    name = "Rn"

    def __init__(self, n):
        self.dim = int(n)
        self.size = self.dim + 1

    def identity(self):
        return np.eye(self.size)

    def hat(self, v):
        v = np.asarray(v, dtype=float)
        X = np.zeros(v.shape[:-1] + (self.size, self.size))
        X[..., : self.dim, self.dim] = v
        return X

    def vee(self, X):
        return np.asarray(X, dtype=float)[..., : self.dim, self.dim]

    def exp(self, v):
        return np.eye(self.size) + self.hat(v)

    def log(self, g):
        return self.vee(g)

    def inverse(self, g):
        return np.eye(self.size) - self.hat(self.vee(g))

    def ad(self, a, b):
        return np.zeros(np.broadcast_shapes(np.shape(a), np.shape(b)))

    def ad_star(self, a, mu):
        return np.zeros(np.broadcast_shapes(np.shape(a), np.shape(mu)))

    def Ad(self, g, xi):
        return np.asarray(xi, dtype=float)

    def Ad_matrix(self, g):
        return np.eye(self.dim)

    def Ad_star_inv(self, g, mu):
        return np.asarray(mu, dtype=float)

    def Ad_star(self, g, mu):
        return np.asarray(mu, dtype=float)

    def maurer_cartan(self, g, tangent):
        return self.vee(tangent)

    def maurer_cartan_right(self, g, tangent):
        return self.vee(tangent)

    def chart_angle(self, g):
        return 0.0


SE3 = SE3Group()
