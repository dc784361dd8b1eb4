"""Central finite differences shared by the form, jet and variational code."""

from __future__ import annotations

import numpy as np

DEFAULT_STEP = 1e-5


def scaled_steps(z, h=DEFAULT_STEP):
    """Per-variable steps ``h * max(1, |z_i|)``."""
    z = np.asarray(z, dtype=float)
    return np.broadcast_to(np.asarray(h, dtype=float), z.shape) * np.maximum(1.0, np.abs(z))


def jacobian(f, z, h=DEFAULT_STEP, scale=True):
    """Central-difference Jacobian of ``f`` at ``z``.

    The result has shape ``f(z).shape + z.shape``. With ``scale=True`` each
    variable gets the step ``h * max(1, |z_i|)``; otherwise ``h`` is used as
    given (scalar or one entry per variable).
    """
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    steps = scaled_steps(flat, h) if scale else np.broadcast_to(np.asarray(h, float), flat.shape)
    cols = []
    for i in range(flat.size):
        zp = flat.copy()
        zm = flat.copy()
        zp[i] += steps[i]
        zm[i] -= steps[i]
        width = zp[i] - zm[i]
        fp = np.asarray(f(zp.reshape(z.shape)), dtype=float)
        fm = np.asarray(f(zm.reshape(z.shape)), dtype=float)
        cols.append((fp - fm) / width)
    out = np.stack(cols, axis=-1)
    return out.reshape(out.shape[:-1] + z.shape)


def gradient(f, z, h=DEFAULT_STEP, scale=True):
    """Gradient of a scalar function; same shape as ``z``."""
    return jacobian(f, z, h, scale)


def directional(f, z, direction, h):
    """Central difference of ``f`` along ``direction`` with step ``h``."""
    z = np.asarray(z, dtype=float)
    d = np.asarray(direction, dtype=float)
    fp = np.asarray(f(z + h * d), dtype=float)
    fm = np.asarray(f(z - h * d), dtype=float)
    return (fp - fm) / (2.0 * h)


def axis_steps(h, n):
    """Broadcast a scalar or per-axis step to ``n`` entries."""
    return np.broadcast_to(np.asarray(h, dtype=float), (n,)).copy()


def richardson_ratio(residual, h):
    """``|r(h)| / |r(h/2)|`` for a residual function of the step size.

    Norms are max-norms over whatever array ``residual`` returns.
    """
    r1 = np.max(np.abs(residual(h)))
    r2 = np.max(np.abs(residual(h / 2)))
    if r2 == 0.0:
        return np.inf if r1 > 0 else np.nan
    return float(r1 / r2)
