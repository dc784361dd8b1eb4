"""Geometrically exact beam on SE(3), integrated by the method of lines.

Unknowns on a uniform grid ``s_i`` are the left velocity ``chi`` and left
strain ``eps`` (both ``(omega, v)``, shape ``(n_s, 6)``) and the
configuration ``H`` (shape ``(n_s, 4, 4)``). The equations are

    d_t pi  = -d_s sigma + ad*_eps sigma + ad*_chi pi,   pi = J chi
    d_t eps =  d_s chi - ad(chi, eps),                   sigma = -C (eps - eps0)

advanced with classical RK4; ``H`` follows with
``H <- H exp(dt (chi_n + chi_{n+1}) / 2)``.

Central differences on a collocated grid leave the odd-even grid mode
undamped; a fourth-difference dissipation term of size
``dissipation * v_max * ds^3`` removes it without lowering the order.

With ``n_s == 1`` every ``d_s`` term is dropped and the solver reduces to
the free rigid body.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import lie
from .variational import ReducedHamiltonian, ReducedLagrangian

BOUNDARY_KINDS = ("free", "clamped")
INSTABILITY_FACTOR = 10.0
REFERENCE_STRAIN = np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0])

# ad(a, b) and ad*_a mu as (n, 36) @ (36, 6) products
_STRUCT = np.stack([lie.ad(np.eye(6)[i], np.eye(6)) for i in range(6)])  # [i, j, k]
_AD_ROWS = _STRUCT.reshape(36, 6)
_ADSTAR_ROWS = np.transpose(_STRUCT, (0, 2, 1)).reshape(36, 6)


def _ad(a, b):
    return (a[:, :, None] * b[:, None, :]).reshape(-1, 36) @ _AD_ROWS


def _ad_star(a, mu):
    return (a[:, :, None] * mu[:, None, :]).reshape(-1, 36) @ _ADSTAR_ROWS


class BeamInstability(RuntimeError):
    """Raised when the total energy exceeds ten times its initial value."""

    def __init__(self, message, state=None, diagnostics=None):
        super().__init__(message)
        self.state = state
        self.diagnostics = diagnostics


@dataclass
class BeamConfig:
    """Parameters of a beam run.

    ``chi_uniform + cos(pi s / L) * chi_cosine`` is the initial velocity.
    ``eps_initial`` overrides the initial strain (default ``eps0``); the
    initial configuration is ``H(s) = exp(s eps_initial)`` so that it is
    compatible with the strain.
    """

    length: float = 1.0
    n_s: int = 100
    n_t: int = 10000
    dt: float = 0.002
    J: np.ndarray = field(default_factory=lambda: np.eye(6))
    C: np.ndarray = field(default_factory=lambda: np.eye(6))
    eps0: np.ndarray = field(default_factory=lambda: REFERENCE_STRAIN.copy())
    bc: tuple = ("free", "free")
    chi_uniform: np.ndarray = field(default_factory=lambda: np.zeros(6))
    chi_cosine: np.ndarray = field(default_factory=lambda: np.array([0.2, 0.0, 0.0, 0.0, 0.1, 0.05]))
    eps_initial: np.ndarray | None = None
    output_every: int = 100
    c_safety: float = 1.0
    dissipation: float = 0.5
    seed: int = 42

    def __post_init__(self):
        self.J = np.asarray(self.J, dtype=float)
        self.C = np.asarray(self.C, dtype=float)
        self.eps0 = np.asarray(self.eps0, dtype=float)
        self.chi_uniform = np.asarray(self.chi_uniform, dtype=float)
        self.chi_cosine = np.asarray(self.chi_cosine, dtype=float)
        if self.eps_initial is not None:
            self.eps_initial = np.asarray(self.eps_initial, dtype=float)
        self.bc = tuple(self.bc)

    @property
    def ds(self) -> float:
        return self.length / (self.n_s - 1) if self.n_s > 1 else 0.0

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_s) if self.n_s > 1 else np.zeros(1)

    @property
    def wave_speed(self) -> float:
        """``sqrt(max eig C / min eig J)``."""
        cmax = max(float(np.max(np.linalg.eigvalsh(self.C))), 0.0)
        return float(np.sqrt(cmax / np.min(np.linalg.eigvalsh(self.J))))

    @property
    def dt_max(self) -> float:
        v = self.wave_speed
        if self.n_s == 1 or v == 0.0:
            return np.inf
        return self.c_safety * self.ds / v

    def validate(self) -> "BeamConfig":
        """Raise ``ValueError`` on any inconsistent field."""
        for name in ("J", "C"):
            M = getattr(self, name)
            if M.shape != (6, 6):
                raise ValueError(f"{name} must be 6x6, got shape {M.shape}")
            if not np.allclose(M, M.T, rtol=0, atol=1e-12):
                raise ValueError(f"{name} must be symmetric")
        try:
            np.linalg.cholesky(self.J)
        except np.linalg.LinAlgError:
            raise ValueError("J must be positive definite (Cholesky failed)") from None
        # C = 0 is the rigid-body limit, so semidefinite is allowed
        if np.min(np.linalg.eigvalsh(self.C)) < -1e-12:
            raise ValueError("C must be positive semidefinite")
        for name in ("eps0", "chi_uniform", "chi_cosine"):
            if getattr(self, name).shape != (6,):
                raise ValueError(f"{name} must have 6 components")
        if self.eps_initial is not None and self.eps_initial.shape not in ((6,), (self.n_s, 6)):
            raise ValueError("eps_initial must have shape (6,) or (n_s, 6)")
        if self.n_s < 1 or (1 < self.n_s < 3):
            raise ValueError("n_s must be 1 (rigid body) or at least 3")
        if self.n_t < 1:
            raise ValueError("n_t must be positive")
        if self.output_every < 1:
            raise ValueError("output_every must be positive")
        if not self.length > 0:
            raise ValueError("length must be positive")
        if len(self.bc) != 2 or any(b not in BOUNDARY_KINDS for b in self.bc):
            raise ValueError(f"bc must be a pair drawn from {BOUNDARY_KINDS}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.dissipation >= 0:
            raise ValueError("dissipation must be non-negative")
        if self.dt > self.dt_max * (1 + 1e-12):
            raise ValueError(
                f"dt = {self.dt:g} violates the CFL bound dt <= c_safety*ds/v_max = "
                f"{self.c_safety:g}*{self.ds:g}/{self.wave_speed:g} = {self.dt_max:g}"
            )
        return self

    def refined(self, factor: int = 2) -> "BeamConfig":
        """Same final time with ``ds`` and ``dt`` divided by ``factor``."""
        return replace(
            self,
            n_s=(self.n_s - 1) * factor + 1,
            n_t=self.n_t * factor,
            dt=self.dt / factor,
            output_every=self.output_every * factor,
        )


@dataclass(frozen=True)
class BeamState:
    t: float
    H: np.ndarray
    chi: np.ndarray
    eps: np.ndarray


# Spatial operators


def d_s(f: np.ndarray, ds: float) -> np.ndarray:
    """Second-order derivative along axis 0: central inside, one-sided at the ends."""
    if f.shape[0] == 1:
        return np.zeros_like(f)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * ds)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * ds)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * ds)
    return out


def fourth_difference(f: np.ndarray) -> np.ndarray:
    """``f[i+2] - 4 f[i+1] + 6 f[i] - 4 f[i-1] + f[i-2]``; zero within two nodes of an end."""
    out = np.zeros_like(f)
    if f.shape[0] >= 5:
        out[2:-2] = f[4:] - 4 * f[3:-1] + 6 * f[2:-2] - 4 * f[1:-3] + f[:-4]
    return out


def quadrature_weights(n_s: int, ds: float) -> np.ndarray:
    """Trapezoidal weights for integrals over ``s``; a single node has weight 1."""
    if n_s == 1:
        return np.ones(1)
    w = np.full(n_s, ds)
    w[[0, -1]] = ds / 2
    return w


# Dynamics


def initial_reference(cfg: BeamConfig) -> BeamState:
    s = cfg.s
    eps = np.broadcast_to(cfg.eps0 if cfg.eps_initial is None else cfg.eps_initial, (cfg.n_s, 6)).copy()
    if cfg.eps_initial is None or cfg.eps_initial.ndim == 1:
        H = lie.exp_group(s[:, None] * eps[0])
    else:
        H = np.empty((cfg.n_s, 4, 4))
        H[0] = np.eye(4)
        for i in range(1, cfg.n_s):
            H[i] = H[i - 1] @ lie.exp_group(0.5 * cfg.ds * (eps[i - 1] + eps[i]))
    profile = np.cos(np.pi * s / cfg.length) if cfg.n_s > 1 else np.ones(1)
    chi = cfg.chi_uniform + profile[:, None] * cfg.chi_cosine
    chi, eps = apply_boundary(cfg, chi, eps)
    return BeamState(0.0, H, chi, eps)


def apply_boundary(cfg: BeamConfig, chi, eps):
    """Free end: ``sigma = 0``, i.e. ``eps = eps0``. Clamped end: ``chi = 0``."""
    if cfg.n_s == 1:
        return chi, eps
    chi = chi.copy()
    eps = eps.copy()
    for end, kind in zip((0, -1), cfg.bc):
        if kind == "free":
            eps[end] = cfg.eps0
        else:
            chi[end] = 0.0
    return chi, eps


def momenta(cfg: BeamConfig, chi, eps):
    """Left momenta ``(pi, sigma) = (J chi, -C (eps - eps0))``."""
    return chi @ cfg.J.T, -(eps - cfg.eps0) @ cfg.C.T


def rhs(cfg: BeamConfig, chi, eps):
    """``(d_t chi, d_t eps)`` of the semi-discrete system (boundary values imposed first)."""
    chi, eps = apply_boundary(cfg, chi, eps)
    pi, sigma = momenta(cfg, chi, eps)
    dpi = -d_s(sigma, cfg.ds) + lie.ad_star(eps, sigma) + lie.ad_star(chi, pi)
    dchi = dpi @ np.linalg.inv(cfg.J).T
    deps = d_s(chi, cfg.ds) - lie.ad(chi, eps)
    if cfg.dissipation > 0 and cfg.n_s >= 5:
        k = cfg.dissipation * cfg.wave_speed / (16 * cfg.ds)
        dchi -= k * fourth_difference(chi)
        deps -= k * fourth_difference(eps)
    return dchi, deps


def _difference_matrix(n: int, ds: float) -> np.ndarray:
    return d_s(np.eye(n), ds) if n > 1 else np.zeros((1, 1))


class _System:
    """:func:`rhs` on the packed state ``Y = [chi | eps]``, shape ``(n_s, 12)``.

    The algebraic terms are a quadratic form in ``Z = [Y | 1]``, assembled
    once by polarization; the derivative terms are a single product with
    the stacked difference matrices.
    """

    def __init__(self, cfg: BeamConfig):
        self.cfg = cfg
        n = cfg.n_s
        Jinv = np.linalg.inv(cfg.J)
        J, C, e0 = cfg.J, cfg.C, cfg.eps0

        def quadratic(z):
            chi, eps, one = z[:6], z[6:12], z[12]
            pi, sigma = J @ chi, -C @ (eps - one * e0)
            return np.concatenate([Jinv @ (lie.ad_star(eps, sigma) + lie.ad_star(chi, pi)), -lie.ad(chi, eps)])

        E = np.eye(13)
        T = np.zeros((13, 13, 12))
        for a in range(13):
            T[a, a] = quadratic(E[a])
            for b in range(a + 1, 13):
                T[a, b] = quadratic(E[a] + E[b]) - quadratic(E[a]) - quadratic(E[b])
        self.T = T.reshape(169, 12)
        # d_t chi gets -J^-1 D sigma = J^-1 C D eps, d_t eps gets D chi
        M = np.zeros((12, 12))
        M[6:, :6] = (Jinv @ C).T
        M[:6, 6:] = np.eye(6)
        self.M = M
        k = cfg.dissipation * cfg.wave_speed / (16 * cfg.ds) if n >= 5 else 0.0
        self.D = np.hstack([_difference_matrix(n, cfg.ds), -k * fourth_difference(np.eye(n))])
        self.Z = np.ones((n, 13))
        self.eps0 = e0
        ends = list(zip((0, -1), cfg.bc)) if n > 1 else []
        self.free = [e for e, kind in ends if kind == "free"]
        self.clamped = [e for e, kind in ends if kind == "clamped"]

    def bc(self, Y):
        for end in self.free:
            Y[end, 6:] = self.eps0
        for end in self.clamped:
            Y[end, :6] = 0.0
        return Y

    def __call__(self, Y):
        Z = self.Z
        Z[:, :12] = Y
        Y = self.bc(Z[:, :12])
        quad = (Z[:, :, None] * Z[:, None, :]).reshape(-1, 169) @ self.T
        return quad + self.D @ np.vstack([Y @ self.M, Y])


def step(cfg: BeamConfig, state: BeamState, dt: float | None = None, _system=None) -> BeamState:
    """One RK4 step of ``(chi, eps)`` followed by the group update of ``H``."""
    dt = cfg.dt if dt is None else dt
    f = _System(cfg) if _system is None else _system
    Y0 = np.hstack([state.chi, state.eps])
    k1 = f(Y0)
    k2 = f(Y0 + 0.5 * dt * k1)
    k3 = f(Y0 + 0.5 * dt * k2)
    k4 = f(Y0 + dt * k3)
    Y = f.bc(Y0 + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6)
    chi, eps = Y[:, :6], Y[:, 6:]
    H = lie.project(state.H @ lie.exp_group(0.5 * dt * (state.chi + chi)))
    return BeamState(state.t + dt, H, chi, eps)


# Diagnostics


def spatial_momenta(cfg: BeamConfig, state: BeamState):
    """``(sigma_R, pi_R) = Ad*_{H^-1} (sigma_L, pi_L)``."""
    pi, sigma = momenta(cfg, state.chi, state.eps)
    return lie.Ad_star_inv(state.H, sigma), lie.Ad_star_inv(state.H, pi)


def energy(cfg: BeamConfig, state: BeamState) -> float:
    """Kinetic plus elastic energy with the :func:`quadrature_weights`."""
    de = state.eps - cfg.eps0
    density = 0.5 * np.einsum("ij,jk,ik->i", state.chi, cfg.J, state.chi)
    density += 0.5 * np.einsum("ij,jk,ik->i", de, cfg.C, de)
    return float(quadrature_weights(cfg.n_s, cfg.ds) @ density)


def total_momentum(cfg: BeamConfig, state: BeamState) -> np.ndarray:
    """``int pi_R ds``; for ``n_s == 1`` this is ``pi_R`` itself."""
    _, pi_R = spatial_momenta(cfg, state)
    return quadrature_weights(cfg.n_s, cfg.ds) @ pi_R


def momentum_scale(cfg: BeamConfig, state: BeamState) -> float:
    """``max(|P|, int |pi_R| ds)``, a nonzero scale for relative drift."""
    _, pi_R = spatial_momenta(cfg, state)
    w = quadrature_weights(cfg.n_s, cfg.ds)
    return float(max(np.linalg.norm(w @ pi_R), w @ np.linalg.norm(pi_R, axis=1)))


def _backward_dt(a, b, c, dt):
    """Second-order one-sided time derivative at the newest level ``c``."""
    return (3 * c - 4 * b + a) / (2 * dt)


def _conservation(ds, dt, sig_c, pis):
    return d_s(sig_c, ds) + _backward_dt(*pis, dt)


def _cell(ds, dt, s0, p0, s1, p1):
    sig = 0.5 * (s0 + s1)
    return (sig[1:] - sig[:-1]) / ds + 0.5 * ((p1[1:] + p1[:-1]) - (p0[1:] + p0[:-1])) / dt


def conservation_field(cfg: BeamConfig, states, dt: float) -> np.ndarray:
    """``d_s sigma_R + d_t pi_R`` at the newest of three consecutive states."""
    mom = [spatial_momenta(cfg, st) for st in states]
    return _conservation(cfg.ds, dt, mom[2][0], [m[1] for m in mom])


def compatibility_field(cfg: BeamConfig, states, dt: float) -> np.ndarray:
    """``d_s chi - d_t eps - ad(chi, eps)`` at the newest of three states."""
    a, b, c = states
    return d_s(c.chi, cfg.ds) - _backward_dt(a.eps, b.eps, c.eps, dt) - _ad(c.chi, c.eps)


def right_compatibility_field(cfg: BeamConfig, states, dt: float) -> np.ndarray:
    """``d_s chi_R - d_t eps_R - ad(eps_R, chi_R)`` with right variables ``Ad_H``."""
    chiR = [lie.Ad(st.H, st.chi) for st in states]
    epsR = [lie.Ad(st.H, st.eps) for st in states]
    return d_s(chiR[2], cfg.ds) - _backward_dt(*epsR, dt) - _ad(epsR[2], chiR[2])


def cell_residual(cfg: BeamConfig, before: BeamState, after: BeamState, dt: float) -> np.ndarray:
    """Circulation of ``J = sigma_R dt - pi_R ds`` around each grid cell, per unit area.

    Shape ``(n_s - 1, 6)``; this is the discrete ``d(sigma^* J)``.
    """
    s0, p0 = spatial_momenta(cfg, before)
    s1, p1 = spatial_momenta(cfg, after)
    return _cell(cfg.ds, dt, s0, p0, s1, p1)


def _max(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def _nanmax(v) -> float:
    v = np.asarray(v, dtype=float)
    v = v[np.isfinite(v)]
    return float(v.max()) if v.size else 0.0


@dataclass
class Diagnostics:
    """Per-step series.

    Residuals from three time levels are ``nan`` for the first two steps,
    the cell residual for the first one.
    """

    t: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    momentum: list = field(default_factory=list)
    conservation: list = field(default_factory=list)
    compatibility: list = field(default_factory=list)
    cell: list = field(default_factory=list)
    ortho: list = field(default_factory=list)
    momentum_scale: float = 0.0

    SERIES = ("t", "energy", "momentum", "conservation", "compatibility", "cell", "ortho")

    def as_arrays(self) -> dict:
        return {k: np.asarray(getattr(self, k)) for k in self.SERIES}

    def _rel(self, dP) -> np.ndarray:
        scale = self.momentum_scale if self.momentum_scale > 0 else 1.0
        return np.linalg.norm(dP, axis=-1) / scale

    @property
    def momentum_drift(self) -> float:
        """Net relative change ``|P(t_end) - P(0)| / scale``."""
        P = np.asarray(self.momentum)
        return float(self._rel(P[-1] - P[0]))

    @property
    def momentum_excursion(self) -> float:
        """Largest relative deviation ``max_t |P(t) - P(0)| / scale``."""
        P = np.asarray(self.momentum)
        return float(np.max(self._rel(P - P[0])))

    @property
    def energy_drift(self) -> float:
        """Net relative energy change over the run."""
        E = np.asarray(self.energy)
        return float(abs(E[-1] - E[0]) / max(abs(E[0]), 1e-300))

    @property
    def energy_excursion(self) -> float:
        E = np.asarray(self.energy)
        return float(np.max(np.abs(E - E[0])) / max(abs(E[0]), 1e-300))

    def summary(self) -> dict:
        return {
            "energy_initial": float(self.energy[0]),
            "energy_final": float(self.energy[-1]),
            "energy_drift_relative": self.energy_drift,
            "energy_excursion_relative": self.energy_excursion,
            "momentum_initial": [float(v) for v in self.momentum[0]],
            "momentum_final": [float(v) for v in self.momentum[-1]],
            "momentum_scale": float(self.momentum_scale),
            "momentum_drift_relative": self.momentum_drift,
            "momentum_excursion_relative": self.momentum_excursion,
            "max_conservation_residual": _nanmax(self.conservation),
            "max_compatibility_residual": _nanmax(self.compatibility),
            "max_cell_residual": _nanmax(self.cell),
            "max_orthonormality_error": _nanmax(self.ortho),
        }


class Monitor:
    """Accumulates :class:`Diagnostics` from consecutive states."""

    def __init__(self, cfg: BeamConfig, dt: float | None = None):
        self.cfg = cfg
        self.dt = cfg.dt if dt is None else dt
        self.w = quadrature_weights(cfg.n_s, cfg.ds)
        self.window: list = []  # (state, sigma_R, pi_R)
        self.diag = Diagnostics()

    @property
    def states(self) -> list:
        return [w[0] for w in self.window]

    def push(self, state: BeamState) -> None:
        cfg, d, dt = self.cfg, self.diag, self.dt
        sR, pR = spatial_momenta(cfg, state)
        if not d.t:
            d.momentum_scale = float(max(np.linalg.norm(self.w @ pR), self.w @ np.linalg.norm(pR, axis=1)))
        d.t.append(state.t)
        d.energy.append(energy(cfg, state))
        d.momentum.append(self.w @ pR)
        d.ortho.append(float(np.max(lie.orthonormality_error(state.H))))
        if self.window and cfg.n_s > 1:
            _, s0, p0 = self.window[-1]
            d.cell.append(_max(_cell(cfg.ds, dt, s0, p0, sR, pR)))
        else:
            d.cell.append(0.0 if self.window else np.nan)
        self.window = (self.window + [(state, sR, pR)])[-3:]
        if len(self.window) == 3:
            d.conservation.append(_max(_conservation(cfg.ds, dt, sR, [w[2] for w in self.window])))
            d.compatibility.append(_max(compatibility_field(cfg, self.states, dt)))
        else:
            d.conservation.append(np.nan)
            d.compatibility.append(np.nan)


def conservation_report(cfg: BeamConfig, history, dt: float | None = None) -> Diagnostics:
    """Diagnostics for a list of at least three consecutive states."""
    if len(history) < 3:
        raise ValueError("conservation_report needs at least three time levels")
    mon = Monitor(cfg, dt)
    for st in history:
        mon.push(st)
    return mon.diag


@dataclass
class RunResult:
    cfg: BeamConfig
    final: BeamState
    diagnostics: Diagnostics
    snapshots: list
    tail: list  # last three states, for residual fields at the final time


def run(cfg: BeamConfig, state: BeamState | None = None, callback: Callable | None = None, monitor=True) -> RunResult:
    """Integrate ``cfg.n_t`` steps; snapshots every ``cfg.output_every`` steps.

    With ``monitor=False`` only the energy is tracked (for the instability
    check) and the diagnostics hold the first and last levels.
    Raises :class:`BeamInstability` when the energy exceeds ten times its
    initial value.
    """
    cfg.validate()
    system = _System(cfg)
    state = initial_reference(cfg) if state is None else state
    mon = Monitor(cfg)
    mon.push(state)
    e0 = mon.diag.energy[0]
    snaps = [state]
    tail = [state]
    for n in range(1, cfg.n_t + 1):
        state = step(cfg, state, _system=system)
        if monitor or n == cfg.n_t:
            mon.push(state)
            e = mon.diag.energy[-1]
        else:
            e = energy(cfg, state)
        tail = (tail + [state])[-3:]
        if not np.isfinite(e) or (e > INSTABILITY_FACTOR * e0 and e > 1e-12):
            raise BeamInstability(
                f"energy grew from {e0:.6g} to {e:.6g} at step {n} (t={state.t:.6g})", state, mon.diag
            )
        if n % cfg.output_every == 0 or n == cfg.n_t:
            snaps.append(state)
        if callback is not None:
            callback(n, state)
    return RunResult(cfg, state, mon.diag, snaps, tail)


def final_fields(result: RunResult) -> dict:
    """Residual fields at the final time for grid-refinement studies."""
    cfg, tail = result.cfg, result.tail
    return {
        "conservation": conservation_field(cfg, tail, cfg.dt),
        "compatibility": compatibility_field(cfg, tail, cfg.dt),
        "right_compatibility": right_compatibility_field(cfg, tail, cfg.dt),
        "cell": cell_residual(cfg, tail[-2], tail[-1], cfg.dt),
    }


def refinement_ratios(cfg: BeamConfig) -> dict:
    """Grid-max residual ratio between ``cfg`` and ``cfg.refined()`` at the same final time."""
    coarse = final_fields(run(cfg, monitor=False))
    fine = final_fields(run(cfg.refined(), monitor=False))
    return {k: _max(coarse[k]) / _max(fine[k]) for k in coarse}


# Bridges to the variational module


def beam_lagrangian(cfg: BeamConfig) -> ReducedLagrangian:
    """``l = 1/2 chi.J.chi - 1/2 (eps-eps0).C.(eps-eps0)`` on the base ``(s, t)``.

    ``xi[0]`` is the strain and ``xi[1]`` the velocity.
    """
    J, C, e0 = cfg.J, cfg.C, cfg.eps0

    def l(x, g, xi):
        de = xi[0] - e0
        return 0.5 * xi[1] @ J @ xi[1] - 0.5 * de @ C @ de

    return ReducedLagrangian(l, 2, depends_on_g=False)


def beam_hamiltonian(cfg: BeamConfig) -> ReducedHamiltonian:
    """Legendre dual of :func:`beam_lagrangian` for invertible ``C``:
    ``h = 1/2 pi.J^-1.pi - 1/2 sigma.C^-1.sigma + sigma.eps0``."""
    Jinv, Cinv, e0 = np.linalg.inv(cfg.J), np.linalg.inv(cfg.C), cfg.eps0

    def h(x, g, p):
        return 0.5 * p[1] @ Jinv @ p[1] - 0.5 * p[0] @ Cinv @ p[0] + p[0] @ e0

    return ReducedHamiltonian(h, 2, depends_on_g=False)


class GridSection:
    """Solver output as functions of ``x = (s, t)``, looked up at the nearest node.

    ``states`` must be consecutive time levels ``t0 + k dt``.
    """

    def __init__(self, cfg: BeamConfig, states, dt: float | None = None):
        self.cfg = cfg
        self.states = list(states)
        self.dt = cfg.dt if dt is None else dt
        self.t0 = self.states[0].t
        self.steps = (cfg.ds, self.dt)

    def node(self, x):
        i = int(round(x[0] / self.cfg.ds))
        k = int(round((x[1] - self.t0) / self.dt))
        if not (0 <= i < self.cfg.n_s and 0 <= k < len(self.states)):
            raise IndexError(f"point {x} outside the stored grid")
        return i, k

    def point(self, i, k):
        return np.array([i * self.cfg.ds, self.t0 + k * self.dt])

    def configuration(self, x):
        i, k = self.node(x)
        return self.states[k].H[i]

    def dual(self, x, right=False):
        """``(g, pi)`` with ``pi[0] = sigma``, ``pi[1] = pi``; right momenta when ``right``."""
        i, k = self.node(x)
        st = self.states[k]
        pi, sigma = momenta(self.cfg, st.chi[i : i + 1], st.eps[i : i + 1])
        p = np.stack([sigma[0], pi[0]])
        if right:
            p = lie.Ad_star_inv(st.H[i], p)
        return st.H[i], p


def rigid_body_config(J=None, chi=None, dt=1e-3, n_t=1000) -> BeamConfig:
    """Single-node, ``C = 0`` configuration: the free rigid body."""
    J = np.diag([1.0, 2.0, 3.0, 1.0, 1.0, 1.0]) if J is None else J
    chi = np.array([1.0, 0, 0, 0, 0, 0]) if chi is None else chi
    return BeamConfig(
        n_s=1, n_t=n_t, dt=dt, J=J, C=np.zeros((6, 6)), chi_uniform=chi, chi_cosine=np.zeros(6), output_every=1
    )


def casimir(state: BeamState, cfg: BeamConfig) -> float:
    """``|m|`` of the body angular momentum, conserved by the free rigid body."""
    pi, _ = momenta(cfg, state.chi, state.eps)
    return float(np.linalg.norm(pi[0, :3]))
