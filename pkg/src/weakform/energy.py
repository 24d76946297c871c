"""Energy bookkeeping for the damped oscillator.

Weighted Hamiltonian H_c = (1/2) e^{ct} (v^2 + k x^2) and Lagrangian
L_c = (1/2) e^{ct} (v^2 - k x^2). Along a free trajectory dH_c/dt = -c L_c;
a forcing term adds e^{ct} f v. The plain (unweighted) energy obeys a
pointwise work balance, and trajectories with pinned ends satisfy an exact
kinetic-boundary identity that can be evaluated three independent ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import Excitation, SdofSystem, Trajectory
from .quadrature import WeightedProductSpec, composite_gauss, inner_product_c

# FD stencils below assume the trajectory grid resolves the solution; the
# residual they report mixes O(h^2) truncation with model error by design.


def hamiltonian_c(sys: SdofSystem, x, v, t):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    return 0.5 * np.exp(sys.c * t) * (v * v + sys.k * x * x)


def lagrangian_c(sys: SdofSystem, x, v, t):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    return 0.5 * np.exp(sys.c * t) * (v * v - sys.k * x * x)


def plain_energy(sys: SdofSystem, x, v):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return 0.5 * (v * v + sys.k * x * x)


def growth_factor(c: float, t_bar: float) -> float:
    """(e^{c T} - 1)/c, continued by T at c = 0."""
    if abs(c) < 1e-12:
        return t_bar * (1.0 + 0.5 * c * t_bar)
    return math.expm1(c * t_bar) / c


def energy_law_residual(sys: SdofSystem, traj: Trajectory, f: Excitation | None = None) -> float:
    """Max centered-difference defect of dH_c/dt = -c L_c (+ e^{ct} f v).

    Uses interior grid points only. On a trajectory sampled from the true
    solution with uniform step h the defect is O(h^2).
    """
    t, x, v = traj.t, traj.x, traj.v
    if t.size < 3:
        raise ValidationError("need at least 3 samples for a centered difference")
    H = hamiltonian_c(sys, x, v, t)
    L = lagrangian_c(sys, x, v, t)
    dH = (H[2:] - H[:-2]) / (t[2:] - t[:-2])
    rhs = -sys.c * L[1:-1]
    if f is not None:
        fv = np.array([f(float(ti)) for ti in t[1:-1]])
        rhs = rhs + np.exp(sys.c * t[1:-1]) * fv * v[1:-1]
    return float(np.max(np.abs(dH - rhs)))


def _as_callables(u, du):
    if isinstance(u, Trajectory):
        raise TypeError("internal: trajectory input must be handled by caller")
    if du is None:
        raise ValidationError("velocity callable required when u is a callable")
    return u, du


def conservation_identity(sys: SdofSystem, f: Excitation, u, du=None, bc_tol: float = 1e-9):
    """Three evaluations of the pinned-end kinetic identity.

    For u with u(0) = u(t_bar) = 0 the quantity
        lhs = (1/2) e^{c t_bar} du(t_bar)^2 - (1/2) du(0)^2
    equals both
        rhs_forcing = <f, du>_c - c * int L_c(u, du) dt
        rhs_parts   = -<df, u>_c - (c/2) <f, u>_c
    whenever u solves the oscillator equation with forcing f. Accepts either
    a Trajectory or a pair of callables (u, du). Returns (lhs, rhs_forcing,
    rhs_parts).
    """
    c, k, T = sys.c, sys.k, sys.t_bar
    spec = WeightedProductSpec(c=c, interval=(0.0, T))
    fd = f.derivative()
    if isinstance(u, Trajectory):
        t, x, v = u.t, u.x, u.v
        if not u.covers(T):
            raise ValidationError("trajectory does not span [0, t_bar]")
        scale = max(np.max(np.abs(x)), 1.0)
        if abs(x[0]) > bc_tol * scale or abs(x[-1]) > bc_tol * scale:
            raise ValidationError(
                "conservation identity needs u(0) = u(t_bar) = 0; "
                f"got u(0)={x[0]:.3e}, u(t_bar)={x[-1]:.3e}"
            )
        lhs = 0.5 * math.exp(c * T) * v[-1] ** 2 - 0.5 * v[0] ** 2
        w = np.exp(c * t)
        fv = np.array([f(float(ti)) for ti in t])
        fdv = np.array([fd(float(ti)) for ti in t])
        from scipy.integrate import simpson

        rhs1 = simpson(w * fv * v, x=t) - c * simpson(
            0.5 * w * (v * v - k * x * x), x=t
        )
        rhs2 = -simpson(w * fdv * x, x=t) - 0.5 * c * simpson(w * fv * x, x=t)
        return float(lhs), float(rhs1), float(rhs2)

    uf, duf = _as_callables(u, du)
    u0, uT = uf(0.0), uf(T)
    if abs(u0) > bc_tol or abs(uT) > bc_tol:
        raise ValidationError(
            f"conservation identity needs u(0) = u(t_bar) = 0; got {u0:.3e}, {uT:.3e}"
        )
    lhs = 0.5 * math.exp(c * T) * duf(T) ** 2 - 0.5 * duf(0.0) ** 2
    rhs1 = inner_product_c(f, duf, spec) - c * _lagrangian_integral(sys, uf, duf)
    rhs2 = -inner_product_c(fd, uf, spec) - 0.5 * c * inner_product_c(f, uf, spec)
    return float(lhs), float(rhs1), float(rhs2)


def _lagrangian_integral(sys: SdofSystem, uf, duf) -> float:
    c, k, T = sys.c, sys.k, sys.t_bar

    def integrand(ts):
        ts = np.asarray(ts, dtype=float)
        uv = np.array([uf(float(s)) for s in ts])
        dv = np.array([duf(float(s)) for s in ts])
        return 0.5 * np.exp(c * ts) * (dv * dv - k * uv * uv)

    panels = max(16, int(math.ceil(T * max(sys.omega_n, 1.0))))
    return composite_gauss(integrand, 0.0, T, panels, 12)


@dataclass(frozen=True)
class EnergyAudit:
    h0: float
    hT: float
    conservation_lhs: float
    conservation_rhs: float
    dissipation_lhs: float
    dissipation_rhs: float
    law_residual: float
    balance_residual: float

    @property
    def dissipation_margin(self) -> float:
        return self.dissipation_rhs - self.dissipation_lhs


def dissipation_audit(sys: SdofSystem, f: Excitation, traj: Trajectory) -> EnergyAudit:
    """A priori energy control checked against a computed trajectory.

    dissipation_lhs is (1/2)||v||_c^2 + (1/2) k ||x||_c^2; the rhs is the
    forcing-only budget (||f||_c + g ||df||_c) ||x||_c + g (H(0) - f(0) x(0))
    with g = (e^{c t_bar} - 1)/c. balance_residual is the worst defect of the
    running plain-energy work balance
        H(t) - H(0) = f t x t - f(0) x(0) - int_0^t df x - c int_0^t v^2
    over the trajectory grid. conservation_* hold the weighted-energy end
    values of the first corollary chain member and are informational.
    """
    c, k, T = sys.c, sys.k, sys.t_bar
    t, x, v = traj.t, traj.x, traj.v
    if not traj.covers(T):
        raise ValidationError("trajectory does not span [0, t_bar]")
    from scipy.integrate import simpson

    w = np.exp(c * t)
    fd = f.derivative()
    fv = np.array([f(float(ti)) for ti in t])
    fdv = np.array([fd(float(ti)) for ti in t])

    x_c = math.sqrt(max(float(simpson(w * x * x, x=t)), 0.0))
    v_c = math.sqrt(max(float(simpson(w * v * v, x=t)), 0.0))
    f_c = math.sqrt(max(float(simpson(w * fv * fv, x=t)), 0.0))
    fd_c = math.sqrt(max(float(simpson(w * fdv * fdv, x=t)), 0.0))

    H0 = float(plain_energy(sys, x[0], v[0]))
    g = growth_factor(c, T)
    lhs = 0.5 * v_c**2 + 0.5 * k * x_c**2
    rhs = (f_c + g * fd_c) * x_c + g * (H0 - fv[0] * x[0])

    # running work balance on the plain energy
    H = plain_energy(sys, x, v)
    cum_fdx = _cumulative_simpson(t, fdv * x)
    cum_v2 = _cumulative_simpson(t, v * v)
    balance = (H - H[0]) - (fv * x - fv[0] * x[0] - cum_fdx - c * cum_v2)
    balance_residual = float(np.max(np.abs(balance)))

    Hc = hamiltonian_c(sys, x, v, t)
    work_rhs = float(
        simpson(w * fv * v, x=t) - c * simpson(w * fv * x, x=t)
    )
    law = energy_law_residual(sys, traj, None if f.is_zero() else f)
    return EnergyAudit(
        h0=float(Hc[0]),
        hT=float(Hc[-1]),
        conservation_lhs=float(Hc[-1] - Hc[0]),
        conservation_rhs=work_rhs,
        dissipation_lhs=float(lhs),
        dissipation_rhs=float(rhs),
        law_residual=law,
        balance_residual=balance_residual,
    )


def _cumulative_simpson(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    from scipy.integrate import cumulative_simpson

    out = cumulative_simpson(y, x=t, initial=0.0)
    return np.asarray(out, dtype=float)


def weighted_norms_exact(sys: SdofSystem, f: Excitation):
    """||f||_c and ||df||_c by exact segment moments (audit cross-check)."""
    spec = WeightedProductSpec(c=sys.c, interval=(0.0, sys.t_bar))
    fd = f.derivative()
    nf = math.sqrt(max(inner_product_c(f, f, spec), 0.0))
    nfd = math.sqrt(max(inner_product_c(fd, fd, spec), 0.0))
    return nf, nfd
