"""Closed forms: homogeneous solution, fundamental solutions, time dilation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import Excitation, InitialConditions, SdofSystem, Trajectory


def fundamental_solutions(sys: SdofSystem, t):
    """d, s and their derivatives at t (scalar or array).

    d(t) = e^{-ct/2} cos(w_d t), s(t) = e^{-ct/2} sin(w_d t) / w_d, the
    free vibrations with initial data (1, -c/2) and (0, 1). Derivatives
    come from the first-order recurrences, not separate differentiation,
    so the returned quadruple satisfies them to roundoff by construction.
    """
    wd = sys.omega_d
    half_c = 0.5 * sys.c
    t_arr = np.asarray(t, dtype=float)
    env = np.exp(-half_c * t_arr)
    d = env * np.cos(wd * t_arr)
    s = env * np.sin(wd * t_arr) / wd
    d_dot = -half_c * d - wd * wd * s
    s_dot = -half_c * s + d
    return d, s, d_dot, s_dot


def homogeneous_solution(sys: SdofSystem, ic: InitialConditions, t):
    """Free response for given initial data; exact displacement and velocity."""
    wd = sys.omega_d
    a = 0.5 * sys.c
    t_arr = np.asarray(t, dtype=float)
    env = np.exp(-a * t_arr)
    cos_ = np.cos(wd * t_arr)
    sin_ = np.sin(wd * t_arr)
    A = ic.x0
    B = (ic.v0 + a * ic.x0) / wd
    x = env * (A * cos_ + B * sin_)
    v = env * ((B * wd - a * A) * cos_ - (A * wd + a * B) * sin_)
    return x, v


@dataclass(frozen=True)
class DilatedProblem:
    """The problem in stretched time s = lambda t, with chi(s) = x(s / lambda).

    Parameters map as (c, k, f, x0, v0, T) to
    (c/lambda, k/lambda^2, f(./lambda)/lambda^2, x0, v0/lambda, lambda T).
    Choosing lambda = sqrt(k) normalizes the stiffness to 1.
    """

    lam: float
    sys: SdofSystem
    f: Excitation
    ic: InitialConditions

    def map_back(self, traj: Trajectory) -> Trajectory:
        """Trajectory of x on the original clock from a trajectory of chi."""
        lam = self.lam
        return Trajectory(traj.t / lam, traj.x, lam * traj.v)

    def grid_for(self, t_original) -> np.ndarray:
        """Stretched-time grid matching a grid in original time."""
        return self.lam * np.asarray(t_original, dtype=float)


def _dilate_excitation(f: Excitation, lam: float) -> Excitation:
    mesh = lam * f.mesh
    segs = []
    for s in f.segments:
        m = np.arange(s.size)
        segs.append(s / lam ** (m + 2))
    return Excitation(mesh, tuple(segs))


def time_dilate(sys: SdofSystem, f: Excitation, ic: InitialConditions, lam: float) -> DilatedProblem:
    """Stretch time by lam > 0; lam = 1 is the identity."""
    lam = float(lam)
    if not (lam > 0 and math.isfinite(lam)):
        raise ValidationError(f"dilation factor must be positive and finite, got {lam}")
    new_sys = SdofSystem(sys.c / lam, sys.k / lam**2, lam * sys.t_bar)
    new_f = _dilate_excitation(f, lam)
    new_ic = InitialConditions(ic.x0, ic.v0 / lam)
    return DilatedProblem(lam, new_sys, new_f, new_ic)
