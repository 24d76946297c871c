"""Shared test utilities: a brute-force fixed-step integrator.

RK4 steps are aligned to the forcing mesh so no stage straddles a
breakpoint. Because the oscillator is linear, the RK4 update is a fixed
affine recurrence per uniform-step cell; it is evaluated exactly as the
textbook loop would, but through a diagonalized one-pole filter so a
million steps cost milliseconds instead of a minute.
"""

import numpy as np
from scipy.signal import lfilter

from weakform.model import Excitation, InitialConditions, SdofSystem, Trajectory
from weakform.quadrature import eval_on_grid


def _rk4_cell(c: float, k: float, h: float, z0, f0, fm, f1):
    """Advance through one uniform-step cell; returns states after each step."""
    M = np.array([[0.0, 1.0], [-k, -c]])
    M2 = M @ M
    M3 = M2 @ M
    M4 = M3 @ M
    Phi = np.eye(2) + h * M + (h * h / 2) * M2 + (h**3 / 6) * M3 + (h**4 / 24) * M4
    W0 = np.eye(2) + h * M + (h * h / 2) * M2 + (h**3 / 4) * M3
    Wm = 4 * np.eye(2) + 2 * h * M + (h * h / 2) * M2
    # forcing enters through the velocity slot of each stage
    u = (h / 6.0) * (
        np.outer(W0[:, 1], f0) + np.outer(Wm[:, 1], fm) + np.outer([0.0, 1.0], f1)
    )
    lam, V = np.linalg.eig(Phi)
    y0 = np.linalg.solve(V, z0.astype(complex))
    uhat = np.linalg.solve(V, u.astype(complex))
    Y = np.empty_like(uhat)
    for j in range(2):
        Y[j], _ = lfilter([1.0], [1.0, -lam[j]], uhat[j], zi=[lam[j] * y0[j]])
    Z = V @ Y
    return np.real(Z)


def rk4_solve(sys: SdofSystem, f: Excitation, ic: InitialConditions,
              n_steps: int = 1_000_000) -> Trajectory:
    T = sys.t_bar
    mesh = np.clip(f.mesh, 0.0, T)
    cells = [(a, b) for a, b in zip(mesh[:-1], mesh[1:]) if b - a > 1e-15 * T]
    t_parts = [np.array([0.0])]
    x_parts = [np.array([ic.x0])]
    v_parts = [np.array([ic.v0])]
    z = np.array([ic.x0, ic.v0], dtype=float)
    for a, b in cells:
        m = max(1, int(round(n_steps * (b - a) / T)))
        edges = np.linspace(a, b, m + 1)
        h = (b - a) / m
        half = edges[:-1] + 0.5 * h
        f0 = eval_on_grid(f, edges[:-1])
        fm = eval_on_grid(f, half)
        f1 = eval_on_grid(f, edges[1:])
        Z = _rk4_cell(sys.c, sys.k, h, z, f0, fm, f1)
        z = Z[:, -1].copy()
        t_parts.append(edges[1:])
        x_parts.append(Z[0])
        v_parts.append(Z[1])
    return Trajectory(np.concatenate(t_parts), np.concatenate(x_parts),
                      np.concatenate(v_parts))


def pw_linear_hat(t_bar: float, peak: float = 1.0) -> Excitation:
    """Hat function rising to peak at t_bar/2 and back to zero."""
    mesh = np.array([0.0, 0.5 * t_bar, t_bar])
    return Excitation.from_samples(mesh, [0.0, peak, 0.0])
