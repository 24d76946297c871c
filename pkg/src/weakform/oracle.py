"""Reference solver: Duhamel convolution, direct and antiderivative forms.

Every weak solution in the repo is ultimately judged against this module,
so the direct form avoids numerical quadrature entirely: convolutions
against piecewise-polynomial forcing reduce to complex exponential
moments evaluated by the stable resummation in _moments.
"""

from __future__ import annotations

import math

import numpy as np

from ._moments import poly_exp_integral
from .analytic import fundamental_solutions, homogeneous_solution
from .errors import ValidationError
from .model import Excitation, InitialConditions, SdofSystem, Trajectory
from .quadrature import WeakAntiderivative, partial_integral, prefix_integrals


def _check_grid(grid, t_bar: float) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValidationError("grid must be a nonempty 1-d array")
    if np.any(np.diff(g) <= 0):
        raise ValidationError("grid must be strictly increasing")
    slack = 1e-12 * max(1.0, t_bar)
    if g[0] < -slack or g[-1] > t_bar + slack:
        raise ValidationError(f"grid leaves [0, {t_bar}]")
    return np.clip(g, 0.0, t_bar)


def duhamel_solve(sys: SdofSystem, f: Excitation, ic: InitialConditions, grid) -> Trajectory:
    """Exact response on the grid: homogeneous part plus convolution.

    With zbar = c/2 - i w_d, the particular displacement is
    Im(e^{-zbar t} A(t)) / w_d where A(t) = int_0^t f e^{zbar tau} d tau;
    A accumulates segment-exactly through complex moments, so the only
    error source is roundoff.
    """
    grid = _check_grid(grid, sys.t_bar)
    wd = sys.omega_d
    zbar = complex(0.5 * sys.c, -wd)

    xh, vh = homogeneous_solution(sys, ic, grid)

    # complex prefix A at the forcing mesh points
    mesh = f.mesh
    prefix = np.zeros(mesh.size, dtype=complex)
    for i in range(len(f.segments)):
        h = mesh[i + 1] - mesh[i]
        seg = np.exp(zbar * mesh[i]) * poly_exp_integral(f.segments[i], zbar, h)
        prefix[i + 1] = prefix[i] + seg

    idx = f.segment_index(grid)
    x = np.empty_like(grid)
    v = np.empty_like(grid)
    alpha = complex(1.0, 0.5 * sys.c / wd)
    for i, (j, t) in enumerate(zip(idx, grid)):
        tl = mesh[j]
        A = prefix[j] + np.exp(zbar * tl) * poly_exp_integral(f.segments[j], zbar, t - tl)
        w = np.exp(-zbar * t) * A
        x[i] = w.imag / wd
        v[i] = (alpha * w).real
    return Trajectory(grid, x + xh, v + vh)


def duhamel_from_F(sys: SdofSystem, F, grid) -> Trajectory:
    """Zero-IC response driven by an antiderivative F of e^{c.}f.

    The boundary term -F(0) s(t) makes the result independent of the
    constant of integration carried by F. Velocity keeps the e^{-ct} F(t)
    term, which is what restores the forcing's regularity class.
    """
    grid = _check_grid(grid, sys.t_bar)
    wd = sys.omega_d

    if isinstance(F, WeakAntiderivative):
        breaks = np.unique(np.concatenate((F.mesh, [0.0, sys.t_bar])))
    else:
        breaks = np.array([0.0, sys.t_bar])
    breaks = breaks[(breaks >= 0.0) & (breaks <= sys.t_bar)]

    # resolve the oscillation: a few panels per radian of the carrier
    rate = max(wd, 0.5 * sys.c, 1.0 / sys.t_bar)
    per_len = 1.0 / rate

    def neg_ddot_weight(ts):
        d, s, d_dot, _ = fundamental_solutions(sys, ts)
        return np.asarray(F(ts), dtype=float) * (-d_dot)

    def sdot_weight(ts):
        d, s, _, s_dot = fundamental_solutions(sys, ts)
        return np.asarray(F(ts), dtype=float) * s_dot

    prefix_p = prefix_integrals(breaks, neg_ddot_weight, per_len)
    prefix_q = prefix_integrals(breaks, sdot_weight, per_len)

    F0 = float(F(0.0))
    x = np.empty_like(grid)
    v = np.empty_like(grid)
    for i, t in enumerate(grid):
        d, s, d_dot, s_dot = fundamental_solutions(sys, float(t))
        P = partial_integral(breaks, prefix_p, neg_ddot_weight, float(t), per_len)
        Q = partial_integral(breaks, prefix_q, sdot_weight, float(t), per_len)
        x[i] = -F0 * s + s * P + d * Q
        v[i] = math.exp(-sys.c * t) * float(F(float(t))) - F0 * s_dot + s_dot * P + d_dot * Q
    return Trajectory(grid, x, v)
