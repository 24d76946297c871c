"""Galerkin assembly, the velocity closure, and the boundary map.

The weak statement tested against interior functions phi reads

    -<x', phi'>_c + k <x, phi>_c = <f, phi>_c

after the e^{ct} weight absorbs the damping term. Substituting
x = x0 b0 + sum u_i b_i + xT b_{n+1} gives [B]{u} = {F} with the final
displacement xT appearing as a parameter; matching the initial velocity
closes the system with one scalar equation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .basis import BasisSet
from .errors import (
    DegenerateClosureError,
    ExceptionalHorizonError,
    NumericalError,
    ValidationError,
)
from .model import Excitation, InitialConditions, SdofSystem, WeakSolution
from .oracle import duhamel_solve

log = logging.getLogger("weakform")

EXCEPTIONAL_TOL = 1e-8
CONDITION_WARN = 1e10


def apply_F_operator(sys: SdofSystem, x):
    """f = x'' + c x' + k x.

    Excitation input gives an Excitation of the same mesh and degree,
    by exact coefficient algebra. A triple (x, x', x'') of callables
    gives a callable.
    """
    if isinstance(x, Excitation):
        segs = []
        for s in x.segments:
            m = np.arange(s.size)
            d1 = s[1:] * m[1:] if s.size > 1 else np.zeros(0)
            d2 = d1[1:] * np.arange(1, d1.size) if s.size > 2 else np.zeros(0)
            out = sys.k * s.astype(float).copy()
            out[: d1.size] += sys.c * d1
            out[: d2.size] += d2
            segs.append(out)
        return Excitation(x.mesh, tuple(segs))
    if isinstance(x, tuple) and len(x) == 3 and all(callable(g) for g in x):
        xf, vf, af = x
        return lambda t: af(t) + sys.c * vf(t) + sys.k * xf(t)
    raise ValidationError("x must be an Excitation or a (x, x', x'') triple of callables")


class ExceptionalCheck(NamedTuple):
    is_exceptional: bool
    distance: float
    sin_abs: float


def is_exceptional(sys: SdofSystem, tol: float = EXCEPTIONAL_TOL) -> ExceptionalCheck:
    """Whether sin(w_d t_bar) vanishes to within tol.

    distance is from t_bar to the nearest multiple of pi / w_d, the
    half-period grid where final displacement decouples from initial
    velocity.
    """
    wd = sys.omega_d
    sin_abs = abs(math.sin(wd * sys.t_bar))
    half = math.pi / wd
    distance = abs(sys.t_bar - round(sys.t_bar / half) * half)
    return ExceptionalCheck(sin_abs < tol, distance, sin_abs)


@dataclass(frozen=True)
class AssembledSystem:
    """[B]{u} = {F_fixed} + xT {F_slope}; B over the interior block only."""

    B: np.ndarray
    F_fixed: np.ndarray
    F_slope: np.ndarray
    basis: BasisSet
    sys: SdofSystem

    @property
    def basis_id(self) -> str:
        return self.basis.basis_id


def assemble(sys: SdofSystem, basis: BasisSet, f: Excitation, x0: float,
             exceptional_tol: float = EXCEPTIONAL_TOL) -> AssembledSystem:
    """Build the interior Galerkin matrix and the affine right-hand side.

    F_i collects the forcing term plus the carrier contributions moved to
    the right: F_i = <f, b_i>_c + <x0 b0' + xT b_{n+1}', b_i'>_c
    - k <x0 b0 + xT b_{n+1}, b_i>_c, split by powers of xT.
    """
    check = is_exceptional(sys, exceptional_tol)
    if check.is_exceptional:
        wd = sys.omega_d
        half = math.pi / wd
        k_near = round(sys.t_bar / half)
        suggestion = (k_near + 0.5) * half
        raise ExceptionalHorizonError(
            f"t_bar = {sys.t_bar} is within {check.sin_abs:.3e} of the exceptional "
            f"set (multiples of pi/w_d = {half:.6g}); try t_bar = {suggestion:.6g}",
            t_bar=sys.t_bar,
            distance=check.distance,
            suggestion=suggestion,
        )
    if abs(f.t_end - sys.t_bar) > 1e-12 * max(1.0, sys.t_bar):
        raise ValidationError(
            f"forcing domain [0, {f.t_end}] does not match horizon {sys.t_bar}"
        )
    c, k = sys.c, sys.k
    Gv = basis.gram_value(c)
    Gd = basis.gram_deriv(c)
    fvec = basis.forcing_vector(f, c)
    interior = slice(1, basis.size - 1)
    B = (-Gd + k * Gv)[interior, interior]
    F_fixed = fvec[interior] + x0 * (Gd[0, interior] - k * Gv[0, interior])
    F_slope = Gd[-1, interior] - k * Gv[-1, interior]
    return AssembledSystem(B, F_fixed, F_slope, basis, sys)


def _refined_solve(B: np.ndarray, rhs: np.ndarray):
    """LU solve plus iterative refinement with an extended-precision residual.

    The interior matrix is symmetric indefinite and its conditioning grows
    quickly with degree; two refinement passes recover forward error near
    cond * unit roundoff of the refined residual, which the high-degree
    convergence runs need.
    """
    try:
        lu, piv = lu_factor(B)
    except Exception as exc:
        raise NumericalError(f"Galerkin matrix factorization failed: {exc}") from exc
    diag_u = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or np.min(diag_u) == 0.0:
        raise NumericalError("Galerkin matrix is singular to working precision")
    x = lu_solve((lu, piv), rhs)
    B_ld = B.astype(np.longdouble)
    rhs_ld = rhs.astype(np.longdouble)
    for _ in range(3):
        r = rhs_ld - B_ld @ x.astype(np.longdouble)
        dx = lu_solve((lu, piv), r.astype(float))
        x = x + dx
        if np.max(np.abs(dx)) <= 1e-18 * max(np.max(np.abs(x)), 1e-300):
            break
    return x


def solve_weak(sys: SdofSystem, basis: BasisSet, f: Excitation,
               ic: InitialConditions,
               exceptional_tol: float = EXCEPTIONAL_TOL) -> WeakSolution:
    """Solve the weak problem and close it with the initial velocity.

    Two solves share one factorization: u = u_fixed + xT u_slope, then
    x_ap'(0) = v0 fixes the scalar xT.
    """
    asm = assemble(sys, basis, f, ic.x0, exceptional_tol)
    cond = float(np.linalg.cond(asm.B)) if asm.B.size else 1.0
    if cond > CONDITION_WARN:
        log.warning("Galerkin matrix condition %.3e above %.1e (basis %s)",
                    cond, CONDITION_WARN, asm.basis_id)
    u_fixed = _refined_solve(asm.B, asm.F_fixed)
    u_slope = _refined_solve(asm.B, asm.F_slope)

    d0 = basis.derivs_at_0()
    const = ic.x0 * d0[0] + float(d0[1:-1] @ u_fixed)
    coeff = float(d0[1:-1] @ u_slope) + d0[-1]
    scale = max(np.max(np.abs(d0)), 1e-300)
    if abs(coeff) < 1e-10 * scale:
        raise DegenerateClosureError(
            f"closure coefficient {coeff:.3e} below tolerance; the initial "
            "velocity cannot determine the final displacement",
            coefficient=coeff,
        )
    xT = (ic.v0 - const) / coeff
    u = u_fixed + xT * u_slope
    return WeakSolution(basis, u, ic.x0, xT, condition=cond)


@dataclass(frozen=True)
class BoundaryMap:
    """Affine map v0 -> alpha v0 + beta from initial velocity to x(t_bar)."""

    alpha: float
    beta: float

    def __call__(self, v0: float) -> float:
        return self.alpha * v0 + self.beta

    @property
    def invertible(self) -> bool:
        # a slope at roundoff scale would amplify the inversion by ~1e12+
        return abs(self.alpha) > 1e-12 * max(1.0, abs(self.beta))

    def invert(self, xT: float) -> float:
        if not self.invertible:
            raise DegenerateClosureError(
                "boundary map slope is numerically zero; no initial velocity "
                "reaches the target",
                coefficient=self.alpha,
            )
        return (xT - self.beta) / self.alpha


def boundary_map(sys: SdofSystem, f: Excitation, x0: float,
                 mode: str = "analytic", basis: BasisSet = None,
                 tol: float = EXCEPTIONAL_TOL, strict: bool = True) -> BoundaryMap:
    """The map v0 -> x(t_bar), by oracle or by two Galerkin solves.

    alpha equals s(t_bar) in exact arithmetic and vanishes precisely on
    the exceptional set. strict=False skips the exceptional-set error so
    the degenerate slope itself can be inspected.
    """
    if mode == "analytic":
        check = is_exceptional(sys, tol)
        if strict and check.is_exceptional:
            raise ExceptionalHorizonError(
                f"t_bar = {sys.t_bar} lies on the exceptional set "
                f"(|sin(w_d t_bar)| = {check.sin_abs:.3e} < {tol}); "
                "the boundary map is not invertible there",
                t_bar=sys.t_bar,
                distance=check.distance,
            )
        grid = np.array([sys.t_bar])
        base = duhamel_solve(sys, f, InitialConditions(x0, 0.0), grid)
        wd = sys.omega_d
        alpha = math.exp(-0.5 * sys.c * sys.t_bar) * math.sin(wd * sys.t_bar) / wd
        return BoundaryMap(alpha, float(base.x[-1]))
    if mode == "galerkin":
        if basis is None:
            raise ValidationError("galerkin mode needs a basis")
        s0 = solve_weak(sys, basis, f, InitialConditions(x0, 0.0), tol)
        s1 = solve_weak(sys, basis, f, InitialConditions(x0, 1.0), tol)
        return BoundaryMap(s1.xT - s0.xT, s0.xT)
    raise ValidationError(f"unknown boundary-map mode {mode!r}")
