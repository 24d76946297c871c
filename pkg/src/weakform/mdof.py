"""Classically damped multi-degree-of-freedom systems by modal reduction.

M xdd + C xd + K x = f(t) with symmetric M, K positive definite. The
generalized eigenproblem is solved through the Cholesky factor of M, so
mode shapes come out M-orthonormal and each modal equation is a unit-mass
scalar oscillator handled by the scalar machinery (oracle or weak engine).
Damping must be classical: Phi^T C Phi diagonal to tolerance, else the
decomposition refuses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular

from .errors import (
    ExceptionalHorizonError,
    NonClassicalDampingError,
    ValidationError,
)
from .galerkin import boundary_map, solve_weak
from .model import Excitation, InitialConditions, SdofSystem, Trajectory

OFFDIAG_TOL = 1e-8


def _sym_check(name: str, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    scale = np.max(np.abs(A)) or 1.0
    if np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise ValidationError(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class MdofSystem:
    M: np.ndarray
    C: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        M = _sym_check("M", self.M)
        C = _sym_check("C", self.C)
        K = _sym_check("K", self.K)
        if not (M.shape == C.shape == K.shape):
            raise ValidationError("M, C, K must share one shape")
        for name, A in (("M", M), ("K", K)):
            try:
                cholesky(A)
            except np.linalg.LinAlgError as exc:
                raise ValidationError(f"{name} is not positive definite") from exc
            except Exception as exc:  # scipy raises LinAlgError from its own module
                if "positive definite" in str(exc) or "leading minor" in str(exc):
                    raise ValidationError(f"{name} is not positive definite") from exc
                raise
        for nm, A in (("M", M), ("C", C), ("K", K)):
            object.__setattr__(self, nm, A)
        self.M.setflags(write=False)
        self.C.setflags(write=False)
        self.K.setflags(write=False)

    @property
    def n_dof(self) -> int:
        return self.M.shape[0]


@dataclass(frozen=True)
class ModalSystem:
    """Mass-normalized modal form of an MdofSystem.

    shapes columns are M-orthonormal; omegas ascend; xi holds the modal
    damping ratios read off the diagonalized damping matrix. subproblems
    are scalar systems on the horizon passed to modal_decompose (empty
    tuple when no horizon was given).
    """

    parent: MdofSystem
    omegas: np.ndarray
    shapes: np.ndarray
    xi: np.ndarray
    t_bar: float | None = None

    @property
    def n_modes(self) -> int:
        return self.omegas.size

    @property
    def modal_damping(self) -> np.ndarray:
        return 2.0 * self.xi * self.omegas

    @property
    def subproblems(self) -> tuple:
        if self.t_bar is None:
            return ()
        return tuple(
            SdofSystem(c=float(ci), k=float(wi * wi), t_bar=float(self.t_bar))
            for ci, wi in zip(self.modal_damping, self.omegas)
        )

    def to_modal(self, vec: np.ndarray) -> np.ndarray:
        """Physical displacement/velocity vector to modal coordinates."""
        return self.shapes.T @ (self.parent.M @ np.asarray(vec, dtype=float))

    def to_physical(self, phi: np.ndarray) -> np.ndarray:
        return self.shapes @ np.asarray(phi, dtype=float)


def modal_decompose(sys: MdofSystem, t_bar: float | None = None) -> ModalSystem:
    """M-orthonormal modes, frequencies and damping ratios.

    Raises NonClassicalDampingError when Phi^T C Phi is not diagonal to
    a relative 1e-8 in the max norm.
    """
    L = cholesky(sys.M, lower=True)
    Kt = solve_triangular(L, sys.K, lower=True)
    Kt = solve_triangular(L, Kt.T, lower=True)
    lam, V = eigh(0.5 * (Kt + Kt.T))
    if lam[0] <= 0:
        raise ValidationError("stiffness projection lost positivity")
    omegas = np.sqrt(lam)
    shapes = solve_triangular(L, V, lower=True, trans="T")
    D = shapes.T @ sys.C @ shapes
    diag = np.abs(np.diag(D))
    off = D - np.diag(np.diag(D))
    off_max = float(np.max(np.abs(off))) if off.size else 0.0
    diag_max = float(np.max(diag)) if diag.size else 0.0
    if off_max > OFFDIAG_TOL * max(diag_max, 1e-300):
        raise NonClassicalDampingError(
            f"modal damping off-diagonal {off_max:.3e} exceeds "
            f"{OFFDIAG_TOL:g} x diagonal scale {diag_max:.3e}"
        )
    xi = np.diag(D) / (2.0 * omegas)
    return ModalSystem(parent=sys, omegas=omegas, shapes=shapes, xi=xi, t_bar=t_bar)


class MdofSolution(NamedTuple):
    trajectories: tuple        # per-DOF Trajectory in physical coordinates
    modal_trajectories: tuple  # per-mode scalar Trajectory
    modal: ModalSystem


def _normalize_forcing(f, n_dof: int, t_bar: float | None):
    if isinstance(f, Excitation):
        raise ValidationError("per-DOF forcing must be a sequence, one entry per DOF")
    f = list(f)
    if len(f) != n_dof:
        raise ValidationError(f"expected {n_dof} forcing entries, got {len(f)}")
    t_end = None
    for fi in f:
        if fi is None:
            continue
        if not isinstance(fi, Excitation):
            raise ValidationError("forcing entries must be Excitation or None")
        t_end = fi.t_end if t_end is None else t_end
        if abs(fi.t_end - t_end) > 1e-12 * max(t_end, 1.0):
            raise ValidationError("forcing entries disagree on the horizon")
    if t_end is None:
        if t_bar is None:
            raise ValidationError("all-zero forcing needs an explicit horizon")
        t_end = t_bar
    elif t_bar is not None and abs(t_end - t_bar) > 1e-12 * max(t_end, 1.0):
        raise ValidationError(
            f"explicit t_bar {t_bar} disagrees with forcing horizon {t_end}"
        )
    return [fi if fi is not None else Excitation.zero(t_end) for fi in f], t_end


def _normalize_ic(ic, n_dof: int):
    if isinstance(ic, (tuple, list)) and len(ic) == 2 and np.ndim(ic[0]) == 1:
        x0 = np.asarray(ic[0], dtype=float)
        v0 = np.asarray(ic[1], dtype=float)
    else:
        items = list(ic)
        if not all(isinstance(i, InitialConditions) for i in items):
            raise ValidationError(
                "initial data must be (x0_vec, v0_vec) or a list of InitialConditions"
            )
        x0 = np.array([i.x0 for i in items], dtype=float)
        v0 = np.array([i.v0 for i in items], dtype=float)
    if x0.size != n_dof or v0.size != n_dof:
        raise ValidationError(f"initial data must have {n_dof} entries per vector")
    return x0, v0


def mdof_solve(sys: MdofSystem, f: Sequence, ic, grid,
               engine="oracle", t_bar: float | None = None) -> MdofSolution:
    """Solve the MDOF problem mode by mode.

    engine is "oracle" for the convolution reference or ("weak", degree)
    for the Galerkin route with a Bernstein basis of that degree. An
    exceptional horizon in any mode aborts with the offending mode index
    and the nearest safe horizon attached to the error.
    """
    if engine != "oracle" and not (
        isinstance(engine, (tuple, list)) and len(engine) == 2 and engine[0] == "weak"
    ):
        raise ValidationError(
            f"engine must be 'oracle' or ('weak', degree), got {engine!r}"
        )
    f_list, t_end = _normalize_forcing(f, sys.n_dof, t_bar)
    modal = modal_decompose(sys, t_bar=t_end)
    x0, v0 = _normalize_ic(ic, sys.n_dof)
    grid = np.asarray(grid, dtype=float)

    phi_x0 = modal.to_modal(x0)
    phi_v0 = modal.to_modal(v0)
    scalar_systems = modal.subproblems

    modal_trajs = []
    for i, sc in enumerate(scalar_systems):
        fm = None
        for j in range(sys.n_dof):
            term = f_list[j] * float(modal.shapes[j, i])
            fm = term if fm is None else fm + term
        ic_i = InitialConditions(float(phi_x0[i]), float(phi_v0[i]))
        try:
            if engine == "oracle":
                from .oracle import duhamel_solve

                tr = duhamel_solve(sc, fm, ic_i, grid)
            else:
                kind, degree = engine
                if kind != "weak":
                    raise ValidationError(f"unknown engine {engine!r}")
                from .basis import bernstein_basis

                basis = bernstein_basis(sc.t_bar, int(degree))
                sol = solve_weak(sc, basis, fm, ic_i)
                tr = sol.trajectory(grid)
        except ExceptionalHorizonError as exc:
            raise ExceptionalHorizonError(
                f"mode {i} hit an exceptional horizon: {exc}",
                t_bar=exc.t_bar, distance=exc.distance,
                suggestion=exc.suggestion, mode=i,
            ) from exc
        modal_trajs.append(tr)

    phis = np.vstack([tr.x for tr in modal_trajs])
    dphis = np.vstack([tr.v for tr in modal_trajs])
    X = modal.shapes @ phis
    V = modal.shapes @ dphis
    trajs = tuple(Trajectory(grid, X[d], V[d]) for d in range(sys.n_dof))
    return MdofSolution(trajectories=trajs, modal_trajectories=tuple(modal_trajs), modal=modal)


class BoundaryCorrespondence(NamedTuple):
    maps: tuple
    bijective: bool


def mdof_boundary_correspondence(modal: ModalSystem, f: Sequence, x0_vec) -> BoundaryCorrespondence:
    """Per-mode initial-velocity-to-endpoint maps and their joint invertibility.

    The full map (v0 modal vector) -> (x(t_bar) modal vector) is diagonal
    with the scalar alphas on the diagonal, so bijectivity is just alpha_i
    != 0 for every mode.
    """
    if modal.t_bar is None:
        raise ValidationError("modal system carries no horizon")
    f_list, _ = _normalize_forcing(f, modal.parent.n_dof, modal.t_bar)
    x0 = np.asarray(x0_vec, dtype=float)
    phi_x0 = modal.to_modal(x0)
    maps = []
    for i, sc in enumerate(modal.subproblems):
        fm = None
        for j in range(modal.parent.n_dof):
            term = f_list[j] * float(modal.shapes[j, i])
            fm = term if fm is None else fm + term
        try:
            bm = boundary_map(sc, fm, float(phi_x0[i]), mode="analytic")
        except ExceptionalHorizonError as exc:
            raise ExceptionalHorizonError(
                f"mode {i} sits on the exceptional set: {exc}",
                t_bar=exc.t_bar, distance=exc.distance,
                suggestion=exc.suggestion, mode=i,
            ) from exc
        maps.append(bm)
    bijective = all(m.invertible for m in maps)
    return BoundaryCorrespondence(maps=tuple(maps), bijective=bijective)


def physical_energy(sys: MdofSystem, x_vecs: np.ndarray, v_vecs: np.ndarray) -> np.ndarray:
    """(1/2) v^T M v + (1/2) x^T K x for column-stacked states."""
    x_vecs = np.atleast_2d(x_vecs)
    v_vecs = np.atleast_2d(v_vecs)
    return 0.5 * (
        np.einsum("it,ij,jt->t", v_vecs, sys.M, v_vecs)
        + np.einsum("it,ij,jt->t", x_vecs, sys.K, x_vecs)
    )


def modal_energy(modal: ModalSystem, phis: np.ndarray, dphis: np.ndarray) -> np.ndarray:
    """Sum of per-mode energies; equals physical_energy by M-orthonormality."""
    phis = np.atleast_2d(phis)
    dphis = np.atleast_2d(dphis)
    return 0.5 * np.sum(dphis * dphis + (modal.omegas**2)[:, None] * phis * phis, axis=0)


def mdof_ode_residual(sys: MdofSystem, f: Sequence, sol: MdofSolution) -> float:
    """Max |M xdd + C xd + K x - f| over interior grid points, FD acceleration."""
    grid = sol.trajectories[0].t
    X = np.vstack([tr.x for tr in sol.trajectories])
    V = np.vstack([tr.v for tr in sol.trajectories])
    f_list, _ = _normalize_forcing(f, sys.n_dof, sol.modal.t_bar)
    fvals = np.vstack([[fi(float(t)) for t in grid] for fi in f_list])
    acc = np.empty_like(V)
    acc[:, 1:-1] = (V[:, 2:] - V[:, :-2]) / (grid[2:] - grid[:-2])[None, :]
    acc[:, 0] = acc[:, 1]
    acc[:, -1] = acc[:, -2]
    resid = sys.M @ acc + sys.C @ V + sys.K @ X - fvals
    return float(np.max(np.abs(resid[:, 1:-1])))
