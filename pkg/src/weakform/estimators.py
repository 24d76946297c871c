"""Estimator-style wrappers around the solvers.

Thin fit/predict facades with get_params/set_params for pipeline-style
callers. fit consumes a problem description rather than (X, y) data; the
underlying solvers stay the canonical API.
"""

from __future__ import annotations

import numpy as np

from .basis import bernstein_basis, damped_wave_basis
from .errors import ValidationError
from .galerkin import solve_weak
from .model import Excitation, InitialConditions, SdofSystem


class _ParamsMixin:
    _param_names: tuple = ()

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in self._param_names:
                raise ValidationError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self


class WeakSdofSolver(_ParamsMixin):
    """Galerkin solver with a fit/predict surface.

    After fit, solution_ holds the WeakSolution and predict evaluates its
    displacement on a time grid. score is the negative oracle gap, so
    bigger is better and exact recovery scores 0.
    """

    _param_names = ("degree", "family", "orthonormalize", "exceptional_tol")

    def __init__(self, degree: int = 16, family: str = "bernstein",
                 orthonormalize: bool = False, exceptional_tol: float = 1e-8):
        self.degree = degree
        self.family = family
        self.orthonormalize = orthonormalize
        self.exceptional_tol = exceptional_tol

    def _make_basis(self, sys: SdofSystem):
        if self.family == "bernstein":
            return bernstein_basis(sys.t_bar, int(self.degree),
                                   orthonormalize=self.orthonormalize,
                                   c=sys.c if self.orthonormalize else None)
        if self.family == "damped-wave":
            return damped_wave_basis(sys.t_bar, sys.c, int(self.degree) - 1)
        raise ValidationError(f"unknown basis family {self.family!r}")

    def fit(self, sys: SdofSystem, f: Excitation, ic: InitialConditions):
        basis = self._make_basis(sys)
        self.sys_ = sys
        self.f_ = f
        self.ic_ = ic
        self.basis_ = basis
        self.solution_ = solve_weak(sys, basis, f, ic,
                                    exceptional_tol=self.exceptional_tol)
        self.condition_ = self.solution_.condition
        return self

    def _require_fit(self):
        if not hasattr(self, "solution_"):
            raise ValidationError("call fit before predict/score")

    def predict(self, t) -> np.ndarray:
        self._require_fit()
        x, _ = self.solution_.eval(np.asarray(t, dtype=float))
        return x

    def predict_velocity(self, t) -> np.ndarray:
        self._require_fit()
        _, v = self.solution_.eval(np.asarray(t, dtype=float))
        return v

    def score(self, grid=None) -> float:
        self._require_fit()
        from .oracle import duhamel_solve

        if grid is None:
            grid = np.linspace(0.0, self.sys_.t_bar, 513)
        grid = np.asarray(grid, dtype=float)
        ref = duhamel_solve(self.sys_, self.f_, self.ic_, grid)
        return -float(np.max(np.abs(ref.x - self.predict(grid))))


class ModalMdofSolver(_ParamsMixin):
    """fit/predict facade over the modal MDOF solver."""

    _param_names = ("engine", "degree")

    def __init__(self, engine: str = "oracle", degree: int = 16):
        self.engine = engine
        self.degree = degree

    def fit(self, sys, f, ic, grid):
        from .mdof import mdof_solve

        engine = self.engine if self.engine == "oracle" else ("weak", int(self.degree))
        self.sys_ = sys
        self.solution_ = mdof_solve(sys, f, ic, np.asarray(grid, dtype=float), engine=engine)
        return self

    def predict(self, dof: int) -> np.ndarray:
        if not hasattr(self, "solution_"):
            raise ValidationError("call fit before predict")
        return self.solution_.trajectories[dof].x
