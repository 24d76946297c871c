"""Domain types shared across the solver.

Everything here is immutable after construction (ndarray fields are made
read-only), so instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import UnderdampedViolationError, ValidationError

# segment polynomials above this degree are rejected; keeps moment and
# quadrature degrees inside the validated envelope
MAX_SEGMENT_DEGREE = 10


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}")
    return value


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SdofSystem:
    """Mass-normalized damped oscillator: x'' + c x' + k x = f on [0, t_bar]."""

    c: float
    k: float
    t_bar: float

    def __post_init__(self):
        object.__setattr__(self, "c", _finite("c", self.c))
        object.__setattr__(self, "k", _finite("k", self.k))
        object.__setattr__(self, "t_bar", _finite("t_bar", self.t_bar))
        if self.k <= 0:
            raise ValidationError(f"stiffness k must be > 0, got {self.k}")
        if self.c < 0:
            raise ValidationError(f"damping c must be >= 0, got {self.c}")
        if self.t_bar <= 0:
            raise ValidationError(f"horizon t_bar must be > 0, got {self.t_bar}")
        if self.xi >= 1.0:
            raise UnderdampedViolationError(
                f"damping ratio xi = {self.xi} >= 1; only underdamped systems are supported"
            )

    @property
    def xi(self) -> float:
        return self.c / (2.0 * math.sqrt(self.k))

    @property
    def omega_n(self) -> float:
        return math.sqrt(self.k)

    @property
    def omega_d(self) -> float:
        xi = self.xi
        if xi >= 1.0:
            raise UnderdampedViolationError(
                f"damping ratio xi = {xi} >= 1; oscillatory closed forms undefined"
            )
        # (1-xi)(1+xi) instead of 1-xi^2: keeps accuracy as xi -> 1
        return self.omega_n * math.sqrt((1.0 - xi) * (1.0 + xi))


class DerivedParams(NamedTuple):
    xi: float
    omega_n: float
    omega_d: float


def derived_params(sys: SdofSystem) -> DerivedParams:
    """Damping ratio and the two eigenfrequencies. Errors if not underdamped."""
    return DerivedParams(sys.xi, sys.omega_n, sys.omega_d)


def _shift_poly(coeffs: np.ndarray, delta: float) -> np.ndarray:
    """Coefficients of p(tau + delta) given those of p(tau), ascending order."""
    n = coeffs.size - 1
    out = np.zeros(n + 1)
    for j in range(n + 1):
        aj = coeffs[j]
        if aj == 0.0:
            continue
        for m in range(j + 1):
            out[m] += aj * math.comb(j, m) * delta ** (j - m)
    return out


@dataclass(frozen=True)
class Excitation:
    """Piecewise-polynomial forcing on [0, mesh[-1]].

    segments[i] holds ascending local coefficients in tau = t - mesh[i].
    Local coordinates keep high-order coefficients small on late segments.
    Breakpoint evaluation is right-continuous; the final endpoint takes
    the last segment.
    """

    mesh: np.ndarray
    segments: tuple

    def __post_init__(self):
        mesh = _readonly(np.asarray(self.mesh, dtype=float))
        if mesh.ndim != 1 or mesh.size < 2:
            raise ValidationError("mesh needs at least two breakpoints")
        if not np.all(np.isfinite(mesh)):
            raise ValidationError("mesh contains non-finite entries")
        if mesh[0] != 0.0:
            raise ValidationError(f"mesh must start at 0, got {mesh[0]}")
        if np.any(np.diff(mesh) <= 0):
            raise ValidationError("mesh breakpoints must be strictly increasing")
        segs = tuple(_readonly(np.atleast_1d(np.asarray(s, dtype=float))) for s in self.segments)
        if len(segs) != mesh.size - 1:
            raise ValidationError(
                f"{len(segs)} segments for {mesh.size - 1} intervals"
            )
        for i, s in enumerate(segs):
            if s.ndim != 1:
                raise ValidationError(f"segment {i} coefficients must be 1-d")
            if s.size - 1 > MAX_SEGMENT_DEGREE:
                raise ValidationError(
                    f"segment {i} degree {s.size - 1} exceeds cap {MAX_SEGMENT_DEGREE}"
                )
            if not np.all(np.isfinite(s)):
                raise ValidationError(f"segment {i} has non-finite coefficients")
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "segments", segs)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(t_end: float) -> "Excitation":
        return Excitation(np.array([0.0, t_end]), (np.array([0.0]),))

    @staticmethod
    def constant(value: float, t_end: float) -> "Excitation":
        return Excitation(np.array([0.0, t_end]), (np.array([float(value)]),))

    @staticmethod
    def from_polynomial(coeffs: Sequence[float], t_end: float) -> "Excitation":
        """Single global segment; coeffs ascending in t."""
        return Excitation(np.array([0.0, t_end]), (np.asarray(coeffs, dtype=float),))

    @staticmethod
    def from_segments(mesh: Sequence[float], segments: Sequence[Sequence[float]]) -> "Excitation":
        return Excitation(np.asarray(mesh, dtype=float), tuple(np.asarray(s, dtype=float) for s in segments))

    @staticmethod
    def from_samples(t: Sequence[float], values: Sequence[float]) -> "Excitation":
        """Tabulated forcing, ingested by per-interval linear interpolation."""
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.size != values.size or t.size < 2:
            raise ValidationError("need matching t/value arrays with >= 2 samples")
        segs = []
        for i in range(t.size - 1):
            h = t[i + 1] - t[i]
            if h <= 0:
                raise ValidationError("sample times must be strictly increasing")
            segs.append(np.array([values[i], (values[i + 1] - values[i]) / h]))
        return Excitation(t, tuple(segs))

    @staticmethod
    def sample_hermite(
        func: Callable[[float], float],
        dfunc: Callable[[float], float],
        t_end: float,
        n_segments: int,
    ) -> "Excitation":
        """C1 piecewise-cubic interpolant from values and exact derivatives.

        Hermite data at the breakpoints gives one cubic per interval whose
        value and slope match func at both ends, so the result is C1 and
        its interpolation error is O(h^4) in value, O(h^3) in slope.
        """
        if n_segments < 1:
            raise ValidationError("n_segments must be >= 1")
        mesh = np.linspace(0.0, float(t_end), n_segments + 1)
        segs = []
        for i in range(n_segments):
            a, b = mesh[i], mesh[i + 1]
            h = b - a
            f0, f1 = float(func(a)), float(func(b))
            d0, d1 = float(dfunc(a)), float(dfunc(b))
            # cubic in tau: p(0)=f0, p'(0)=d0, p(h)=f1, p'(h)=d1
            c2 = (3.0 * (f1 - f0) / h - 2.0 * d0 - d1) / h
            c3 = (2.0 * (f0 - f1) / h + d0 + d1) / (h * h)
            segs.append(np.array([f0, d0, c2, c3]))
        return Excitation(mesh, tuple(segs))

    # -- properties ---------------------------------------------------

    @property
    def t_end(self) -> float:
        return float(self.mesh[-1])

    @property
    def degree(self) -> int:
        return max(s.size - 1 for s in self.segments)

    def is_zero(self) -> bool:
        return all(np.all(s == 0.0) for s in self.segments)

    # -- algebra ------------------------------------------------------

    def rebreak(self, extra: Sequence[float]) -> "Excitation":
        """Same function on the union mesh with the given extra breakpoints."""
        pts = np.union1d(self.mesh, np.asarray(extra, dtype=float))
        pts = pts[(pts >= 0.0) & (pts <= self.t_end + 1e-12 * max(1.0, self.t_end))]
        segs = []
        for i in range(pts.size - 1):
            j = int(np.searchsorted(self.mesh, pts[i], side="right") - 1)
            j = min(max(j, 0), len(self.segments) - 1)
            segs.append(_shift_poly(self.segments[j], pts[i] - self.mesh[j]))
        return Excitation(pts, tuple(segs))

    def __add__(self, other: "Excitation") -> "Excitation":
        if not isinstance(other, Excitation):
            return NotImplemented
        if abs(self.t_end - other.t_end) > 1e-12 * max(1.0, self.t_end):
            raise ValidationError("cannot add excitations on different domains")
        a = self.rebreak(other.mesh)
        b = other.rebreak(self.mesh)
        segs = []
        for sa, sb in zip(a.segments, b.segments):
            n = max(sa.size, sb.size)
            s = np.zeros(n)
            s[: sa.size] += sa
            s[: sb.size] += sb
            segs.append(s)
        return Excitation(a.mesh, tuple(segs))

    def __mul__(self, alpha: float) -> "Excitation":
        return Excitation(self.mesh, tuple(float(alpha) * s for s in self.segments))

    __rmul__ = __mul__

    def __neg__(self) -> "Excitation":
        return self * -1.0

    def __sub__(self, other: "Excitation") -> "Excitation":
        return self + (-other)

    def derivative(self) -> "Excitation":
        """Per-segment derivative. Jumps at breakpoints are not represented."""
        segs = []
        for s in self.segments:
            if s.size == 1:
                segs.append(np.array([0.0]))
            else:
                segs.append(s[1:] * np.arange(1, s.size))
        return Excitation(self.mesh, tuple(segs))

    def segment_index(self, t: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.mesh, t, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def __call__(self, t):
        return excitation_eval(self, t)


def excitation_eval(f: Excitation, t):
    """Evaluate the segment polynomial at t (scalar or array), Horner form."""
    scalar = np.isscalar(t)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    slack = 1e-12 * max(1.0, f.t_end)
    if np.any(t_arr < -slack) or np.any(t_arr > f.t_end + slack):
        raise ValidationError(
            f"evaluation time outside [0, {f.t_end}]"
        )
    idx = f.segment_index(t_arr)
    out = np.empty_like(t_arr)
    for j in np.unique(idx):
        mask = idx == j
        tau = t_arr[mask] - f.mesh[j]
        out[mask] = np.polynomial.polynomial.polyval(tau, f.segments[j])
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class InitialConditions:
    x0: float
    v0: float

    def __post_init__(self):
        object.__setattr__(self, "x0", _finite("x0", self.x0))
        object.__setattr__(self, "v0", _finite("v0", self.v0))


@dataclass(frozen=True)
class BoundaryConditions:
    x0: float
    xT: float

    def __post_init__(self):
        object.__setattr__(self, "x0", _finite("x0", self.x0))
        object.__setattr__(self, "xT", _finite("xT", self.xT))


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: displacement x and velocity v on a sorted grid."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t = _readonly(self.t)
        x = _readonly(self.x)
        v = _readonly(self.v)
        if not (t.shape == x.shape == v.shape) or t.ndim != 1:
            raise ValidationError("t, x, v must be 1-d arrays of equal length")
        if t.size and np.any(np.diff(t) <= 0):
            raise ValidationError("sample times must be strictly increasing")
        for name, a in (("t", t), ("x", x), ("v", v)):
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"trajectory {name} has non-finite entries")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    def covers(self, t_bar: float, tol: float = 1e-12) -> bool:
        """True when the grid spans [0, t_bar] inclusive."""
        if self.t.size < 2:
            return False
        scale = max(1.0, t_bar)
        return abs(self.t[0]) <= tol * scale and abs(self.t[-1] - t_bar) <= tol * scale

    def __add__(self, other: "Trajectory") -> "Trajectory":
        if not isinstance(other, Trajectory):
            return NotImplemented
        if self.t.shape != other.t.shape or np.any(self.t != other.t):
            raise ValidationError("trajectories sampled on different grids")
        return Trajectory(self.t, self.x + other.x, self.v + other.v)

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        if not isinstance(other, Trajectory):
            return NotImplemented
        if self.t.shape != other.t.shape or np.any(self.t != other.t):
            raise ValidationError("trajectories sampled on different grids")
        return Trajectory(self.t, self.x - other.x, self.v - other.v)


@dataclass(frozen=True)
class WeakSolution:
    """Galerkin solution x_ap = x0 b0 + sum_i u_i b_i + xT b_{n+1}.

    Boundary values are carried exactly by construction of the carriers.
    The basis object itself is kept for evaluation; basis_id is its tag.
    """

    basis: object
    u: np.ndarray
    x0: float
    xT: float
    condition: float = float("nan")

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))
        object.__setattr__(self, "x0", _finite("x0", self.x0))
        object.__setattr__(self, "xT", _finite("xT", self.xT))
        if self.u.size != self.basis.n:
            raise ValidationError(
                f"coefficient count {self.u.size} != interior dimension {self.basis.n}"
            )

    @property
    def basis_id(self) -> str:
        return self.basis.basis_id

    @property
    def full_coeffs(self) -> np.ndarray:
        return np.concatenate(([self.x0], self.u, [self.xT]))

    def eval(self, t):
        """Displacement and velocity of the approximate solution at t."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        vals = self.basis.eval_all(t_arr)
        ders = self.basis.eval_all_deriv(t_arr)
        w = self.full_coeffs
        return w @ vals, w @ ders

    def trajectory(self, grid) -> Trajectory:
        x, v = self.eval(grid)
        return Trajectory(np.asarray(grid, dtype=float), x, v)
