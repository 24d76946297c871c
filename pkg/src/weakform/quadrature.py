"""Exponential-weighted inner products, weak antiderivatives, and norms.

The weighted product is <f, g>_c = int_0^T e^{ct} f g dt. Polynomial
pairs integrate exactly through the moment kernels in _moments; anything
else goes through composite Gauss-Legendre panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._moments import exp_moment, poly_exp_integral
from .errors import ValidationError
from .model import Excitation, _shift_poly

__all__ = [
    "WeightedProductSpec",
    "exp_moment",
    "inner_product_c",
    "weak_integral_F",
    "WeakAntiderivative",
    "h_minus1_norm",
    "weighted_l2_norm",
    "composite_gauss",
]


@dataclass(frozen=True)
class WeightedProductSpec:
    """Weight exponent, integration interval, and Gauss order per segment."""

    c: float
    interval: tuple
    gauss_order: int = 12

    def __post_init__(self):
        a, b = self.interval
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValidationError(f"bad interval {self.interval}")
        if self.gauss_order < 2:
            raise ValidationError("gauss_order must be >= 2")
        object.__setattr__(self, "interval", (float(a), float(b)))


@lru_cache(maxsize=32)
def _gauss_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def composite_gauss(fun, a: float, b: float, panels: int, order: int = 12) -> float:
    """Composite Gauss-Legendre integral of a callable over [a, b]."""
    x, w = _gauss_rule(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for i in range(panels):
        mid = 0.5 * (edges[i] + edges[i + 1])
        half = 0.5 * (edges[i + 1] - edges[i])
        total += half * float(np.dot(w, fun(mid + half * x)))
    return total


def _union_breaks(a: float, b: float, *meshes) -> np.ndarray:
    pts = [np.array([a, b])]
    for m in meshes:
        pts.append(np.asarray(m, dtype=float))
    allpts = np.unique(np.concatenate(pts))
    allpts = allpts[(allpts >= a - 1e-14 * max(1.0, abs(a))) & (allpts <= b + 1e-14 * max(1.0, abs(b)))]
    if allpts[0] > a:
        allpts = np.concatenate(([a], allpts))
    if allpts[-1] < b:
        allpts = np.concatenate((allpts, [b]))
    return allpts


def _local_coeffs(f: Excitation, t_left: float) -> np.ndarray:
    """Coefficients of f in tau = t - t_left, valid just right of t_left."""
    j = int(np.searchsorted(f.mesh, t_left, side="right") - 1)
    j = min(max(j, 0), len(f.segments) - 1)
    return _shift_poly(f.segments[j], t_left - f.mesh[j])


def inner_product_c(f, g, spec: WeightedProductSpec) -> float:
    """<f, g>_c over spec.interval.

    Excitation x Excitation pairs integrate segment-exactly via moments on
    the union mesh. Mixed or callable pairs use composite Gauss of
    spec.gauss_order per panel, with panels refined below the union mesh.
    """
    a, b = spec.interval
    c = spec.c
    f_exc = isinstance(f, Excitation)
    g_exc = isinstance(g, Excitation)
    meshes = [h.mesh for h in (f, g) if isinstance(h, Excitation)]
    breaks = _union_breaks(a, b, *meshes)

    if f_exc and g_exc:
        total = 0.0
        for i in range(breaks.size - 1):
            tl, tr = breaks[i], breaks[i + 1]
            pf = _local_coeffs(f, tl)
            pg = _local_coeffs(g, tl)
            prod = np.convolve(pf, pg)
            total += math.exp(c * tl) * poly_exp_integral(prod, c, tr - tl)
        return total

    fe = f if callable(f) else None
    ge = g if callable(g) else None
    if fe is None or ge is None:
        raise ValidationError("inner_product_c arguments must be Excitation or callable")
    total = 0.0
    for i in range(breaks.size - 1):
        tl, tr = breaks[i], breaks[i + 1]
        n_sub = max(1, int(math.ceil((tr - tl) / ((b - a) / 16.0))))
        total += composite_gauss(
            lambda t: np.exp(c * t) * eval_on_grid(fe, t) * eval_on_grid(ge, t),
            tl, tr, n_sub, spec.gauss_order,
        )
    return total


def eval_on_grid(fun, ts) -> np.ndarray:
    """Evaluate a callable on an array, looping if it only takes scalars."""
    ts = np.asarray(ts, dtype=float)
    try:
        out = np.asarray(fun(ts), dtype=float)
        if out.shape == ts.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fun(float(s))) for s in ts])


class WeakAntiderivative:
    """F(t) = K + int_0^t e^{c tau} f(tau) dtau for piecewise-polynomial f.

    Constructed with F(0) = 0; shifted copies share the segment data.
    Evaluation is prefix value plus a stable local moment integral, so no
    unstable antiderivative recursion is ever run.
    """

    def __init__(self, f: Excitation, c: float, offset: float = 0.0):
        self.f = f
        self.c = float(c)
        self.offset = float(offset)
        prefix = np.zeros(f.mesh.size)
        for i in range(len(f.segments)):
            h = f.mesh[i + 1] - f.mesh[i]
            seg = math.exp(self.c * f.mesh[i]) * poly_exp_integral(f.segments[i], self.c, h)
            prefix[i + 1] = prefix[i] + seg
        self._prefix = prefix

    @property
    def mesh(self) -> np.ndarray:
        return self.f.mesh

    def shifted(self, k: float) -> "WeakAntiderivative":
        out = WeakAntiderivative.__new__(WeakAntiderivative)
        out.f = self.f
        out.c = self.c
        out.offset = self.offset + float(k)
        out._prefix = self._prefix
        return out

    def __call__(self, t):
        scalar = np.isscalar(t)
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self.f.segment_index(t_arr)
        out = np.empty_like(t_arr)
        for j in np.unique(idx):
            mask = idx == j
            tl = self.f.mesh[j]
            scale = math.exp(self.c * tl)
            vals = np.array([
                poly_exp_integral(self.f.segments[j], self.c, s)
                for s in (t_arr[mask] - tl)
            ])
            out[mask] = self._prefix[j] + scale * vals
        out += self.offset
        return float(out[0]) if scalar else out

    def end_value(self) -> float:
        return float(self._prefix[-1] + self.offset)

    def mean(self, order: int = 24) -> float:
        """Plain average of F over [0, t_end]."""
        total = 0.0
        for i in range(len(self.f.segments)):
            tl, tr = self.f.mesh[i], self.f.mesh[i + 1]
            panels = max(4, int(math.ceil((tr - tl) / (self.f.t_end / 32.0))))
            total += composite_gauss(self, tl, tr, panels, order)
        return total / self.f.t_end

    def l2_norm(self, shift: float = 0.0, order: int = 24) -> float:
        """Plain L2 norm of F - shift over [0, t_end]."""
        total = 0.0
        for i in range(len(self.f.segments)):
            tl, tr = self.f.mesh[i], self.f.mesh[i + 1]
            panels = max(4, int(math.ceil((tr - tl) / (self.f.t_end / 32.0))))
            total += composite_gauss(
                lambda t: (self(t) - shift) ** 2, tl, tr, panels, order
            )
        return math.sqrt(max(total, 0.0))


def prefix_integrals(breaks: np.ndarray, integrand, per_len: float, order: int = 16) -> np.ndarray:
    """Prefix integrals of a piecewise-smooth callable at the given breakpoints."""
    xg, wg = _gauss_rule(order)
    prefix = np.zeros(breaks.size)
    for i in range(breaks.size - 1):
        a, b = breaks[i], breaks[i + 1]
        n_pan = max(2, int(math.ceil((b - a) / per_len)))
        edges = np.linspace(a, b, n_pan + 1)
        total = 0.0
        for p in range(n_pan):
            mid = 0.5 * (edges[p] + edges[p + 1])
            half = 0.5 * (edges[p + 1] - edges[p])
            total += half * float(np.dot(wg, integrand(mid + half * xg)))
        prefix[i + 1] = prefix[i] + total
    return prefix


def partial_integral(breaks, prefix, integrand, t: float, per_len: float, order: int = 16) -> float:
    """Integral from 0 to t using precomputed prefix values at the breaks."""
    j = int(np.searchsorted(breaks, t, side="right") - 1)
    j = min(max(j, 0), breaks.size - 2)
    a = breaks[j]
    if t <= a:
        return float(prefix[j])
    xg, wg = _gauss_rule(order)
    n_pan = max(1, int(math.ceil((t - a) / per_len)))
    edges = np.linspace(a, t, n_pan + 1)
    total = 0.0
    for p in range(n_pan):
        mid = 0.5 * (edges[p] + edges[p + 1])
        half = 0.5 * (edges[p + 1] - edges[p])
        total += half * float(np.dot(wg, integrand(mid + half * xg)))
    return float(prefix[j] + total)


def weak_integral_F(f: Excitation, c: float) -> WeakAntiderivative:
    """Antiderivative F of e^{c.}f with F(0) = 0, continuous across breaks."""
    return WeakAntiderivative(f, c)


def h_minus1_norm(f: Excitation, c: float, mean_adjust: bool = True) -> float:
    """||F||_L2 with F = weak_integral_F(f, c).

    mean_adjust subtracts the plain average of F first, which is the
    constant minimizing the L2 norm and matches the duality quotient over
    H1_0 test functions (constants pair to zero there). mean_adjust=False
    keeps the raw F(0) = 0 normalization.
    """
    F = weak_integral_F(f, c)
    if mean_adjust:
        return F.l2_norm(shift=F.mean())
    return F.l2_norm()


def weighted_l2_norm(f, c: float, interval: tuple, gauss_order: int = 12) -> float:
    """sqrt(<f, f>_c) over the interval."""
    spec = WeightedProductSpec(c, interval, gauss_order)
    return math.sqrt(max(inner_product_c(f, f, spec), 0.0))
