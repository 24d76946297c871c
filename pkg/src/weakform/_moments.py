"""Stable closed-form moments of t^j * exp(c*t).

All integrals in the package that involve an exponential weight reduce to
the confluent hypergeometric series

    M(a, b, z) = sum_m  (a)_m z^m / ((b)_m m!)

summed in an all-positive arrangement: for negative real part the Kummer
transformation M(a, b, z) = e^z M(b - a, b, -z) is applied first, so no
subtraction of large terms ever occurs.  The textbook integration-by-parts
recursion for int t^j e^{ct} dt is mathematically equivalent but loses
O(j / (|c| h)) digits when |c| h is small; this resummation does not.

Complex weights (the oscillator kernels c/2 +- i*omega_d) are handled by
the same series; intervals are split so that |z| * h stays small enough
for the series to be cancellation-free at the working precision.
"""

from __future__ import annotations

import math

import numpy as np

# Largest monomial degree accepted by the moment engine.  Gram assembly of
# degree-40 Bernstein products tops out near 2 * 40 + segment degree.
MAX_MOMENT_DEGREE = 120

# |z| * h above this triggers interval splitting for complex weights.
_COMPLEX_SPLIT = 8.0

_EPS = np.finfo(float).eps


def _series(a: float, b: float, z) -> complex | float:
    """Sum of M(a, b, z) by direct summation; caller ensures Re z >= 0."""
    term = 1.0
    total = 1.0
    m = 0
    zmag = abs(z)
    while m < 1000:
        term = term * (a + m) * z / ((b + m) * (m + 1.0))
        total = total + term
        m += 1
        if abs(term) <= _EPS * abs(total) and m > zmag:
            return total
    raise ArithmeticError(f"confluent series failed to converge: a={a} b={b} z={z}")


def kummer_m(a: float, b: float, z):
    """Confluent hypergeometric M(a, b, z) for 0 < a < b, real or complex z."""
    if not 0 < a < b:
        raise ValueError("kummer_m requires 0 < a < b")
    re = z.real if isinstance(z, complex) else z
    if re < 0.0:
        return np.exp(z) * _series(b - a, b, -z)
    return _series(a, b, z)


def unit_moments(w, jmax: int):
    """Moments I_j = int_0^1 v^j e^{w v} dv for j = 0..jmax.

    Returned as a float array for real w, complex otherwise.  Each entry is
    M(j+1, j+2, w) / (j+1), evaluated by the cancellation-free series.
    """
    if jmax < 0:
        raise ValueError("jmax must be >= 0")
    out = np.empty(jmax + 1, dtype=complex if isinstance(w, complex) else float)
    for j in range(jmax + 1):
        out[j] = kummer_m(j + 1.0, j + 2.0, w) / (j + 1.0)
    return out


def _moment_shifted(c, j: int, a: float, h: float):
    # int_a^{a+h} t^j e^{ct} dt = e^{ca} sum_m C(j,m) a^{j-m} h^{m+1} I_m(c h)
    moms = unit_moments(c * h, j)
    acc = 0.0
    for m in range(j + 1):
        acc = acc + math.comb(j, m) * a ** (j - m) * h ** (m + 1) * moms[m]
    return np.exp(c * a) * acc


def exp_moment(c, j: int, a: float, b: float):
    """Integral of t^j e^{ct} over [a, b], exact up to roundoff.

    Parameters
    ----------
    c : float or complex
        Exponent weight.  |c| < 1e-12 uses the polynomial branch.
    j : int
        Monomial degree, 0 <= j <= MAX_MOMENT_DEGREE.
    a, b : float
        Integration endpoints; b < a flips the sign.

    For a >= 0 the evaluation is a sum of same-sign terms (real c), so the
    result carries full relative precision at any degree.
    """
    if not 0 <= j <= MAX_MOMENT_DEGREE:
        raise ValueError(f"moment degree {j} outside [0, {MAX_MOMENT_DEGREE}]")
    if b == a:
        return 0.0
    if b < a:
        return -exp_moment(c, j, b, a)
    if abs(c) < 1e-12:
        return (b ** (j + 1) - a ** (j + 1)) / (j + 1.0)
    iscomplex = isinstance(c, complex)
    h = b - a
    if iscomplex and abs(c) * h > _COMPLEX_SPLIT:
        pieces = int(math.ceil(abs(c) * h / _COMPLEX_SPLIT))
        cuts = np.linspace(a, b, pieces + 1)
        return sum(
            _moment_shifted(c, j, cuts[i], cuts[i + 1] - cuts[i])
            for i in range(pieces)
        )
    return _moment_shifted(c, j, a, h)


def poly_exp_integral(coeffs, c, h: float):
    """Integral of p(s) e^{cs} over [0, h] for p(s) = sum_j coeffs[j] s^j."""
    if h == 0.0:
        return 0.0
    total = 0.0
    for j, aj in enumerate(coeffs):
        if aj != 0.0:
            total = total + aj * exp_moment(c, j, 0.0, h)
    return total
