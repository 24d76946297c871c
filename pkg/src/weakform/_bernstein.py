"""Bernstein coefficient algebra on the unit parameter interval.

A polynomial of degree n is carried as a coefficient vector c of length
n + 1 with p(u) = sum_l c[l] B_{l,n}(u), u in [0, 1]. Mapping u to a
physical interval [a, a + h] is the caller's concern except where the
length h enters a formula directly (derivatives, weighted integrals).

Products, elevation and subdivision stay inside the Bernstein frame.
Conversion to the monomial frame is deliberately one-way (monomial in,
Bernstein out): the reverse direction is catastrophically ill-conditioned
at the degrees used here.
"""

from __future__ import annotations

import math

import numpy as np

from ._moments import kummer_m

# product degree n + m is capped so that pair-weight binomial ratios and
# weighted moments stay well inside the validated envelope
MAX_PRODUCT_DEGREE = 90


def bern_all_values(n: int, u) -> np.ndarray:
    """Table of all B_{l,n}(u), shape (n+1, npts).

    Built by the degree-raising recurrence, so every entry is a convex
    combination of previous entries; no binomials are formed.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros((n + 1, u.size))
    out[0] = 1.0
    for m in range(1, n + 1):
        out[m] = u * out[m - 1]
        for l in range(m - 1, 0, -1):
            out[l] = u * out[l - 1] + (1.0 - u) * out[l]
        out[0] = (1.0 - u) * out[0]
    return out


def bern_eval(coeffs, u) -> np.ndarray:
    """Evaluate sum_l coeffs[l] B_{l,n}(u); returns an array over atleast-1d u."""
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs @ bern_all_values(coeffs.size - 1, u)


def bern_deriv_coeffs(coeffs, h: float = 1.0) -> np.ndarray:
    """Degree n-1 coefficients of d/dt, with t the physical variable on [0, h]."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.size - 1
    if n == 0:
        return np.zeros(1)
    return (n / h) * np.diff(coeffs)


def bern_elevate(coeffs, target: int) -> np.ndarray:
    """Re-express in the degree `target` basis. Exact; convex steps only."""
    c = np.asarray(coeffs, dtype=float)
    n = c.size - 1
    if target < n:
        raise ValueError(f"cannot lower degree {n} to {target}")
    while n < target:
        out = np.empty(n + 2)
        out[0] = c[0]
        out[n + 1] = c[n]
        i = np.arange(1, n + 1)
        w = i / (n + 1)
        out[1:-1] = w * c[i - 1] + (1.0 - w) * c[i]
        c = out
        n += 1
    return c


def bern_product(p, q) -> np.ndarray:
    """Coefficients of the pointwise product, degree n + m.

    Weights C(n,i)C(m,j)/C(n+m,i+j) are formed as exact integer ratios
    before the single float division, and are all positive.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n, m = p.size - 1, q.size - 1
    if n + m > MAX_PRODUCT_DEGREE:
        raise ValueError(f"product degree {n + m} exceeds cap {MAX_PRODUCT_DEGREE}")
    r = np.zeros(n + m + 1)
    for k in range(n + m + 1):
        den = math.comb(n + m, k)
        acc = 0.0
        for i in range(max(0, k - m), min(n, k) + 1):
            acc += p[i] * q[k - i] * ((math.comb(n, i) * math.comb(m, k - i)) / den)
        r[k] = acc
    return r


def bern_from_monomial(a, n: int, h: float = 1.0) -> np.ndarray:
    """Bernstein coefficients, degree n, of p(t) = sum_m a[m] t^m on [0, h].

    Requires n >= deg(p). Weights C(i,m)/C(n,m) are exact integer ratios.
    """
    a = np.asarray(a, dtype=float)
    deg = a.size - 1
    if deg > n:
        raise ValueError(f"monomial degree {deg} exceeds target degree {n}")
    scaled = a * h ** np.arange(a.size)
    out = np.zeros(n + 1)
    for i in range(n + 1):
        s = 0.0
        for m in range(min(i, deg) + 1):
            s += scaled[m] * (math.comb(i, m) / math.comb(n, m))
        out[i] = s
    return out


def bern_subdivide(coeffs, t: float):
    """De Casteljau split at parameter t; returns (left, right) coefficients.

    left represents p on [0, t] and right on [t, 1], each re-parameterized
    to the unit interval.
    """
    c = np.asarray(coeffs, dtype=float).copy()
    n = c.size - 1
    left = np.empty(n + 1)
    right = np.empty(n + 1)
    left[0] = c[0]
    right[n] = c[n]
    for r in range(1, n + 1):
        c[: n - r + 1] = (1.0 - t) * c[: n - r + 1] + t * c[1 : n - r + 2]
        left[r] = c[0]
        right[n - r] = c[n - r]
    return left, right


def bern_restrict(coeffs, u0: float, u1: float) -> np.ndarray:
    """Coefficients of the same polynomial on [u0, u1], re-parameterized to [0, 1]."""
    if not (0.0 <= u0 < u1 <= 1.0):
        raise ValueError(f"bad subinterval [{u0}, {u1}]")
    c = np.asarray(coeffs, dtype=float)
    if u0 > 0.0:
        _, c = bern_subdivide(c, u0)
    if u1 < 1.0:
        c, _ = bern_subdivide(c, (u1 - u0) / (1.0 - u0))
    return c


def bern_pair_weight(n: int, m: int) -> np.ndarray:
    """Matrix W with B_{i,n} B_{j,m} = W[i,j] B_{i+j,n+m}."""
    W = np.empty((n + 1, m + 1))
    for i in range(n + 1):
        cni = math.comb(n, i)
        for j in range(m + 1):
            W[i, j] = (cni * math.comb(m, j)) / math.comb(n + m, i + j)
    return W


def bern_exp_integral(n: int, c: float, h: float) -> np.ndarray:
    """Vector of int_0^h B_{l,n}(t/h) e^{ct} dt for l = 0..n; real c only.

    Closed form h M(l+1, n+2, ch) / (n+1) with M the regular confluent
    series, evaluated by the all-positive resummation in _moments.
    """
    if h <= 0.0:
        raise ValueError("interval length must be positive")
    w = float(c) * float(h)
    vals = np.empty(n + 1)
    for l in range(n + 1):
        vals[l] = kummer_m(l + 1, n + 2, w)
    return (h / (n + 1)) * vals


def bern_pair_gram(n: int, m: int, c: float, h: float) -> np.ndarray:
    """Gram G[i,j] = int_0^h e^{ct} B_{i,n}(t/h) B_{j,m}(t/h) dt, exact."""
    W = bern_pair_weight(n, m)
    E = bern_exp_integral(n + m, c, h)
    idx = np.add.outer(np.arange(n + 1), np.arange(m + 1))
    return W * E[idx]
