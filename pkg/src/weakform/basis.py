"""Basis families for the trial space: Bernstein polynomials and damped waves.

A BasisSet carries n + 2 functions b_0 .. b_{n+1} on [0, t_bar]: two
boundary carriers (b_0(0) = 1, b_{n+1}(t_bar) = 1, each vanishing at the
other end) and n interior functions vanishing at both ends. Gram
matrices over the full index set are computed exactly per family; the
Galerkin layer slices out the blocks it needs.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ._bernstein import (
    bern_all_values,
    bern_exp_integral,
    bern_from_monomial,
    bern_pair_gram,
    bern_pair_weight,
    bern_restrict,
)
from ._moments import exp_moment, poly_exp_integral
from .errors import ValidationError
from .model import Excitation

BERNSTEIN_DEGREE_CAP = 40


class BasisSet:
    """Common interface; concrete families fill in evaluation and Grams."""

    t_bar: float
    n: int
    kind: str
    basis_id: str

    @property
    def size(self) -> int:
        return self.n + 2

    def eval_all(self, t) -> np.ndarray:
        raise NotImplementedError

    def eval_all_deriv(self, t) -> np.ndarray:
        raise NotImplementedError

    def values_at_0(self) -> np.ndarray:
        return self.eval_all(np.array([0.0]))[:, 0]

    def derivs_at_0(self) -> np.ndarray:
        return self.eval_all_deriv(np.array([0.0]))[:, 0]

    def forcing_vector(self, f: Excitation, c: float) -> np.ndarray:
        """Vector of <f, b_i>_c over the full index set, segment-exact."""
        raise NotImplementedError

    def _check_invariants(self):
        v0 = self.eval_all(np.array([0.0]))[:, 0]
        vT = self.eval_all(np.array([self.t_bar]))[:, 0]
        tol = 1e-12
        if abs(v0[0] - 1.0) > tol or abs(vT[0]) > tol:
            raise ValidationError("left carrier must satisfy b0(0)=1, b0(T)=0")
        if abs(vT[-1] - 1.0) > tol or abs(v0[-1]) > tol:
            raise ValidationError("right carrier must satisfy b_{n+1}(T)=1, b_{n+1}(0)=0")
        if self.n > 0:
            interior = np.concatenate((v0[1:-1], vT[1:-1]))
            if np.max(np.abs(interior)) > tol:
                raise ValidationError("interior functions must vanish at both ends")
        d0 = self.derivs_at_0()
        if np.max(np.abs(d0[1:])) == 0.0:
            raise ValidationError("need an interior or right-carrier slope at t=0 for closure")


class BernsteinBasis(BasisSet):
    """b_i = B_{i,N}(t / t_bar); carriers are the two endpoint functions."""

    def __init__(self, t_bar: float, degree: int):
        if degree < 2:
            raise ValidationError("Bernstein degree must be >= 2")
        if degree > BERNSTEIN_DEGREE_CAP:
            raise ValidationError(
                f"Bernstein degree {degree} above cap {BERNSTEIN_DEGREE_CAP}; "
                "the value Gram becomes numerically singular"
            )
        if t_bar <= 0:
            raise ValidationError("t_bar must be positive")
        self.t_bar = float(t_bar)
        self.degree = int(degree)
        self.n = self.degree - 1
        self.kind = "bernstein"
        self.basis_id = f"bernstein-{degree}"
        self._check_invariants()

    def eval_all(self, t) -> np.ndarray:
        u = np.atleast_1d(np.asarray(t, dtype=float)) / self.t_bar
        return bern_all_values(self.degree, u)

    def eval_all_deriv(self, t) -> np.ndarray:
        N = self.degree
        u = np.atleast_1d(np.asarray(t, dtype=float)) / self.t_bar
        low = bern_all_values(N - 1, u)
        out = np.zeros((N + 1, u.size))
        out[0] = -low[0]
        out[N] = low[N - 1]
        for i in range(1, N):
            out[i] = low[i - 1] - low[i]
        return (N / self.t_bar) * out

    def derivs_at_0(self) -> np.ndarray:
        d0 = np.zeros(self.degree + 1)
        d0[0] = -self.degree / self.t_bar
        d0[1] = self.degree / self.t_bar
        return d0

    def _deriv_incidence(self) -> np.ndarray:
        # rows: functions 0..N; cols: degree N-1 coefficients of the derivative
        N = self.degree
        D = np.zeros((N + 1, N))
        D[0, 0] = -1.0
        D[N, N - 1] = 1.0
        for i in range(1, N):
            D[i, i - 1] = 1.0
            D[i, i] = -1.0
        return (N / self.t_bar) * D

    def gram_value(self, c: float) -> np.ndarray:
        return bern_pair_gram(self.degree, self.degree, c, self.t_bar)

    def gram_deriv(self, c: float) -> np.ndarray:
        D = self._deriv_incidence()
        G = bern_pair_gram(self.degree - 1, self.degree - 1, c, self.t_bar)
        return D @ G @ D.T

    def gram_value_deriv(self, c: float) -> np.ndarray:
        D = self._deriv_incidence()
        G = bern_pair_gram(self.degree, self.degree - 1, c, self.t_bar)
        return G @ D.T

    def forcing_vector(self, f: Excitation, c: float) -> np.ndarray:
        N = self.degree
        T = self.t_bar
        out = np.zeros(N + 1)
        eye = np.eye(N + 1)
        for i in range(len(f.segments)):
            tl, tr = f.mesh[i], f.mesh[i + 1]
            h = tr - tl
            # basis restricted to the segment, in its local degree-N frame
            R = np.column_stack([bern_restrict(eye[p], tl / T, tr / T) for p in range(N + 1)])
            fb = bern_from_monomial(f.segments[i], f.segments[i].size - 1, h)
            d = fb.size - 1
            W = bern_pair_weight(N, d)
            E = bern_exp_integral(N + d, c, h)
            idx = np.add.outer(np.arange(N + 1), np.arange(d + 1))
            seg = (W * E[idx]) @ fb
            out += math.exp(c * tl) * (R.T @ seg)
        return out


class DampedWaveBasis(BasisSet):
    """Interior b_j = e^{-ct/2} sin(j pi t / t_bar); cosine/sine carriers.

    Each function is held as complex-exponential atoms sum Re(alpha e^{zt}),
    so all weighted Grams reduce to order-zero complex moments and are
    exact. The carrier choice here is this project's own; the family is
    experimental and loses to Bernstein in conditioning experiments.
    """

    def __init__(self, t_bar: float, c: float, n: int):
        if n < 1:
            raise ValidationError("need at least one interior wave")
        if t_bar <= 0:
            raise ValidationError("t_bar must be positive")
        self.t_bar = float(t_bar)
        self.c = float(c)
        self.n = int(n)
        self.kind = "damped-wave"
        self.basis_id = f"damped-wave-{n}"
        g = -0.5 * self.c
        wT = math.pi / (2.0 * self.t_bar)
        atoms = []
        # left carrier: e^{-ct/2} cos(pi t / (2 t_bar))
        atoms.append([(1.0 + 0.0j, complex(g, wT))])
        for j in range(1, self.n + 1):
            wj = j * math.pi / self.t_bar
            atoms.append([(-1.0j, complex(g, wj))])
        # right carrier: sin(pi t / (2 t_bar)), no decay factor
        atoms.append([(-1.0j, complex(0.0, wT))])
        self._atoms = atoms
        self._check_invariants()

    @staticmethod
    def _eval_atoms(atoms, t_arr: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t_arr)
        for alpha, z in atoms:
            out = out + (alpha * np.exp(z * t_arr)).real
        return out

    def eval_all(self, t) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([self._eval_atoms(a, t_arr) for a in self._atoms])

    def eval_all_deriv(self, t) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([
            self._eval_atoms([(alpha * z, z) for alpha, z in a], t_arr)
            for a in self._atoms
        ])

    def _atom_gram(self, left_atoms, right_atoms, c: float) -> float:
        # int_0^T e^{ct} Re(a e^{zt}) Re(b e^{wt}) dt by splitting the product
        total = 0.0
        for a, z in left_atoms:
            for b, w in right_atoms:
                total += 0.5 * (a * b * exp_moment(c + z + w, 0, 0.0, self.t_bar)).real
                total += 0.5 * (a * b.conjugate() * exp_moment(c + z + w.conjugate(), 0, 0.0, self.t_bar)).real
        return total

    def _gram(self, c: float, deriv_left: bool, deriv_right: bool) -> np.ndarray:
        def prep(atoms, use_deriv):
            return [(alpha * z, z) for alpha, z in atoms] if use_deriv else atoms

        m = self.size
        G = np.empty((m, m))
        for i in range(m):
            ai = prep(self._atoms[i], deriv_left)
            for j in range(i if deriv_left == deriv_right else 0, m):
                G[i, j] = self._atom_gram(ai, prep(self._atoms[j], deriv_right), c)
                if deriv_left == deriv_right:
                    G[j, i] = G[i, j]
        return G

    def gram_value(self, c: float) -> np.ndarray:
        return self._gram(c, False, False)

    def gram_deriv(self, c: float) -> np.ndarray:
        return self._gram(c, True, True)

    def gram_value_deriv(self, c: float) -> np.ndarray:
        return self._gram(c, False, True)

    def forcing_vector(self, f: Excitation, c: float) -> np.ndarray:
        out = np.zeros(self.size)
        for q, atoms in enumerate(self._atoms):
            total = 0.0
            for alpha, z in atoms:
                for i in range(len(f.segments)):
                    tl = f.mesh[i]
                    h = f.mesh[i + 1] - tl
                    w = c + z
                    total += (alpha * np.exp(w * tl) * poly_exp_integral(f.segments[i], w, h)).real
            out[q] = total
        return out


class TransformedBasis(BasisSet):
    """Interior block recombined by a matrix T; carriers untouched.

    Used by the orthonormalization flag: rows of T give new interior
    functions as combinations of the old ones. Grams follow by congruence
    with the augmented transform, so exactness is preserved.
    """

    def __init__(self, base: BasisSet, interior_transform: np.ndarray):
        T = np.asarray(interior_transform, dtype=float)
        if T.shape != (base.n, base.n):
            raise ValidationError(f"transform must be {base.n} x {base.n}")
        self.base = base
        self.t_bar = base.t_bar
        self.n = base.n
        self.kind = base.kind + "-orthonormalized"
        self.basis_id = base.basis_id + "-on"
        A = np.eye(base.size)
        A[1:-1, 1:-1] = T
        self._aug = A
        self._check_invariants()

    def eval_all(self, t) -> np.ndarray:
        return self._aug @ self.base.eval_all(t)

    def eval_all_deriv(self, t) -> np.ndarray:
        return self._aug @ self.base.eval_all_deriv(t)

    def gram_value(self, c: float) -> np.ndarray:
        return self._aug @ self.base.gram_value(c) @ self._aug.T

    def gram_deriv(self, c: float) -> np.ndarray:
        return self._aug @ self.base.gram_deriv(c) @ self._aug.T

    def gram_value_deriv(self, c: float) -> np.ndarray:
        return self._aug @ self.base.gram_value_deriv(c) @ self._aug.T

    def forcing_vector(self, f: Excitation, c: float) -> np.ndarray:
        return self._aug @ self.base.forcing_vector(f, c)


def bernstein_basis(t_bar: float, degree: int, orthonormalize: bool = False,
                    c: Optional[float] = None) -> BasisSet:
    """Bernstein family of the given degree; n = degree - 1 interior functions.

    With orthonormalize=True the interior block is Cholesky-orthonormalized
    against <.,.>_c (c required); intended for conditioning experiments.
    """
    base = BernsteinBasis(t_bar, degree)
    if not orthonormalize:
        return base
    if c is None:
        raise ValidationError("orthonormalization needs the weight exponent c")
    G = base.gram_value(c)[1:-1, 1:-1]
    L = np.linalg.cholesky(G)
    T = np.linalg.inv(L)
    return TransformedBasis(base, T)


def damped_wave_basis(t_bar: float, c: float, n: int) -> BasisSet:
    """Damped stationary waves with cosine/sine carriers. Experimental."""
    return DampedWaveBasis(t_bar, c, n)


def basis_gram(basis: BasisSet, c: float, k: float, which: str) -> np.ndarray:
    """Full (n+2) x (n+2) Gram: 'value', 'derivative', or the 'mixed'
    combination -<b_i', b_j'>_c + k <b_i, b_j>_c used by the Galerkin matrix."""
    if which == "value":
        return basis.gram_value(c)
    if which == "derivative":
        return basis.gram_deriv(c)
    if which == "mixed":
        return -basis.gram_deriv(c) + k * basis.gram_value(c)
    raise ValidationError(f"unknown gram kind {which!r}")
