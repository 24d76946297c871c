"""Energy bookkeeping: invariants of the weighted Hamiltonian and its law."""

import numpy as np
import pytest

from helpers import pw_linear_hat
from weakform import Excitation, InitialConditions, SdofSystem, duhamel_solve
from weakform.energy import (
    conservation_identity,
    dissipation_audit,
    energy_law_residual,
    growth_factor,
    hamiltonian_c,
    lagrangian_c,
    plain_energy,
)
from weakform.errors import ValidationError
from weakform.galerkin import apply_F_operator


def test_algebra_between_energies():
    sys_ = SdofSystem(c=0.6, k=2.0, t_bar=4.0)
    t = np.linspace(0.0, 4.0, 9)
    x = np.cos(t)
    v = -np.sin(t)
    H = hamiltonian_c(sys_, x, v, t)
    L = lagrangian_c(sys_, x, v, t)
    # H + L = e^{ct} v^2 and H - L = e^{ct} k x^2
    assert np.allclose(H + L, np.exp(0.6 * t) * v**2, atol=1e-13)
    assert np.allclose(H - L, np.exp(0.6 * t) * 2.0 * x**2, atol=1e-13)
    assert np.allclose(plain_energy(sys_, x, v), 0.5 * v**2 + x**2, atol=1e-14)


def test_undamped_free_energy_constant():
    sys_ = SdofSystem(c=0.0, k=2.0, t_bar=10.0)
    grid = np.linspace(0.0, 10.0, 2001)
    tr = duhamel_solve(sys_, Excitation.zero(10.0), InitialConditions(1.0, 0.5), grid)
    H = hamiltonian_c(sys_, tr.x, tr.v, tr.t)
    assert np.max(np.abs(H - H[0])) / H[0] < 1e-9


def test_energy_law_residual_free():
    sys_ = SdofSystem(c=0.2, k=1.0, t_bar=10.0)
    grid = np.arange(0.0, 10.0 + 1e-12, 1e-3)
    tr = duhamel_solve(sys_, Excitation.zero(10.0), InitialConditions(1.0, 0.0), grid)
    assert energy_law_residual(sys_, tr) < 1e-4


def test_energy_law_residual_forced_smooth():
    sys_ = SdofSystem(c=0.5, k=2.0, t_bar=6.0)
    f = Excitation.from_polynomial([0.3, 0.2, -0.05], 6.0)
    grid = np.arange(0.0, 6.0 + 1e-12, 1e-3)
    tr = duhamel_solve(sys_, f, InitialConditions(0.2, -0.1), grid)
    assert energy_law_residual(sys_, tr, f) < 1e-4


def test_energy_law_residual_forced_kink():
    # the centered difference at the hat's kink node is only first order,
    # so the defect there dominates and shrinks linearly with h
    sys_ = SdofSystem(c=0.5, k=2.0, t_bar=6.0)
    f = pw_linear_hat(6.0, 1.5)
    res = []
    for h in (1e-3, 2e-4):
        grid = np.arange(0.0, 6.0 + 1e-12, h)
        tr = duhamel_solve(sys_, f, InitialConditions(0.2, -0.1), grid)
        res.append(energy_law_residual(sys_, tr, f))
    assert res[0] < 1e-3
    assert res[1] < 0.3 * res[0]


class TestConservationIdentity:
    def test_three_way_manufactured(self):
        # boundary-compatible polynomial: u(0) = u(t_bar) = 0
        sys_ = SdofSystem(c=0.3, k=1.5, t_bar=2.0)
        u = Excitation.from_polynomial([0.0, 2.0, -3.0, 1.0], 2.0)  # 2t - 3t^2 + t^3
        f = apply_F_operator(sys_, u)
        lhs, rhs1, rhs2 = conservation_identity(sys_, f, u, du=u.derivative())
        scale = max(abs(lhs), abs(rhs1), abs(rhs2), 1.0)
        assert abs(lhs - rhs1) / scale < 1e-10
        assert abs(lhs - rhs2) / scale < 1e-10

    def test_three_way_undamped_sine(self):
        sys_ = SdofSystem(c=0.0, k=1.0, t_bar=2.0)
        u = Excitation.sample_hermite(
            lambda t: np.sin(np.pi * t), lambda t: np.pi * np.cos(np.pi * t), 2.0, 256
        )
        f = apply_F_operator(sys_, u)
        lhs, rhs1, rhs2 = conservation_identity(sys_, f, u, du=u.derivative())
        scale = max(abs(lhs), abs(rhs1), abs(rhs2), 1.0)
        assert abs(lhs - rhs1) / scale < 1e-8
        assert abs(lhs - rhs2) / scale < 1e-8

    def test_rejects_incompatible_boundary(self):
        sys_ = SdofSystem(c=0.3, k=1.5, t_bar=2.0)
        u = Excitation.from_polynomial([1.0, 1.0], 2.0)  # u(0) = 1 != 0
        f = apply_F_operator(sys_, u)
        with pytest.raises(ValidationError):
            conservation_identity(sys_, f, u, du=u.derivative())


class TestGrowthFactor:
    def test_limit_c_to_zero(self):
        assert growth_factor(0.0, 3.0) == pytest.approx(3.0)
        assert growth_factor(1e-14, 3.0) == pytest.approx(3.0, rel=1e-9)

    def test_generic_value(self):
        assert growth_factor(0.5, 2.0) == pytest.approx(np.expm1(1.0) / 0.5, rel=1e-14)


class TestDissipationAudit:
    @pytest.mark.parametrize(
        "c,k,forcing,bal_tol",
        [
            (0.0, 1.0, "zero", 1e-6),
            # hat: the cumulative quadrature sees a one-sided df sample at
            # the kink node, which costs one order of accuracy there
            (0.2, 1.0, "hat", 1e-5),
            (1.0, 4.0, "poly", 1e-6),
            (0.5, 2.0, "const", 1e-6),
        ],
    )
    def test_inequality_holds_on_oracle_motion(self, c, k, forcing, bal_tol):
        t_bar = 6.0
        sys_ = SdofSystem(c=c, k=k, t_bar=t_bar)
        f = {
            "zero": Excitation.zero(t_bar),
            "hat": pw_linear_hat(t_bar, 1.0),
            "poly": Excitation.from_polynomial([0.5, 0.1], t_bar),
            "const": Excitation.constant(1.0, t_bar),
        }[forcing]
        grid = np.linspace(0.0, t_bar, 4001)
        tr = duhamel_solve(sys_, f, InitialConditions(0.5, -0.3), grid)
        audit = dissipation_audit(sys_, f, tr)
        scale = max(abs(audit.dissipation_lhs), abs(audit.dissipation_rhs), 1.0)
        assert audit.dissipation_margin >= -1e-9 * scale
        assert abs(audit.balance_residual) < bal_tol * scale
        assert audit.law_residual < 1e-3

    def test_balance_tight_on_manufactured_motion(self):
        sys_ = SdofSystem(c=0.4, k=2.0, t_bar=3.0)
        u = Excitation.from_polynomial([0.25, -0.5, 0.75, -0.125], 3.0)
        f = apply_F_operator(sys_, u)
        grid = np.linspace(0.0, 3.0, 4001)
        tr = duhamel_solve(sys_, f, InitialConditions(u(0.0), u.derivative()(0.0)), grid)
        audit = dissipation_audit(sys_, f, tr)
        assert abs(audit.balance_residual) < 1e-7
