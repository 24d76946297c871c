"""Multi-DOF layer, exercised on the two-mass chain with Rayleigh damping."""

import numpy as np
import pytest

from weakform import Excitation, InitialConditions, SdofSystem
from weakform.analytic import homogeneous_solution
from weakform.errors import (
    ExceptionalHorizonError,
    NonClassicalDampingError,
    ValidationError,
)
from weakform.mdof import (
    MdofSystem,
    mdof_boundary_correspondence,
    mdof_ode_residual,
    mdof_solve,
    modal_decompose,
    modal_energy,
    physical_energy,
)

T_EXC = 3.1504658342555345  # pi / omega_d of the first mode below


def chain():
    M = np.eye(2)
    K = np.array([[2.0, -1.0], [-1.0, 2.0]])
    C = 0.1 * M + 0.05 * K
    return MdofSystem(M, C, K)


def hat_forcing(t_bar):
    return [Excitation.from_samples([0.0, t_bar / 2, t_bar], [0.0, 1.0, 0.0]), None]


class TestDecomposition:
    def test_frozen_frequencies_and_damping(self):
        modal = modal_decompose(chain())
        assert modal.omegas[0] == pytest.approx(1.0, rel=1e-14)
        assert modal.omegas[1] == pytest.approx(np.sqrt(3.0), rel=1e-14)
        assert modal.xi[0] == pytest.approx(0.075, rel=1e-13)
        assert modal.xi[1] == pytest.approx(0.25 / (2.0 * np.sqrt(3.0)), rel=1e-13)

    def test_shapes_diagonalize_both_matrices(self):
        sys_ = chain()
        modal = modal_decompose(sys_)
        P = modal.shapes
        assert np.max(np.abs(P.T @ sys_.M @ P - np.eye(2))) < 1e-12
        assert np.max(np.abs(P.T @ sys_.K @ P - np.diag(modal.omegas**2))) < 1e-12

    def test_subproblems_carry_modal_parameters(self):
        modal = modal_decompose(chain(), t_bar=6.0)
        subs = modal.subproblems
        assert len(subs) == 2
        assert subs[0].k == pytest.approx(1.0)
        assert subs[0].c == pytest.approx(0.15)  # 2 xi omega
        assert subs[1].k == pytest.approx(3.0)

    def test_modal_round_trip(self):
        modal = modal_decompose(chain())
        vec = np.array([0.3, -0.7])
        assert np.allclose(modal.to_physical(modal.to_modal(vec)), vec, atol=1e-13)

    def test_non_classical_damping_rejected(self):
        M = np.eye(2)
        K = np.array([[2.0, -1.0], [-1.0, 2.0]])
        C = np.diag([0.3, 0.02])
        with pytest.raises(NonClassicalDampingError):
            modal_decompose(MdofSystem(M, C, K))

    def test_asymmetric_matrix_rejected(self):
        K_bad = np.array([[2.0, -1.0], [-0.5, 2.0]])
        with pytest.raises(ValidationError):
            MdofSystem(np.eye(2), np.zeros((2, 2)), K_bad)

    def test_indefinite_stiffness_rejected(self):
        K_bad = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(ValidationError):
            MdofSystem(np.eye(2), np.zeros((2, 2)), K_bad)


class TestSolve:
    def test_pure_mode_motion_matches_closed_form(self):
        sys_ = chain()
        modal = modal_decompose(sys_)
        amp = 0.8
        x0 = amp * modal.shapes[:, 0]
        v0 = np.zeros(2)
        grid = np.linspace(0.0, 6.0, 201)
        sol = mdof_solve(sys_, [None, None], (x0, v0), grid, t_bar=6.0)
        X = np.array([tr.x for tr in sol.trajectories])
        sdof = SdofSystem(c=0.15, k=1.0, t_bar=6.0)
        q, _ = homogeneous_solution(sdof, InitialConditions(amp, 0.0), grid)
        expect = np.outer(modal.shapes[:, 0], q)
        assert np.max(np.abs(X - expect)) < 1e-12

    def test_energy_bookkeeping_agrees(self):
        sys_ = chain()
        grid = np.linspace(0.0, 6.0, 401)
        sol = mdof_solve(sys_, hat_forcing(6.0), (np.array([0.5, 0.2]), np.array([0.0, -0.1])), grid)
        X = np.array([tr.x for tr in sol.trajectories])
        V = np.array([tr.v for tr in sol.trajectories])
        phis = np.array([tr.x for tr in sol.modal_trajectories])
        dphis = np.array([tr.v for tr in sol.modal_trajectories])
        pe = physical_energy(sys_, X, V)
        me = modal_energy(sol.modal, phis, dphis)
        assert np.max(np.abs(pe - me)) < 1e-12 * max(1.0, np.max(pe))

    def test_weak_engine_matches_oracle(self):
        # smooth forcing so degree 16 resolves the modal responses
        sys_ = chain()
        f = [None, Excitation.from_polynomial([0.5, 0.2, -0.04], 6.0)]
        grid = np.linspace(0.0, 6.0, 401)
        ic = (np.array([0.5, 0.2]), np.array([0.0, -0.1]))
        ora = mdof_solve(sys_, f, ic, grid, engine="oracle")
        weak = mdof_solve(sys_, f, ic, grid, engine=("weak", 16))
        for a, b in zip(ora.trajectories, weak.trajectories):
            assert np.max(np.abs(a.x - b.x)) < 1e-5

    def test_ode_residual_small_on_fine_grid(self):
        sys_ = chain()
        f = [None, Excitation.from_polynomial([0.5, 0.2, -0.04], 6.0)]
        grid = np.linspace(0.0, 6.0, 4001)
        sol = mdof_solve(sys_, f, (np.array([0.5, 0.2]), np.array([0.0, -0.1])), grid)
        assert mdof_ode_residual(sys_, f, sol) < 1e-5

    def test_ic_as_per_dof_list(self):
        sys_ = chain()
        grid = np.linspace(0.0, 4.0, 51)
        ics = [InitialConditions(0.5, 0.0), InitialConditions(0.2, -0.1)]
        a = mdof_solve(sys_, hat_forcing(4.0), ics, grid)
        b = mdof_solve(sys_, hat_forcing(4.0), (np.array([0.5, 0.2]), np.array([0.0, -0.1])), grid)
        for ta, tb in zip(a.trajectories, b.trajectories):
            assert np.allclose(ta.x, tb.x, atol=1e-14)

    def test_bad_engine_rejected(self):
        with pytest.raises(ValidationError):
            mdof_solve(chain(), hat_forcing(2.0), (np.zeros(2), np.zeros(2)),
                       np.linspace(0, 2, 11), engine="rk4")

    def test_horizon_conflict_rejected(self):
        with pytest.raises(ValidationError):
            mdof_solve(chain(), hat_forcing(6.0), (np.zeros(2), np.zeros(2)),
                       np.linspace(0, 6, 11), t_bar=5.0)

    def test_weak_engine_flags_exceptional_mode(self):
        sys_ = chain()
        grid = np.linspace(0.0, T_EXC, 11)
        with pytest.raises(ExceptionalHorizonError) as exc:
            mdof_solve(sys_, hat_forcing(T_EXC), (np.zeros(2), np.zeros(2)),
                       grid, engine=("weak", 8))
        msg = str(exc.value)
        assert "mode 0" in msg
        assert "t_bar" in msg

    def test_oracle_engine_tolerates_exceptional_horizon(self):
        # the convolution route has no exceptional set
        sys_ = chain()
        grid = np.linspace(0.0, T_EXC, 11)
        sol = mdof_solve(sys_, hat_forcing(T_EXC), (np.zeros(2), np.zeros(2)), grid)
        assert np.all(np.isfinite([tr.x for tr in sol.trajectories]))


class TestBoundaryCorrespondence:
    def test_bijective_on_regular_horizon(self):
        modal = modal_decompose(chain(), t_bar=6.0)
        bc = mdof_boundary_correspondence(modal, hat_forcing(6.0), np.array([0.5, 0.2]))
        assert bc.bijective
        assert len(bc.maps) == 2
        for m in bc.maps:
            assert m.invertible

    def test_exceptional_horizon_raises_with_mode_index(self):
        modal = modal_decompose(chain(), t_bar=T_EXC)
        with pytest.raises(ExceptionalHorizonError) as exc:
            mdof_boundary_correspondence(modal, hat_forcing(T_EXC), np.zeros(2))
        assert "mode 0" in str(exc.value)
