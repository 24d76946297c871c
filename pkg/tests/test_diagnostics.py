import numpy as np
import pytest

from weakform import Excitation, InitialConditions, SdofSystem
from weakform.basis import bernstein_basis
from weakform.diagnostics import (
    DEFAULT_BOUND_CONSTANTS,
    DiagGrid,
    convergence_sweep,
    error_report,
    principal_angles,
    required_constants,
    verify_projection_identity,
)
from weakform.galerkin import solve_weak


def _forced_case(degree):
    sys_ = SdofSystem(c=0.2, k=1.0, t_bar=8.0)
    f = Excitation.sample_hermite(
        lambda t: np.sin(2.0 * t), lambda t: 2.0 * np.cos(2.0 * t), 8.0, 64
    )
    ic = InitialConditions(0.3, -0.5)
    basis = bernstein_basis(8.0, degree)
    sol = solve_weak(sys_, basis, f, ic)
    return sys_, basis, f, ic, sol


class TestDiagGrid:
    def test_weighted_integral(self):
        g = DiagGrid(2.0 * np.pi, min_panels=64)
        got = g.inner(np.cos(g.ts), np.cos(g.ts))
        assert got == pytest.approx(np.pi, rel=1e-12)

    def test_l2(self):
        g = DiagGrid(1.0, min_panels=32)
        assert g.l2(g.ts) == pytest.approx(1.0 / np.sqrt(3.0), rel=1e-12)

    def test_running_integral(self):
        g = DiagGrid(3.0, min_panels=48)
        at_nodes, total = g.running(np.cos)
        assert np.max(np.abs(at_nodes[0] - np.sin(g.ts))) < 1e-12
        assert float(np.ravel(total)[0]) == pytest.approx(np.sin(3.0), rel=1e-12)


class TestPrincipalAngles:
    def _grid(self):
        return DiagGrid(2.0 * np.pi, min_panels=64)

    def test_orthogonal_lines(self):
        g = self._grid()
        u = np.array([np.sin(g.ts)])
        v = np.array([np.cos(g.ts)])
        lo, hi = principal_angles(u, v, g.ws)
        assert lo == pytest.approx(np.pi / 2, abs=1e-10)
        assert hi == pytest.approx(np.pi / 2, abs=1e-10)

    def test_identical_spans(self):
        # arccos of a singular value near 1 floors the angle at sqrt(eps)
        g = self._grid()
        u = np.array([np.sin(g.ts), np.cos(g.ts)])
        v = np.array([np.sin(g.ts) + np.cos(g.ts), np.sin(g.ts) - np.cos(g.ts)])
        lo, hi = principal_angles(u, v, g.ws)
        assert hi < 1e-7

    def test_known_oblique_angle(self):
        # span{sin} against span{sin + cos}: cos(theta) = 1/sqrt(2)
        g = self._grid()
        u = np.array([np.sin(g.ts)])
        v = np.array([np.sin(g.ts) + np.cos(g.ts)])
        lo, hi = principal_angles(u, v, g.ws)
        assert lo == pytest.approx(np.pi / 4, abs=1e-10)
        assert hi == pytest.approx(np.pi / 4, abs=1e-10)

    def test_rank_deficient_rows_ignored(self):
        g = self._grid()
        u = np.array([np.sin(g.ts), 2.0 * np.sin(g.ts)])
        v = np.array([np.sin(g.ts)])
        lo, hi = principal_angles(u, v, g.ws)
        assert hi < 1e-7


class TestErrorReport:
    def test_projection_identity_is_machine_small(self):
        sys_, basis, f, ic, sol = _forced_case(12)
        assert verify_projection_identity(sys_, basis, f, sol) < 1e-13

    def test_report_fields_and_bounds(self):
        sys_, basis, f, ic, sol = _forced_case(12)
        rep = error_report(sys_, basis, f, ic, sol)
        assert rep.f_er_hminus1 > 0
        assert rep.F_er_l2 > 0
        assert 0.0 <= rep.theta_nh[0] <= rep.theta_nh[1] <= np.pi / 2
        assert 0.0 <= rep.theta_h[0] <= rep.theta_h[1] <= np.pi / 2
        assert np.isfinite(rep.ratio_H1_over_Fer)
        assert rep.bounds_satisfied
        for entry in rep.bound_rhs.values():
            assert entry["lhs"] <= entry["rhs"]
        d = rep.to_dict()
        assert set(d["bounds"]) == set(DEFAULT_BOUND_CONSTANTS)

    def test_refinement_shrinks_errors(self):
        reps = []
        for deg in (8, 16):
            sys_, basis, f, ic, sol = _forced_case(deg)
            reps.append(error_report(sys_, basis, f, ic, sol))
        for field in ("f_er_hminus1", "F_er_l2", "x_er_l2", "x_er_linf", "v_er_l2"):
            assert getattr(reps[1], field) < getattr(reps[0], field)

    def test_required_constants_below_frozen(self):
        sys_, basis, f, ic, sol = _forced_case(12)
        rep = error_report(sys_, basis, f, ic, sol)
        need = required_constants(sys_, rep)
        for name, k in need.items():
            assert k <= DEFAULT_BOUND_CONSTANTS[name]


def test_convergence_sweep_rows():
    sys_ = SdofSystem(c=0.2, k=1.0, t_bar=8.0)
    f = Excitation.sample_hermite(
        lambda t: np.sin(2.0 * t), lambda t: 2.0 * np.cos(2.0 * t), 8.0, 64
    )
    rows = convergence_sweep(sys_, f, InitialConditions(0.3, -0.5), (4, 8, 16))
    assert [r["degree"] for r in rows] == [4, 8, 16]
    xs = [r["x_err_linf"] for r in rows]
    assert xs[0] > xs[1] > xs[2]
    for key in ("x_err_l2", "v_err_l2", "F_er_l2", "theta_nh_max", "theta_h_max",
                "ratio_H1_over_Fer"):
        assert key in rows[0]
