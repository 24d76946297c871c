"""Input-layer behaviour: parameter validation, excitation algebra, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakform.errors import UnderdampedViolationError, ValidationError
from weakform.model import (
    Excitation,
    InitialConditions,
    SdofSystem,
    Trajectory,
    derived_params,
    excitation_eval,
)

FROZEN_OMEGA_D = 1.9364916731037084426  # c = 1, k = 4


class TestSystemValidation:
    def test_critical_damping_rejected(self):
        with pytest.raises(UnderdampedViolationError):
            SdofSystem(c=2.0, k=1.0, t_bar=1.0)

    def test_overdamped_rejected(self):
        with pytest.raises(UnderdampedViolationError):
            SdofSystem(c=5.0, k=1.0, t_bar=1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(c=-0.1, k=1.0, t_bar=1.0),
            dict(c=0.2, k=0.0, t_bar=1.0),
            dict(c=0.2, k=-1.0, t_bar=1.0),
            dict(c=0.2, k=1.0, t_bar=0.0),
        ],
    )
    def test_bad_parameters_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            SdofSystem(**kwargs)

    def test_nonfinite_ic_rejected(self):
        with pytest.raises(ValidationError):
            InitialConditions(float("nan"), 0.0)
        with pytest.raises(ValidationError):
            InitialConditions(0.0, float("inf"))

    def test_derived_params_frozen_case(self):
        p = derived_params(SdofSystem(c=1.0, k=4.0, t_bar=1.0))
        assert p.xi == pytest.approx(0.25, abs=0)
        assert p.omega_n == pytest.approx(2.0, abs=0)
        assert p.omega_d == pytest.approx(FROZEN_OMEGA_D, rel=1e-15)

    def test_near_critical_accepted(self):
        # xi just below 1 is legal
        sys_ = SdofSystem(c=2.0 - 1e-9, k=1.0, t_bar=1.0)
        assert sys_.omega_d > 0


class TestExcitation:
    def test_constant_and_zero(self):
        f = Excitation.constant(2.5, 4.0)
        assert f(1.7) == pytest.approx(2.5)
        assert not f.is_zero()
        z = Excitation.zero(4.0)
        assert z.is_zero()
        assert z(3.0) == 0.0

    def test_degree_cap(self):
        with pytest.raises(ValidationError):
            Excitation.from_polynomial([0.0] * 12, 1.0)
        Excitation.from_polynomial([0.0] * 11, 1.0)  # degree 10 allowed

    def test_mesh_must_increase(self):
        with pytest.raises(ValidationError):
            Excitation.from_segments([0.0, 1.0, 0.5], [[1.0], [2.0]])

    def test_samples_need_two_points(self):
        with pytest.raises(ValidationError):
            Excitation.from_samples([0.0, 1.0], [1.0])

    def test_piecewise_linear_interpolation(self):
        f = Excitation.from_samples([0.0, 1.0, 3.0], [0.0, 2.0, 1.0])
        assert f(0.5) == pytest.approx(1.0)
        assert f(2.0) == pytest.approx(1.5)
        assert f.segment_index(0.5) == 0
        assert f.segment_index(2.5) == 1

    def test_rebreak_preserves_values(self):
        f = Excitation.from_samples([0.0, 1.0, 3.0], [0.0, 2.0, 1.0])
        g = f.rebreak([0.25, 2.5])
        ts = np.linspace(0.0, 3.0, 31)
        assert np.allclose(excitation_eval(g, ts), excitation_eval(f, ts), atol=1e-14)
        assert 0.25 in g.mesh and 2.5 in g.mesh

    def test_derivative_of_polynomial(self):
        f = Excitation.from_polynomial([1.0, -2.0, 3.0], 2.0)
        fd = f.derivative()
        ts = np.linspace(0.0, 2.0, 21)
        assert np.allclose(excitation_eval(fd, ts), -2.0 + 6.0 * ts, atol=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(
        a=st.lists(st.floats(-2, 2), min_size=1, max_size=4),
        b=st.lists(st.floats(-2, 2), min_size=1, max_size=4),
        s=st.floats(-3, 3),
        t=st.floats(0, 2),
    )
    def test_linear_algebra_pointwise(self, a, b, s, t):
        f = Excitation.from_polynomial(a, 2.0)
        g = Excitation.from_polynomial(b, 2.0)
        assert (f + g)(t) == pytest.approx(f(t) + g(t), rel=1e-12, abs=1e-12)
        assert (s * f)(t) == pytest.approx(s * f(t), rel=1e-12, abs=1e-12)
        assert (f * s)(t) == pytest.approx(s * f(t), rel=1e-12, abs=1e-12)

    def test_add_requires_matching_horizon(self):
        f = Excitation.constant(1.0, 2.0)
        g = Excitation.constant(1.0, 3.0)
        with pytest.raises((ValidationError, ValueError)):
            _ = f + g


class TestSampleHermite:
    def test_matches_function_values_and_slopes_at_knots(self):
        f = Excitation.sample_hermite(math.sin, math.cos, 2.0, 8)
        fd = f.derivative()
        for tk in f.mesh:
            assert f(float(tk)) == pytest.approx(math.sin(tk), abs=1e-14)
        # slope continuity across interior knots
        for tk in f.mesh[1:-1]:
            left = fd(float(tk) - 1e-12)
            right = fd(float(tk) + 1e-12)
            assert left == pytest.approx(right, abs=1e-9)

    def test_fourth_order_convergence(self):
        errs = []
        for n in (8, 16, 32):
            f = Excitation.sample_hermite(math.sin, math.cos, 2.0, n)
            ts = np.linspace(0.0, 2.0, 801)
            errs.append(np.max(np.abs(excitation_eval(f, ts) - np.sin(ts))))
        r1 = errs[0] / errs[1]
        r2 = errs[1] / errs[2]
        assert 12.0 < r1 < 20.0
        assert 12.0 < r2 < 20.0


class TestTrajectory:
    def test_covers(self):
        t = np.linspace(0.0, 5.0, 11)
        tr = Trajectory(t, np.zeros(11), np.zeros(11))
        assert tr.covers(5.0)
        assert not tr.covers(6.0)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            Trajectory(np.array([0.0, 1.0]), np.zeros(3), np.zeros(2))
