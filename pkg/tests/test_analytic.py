"""Closed-form layer: fundamental pair identities and the dilation map."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakform import InitialConditions, SdofSystem, duhamel_solve
from weakform.analytic import fundamental_solutions, homogeneous_solution, time_dilate
from weakform.model import Excitation

# reference values computed with 40-digit arithmetic, c = 0.2, k = 1, t = 1
FROZEN_D = 0.49269612309507600077
FROZEN_S = 0.76275767851023751209
FROZEN_DD = -0.80439971403464273705
FROZEN_DS = 0.41642035524405224956
# free vibration x0 = 1, v0 = 0 at t = 5
FROZEN_X5 = 0.098550667618585964406
FROZEN_V5 = 0.58869679350110475267


def test_fundamental_pair_frozen_point():
    sys_ = SdofSystem(c=0.2, k=1.0, t_bar=10.0)
    d, s, dd, ds = fundamental_solutions(sys_, np.array([1.0]))
    assert d[0] == pytest.approx(FROZEN_D, rel=1e-15)
    assert s[0] == pytest.approx(FROZEN_S, rel=1e-15)
    assert dd[0] == pytest.approx(FROZEN_DD, rel=1e-15)
    assert ds[0] == pytest.approx(FROZEN_DS, rel=1e-15)


def test_initial_values():
    sys_ = SdofSystem(c=0.7, k=3.0, t_bar=4.0)
    d, s, dd, ds = fundamental_solutions(sys_, np.array([0.0]))
    assert d[0] == 1.0
    assert s[0] == 0.0
    assert dd[0] == pytest.approx(-sys_.c / 2.0, abs=1e-16)
    assert ds[0] == pytest.approx(1.0, abs=1e-16)


@settings(max_examples=60, deadline=None)
@given(
    c=st.floats(min_value=0.0, max_value=1.5),
    k=st.floats(min_value=0.3, max_value=9.0),
    t=st.floats(min_value=0.0, max_value=12.0),
)
def test_envelope_identity(c, k, t):
    # d^2 + omega_d^2 s^2 = e^{-c t}, valid whenever xi < 1
    if c * c >= 4.0 * k * (1.0 - 1e-9):
        return
    sys_ = SdofSystem(c=c, k=k, t_bar=15.0)
    d, s, _, _ = fundamental_solutions(sys_, np.array([t]))
    lhs = d[0] ** 2 + sys_.omega_d**2 * s[0] ** 2
    assert lhs == pytest.approx(np.exp(-c * t), rel=2e-13, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    c=st.floats(min_value=0.0, max_value=1.5),
    k=st.floats(min_value=0.3, max_value=9.0),
    t=st.floats(min_value=0.0, max_value=12.0),
)
def test_wronskian(c, k, t):
    if c * c >= 4.0 * k * (1.0 - 1e-9):
        return
    sys_ = SdofSystem(c=c, k=k, t_bar=15.0)
    d, s, dd, ds = fundamental_solutions(sys_, np.array([t]))
    w = d[0] * ds[0] - dd[0] * s[0]
    assert w == pytest.approx(np.exp(-c * t), rel=2e-13, abs=1e-15)


def test_homogeneous_frozen_point():
    sys_ = SdofSystem(c=0.2, k=1.0, t_bar=10.0)
    x, v = homogeneous_solution(sys_, InitialConditions(1.0, 0.0), np.array([5.0]))
    assert x[0] == pytest.approx(FROZEN_X5, rel=1e-14)
    assert v[0] == pytest.approx(FROZEN_V5, rel=1e-14)


def test_homogeneous_satisfies_ic():
    sys_ = SdofSystem(c=0.9, k=2.5, t_bar=3.0)
    x, v = homogeneous_solution(sys_, InitialConditions(-0.3, 1.7), np.array([0.0]))
    assert x[0] == -0.3
    assert v[0] == 1.7


class TestTimeDilation:
    def test_parameter_mapping(self):
        sys_ = SdofSystem(c=0.2, k=1.0, t_bar=10.0)
        f = Excitation.from_polynomial([0.0, 1.0], 10.0)
        dp = time_dilate(sys_, f, InitialConditions(1.0, 0.5), 2.0)
        assert dp.sys.c == pytest.approx(0.1)
        assert dp.sys.k == pytest.approx(0.25)
        assert dp.sys.t_bar == pytest.approx(20.0)
        assert dp.ic.x0 == 1.0
        assert dp.ic.v0 == pytest.approx(0.25)

    def test_excitation_mapping_pointwise(self):
        sys_ = SdofSystem(c=0.4, k=4.0, t_bar=6.0)
        f = Excitation.from_samples([0.0, 2.0, 6.0], [0.0, 1.0, -1.0])
        lam = 2.0
        dp = time_dilate(sys_, f, InitialConditions(0.0, 0.0), lam)
        for s in np.linspace(0.0, 12.0, 25):
            assert dp.f(float(s)) == pytest.approx(f(float(s) / lam) / lam**2, abs=1e-14)

    def test_round_trip_matches_direct_oracle(self):
        sys_ = SdofSystem(c=0.4, k=4.0, t_bar=6.0)
        f = Excitation.from_samples([0.0, 2.0, 6.0], [0.0, 1.0, -1.0])
        ic = InitialConditions(0.5, -0.2)
        grid = np.linspace(0.0, 6.0, 257)
        direct = duhamel_solve(sys_, f, ic, grid)
        dp = time_dilate(sys_, f, ic, 2.0)
        dil = duhamel_solve(dp.sys, dp.f, dp.ic, dp.grid_for(grid))
        back = dp.map_back(dil)
        assert np.max(np.abs(back.x - direct.x)) < 1e-11
        assert np.max(np.abs(back.v - direct.v)) < 1e-11
        assert np.allclose(back.t, grid, atol=1e-14)
