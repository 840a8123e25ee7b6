from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from deltasob.errors import DomainError
from deltasob.geometry import BallGeometry, sphere_area
from deltasob.green import (
    green_distribution,
    green_maximal,
    green_radial,
    green_radial_derivative,
    green_rearranged,
    green_rearranged_derivative,
    green_rearranged_infinite,
    split_distribution_bound,
    split_distribution_sum,
)


def test_sphere_areas():
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi**2)


def test_constants_against_gamma_function():
    for n in (3, 4, 5, 7):
        g = BallGeometry(n, 1.0)
        omega = 2 * math.pi ** (n / 2) / special.gamma(n / 2)
        assert g.c_n == pytest.approx(1 / ((n - 2) * omega), rel=1e-14)
        assert g.kernel_constant == pytest.approx(g.c_n * (omega / n) ** ((n - 2) / n), rel=1e-14)
    assert BallGeometry(2, 1.0).kernel_constant == pytest.approx(1 / (4 * math.pi))
    # n = 3: c_3 = 1/(4 pi)
    assert BallGeometry(3, 1.0).c_n == pytest.approx(1 / (4 * math.pi), rel=1e-15)


def test_kernel_values_by_hand():
    g2 = BallGeometry(2, 2.0)
    assert green_radial(g2, 1.0) == pytest.approx(math.log(2.0) / (2 * math.pi))
    g3 = BallGeometry(3, 1.0)
    assert green_radial(g3, 0.5) == pytest.approx((2.0 - 1.0) / (4 * math.pi))
    assert green_radial(g3, 1.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.floats(0.1, 10.0), st.floats(1e-6, 0.999))
def test_rearranged_is_radial_in_volume(n, R, rho):
    g = BallGeometry(n, R)
    r = rho * R
    assert green_rearranged(g, g.volume_of_radius(r)) == pytest.approx(green_radial(g, r), rel=1e-11, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.floats(1e-3, 50.0))  # keeps e^{-4 pi s} a normal double
def test_distribution_inverts_rearranged(n, s):
    g = BallGeometry(n, 1.0)
    t = green_distribution(g, s)
    assert 0 < t <= g.V
    assert green_rearranged(g, t) == pytest.approx(s, rel=1e-11)


def test_distribution_caps_at_volume_for_level_zero():
    g = BallGeometry(3, 1.0)
    assert green_distribution(g, 0.0) == pytest.approx(g.V)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_derivatives_by_central_difference(n):
    g = BallGeometry(n, 1.0)
    for r in (0.2, 0.5, 0.8):
        h = 1e-6
        fd = (green_radial(g, r + h) - green_radial(g, r - h)) / (2 * h)
        assert green_radial_derivative(g, r) == pytest.approx(fd, rel=1e-6)
    for t in (0.1 * g.V, 0.5 * g.V):
        h = 1e-6 * g.V
        fd = (green_rearranged(g, t + h) - green_rearranged(g, t - h)) / (2 * h)
        assert green_rearranged_derivative(g, t) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_maximal_is_average_by_quadrature(n):
    g = BallGeometry.from_volume(n, 1.0)
    for t in (1e-3, 0.1, 0.7):
        avg, _ = integrate.quad(lambda s: green_rearranged(g, s), 0.0, t, limit=200)
        assert green_maximal(g, t) == pytest.approx(avg / t, rel=1e-9)


def test_infinite_kernel():
    g = BallGeometry(3, 1.0)
    K = g.kernel_constant
    assert green_rearranged_infinite(3, 0.5) == pytest.approx(K * 0.5 ** (-1 / 3))
    with pytest.raises(DomainError):
        green_rearranged_infinite(2, 0.5)


def test_domain_errors():
    g = BallGeometry(3, 1.0)
    with pytest.raises(DomainError):
        green_rearranged(g, 2 * g.V)
    with pytest.raises(DomainError):
        green_rearranged(g, 0.0)
    with pytest.raises(DomainError):
        BallGeometry(1, 1.0)


def test_split_sum_at_half_matches_bound():
    for n in (2, 3, 4):
        V = 2.0
        for s in (0.05, 0.5, 3.0):
            assert split_distribution_sum(n, V, s, V / 2) == pytest.approx(split_distribution_bound(n, V, s), rel=1e-12)


def test_split_sum_is_constant_in_the_plane():
    V, s = 1.0, 0.3
    vals = np.array([split_distribution_sum(2, V, s, v1) for v1 in np.linspace(1e-3, V - 1e-3, 101)])
    assert np.ptp(vals) <= 1e-12 * abs(vals).max()


def test_alpha_uses_the_sphere_area():
    # lambda_V(s) for V -> infinity is (alpha s)^{-n/(n-2)}; the volume of the level set of N
    n = 3
    g = BallGeometry(n, 1e6)
    s = 10.0
    r = (s / g.c_n) ** (-1 / (n - 2))  # N_inf(r) = s
    assert green_distribution(g, s) == pytest.approx(BallGeometry(n, 1.0).volume_of_radius(r), rel=1e-6)
