from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltasob.errors import DomainError
from deltasob.geometry import BallGeometry
from deltasob.green import green_radial
from deltasob.radial import RadialProfile, _solve_general, integrate_green_shell, solve_radial


def random_data(draw_vals, draw_radii, geom):
    radii = np.concatenate([[0.0], np.sort(np.unique(draw_radii)) * geom.R, [geom.R]])
    radii = radii[np.concatenate([[True], np.diff(radii) > 1e-6 * geom.R])]
    radii[-1] = geom.R
    vals = np.resize(np.array(draw_vals, dtype=float), len(radii) - 1)
    return RadialProfile.piecewise_constant(geom, radii, vals)


radial_data = st.tuples(
    st.integers(2, 5),
    st.lists(st.floats(-1, 1), min_size=1, max_size=8),
    st.lists(st.floats(0.01, 0.99), min_size=0, max_size=7),
)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_constant_data(n):
    g = BallGeometry(n, 1.5)
    v = solve_radial(g, RadialProfile.constant(g, 1.0))
    r = np.linspace(0.0, g.R, 9)
    assert np.allclose(v(r), (g.R**2 - r**2) / (2 * n), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_bump_equals_kernel_outside(n):
    g = BallGeometry(n, 1.0)
    d = 0.1
    f = RadialProfile.piecewise_constant(g, [0.0, d, 1.0], [1.0 / g.volume_of_radius(d), 0.0])
    v = solve_radial(g, f)
    r = np.linspace(d, 1.0, 11)
    assert np.allclose(v(r), green_radial(g, r), rtol=1e-12, atol=1e-15)
    # inside: N(delta) + (delta^2 - r^2) / (2 n |B_delta|)
    ri = np.linspace(0.0, d, 5)
    expect = green_radial(g, d) + (d**2 - ri**2) / (2 * n * g.volume_of_radius(d))
    assert np.allclose(v(ri), expect, rtol=1e-12)


def test_shell_integrals_by_hand():
    # int_{B_R} N = R^2/4 (n = 2) and R^2/6 (n = 3)
    assert integrate_green_shell(BallGeometry(2, 2.0), 0.0, 2.0) == pytest.approx(1.0)
    assert integrate_green_shell(BallGeometry(3, 3.0), 0.0, 3.0) == pytest.approx(1.5)


@settings(max_examples=40, deadline=None)
@given(radial_data)
def test_laplacian_and_flux(data):
    n, vals, rads = data
    g = BallGeometry(n, 1.0)
    f = random_data(vals, rads, g)
    v = solve_radial(g, f)
    # -Delta v = f inside each shell
    for s in f.segments:
        r = 0.5 * (s.lo + s.hi)
        assert v.laplacian(r) == pytest.approx(-float(f(r)), abs=1e-9)
    # boundary value and continuity across shells
    assert abs(float(v(g.R))) <= 1e-14
    scale = max(1.0, max(abs(float(v(r))) for r in np.linspace(1e-3, 1, 20)))
    for s in v.segments[1:]:
        left = float(v.segments[v.segments.index(s) - 1].form.value(g, s.lo))
        right = float(s.form.value(g, s.lo))
        assert abs(left - right) <= 1e-10 * scale
    # flux through the sphere: -v'(R) |S_R| = int f
    h = 1e-6
    dv = (float(v(g.R - h)) - float(v(g.R - 2 * h))) / h
    flux = -dv * g.omega * g.R ** (n - 1)
    assert flux == pytest.approx(f.mass(), abs=1e-4)


@settings(max_examples=15, deadline=None)
@given(radial_data)
def test_closed_form_agrees_with_quadrature_route(data):
    n, vals, rads = data
    g = BallGeometry(n, 1.0)
    f = random_data(vals, rads, g)
    v = solve_radial(g, f)
    w = _solve_general(g, f)
    r = np.array([0.03, 0.2, 0.45, 0.7, 0.95])
    a = np.asarray(v(r))
    b = np.array([float(w(x)) for x in r])
    assert np.allclose(a, b, rtol=1e-8, atol=1e-10)


def test_mass_split_and_l1():
    g = BallGeometry(3, 1.0)
    f = RadialProfile.piecewise_constant(g, [0.0, 0.5, 1.0], [2.0, -1.0])
    plus, minus = f.signed_mass_split()
    assert plus == pytest.approx(2.0 * g.volume_of_radius(0.5))
    assert minus == pytest.approx(g.V - g.volume_of_radius(0.5))
    assert f.l1_norm() == pytest.approx(plus + minus)


@settings(max_examples=30, deadline=None)
@given(radial_data, st.floats(0.0, 1.0))
def test_distribution_matches_fine_radial_sum(data, frac):
    n, vals, rads = data
    g = BallGeometry(n, 1.0)
    v = solve_radial(g, random_data(vals, rads, g))
    r_edges = np.linspace(0.0, g.R, 20001)
    rm = 0.5 * (r_edges[1:] + r_edges[:-1])
    vol = np.diff(g.volume_of_radius(r_edges))
    vals_abs = np.abs(np.asarray(v(rm)))
    s = frac * vals_abs.max()
    brute = vol[vals_abs > s].sum()
    # cell-boundary error only
    assert float(v.distribution(s)[0]) == pytest.approx(brute, abs=4 * g.omega * 1.0 / 20000)


def test_rearrangement_is_inverse_of_distribution():
    g = BallGeometry(3, 1.0)
    f = RadialProfile.piecewise_constant(g, [0.0, 0.3, 0.6, 1.0], [1.0, -2.0, 0.5])
    v = solve_radial(g, f)
    u = v.rearrangement()
    for t in (1e-3, 0.05, 0.5, 2.0):
        s = float(u(t))
        assert float(v.distribution(s * (1 + 1e-9))[0]) <= t * (1 + 1e-9)
        assert float(v.distribution(s * (1 - 1e-6))[0]) >= t * (1 - 1e-6)


def test_rejects_bad_radii():
    g = BallGeometry(3, 1.0)
    with pytest.raises(DomainError):
        RadialProfile.piecewise_constant(g, [0.0, 0.5, 0.4, 1.0], [1, 2, 3])
    with pytest.raises(DomainError):
        RadialProfile.piecewise_constant(g, [0.0, 0.5], [1])
    with pytest.raises(DomainError):
        solve_radial(BallGeometry(3, 2.0), RadialProfile.constant(g, 1.0))


def test_monotone_rearrangement_is_exact_for_bump():
    g = BallGeometry(2, 1.0)
    d = 0.01
    f = RadialProfile.piecewise_constant(g, [0.0, d, 1.0], [1.0 / g.volume_of_radius(d), 0.0])
    u = solve_radial(g, f).rearrangement()
    t = 0.5
    assert float(u(t)) == pytest.approx(math.log(g.V / t) / (4 * math.pi), rel=1e-13)
