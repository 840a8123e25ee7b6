from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltasob.errors import DomainError, PreconditionError
from deltasob.geometry import BallGeometry
from deltasob.green import green_rearranged
from deltasob.norms import lexp_norm
from deltasob.profiles import StepProfile
from deltasob.rearrangement import maximal_function
from deltasob.target import (
    Majorant,
    domination_chain,
    extended_domination,
    fatou_table,
    kernel_power_profile,
    level_for_measure,
    majorant_density,
    majorant_potential,
    target_defect,
    truncate_above,
    truncated_kernel_profile,
)


def _member_majorant(n=3):
    V = 1.0
    W = V / 2**n
    geom = BallGeometry.from_volume(n, W)
    u = kernel_power_profile(BallGeometry.from_volume(n, V), 0.5)
    level = level_for_measure(u, W / 2)
    u0 = truncate_above(u, level)
    return geom, u0, majorant_density(u0, geom)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kernel_defect_limit(n):
    g = BallGeometry.from_volume(n, 1.0)
    v = target_defect(kernel_power_profile(g, 1.0), g)
    assert v.analytic
    assert not v.member
    # u** / N* tends to 1 in the plane and to n/2 above it
    assert v.limit_defect == pytest.approx(1.0 if n == 2 else n / 2, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_members(n):
    g = BallGeometry.from_volume(n, 1.0)
    for prof in (kernel_power_profile(g, 0.5), truncated_kernel_profile(g, 1.0),
                 StepProfile([0.0, 0.01, 1.0], [2.0, 1.0])):
        v = target_defect(prof, g)
        assert v.member and v.limit_defect == 0.0 and v.decreasing_tail


def test_truncation_keeps_the_level_measure():
    g = BallGeometry.from_volume(3, 1.0)
    u = kernel_power_profile(g, 1.0)
    lam = level_for_measure(u, 0.1)
    u0 = truncate_above(u, lam)
    assert u0.level_measure(0.0) == pytest.approx(0.1, rel=1e-10)
    ts = np.geomspace(1e-6, 0.09, 9)
    assert np.allclose(u0(ts), np.asarray(u(ts)) - lam, rtol=1e-12)
    assert float(u0(0.5)) == 0.0
    with pytest.raises(DomainError):
        truncate_above(u, -1.0)


def test_step_truncation():
    u = StepProfile([0.0, 0.2, 0.5, 1.0], [3.0, 2.0, 1.0])
    u0 = truncate_above(u, 1.5)
    assert list(u0.values) == [1.5, 0.5, 0.0]
    assert u0.level_measure(0.0) == pytest.approx(0.5)


def test_envelope_average_and_density():
    geom, u0, maj = _member_majorant()
    W = geom.V
    ts = np.geomspace(1e-10 * W, W, 200)
    f, k, h = maj.f(ts), maj.k(ts), maj.h(ts)
    # f and its log-average k grow with t, k >= f (average of a non-increasing function of x), h >= 0
    assert np.all(np.diff(f) >= -1e-15 * f.max())
    assert np.all(np.diff(k) >= -1e-15 * k.max())
    assert np.all(k >= f * (1 - 1e-12))
    assert np.all(h >= 0)
    # int_0^t h = k(t) - k(0) with k(0) = 0 for members
    assert np.allclose(maj.integral_h(ts), k, rtol=1e-14)


def test_density_is_derivative_of_average():
    geom, u0, maj = _member_majorant()
    W = geom.V
    for t in (1e-6 * W, 1e-3 * W, 0.1 * W, 0.7 * W):
        eps = 1e-6 * t
        fd = (maj.k(t + eps) - maj.k(t - eps)) / (2 * eps)
        assert maj.h(t) == pytest.approx(fd, rel=1e-6, abs=1e-12 * abs(maj.k(t)) / t)


def test_domination_of_truncated_profile():
    geom, u0, maj = _member_majorant()
    W = geom.V
    ts = np.geomspace(1e-12 * W, W, 1000)
    lhs = np.asarray(green_rearranged(geom, ts)) * np.asarray(maj.integral_h(ts))
    rhs = np.asarray(u0(ts))
    assert np.all(rhs <= lhs * (1 + 1e-9) + 1e-300)


def test_majorant_potential_balance():
    geom, u0, maj = _member_majorant()
    pot = majorant_potential(maj, geom)
    assert pot.data_integral == pytest.approx(0.0, abs=1e-12 * max(1.0, pot.mass))
    # v vanishes beyond 5R/3
    R = geom.R
    assert abs(float(pot.v(1.8 * R))) <= 1e-12
    assert pot.C > 0


def test_rejects_non_members_and_full_support():
    g = BallGeometry.from_volume(3, 1.0)
    W = g.V / 8
    geom = BallGeometry.from_volume(3, W)
    u = kernel_power_profile(g, 1.0)
    u0 = truncate_above(u, level_for_measure(u, W / 2))
    with pytest.raises(PreconditionError):
        majorant_density(u0, geom)
    with pytest.raises(DomainError):
        majorant_density(StepProfile([0.0, W], [1.0]), geom)


@pytest.mark.parametrize("n", [2, 3])
def test_chain_for_members(n):
    g = BallGeometry.from_volume(n, 1.0)
    rep = domination_chain(kernel_power_profile(g, 0.5), n)
    assert rep.ok, rep.violations
    assert rep.C > 0 and rep.level > 0


def test_extended_chain_for_kernel():
    g = BallGeometry.from_volume(2, 1.0)
    rep = extended_domination(kernel_power_profile(g, 1.0), 2)
    assert rep.limsup == pytest.approx(1.0)
    assert rep.ok, rep.violations


def test_fatou_truncations():
    g = BallGeometry.from_volume(2, 1.0)
    rows, full = fatou_table(g, range(1, 6))
    assert all(r.member for r in rows)
    # truncation only lowers the profile, so the norms stay below the kernel's
    bound = lexp_norm(kernel_power_profile(g, 1.0), g.V)
    assert max(r.norm for r in rows) <= bound * (1 + 1e-12)
    assert all(a.norm <= b.norm * (1 + 1e-12) for a, b in zip(rows, rows[1:]))
    assert not full.member and full.smallest_grid_defect >= 0.99


def test_majorant_validation():
    g = BallGeometry(3, 1.0)
    with pytest.raises(DomainError):
        Majorant(g, np.array([0.5, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        Majorant(g, np.array([0.0, 1.0]), np.array([1.0, 2.0]))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.1, 5.0), min_size=1, max_size=6), st.floats(0.05, 0.3))
def test_step_profiles_are_members_and_dominated(vals, first):
    vals = sorted(vals, reverse=True)
    edges = np.concatenate([[0.0], np.linspace(first, 1.0, len(vals))])
    u = StepProfile(edges, vals)
    g = BallGeometry.from_volume(3, 1.0)
    assert target_defect(u, g).member
    rep = domination_chain(u, 3, grid_points=300)
    assert rep.ok, rep.violations
    uss = maximal_function(u)
    assert float(uss(1e-9)) == pytest.approx(vals[0])
