from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltasob.axisym import lens_volume_3d, weighted_balls_l1
from deltasob.errors import DomainError
from deltasob.extremals import (
    GridSpec,
    SharpnessRow,
    annulus_volume,
    balanced_data,
    balanced_potential,
    balanced_shift,
    bump_data,
    bump_potential,
    defect_l1,
    field_rearrangement,
    implied_defect_constant,
    pair_constant,
    pair_rearrangement_lower_bound,
    sharpness_ratio,
    translated_pair,
)
from deltasob.geometry import BallGeometry
from deltasob.green import green_radial, green_rearranged


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bump_ratio_is_one(n):
    g = BallGeometry(n, 1.0)
    d = 1e-2
    u = bump_potential(g, d).rearrangement()
    ts = np.geomspace(g.volume_of_radius(d), g.V, 30)[:-1]
    q = sharpness_ratio(u, ts, g.V, bump_data(g, d).l1_norm(), n)
    assert np.max(np.abs(q - 1.0)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_balanced_potential_structure(n):
    g = BallGeometry(n, 1.0)
    d, eps = 0.05, 0.1
    f = balanced_data(g, d, eps)
    assert f.mass() == pytest.approx(0.0, abs=1e-14)
    assert f.l1_norm() == pytest.approx(1.0, rel=1e-13)
    v = balanced_potential(g, d, eps)
    # vanishes with its gradient outside R - eps
    r = np.linspace(1 - eps, 1.0, 6)
    assert np.all(np.abs(v(r)) <= 1e-14)
    # half the kernel minus the shell average between delta and R - 2 eps
    rm = np.linspace(d, 1 - 2 * eps, 7)
    expect = 0.5 * green_radial(g, rm) - balanced_shift(g, eps)
    assert np.allclose(v(rm), expect, rtol=1e-12, atol=1e-14)
    assert np.all(np.asarray(v(np.linspace(0, 1, 50))) >= -1e-14)


def test_balanced_shift_vanishes_with_eps():
    g = BallGeometry(3, 1.0)
    shifts = [balanced_shift(g, 10.0 ** (-k)) for k in (1, 2, 3, 4)]
    assert all(a > b for a, b in zip(shifts, shifts[1:]))
    assert shifts[-1] < 1e-4


@pytest.mark.parametrize("n", [2, 3])
def test_balanced_ratio_stays_below_half(n):
    g = BallGeometry(n, 1.0)
    for eps in (1e-1, 1e-2, 1e-3):
        u = balanced_potential(g, 0.01, eps).rearrangement()
        ts = np.geomspace(1e-8, 0.5, 20) * g.V
        q = sharpness_ratio(u, ts, g.V, balanced_data(g, 0.01, eps).l1_norm(), n)
        assert np.all(q <= 0.5 * (1 + 1e-12))


def test_lens_volume_against_axisymmetric_integration():
    r1, r2, d = 1.0, 0.7, 0.9
    # |B1 \ B2| + |B2 \ B1| = |B1| + |B2| - 2 |lens|
    total = weighted_balls_l1(3, [(0.0, r1, 1.0), (d, r2, -1.0)])
    expect = 4 * math.pi / 3 * (r1**3 + r2**3) - 2 * lens_volume_3d(r1, r2, d)
    assert total == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_disjoint_balls_l1(n):
    g = BallGeometry(n, 1.0)
    total = weighted_balls_l1(n, [(0.0, 1.0, 2.0), (3.0, 0.5, -1.0)])
    assert total == pytest.approx(2.0 * g.V + g.volume_of_radius(0.5), rel=1e-10)


def test_defect_limits():
    g = BallGeometry(3, 1.0)
    assert defect_l1(g, 0.0) == 0.0
    assert defect_l1(g, 2.0) == pytest.approx(2.0, rel=1e-12)
    small = [defect_l1(g, x) for x in (1e-3, 2e-3, 4e-3)]
    # linear for small shifts
    assert small[1] / small[0] == pytest.approx(2.0, rel=1e-2)
    assert implied_defect_constant(g, [1e-3, 1e-2, 1e-1]) > 0


@pytest.mark.parametrize("lam", [0.3, 0.8, 2.0])
def test_pair_l1_equals_bumps_plus_half_defect(lam):
    g = BallGeometry(3, 1.0)
    fld = translated_pair(g, 0.05, lam, relaxed=True)
    assert fld.data_l1() == pytest.approx(1.0 + 0.5 * defect_l1(g, lam), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 3), st.floats(0, 2))
def test_pair_is_antisymmetric(x1, rho):
    g = BallGeometry(3, 1.0)
    fld = translated_pair(g, 0.1, 0.8)
    assert fld(x1, rho) == pytest.approx(-fld(0.8 - x1, rho), abs=1e-14)


def test_pair_constant_scale_invariant():
    a = pair_constant(BallGeometry(3, 1.0))
    b = pair_constant(BallGeometry(3, 7.0))
    assert a == pytest.approx(b, rel=1e-12)
    with pytest.raises(DomainError):
        pair_constant(BallGeometry(2, 1.0))


def test_pair_admissibility():
    g = BallGeometry(3, 1.0)
    with pytest.raises(DomainError):
        translated_pair(g, 0.3, 0.5)  # bumps overlap
    with pytest.raises(DomainError):
        translated_pair(g, 0.1, 1.5)  # lam >= R without relaxed
    translated_pair(g, 0.1, 1.5, relaxed=True)


def test_field_rearrangement_matches_radial_oracle_on_isolated_bump():
    g = BallGeometry(3, 1.0)
    d, lam, w = 0.02, 0.95, 0.15
    fld = translated_pair(g, d, lam)
    # inside each window only one copy of U is nonzero, so the pair rearranges to U*(t/2)
    U = balanced_potential(g, d, 0.25).rearrangement()
    ts = np.geomspace(1e-2 * g.volume_of_radius(d), 1.8 * g.volume_of_radius(w), 30)
    fr = field_rearrangement(fld, GridSpec(window=w), t_eval=ts)
    assert ts[-1] <= fr.t_valid
    ref = np.asarray(U(ts / 2))
    rel = np.abs(np.asarray(fr(ts)) - ref) / ref
    assert rel.max() <= fr.res_tol
    assert fr.res_tol < 1e-2


def test_halving_resolution_changes_little():
    g = BallGeometry(3, 100.0)
    fld = translated_pair(g, 0.25, 10.0, relaxed=True)
    t = 2 * g.volume_of_radius(0.25)
    fine = field_rearrangement(fld, GridSpec(cells_per_delta=64), t_eval=[t])
    base = field_rearrangement(fld, GridSpec(cells_per_delta=32), t_eval=[t])
    assert abs(fine(t) - base(t)) / fine(t) <= base.res_tol


def test_under_resolved_grid_warns():
    g = BallGeometry(3, 1.0)
    fld = translated_pair(g, 0.02, 0.9)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        fr = field_rearrangement(fld, GridSpec(cells_per_delta=8))
    assert fr.warnings and any("under-resolves" in str(r.message) for r in rec)


@pytest.mark.parametrize("R", [1e2, 1e3])
def test_pair_lower_bound_holds(R):
    g = BallGeometry(3, R)
    d, lam = 0.25, math.sqrt(R)
    fld = translated_pair(g, d, lam, relaxed=True)
    ts = np.geomspace(2 * g.volume_of_radius(d), 0.5 * g.volume_of_radius(0.5 * lam), 8)
    fr = field_rearrangement(fld, t_eval=ts)
    lb = pair_rearrangement_lower_bound(3, ts, lam)
    assert np.all(np.asarray(fr(ts)) >= lb * (1 - fr.res_tol))


def test_ratio_kernels_and_errors():
    g = BallGeometry(3, 1.0)
    u = lambda t: green_rearranged(g, t)
    assert sharpness_ratio(u, 0.1, g.V, 1.0, 3) == pytest.approx(1.0)
    assert sharpness_ratio(u, 0.1, g.V, 1.0, 3, kernel="infinite") < 1.0
    with pytest.raises(DomainError):
        sharpness_ratio(u, 0.1, g.V, 0.0, 3)
    with pytest.raises(DomainError):
        sharpness_ratio(u, 0.1, g.V, 1.0, 3, kernel="torus")


def test_row_gap_and_record():
    row = SharpnessRow("bump", 3, 0.1, 0.01, math.nan, math.nan, 1.0, 1.0, 0.75, 1.0)
    assert row.gap == pytest.approx(0.25)
    rec = row.as_record()
    assert list(rec) == ["family", "n", "t", "delta", "epsilon", "lambda", "R", "l1", "ratio", "target", "gap",
                         "res_tol"]


def test_annulus_volume():
    g = BallGeometry(2, 1.0)
    assert annulus_volume(g, 0.25) == pytest.approx(math.pi * (0.75**2 - 0.5**2))
