from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltasob.errors import DivergenceError, DomainError
from deltasob.geometry import BallGeometry
from deltasob.profiles import KernelForm, MonotoneProfile, PowerForm, Segment, StepProfile
from deltasob.rearrangement import (
    CellSample,
    decreasing_rearrangement,
    distribution_function,
    maximal_function,
    schwarz_profile,
)

cells = st.lists(
    st.tuples(st.floats(-5, 5, allow_nan=False), st.floats(1e-3, 2.0, allow_nan=False)),
    min_size=1, max_size=40,
)


def _arrays(data):
    v = np.array([a for a, _ in data])
    m = np.array([b for _, b in data])
    return v, m


def brute_force_rearrangement(values, measures, t):
    """inf{s : |{|u| > s}| <= t} straight from the definition."""
    levels = np.unique(np.concatenate([[0.0], np.abs(values)]))
    for s in levels:
        if measures[np.abs(values) > s].sum() <= t:
            return s
    raise AssertionError


def test_small_example_by_hand():
    u = decreasing_rearrangement([CellSample(1.0, 0.5), CellSample(-3.0, 0.25), CellSample(2.0, 0.25)])
    assert u.total_measure == 1.0
    assert u(0.1) == 3.0
    assert u(0.3) == 2.0
    assert u(0.6) == 1.0
    # right-continuous: the step value at an edge is the next one
    assert u(0.25) == 2.0


def test_ties_merge_into_one_step():
    u = decreasing_rearrangement((np.array([1.0, 1.0, 2.0]), np.array([0.1, 0.2, 0.3])))
    assert list(u.values) == [2.0, 1.0]
    assert np.allclose(u.step_edges, [0.0, 0.3, 0.6])


def test_rejects_bad_cells():
    with pytest.raises(DomainError):
        CellSample(np.nan, 1.0)
    with pytest.raises(DomainError):
        CellSample(1.0, -1.0)
    with pytest.raises(DomainError):
        decreasing_rearrangement((np.array([1.0]), np.array([0.0])))
    with pytest.raises(DomainError):
        distribution_function([CellSample(1.0, 1.0)], -1.0)


@settings(max_examples=60, deadline=None)
@given(cells, st.floats(0.0, 1.0))
def test_matches_definition(data, frac):
    v, m = _arrays(data)
    u = decreasing_rearrangement((v, m))
    t = frac * m.sum() * 0.999
    assert u(max(t, 1e-12)) == brute_force_rearrangement(v, m, max(t, 1e-12))


@settings(max_examples=60, deadline=None)
@given(cells, st.floats(0.0, 5.0))
def test_equimeasurable(data, s):
    v, m = _arrays(data)
    u = decreasing_rearrangement((v, m))
    assert u.level_measure(s) == pytest.approx(distribution_function((v, m), s), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(cells)
def test_mass_conservation_and_maximal_dominates(data):
    v, m = _arrays(data)
    u = decreasing_rearrangement((v, m))
    assert u.total_integral() == pytest.approx(float(np.sum(np.abs(v) * m)), rel=1e-12, abs=1e-12)
    uss = maximal_function(u)
    ts = np.linspace(1e-6, m.sum(), 50)
    a, b = np.asarray(u(ts)), np.asarray(uss(ts))
    assert np.all(b >= a * (1 - 1e-12) - 1e-14)
    assert np.all(np.diff(a) <= 1e-15)
    assert np.all(np.diff(b) <= 1e-12)


def test_maximal_function_of_steps_by_hand():
    u = StepProfile([0.0, 1.0, 3.0], [4.0, 1.0])
    uss = maximal_function(u)
    assert uss(0.5) == pytest.approx(4.0)
    assert uss(2.0) == pytest.approx((4.0 + 1.0) / 2.0)
    assert uss(3.0) == pytest.approx(6.0 / 3.0)


def test_maximal_function_rejects_non_integrable():
    prof = MonotoneProfile([Segment(0.0, 1.0, PowerForm(1.0, -1.0))], 1.0)
    with pytest.raises(DivergenceError):
        maximal_function(prof)


def test_brute_force_sort_on_a_million_cells():
    rng = np.random.default_rng(12345)
    values = rng.standard_normal(10**6)
    measures = rng.uniform(0.5, 1.5, 10**6) * 1e-6
    u = decreasing_rearrangement((values, measures))
    order = np.argsort(-np.abs(values), kind="stable")
    sorted_vals = np.abs(values)[order]
    cum = np.cumsum(measures[order])
    ts = rng.uniform(0, cum[-1], 2000)
    # u*(t) is the value of the first cell whose cumulative measure exceeds t
    idx = np.searchsorted(cum, ts, side="right")
    assert np.array_equal(np.asarray(u(ts)), sorted_vals[idx])


def test_schwarz_profile_round_trip():
    geom = BallGeometry(3, 1.0)
    u = MonotoneProfile([Segment(0.0, geom.V, KernelForm(geom, 2.0, 0.5))], geom.V)
    rad = schwarz_profile(u, geom)
    r = np.linspace(0.05, 0.95, 7)
    assert np.allclose(rad(r), u(geom.volume_of_radius(r)), rtol=1e-13)
    back = rad.rearrangement()
    ts = np.geomspace(1e-6, geom.V * 0.99, 9)
    assert np.allclose(back(ts), u(ts), rtol=1e-12)
    with pytest.raises(DomainError):
        schwarz_profile(u, BallGeometry(3, 2.0))
