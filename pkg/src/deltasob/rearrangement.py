"""Distribution functions, decreasing rearrangements and maximal functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DivergenceError, DomainError
from .profiles import (
    AveragedForm,
    HyperbolicStepProfile,
    MonotoneProfile,
    Segment,
    StepProfile,
)


@dataclass(frozen=True)
class CellSample:
    """|u| on one cell of a partition, with the cell's Lebesgue measure."""

    value: float
    measure: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise DomainError("cell value must be finite")
        if not self.measure >= 0:
            raise DomainError("cell measure must be nonnegative")


def _as_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    """Accept a sequence of CellSample or a (values, measures) pair of arrays."""
    if isinstance(samples, tuple) and len(samples) == 2 and not isinstance(samples[0], CellSample):
        values = np.abs(np.asarray(samples[0], dtype=float)).ravel()
        measures = np.asarray(samples[1], dtype=float).ravel()
        if values.shape != measures.shape:
            raise DomainError("values and measures must have the same shape")
        if np.any(~np.isfinite(values)):
            raise DomainError("cell values must be finite")
        if np.any(measures < 0):
            raise DomainError("cell measures must be nonnegative")
    else:
        samples = list(samples)
        values = np.abs(np.array([c.value for c in samples], dtype=float))
        measures = np.array([c.measure for c in samples], dtype=float)
    if not np.isfinite(measures.sum()):
        raise DomainError("total measure must be finite")
    return values, measures


def distribution_function(samples, s: float) -> float:
    """Measure of the cells with value strictly above ``s``."""
    if s < 0:
        raise DomainError("level must be nonnegative")
    values, measures = _as_arrays(samples)
    return float(measures[values > s].sum())


def decreasing_rearrangement(samples: Sequence[CellSample] | tuple | Iterable) -> StepProfile:
    """Exact step rearrangement: sort descending, merge ties, accumulate measure.

    Cells of zero measure are dropped. The returned profile lives on
    (0, total measure].
    """
    values, measures = _as_arrays(samples)
    keep = measures > 0
    values, measures = values[keep], measures[keep]
    if values.size == 0:
        raise DomainError("samples carry no measure")
    order = np.argsort(-values, kind="stable")
    values, measures = values[order], measures[order]
    # merge equal values into one step
    uniq, start = np.unique(-values, return_index=True)
    step_values = -uniq
    step_measures = np.add.reduceat(measures, start)
    edges = np.concatenate([[0.0], np.cumsum(step_measures)])
    return StepProfile(edges, step_values)


def maximal_function(u_star: MonotoneProfile) -> MonotoneProfile:
    """u**(t) = (1/t) int_0^t u*, exact segment by segment."""
    if isinstance(u_star, StepProfile):
        return HyperbolicStepProfile(u_star)
    lead = u_star.leading()
    if lead is not None and not lead.integrable():
        raise DivergenceError("u* has a non-integrable singularity at t = 0")
    segs = [Segment(s.lo, s.hi, AveragedForm(u_star)) for s in u_star.segments]
    return MonotoneProfile(segs, u_star.total_measure, u_star.tail)


def schwarz_profile(u_star: MonotoneProfile, geom):
    """Radial profile r -> u*(|B_r|) on the ball ``geom``."""
    from .radial import RadialProfile

    V = geom.V
    if abs(u_star.total_measure - V) > 1e-10 * V:
        raise DomainError(f"profile measure {u_star.total_measure!r} differs from ball volume {V!r}")
    return RadialProfile.from_measure_profile(u_star, geom)
