"""Zygmund and weak-type (quasi-)norms, L^q norms and exponential integrals.

All suprema are taken segment by segment on the profile, including the
exact t -> 0 limit from each segment's declared asymptotics, because the
sharp constants are only attained in that limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, DomainError
from .geometry import BallGeometry
from .profiles import LexpWeight, MonotoneProfile, StepProfile, WeakWeight
from .rearrangement import maximal_function


@dataclass(frozen=True)
class NormResult:
    kind: str
    value: float
    V: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("lexp_quasi", "lexp", "weak_quasi", "weak", "lq", "exp_integral"):
            raise DomainError(f"unknown norm kind {self.kind!r}")


def _volume(u_star: MonotoneProfile, V):
    V = u_star.total_measure if V is None else float(V)
    if V < u_star.total_measure * (1 - 1e-12):
        raise DomainError("domain volume is smaller than the profile's support")
    return V


def lexp_quasi_norm(u_star: MonotoneProfile, V: float | None = None) -> float:
    """sup_t u*(t) / (1 + log(V/t))."""
    return u_star.weighted_sup(LexpWeight(_volume(u_star, V)))


def lexp_norm(u_star: MonotoneProfile, V: float | None = None) -> float:
    """sup_t u**(t) / (1 + log(V/t))."""
    return maximal_function(u_star).weighted_sup(LexpWeight(_volume(u_star, V)))


def _weak_p(n: int) -> float:
    if n < 3:
        raise DomainError("weak-type norms need n >= 3")
    return (n - 2) / n


def weak_quasi_norm(u_star: MonotoneProfile, n: int, V: float | None = None) -> float:
    """sup_t t^{(n-2)/n} u*(t)."""
    _volume(u_star, V)
    return u_star.weighted_sup(WeakWeight(_weak_p(n)))


def weak_norm(u_star: MonotoneProfile, n: int, V: float | None = None) -> float:
    """sup_t t^{(n-2)/n} u**(t)."""
    _volume(u_star, V)
    return maximal_function(u_star).weighted_sup(WeakWeight(_weak_p(n)))


def lq_norm(u_star: MonotoneProfile, q: float) -> float:
    """(int_0^V (u*)^q)^{1/q}; raises DivergenceError if the singularity is too strong."""
    if not q >= 1:
        raise DomainError("q must be >= 1")
    if isinstance(u_star, StepProfile):
        total = float(np.sum(np.abs(u_star.values) ** q * np.diff(u_star.step_edges)))
    else:
        total = sum(s.form.power_integral(s.lo, s.hi, q) for s in u_star.segments)
    return total ** (1.0 / q)


def exp_integral(u_star: MonotoneProfile, alpha: float, l1: float, V: float | None = None) -> float:
    """int_0^V exp(alpha u*(t) / l1) dt; +inf when the integral diverges at t = 0."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if not l1 > 0:
        raise DomainError("l1 must be positive")
    V = _volume(u_star, V)
    k = alpha / l1
    if isinstance(u_star, StepProfile):
        total = float(np.sum(np.exp(k * u_star.values) * np.diff(u_star.step_edges)))
    else:
        total = 0.0
        for s in u_star.segments:
            total += s.form.exp_integral(s.lo, s.hi, k)
            if math.isinf(total):
                return math.inf
    # u* = 0 beyond the support contributes its measure
    return total + (V - u_star.total_measure)


def mazya_constant(n: int, q: float, V: float) -> float:
    """(int_0^V (N*_V)^q)^{1/q} through the Gamma bracket; 1 <= q < n/(n-2)."""
    if n < 3:
        raise DomainError("n must be >= 3")
    qmax = n / (n - 2)
    if not 1 <= q < qmax:
        raise DomainError(f"q must lie in [1, {qmax})")
    g = BallGeometry.from_volume(n, V)
    bracket = math.gamma(qmax - q) * math.gamma(q + 1) / math.gamma(qmax)
    return g.kernel_constant * bracket ** (1.0 / q) * V ** (1.0 / q - g.p)


def mazya_constant_compact(n: int, q: float, V: float) -> float:
    """Constant for compactly supported functions: 2^{-2/(q n)} times mazya_constant."""
    return 2.0 ** (-2.0 / (q * n)) * mazya_constant(n, q, V)


def evaluate_norm(kind: str, u_star: MonotoneProfile, V: float | None = None, **params) -> NormResult:
    Vv = _volume(u_star, V)
    if kind == "lexp_quasi":
        val = lexp_quasi_norm(u_star, Vv)
    elif kind == "lexp":
        val = lexp_norm(u_star, Vv)
    elif kind == "weak_quasi":
        val = weak_quasi_norm(u_star, params["n"], Vv)
    elif kind == "weak":
        val = weak_norm(u_star, params["n"], Vv)
    elif kind == "lq":
        val = lq_norm(u_star, params["q"])
    elif kind == "exp_integral":
        val = exp_integral(u_star, params["alpha"], params.get("l1", 1.0), Vv)
    else:
        raise DomainError(f"unknown norm kind {kind!r}")
    return NormResult(kind, val, Vv, dict(params))


__all__ = [
    "DivergenceError", "NormResult", "evaluate_norm", "exp_integral", "lexp_norm", "lexp_quasi_norm",
    "lq_norm", "mazya_constant", "mazya_constant_compact", "weak_norm", "weak_quasi_norm",
]
