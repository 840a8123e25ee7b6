"""Closed forms for the Dirichlet Green kernel of a ball and its rearrangements.

All functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .geometry import BallGeometry

# relative slack when checking t <= V, so that t computed as |B_R| passes
_VOLUME_SLACK = 1e-12


def _scalar_or_array(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _check_measure(geom: BallGeometry, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)) or np.any(t > geom.V * (1 + _VOLUME_SLACK)):
        raise DomainError(f"measure argument must lie in (0, V], V={geom.V!r}")
    return np.minimum(t, geom.V)


def green_radial(geom: BallGeometry, r):
    """N_{B_R}(r): c_n (r^{2-n} - R^{2-n}) for n >= 3, log(R/r)/(2 pi) for n = 2.

    r = 0 returns +inf (the pole).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > geom.R * (1 + _VOLUME_SLACK)):
        raise DomainError(f"radius must lie in [0, R], R={geom.R!r}")
    r = np.minimum(r, geom.R)
    with np.errstate(divide="ignore"):
        if geom.n == 2:
            out = np.log(geom.R / r) / (2.0 * math.pi)
        else:
            k = 2 - geom.n
            out = geom.c_n * (r**k - geom.R**k)
    return _scalar_or_array(out)


def green_radial_derivative(geom: BallGeometry, r):
    """dN_{B_R}/dr = -r^{1-n}/omega_{n-1}, valid in every dimension."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        out = -(r ** (1 - geom.n)) / geom.omega
    return _scalar_or_array(out)


def green_rearranged(geom: BallGeometry, t):
    """N*_V(t), the decreasing rearrangement of N_{B_R}, V = |B_R|."""
    t = _check_measure(geom, t)
    K = geom.kernel_constant
    if geom.n == 2:
        out = K * np.log(geom.V / t)
    else:
        p = geom.p
        out = K * (t**-p - geom.V**-p)
    return _scalar_or_array(out)


def green_rearranged_derivative(geom: BallGeometry, t):
    """d/dt N*_V(t) (negative)."""
    t = np.asarray(t, dtype=float)
    K = geom.kernel_constant
    if geom.n == 2:
        out = -K / t
    else:
        out = -K * geom.p * t ** (-geom.p - 1)
    return _scalar_or_array(out)


def green_rearranged_infinite(n: int, t):
    """N*_inf(t) = c_n (omega_{n-1}/n)^{(n-2)/n} t^{-(n-2)/n}, n >= 3."""
    if n == 2:
        raise DomainError("the whole-space kernel has no finite limit for n = 2")
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("measure argument must be positive")
    geom = BallGeometry(n, 1.0)
    return _scalar_or_array(geom.kernel_constant * t**-geom.p)


def green_maximal(geom: BallGeometry, t):
    """N**_V(t) = (1/t) int_0^t N*_V, in closed form."""
    t = _check_measure(geom, t)
    K = geom.kernel_constant
    if geom.n == 2:
        out = K * (1.0 + np.log(geom.V / t))
    else:
        p = geom.p
        out = K * (t**-p / (1.0 - p) - geom.V**-p)
    return _scalar_or_array(out)


def green_distribution(geom: BallGeometry, s):
    """lambda_V(s) = |{t > 0 : N*_V(t) > s}|."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("level must be nonnegative")
    V = geom.V
    if geom.n == 2:
        out = V * np.exp(-4.0 * math.pi * s)
    else:
        p = geom.p
        out = np.minimum(V, (geom.alpha_n * s + V**-p) ** (-1.0 / p))
    return _scalar_or_array(out)


def _distribution_for_volume(n: int, V, s):
    V = np.asarray(V, dtype=float)
    if n == 2:
        return V * np.exp(-4.0 * math.pi * s)
    geom = BallGeometry(n, 1.0)
    p = geom.p
    with np.errstate(divide="ignore"):
        base = geom.alpha_n * s + np.where(V > 0, V, np.inf) ** -p
        out = np.where(V > 0, base ** (-1.0 / p), 0.0)
    return np.minimum(V, out)


def split_distribution_sum(n: int, V: float, s: float, V1):
    """lambda_{V1}(s) + lambda_{V - V1}(s) for a split of the volume V."""
    V1 = np.asarray(V1, dtype=float)
    if np.any(V1 < 0) or np.any(V1 > V):
        raise DomainError("split volume must lie in [0, V]")
    if s < 0:
        raise DomainError("level must be nonnegative")
    out = _distribution_for_volume(n, V1, s) + _distribution_for_volume(n, V - V1, s)
    return _scalar_or_array(out)


def split_distribution_bound(n: int, V: float, s: float) -> float:
    """Value of the split sum at the even split V1 = V/2.

    Written in the form (2^{-(n-2)/n} alpha_n s + V^{-(n-2)/n})^{-n/(n-2)};
    with s = 2 sigma / ||f||_1 this is the sharp bound for the compactly
    supported distribution function. For n = 2 it is V exp(-4 pi s).
    """
    if n == 2:
        return V * math.exp(-4.0 * math.pi * s)
    geom = BallGeometry(n, 1.0)
    p = geom.p
    return (2.0**-p * geom.alpha_n * s + V**-p) ** (-1.0 / p)


def green_profile(geom: BallGeometry):
    """N*_V as a tagged MonotoneProfile on (0, V]."""
    from .profiles import KernelForm, MonotoneProfile, Segment

    return MonotoneProfile([Segment(0.0, geom.V, KernelForm(geom, 1.0, 0.0))], geom.V)
