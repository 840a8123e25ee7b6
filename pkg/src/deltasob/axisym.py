"""Exact integrals over unions of balls centred on the first axis.

A point (x1, rho) with rho the distance to the axis lies in the ball of
radius r centred at c e1 iff rho^2 < r^2 - (x1 - c)^2. For a fixed x1 every
ball is a rho-interval starting at 0, so a weighted sum of ball indicators is
piecewise constant in rho, and its |.|-integral over the transverse
(n-1)-space is a sum of terms rho_i(x1)^{n-1}. Between consecutive x1
breakpoints (ball ends and crossings of two rho_i curves) that sum is a
polynomial of degree n-1 for odd n, so Gauss-Legendre is exact.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate

from .geometry import sphere_area


def _slice_integral(n: int, balls, x1: np.ndarray) -> np.ndarray:
    """int over the transverse space of |sum w_i chi_i| at each x1."""
    c = np.array([b[0] for b in balls])[:, None]
    r = np.array([b[1] for b in balls])[:, None]
    w = np.array([b[2] for b in balls])[:, None]
    rho2 = r * r - (x1[None, :] - c) ** 2
    rho = np.sqrt(np.maximum(rho2, 0.0))
    order = np.argsort(rho, axis=0)
    rho_s = np.take_along_axis(rho, order, axis=0)
    w_s = np.take_along_axis(np.broadcast_to(w, rho.shape), order, axis=0)
    # partial sums over balls whose rho_i exceeds the current band
    tail = np.cumsum(w_s[::-1], axis=0)[::-1]
    pw = rho_s ** (n - 1)
    lower = np.vstack([np.zeros((1, pw.shape[1])), pw[:-1]])
    band = pw - lower
    return sphere_area(n - 2) / (n - 1) * np.sum(np.abs(tail) * band, axis=0)


def _breakpoints(balls) -> list[float]:
    pts = set()
    for c, r, _ in balls:
        pts.add(c - r)
        pts.add(c + r)
    for (c1, r1, _), (c2, r2, _) in itertools.combinations(balls, 2):
        if c1 != c2:
            x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2 * (c2 - c1))
            pts.add(x)
    return sorted(pts)


def weighted_balls_l1(n: int, balls) -> float:
    """int_{R^n} |sum_i w_i chi_{B(c_i e1, r_i)}| for balls = [(c_i, r_i, w_i)]."""
    balls = [(float(c), float(r), float(w)) for c, r, w in balls if r > 0 and w != 0]
    if not balls:
        return 0.0
    lo = min(c - r for c, r, _ in balls)
    hi = max(c + r for c, r, _ in balls)
    pts = [x for x in _breakpoints(balls) if lo <= x <= hi]
    total = 0.0
    if n % 2 == 1:
        xg, wg = np.polynomial.legendre.leggauss(max(4, (n + 3) // 2))
        for a, b in zip(pts, pts[1:]):
            if b <= a:
                continue
            x = 0.5 * (b - a) * xg + 0.5 * (a + b)
            total += 0.5 * (b - a) * float(np.dot(wg, _slice_integral(n, balls, x)))
    else:
        f = lambda x: float(_slice_integral(n, balls, np.array([x]))[0])
        for a, b in zip(pts, pts[1:]):
            if b <= a:
                continue
            val, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
            total += val
    return total


def lens_volume_3d(r1: float, r2: float, d: float) -> float:
    """Volume of the intersection of two balls in R^3 (closed form)."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        r = min(r1, r2)
        return 4.0 * math.pi * r**3 / 3.0
    return (math.pi * (r1 + r2 - d) ** 2
            * (d * d + 2 * d * (r1 + r2) - 3 * (r1 - r2) ** 2) / (12.0 * d))
