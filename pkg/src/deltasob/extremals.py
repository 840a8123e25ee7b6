"""Extremal families for the Green-potential rearrangement bounds.

* bump:      data chi_{B_delta}/|B_delta|, potential equal to N_{B_R} outside B_delta.
* balanced:  half the bump minus half the normalised indicator of the
             annulus R-2eps < |x| < R-eps, so the potential is compactly
             supported and nonnegative.
* translated pair: V(x) = U(x) - U(x - lambda e1) with U the balanced
             potential for eps = R/4; not radial, evaluated in (x1, rho).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .axisym import weighted_balls_l1
from .errors import DomainError
from .geometry import BallGeometry, sphere_area
from .green import green_rearranged, green_rearranged_infinite
from .profiles import MonotoneProfile
from .radial import RadialProfile, integrate_green_shell, solve_radial
from .rearrangement import decreasing_rearrangement


# --------------------------------------------------------------------------
# radial families


def bump_data(geom: BallGeometry, delta: float) -> RadialProfile:
    if not 0 < delta < geom.R:
        raise DomainError(f"need 0 < delta < R, got delta={delta!r}, R={geom.R!r}")
    return RadialProfile.piecewise_constant(geom, [0.0, delta, geom.R], [1.0 / geom.volume_of_radius(delta), 0.0])


def bump_potential(geom: BallGeometry, delta: float) -> RadialProfile:
    """Solution of -Delta u = chi_{B_delta}/|B_delta| on B_R, zero on the sphere."""
    return solve_radial(geom, bump_data(geom, delta))


def annulus_volume(geom: BallGeometry, eps: float) -> float:
    return geom.volume_of_radius(geom.R - eps) - geom.volume_of_radius(geom.R - 2 * eps)


def balanced_data(geom: BallGeometry, delta: float, eps: float) -> RadialProfile:
    R = geom.R
    if not (eps > 0 and 0 < delta < R - 2 * eps):
        raise DomainError(f"need 0 < delta < R - 2 eps, got delta={delta!r}, eps={eps!r}, R={R!r}")
    A = annulus_volume(geom, eps)
    return RadialProfile.piecewise_constant(
        geom,
        [0.0, delta, R - 2 * eps, R - eps, R],
        [0.5 / geom.volume_of_radius(delta), 0.0, -0.5 / A, 0.0],
    )


def balanced_potential(geom: BallGeometry, delta: float, eps: float) -> RadialProfile:
    """Solution for the zero-mean data; vanishes on R - eps <= |x| <= R."""
    return solve_radial(geom, balanced_data(geom, delta, eps))


def balanced_shift(geom: BallGeometry, eps: float) -> float:
    """(1/(2|A|)) int_A N_{B_R}, the constant subtracted from N/2 between delta and R - 2 eps."""
    R = geom.R
    return integrate_green_shell(geom, R - 2 * eps, R - eps) / (2 * annulus_volume(geom, eps))


def pair_constant(geom: BallGeometry) -> float:
    """d_n with U_{delta,R/4}(x) = c_n |x|^{2-n}/2 - d_n R^{2-n} for delta <= |x| <= R/2.

    Scale invariant; n >= 3.
    """
    if geom.n < 3:
        raise DomainError("the pair constant is defined for n >= 3")
    b = -balanced_shift(geom, geom.R / 4)
    return 0.5 * geom.c_n - b * geom.R ** (geom.n - 2)


# --------------------------------------------------------------------------
# translated pair


@dataclass
class AxisymmetricField:
    """V(x1, rho) = U(|x|) - U(|x - lambda e1|), rho the distance to the axis."""

    geom: BallGeometry
    delta: float
    lam: float
    profile: RadialProfile = field(repr=False)

    @property
    def R(self) -> float:
        return self.geom.R

    @property
    def n(self) -> int:
        return self.geom.n

    def bump(self, r):
        r = np.asarray(r, dtype=float)
        inside = r <= self.R
        out = np.zeros_like(r)
        if np.any(inside):
            out[inside] = self.profile(r[inside])
        return out

    def __call__(self, x1, rho):
        x1 = np.asarray(x1, dtype=float)
        rho = np.asarray(rho, dtype=float)
        r0 = np.hypot(x1, rho)
        r1 = np.hypot(x1 - self.lam, rho)
        out = self.bump(r0) - self.bump(r1)
        return float(out) if out.ndim == 0 else out

    def data_l1(self) -> float:
        """Exact ||Delta V||_1 by axisymmetric integration of the ball indicators."""
        geom, d, lam, R = self.geom, self.delta, self.lam, self.R
        wb = 0.5 / geom.volume_of_radius(d)
        wa = 0.5 / annulus_volume(geom, R / 4)
        balls = [
            (0.0, d, wb), (lam, d, -wb),
            (0.0, 0.75 * R, -wa), (0.0, 0.5 * R, wa),
            (lam, 0.75 * R, wa), (lam, 0.5 * R, -wa),
        ]
        return weighted_balls_l1(geom.n, balls)


def translated_pair(geom: BallGeometry, delta: float, lam: float, relaxed: bool = False) -> AxisymmetricField:
    """The translated pair built on B_R = geom.

    The strict admissibility is delta < min(1/2, R/2) and delta < lam/2 < R/2;
    ``relaxed`` drops everything but disjointness of the bumps (delta < lam/2)
    and delta < R/2, as needed for lam -> infinity sweeps.
    """
    R = geom.R
    if geom.n < 2:
        raise DomainError("dimension must be >= 2")
    if not 0 < delta < 0.5 * lam:
        raise DomainError(f"bumps overlap: need delta < lam/2, got delta={delta!r}, lam={lam!r}")
    if not delta < 0.5 * R:
        raise DomainError("need delta < R/2")
    if not relaxed and not (delta < 0.5 and lam < R):
        raise DomainError("need delta < 1/2 and lam < R (pass relaxed=True for large-lam sweeps)")
    return AxisymmetricField(geom, float(delta), float(lam), balanced_potential(geom, delta, R / 4))


def defect_l1(geom: BallGeometry, lam: float, R: float | None = None) -> float:
    """(1/|A|) |A symmetric-difference (A + lam e1)| for A = {R/2 < |x| < 3R/4}.

    0 at lam = 0 and 2 once the annuli are disjoint. The annulus part of
    the pair's Laplacian carries half this mass.
    """
    R = geom.R if R is None else R
    g = geom.with_radius(R)
    if lam < 0:
        raise DomainError("translation must be nonnegative")
    if lam == 0:
        return 0.0
    A = annulus_volume(g, R / 4)
    w = 1.0 / A
    balls = [(0.0, 0.75 * R, w), (0.0, 0.5 * R, -w), (lam, 0.75 * R, -w), (lam, 0.5 * R, w)]
    return weighted_balls_l1(g.n, balls)


def implied_defect_constant(geom: BallGeometry, lams) -> float:
    """Smallest C with defect_l1(lam) <= C lam / R on the given translations."""
    lams = np.asarray(lams, dtype=float)
    lams = lams[lams > 0]
    return float(max(defect_l1(geom, x) * geom.R / x for x in lams))


def pair_level_lower_bound(n: int, s, lam: float):
    """Lower bound 2|B_{|x*|}| for |{|V| > s}|, valid for s up to pair_level_ceiling."""
    g = BallGeometry(n, 1.0)
    s = np.asarray(s, dtype=float)
    out = 2 * g.omega / n * (2 * s / g.c_n + 2.0 ** (n - 2) * lam ** (2 - n)) ** (-n / (n - 2))
    return float(out) if out.ndim == 0 else out


def pair_level_ceiling(n: int, delta: float, lam: float) -> float:
    g = BallGeometry(n, 1.0)
    return 0.5 * g.c_n * (delta ** (2 - n) - 2.0 ** (n - 2) * lam ** (2 - n))


def pair_rearrangement_lower_bound(n: int, t, lam: float):
    """(c_n/2) [ (n t / (2 omega))^{-(n-2)/n} - 2^{n-2} lam^{2-n} ], for 2|B_delta| <= t <= |B_{R/2}|."""
    g = BallGeometry(n, 1.0)
    t = np.asarray(t, dtype=float)
    out = 0.5 * g.c_n * ((n * t / (2 * g.omega)) ** (-g.p) - 2.0 ** (n - 2) * lam ** (2 - n))
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# grid rearrangement of the pair


@dataclass(frozen=True)
class GridSpec:
    """Graded (x1, rho) grid around the pole at the origin.

    Cells are uniform of width delta/cells_per_delta out to 2 delta, then
    grow geometrically by ``growth`` up to the window half-width. ``window``
    defaults to lam/2; ``mirror`` adds the antisymmetric image window.
    """

    cells_per_delta: int = 32
    growth: float = 1.06
    far_cells: int = 64
    window: float | None = None
    mirror: bool = True

    def coarsened(self) -> "GridSpec":
        return GridSpec(max(self.cells_per_delta // 2, 1), self.growth**2, max(self.far_cells // 2, 1),
                        self.window, self.mirror)


def _graded_axis(h: float, core: float, edge: float, growth: float, min_far: int) -> np.ndarray:
    """Nodes 0 .. edge: uniform step h up to ``core`` then geometric growth."""
    if edge <= core:
        k = max(int(math.ceil(edge / h)), 1)
        return np.linspace(0.0, edge, k + 1)
    k = int(math.ceil(core / h))
    core = k * h
    nodes = list(np.linspace(0.0, core, k + 1))
    width = h
    x = core
    while x < edge:
        width *= growth
        x += width
        nodes.append(x)
    nodes[-1] = edge
    # enforce the minimum far-field count
    far = np.array(nodes[k:])
    if len(far) - 1 < min_far:
        far = core + (edge - core) * (np.geomspace(1.0, 1.0 + 50.0, min_far + 1) - 1.0) / 50.0
    return np.concatenate([np.array(nodes[:k]), far])


@dataclass
class FieldRearrangement:
    profile: MonotoneProfile
    res_tol: float
    level_floor: float  # levels above this are fully captured by the windows
    t_valid: float  # the profile is exact (up to the grid) on (0, t_valid]
    n_cells: int
    coarse: MonotoneProfile | None = None
    warnings: list = field(default_factory=list)

    def __call__(self, t):
        return self.profile(t)


def _window_cells(fld: AxisymmetricField, spec: GridSpec, w: float):
    d = fld.delta
    h = d / spec.cells_per_delta
    x_hi = min(w, 0.5 * fld.lam)
    xr = _graded_axis(h, 2 * d, x_hi, spec.growth, spec.far_cells)
    xl = -_graded_axis(h, 2 * d, w, spec.growth, spec.far_cells)[::-1]
    x_nodes = np.concatenate([xl[:-1], xr])
    rho_nodes = _graded_axis(h, 2 * d, w, spec.growth, spec.far_cells)
    n = fld.n
    xm = 0.5 * (x_nodes[1:] + x_nodes[:-1])
    dx = np.diff(x_nodes)
    rm = 0.5 * (rho_nodes[1:] + rho_nodes[:-1])
    shell = sphere_area(n - 2) * np.diff(rho_nodes ** (n - 1)) / (n - 1)
    X, Rm = np.meshgrid(xm, rm, indexing="ij")
    meas = np.outer(dx, shell)
    return X, Rm, meas


def _grid_profile(fld: AxisymmetricField, spec: GridSpec, w: float, mirror: bool):
    X, Rm, meas = _window_cells(fld, spec, w)
    vals = fld(X, Rm)
    values = [np.abs(vals).ravel()]
    measures = [meas.ravel()]
    if mirror:
        # image window around the second pole, via x -> x_lam - x
        vm = fld(fld.lam - X, Rm)
        values.append(np.abs(vm).ravel())
        measures.append(meas.ravel())
    values = np.concatenate(values)
    measures = np.concatenate(measures)
    return decreasing_rearrangement((values, measures)), values.size


def field_rearrangement(fld: AxisymmetricField, grid: GridSpec | None = None, t_eval=None) -> FieldRearrangement:
    """Rearrangement of |V| from midpoint samples on graded windows around the poles.

    Outside both windows |V| <= U(w), so the step profile is the true u* of
    the cell function for levels above U(w). The resolution tolerance is
    the largest relative difference between this grid and a grid with half
    the resolution, measured at ``t_eval`` (default: 40 log-spaced points in
    [|B_delta|, t_valid]).
    """
    spec = grid or GridSpec()
    if spec.cells_per_delta < 32:
        msg = f"grid under-resolves the bump: {spec.cells_per_delta} cells across delta (< 32)"
        warn = [msg]
        warnings.warn(msg)
    else:
        warn = []
    w = spec.window if spec.window is not None else 0.5 * fld.lam
    if w > 0.5 * fld.lam and spec.mirror:
        raise DomainError("window must not exceed lam/2 when the image window is included")
    floor = float(fld.bump(np.array(w)))
    fine, ncells = _grid_profile(fld, spec, w, spec.mirror)
    coarse, _ = _grid_profile(fld, spec.coarsened(), w, spec.mirror)
    t_valid = fine.level_measure(floor)
    if t_eval is None:
        lo = fld.geom.volume_of_radius(fld.delta)
        t_eval = np.geomspace(lo, max(t_valid, lo * 1.0001), 40)
    t_eval = np.asarray(t_eval, dtype=float)
    a, b = fine(t_eval), coarse(t_eval)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(a - b) / np.abs(a)
    res_tol = float(np.nanmax(rel)) if rel.size else 0.0
    return FieldRearrangement(fine, res_tol, floor, t_valid, ncells, coarse, warn)


# --------------------------------------------------------------------------
# ratios


def sharpness_ratio(u_star, t, V_domain: float, l1: float, n: int, kernel: str = "ball"):
    """u*(t) / (K(t) l1) with K = N*_{V_domain} ("ball") or N*_inf ("infinite")."""
    t = np.asarray(t, dtype=float)
    if not l1 > 0:
        raise DomainError("l1 must be positive")
    if kernel == "infinite":
        if np.any(~(t > 0)):
            raise DomainError("t must be positive")
        k = green_rearranged_infinite(n, t)
    elif kernel == "ball":
        if np.any(~(t > 0)) or np.any(t > V_domain * (1 + 1e-12)):
            raise DomainError("t must lie in (0, V_domain]")
        k = green_rearranged(BallGeometry.from_volume(n, V_domain), t)
    else:
        raise DomainError(f"unknown kernel {kernel!r}")
    u = u_star(t) if callable(u_star) else u_star
    out = np.asarray(u, dtype=float) / (np.asarray(k) * l1)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SharpnessRow:
    family: str
    n: int
    t: float
    delta: float
    epsilon: float
    lam: float
    R: float
    l1: float
    ratio: float
    target: float
    res_tol: float = 0.0

    @property
    def gap(self) -> float:
        return abs(self.target - self.ratio) if math.isfinite(self.target) else math.nan

    def as_record(self) -> dict:
        return {
            "family": self.family, "n": self.n, "t": self.t, "delta": self.delta, "epsilon": self.epsilon,
            "lambda": self.lam, "R": self.R, "l1": self.l1, "ratio": self.ratio, "target": self.target,
            "gap": self.gap, "res_tol": self.res_tol,
        }
