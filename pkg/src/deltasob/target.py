"""Membership in the order-continuous target spaces and the majorant construction.

A profile u* belongs to the target space when u**(t)/N*(t) -> 0 as t -> 0.
For such u the majorant construction produces a compactly supported
potential v and a constant C with u* <= v* + C + lambda, where lambda is a
truncation level. The construction, in the variable x = log(W/t):

    g = u0** / N*_W,   f = running sup of g (non-decreasing in t),
    k(x) = (1/x) int_0^x f,   h = dk/dt = (k - f) / (t x) >= 0,

so that N*_W(t) int_0^t h = N*_W(t) k(t) >= N*_W(t) f(t) >= u0**(t) >= u0*(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import BallGeometry
from .green import green_radial, green_rearranged
from .norms import lexp_norm, weak_norm
from .profiles import (
    CallableForm,
    Const,
    KernelForm,
    Leading,
    MonotoneProfile,
    ScaledForm,
    Segment,
    StepProfile,
)
from .radial import KernelQuadratic, RadialCallable, RadialProfile, RadialSegment, solve_radial
from .rearrangement import maximal_function

DEFAULT_THRESHOLD = 1e-3
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


# --------------------------------------------------------------------------
# membership


@dataclass
class MembershipVerdict:
    defect_curve: list  # (t, u**(t)/N*(t)) on a geometric grid, increasing t
    limit_defect: float  # t -> 0 limit (analytic when the profile declares its asymptotics)
    sup_defect: float  # sup of the curve on (0, t0], limit included
    member: bool
    analytic: bool
    decreasing_tail: bool

    @property
    def smallest_grid_defect(self) -> float:
        return self.defect_curve[0][1]


def _ratio_limit(u_lead: Leading | None, k_lead: Leading) -> float | None:
    if u_lead is None:
        return None
    if u_lead.coef == 0:
        return 0.0
    return Leading(u_lead.coef / k_lead.coef, u_lead.power - k_lead.power, u_lead.logpow - k_lead.logpow).limit()


def target_defect(u_star: MonotoneProfile, geom: BallGeometry, t0: float | None = None,
                  threshold: float = DEFAULT_THRESHOLD, points: int = 121,
                  t_min_rel: float = 1e-12) -> MembershipVerdict:
    """Defect curve u**/N*_V and membership verdict.

    member iff the t -> 0 limit of the defect is at most ``threshold`` and the
    curve decreased over the two smallest decades of the grid. The limit is
    the analytic one whenever the profile carries asymptotics, otherwise the
    value at the smallest grid point.
    """
    V = geom.V
    t0 = V if t0 is None else float(t0)
    if not 0 < t0 <= V * (1 + 1e-12):
        raise DomainError("t0 must lie in (0, V]")
    t0 = min(t0, V)
    ts = np.geomspace(t_min_rel * V, t0, points)
    uss = maximal_function(u_star)
    kernel = np.asarray(green_rearranged(geom, ts))
    with np.errstate(divide="ignore", invalid="ignore"):
        curve = np.asarray(uss(ts)) / kernel
    finite = np.isfinite(curve)
    k_lead = KernelForm(geom, 1.0).leading()
    try:
        lim = _ratio_limit(uss.leading(), k_lead)
    except ArithmeticError:
        lim = math.inf
    analytic = lim is not None
    if lim is None:
        lim = float(curve[0])
    # decrease over the last two decades toward t -> 0
    j = int(np.searchsorted(ts, ts[0] * 100.0))
    tail = curve[: j + 1]
    decreasing = bool(tail[0] <= tail[-1] * (1 + 1e-12)) and bool(np.all(np.diff(tail) >= -1e-12 * np.abs(tail[1:])))
    sup = float(np.nanmax(np.append(curve[finite], lim)))
    member = bool(lim <= threshold and decreasing)
    return MembershipVerdict(list(zip(ts.tolist(), curve.tolist())), float(lim), sup, member, analytic, decreasing)


# --------------------------------------------------------------------------
# profiles used by the membership and Fatou checks


def truncated_kernel_profile(geom: BallGeometry, m: float) -> MonotoneProfile:
    """min(N*_V, m): constant m up to lambda_V(m), then the kernel."""
    from .green import green_distribution

    if not m > 0:
        raise DomainError("truncation height must be positive")
    tm = float(green_distribution(geom, m))
    if tm <= 0:
        return StepProfile([0.0, geom.V], [m])
    return MonotoneProfile([Segment(0.0, tm, Const(float(m))), Segment(tm, geom.V, KernelForm(geom, 1.0))], geom.V)


def kernel_power_profile(geom: BallGeometry, gamma: float, scale: float = 1.0) -> MonotoneProfile:
    """scale * (N*_V)^gamma."""
    return MonotoneProfile([Segment(0.0, geom.V, ScaledForm(KernelForm(geom, 1.0), gamma, scale))], geom.V)


# --------------------------------------------------------------------------
# truncation


def level_for_measure(u_star: MonotoneProfile, W: float) -> float:
    """A level lambda with |{u > lambda}| <= W, equality when u* is continuous at W."""
    if not 0 < W <= u_star.total_measure * (1 + 1e-12):
        raise DomainError("measure must lie in (0, V]")
    return float(u_star(min(W, u_star.total_measure)))


def truncate_above(u_star: MonotoneProfile, level: float, measure: float | None = None) -> MonotoneProfile:
    """(u0)* for u0 = max(u, level) - level: u* - level on (0, |{u > level}|), zero beyond.

    With ``measure`` given, the level must leave exactly that much measure
    above it; a level below the profile's values there is rejected.
    """
    if level < 0:
        raise DomainError("level must be nonnegative")
    S = u_star.level_measure(level)
    if measure is not None:
        if level < float(u_star(min(measure, u_star.total_measure))) * (1 - 1e-12):
            raise DomainError("level lies below the profile on the required measure")
        S = min(S, measure)
    V = u_star.total_measure
    if S <= 0:
        return StepProfile([0.0, V], [0.0])
    if isinstance(u_star, StepProfile):
        e = u_star.step_edges
        j = int(np.searchsorted(e, S, side="left"))
        edges = np.append(e[:j], S)
        vals = u_star.values[:j] - level
        if S < V:
            edges = np.append(edges, V)
            vals = np.append(vals, 0.0)
        return StepProfile(edges, np.maximum(vals, 0.0))
    segs = []
    for s in u_star.segments:
        if s.lo >= S:
            break
        segs.append(Segment(s.lo, min(s.hi, S), ScaledForm(s.form, 1.0, 1.0, -level)))
    if S < V:
        segs.append(Segment(S, V, Const(0.0)))
    return MonotoneProfile(segs, V)


# --------------------------------------------------------------------------
# majorant density


class Majorant:
    """Envelope f, weighted average k and density h = k' on (0, W].

    Everything is represented in x = log(W/t) >= 0. f is piecewise linear
    in x on the grid, constant for x <= log(W/S) (S the support of u0), and
    decays to its small-t limit L like e^{-(x - x_max)} beyond the grid.
    """

    def __init__(self, geom: BallGeometry, x_nodes: np.ndarray, f_nodes: np.ndarray, limit: float = 0.0):
        self.geom = geom
        self.W = geom.V
        self.x = np.asarray(x_nodes, dtype=float)
        self.F = np.asarray(f_nodes, dtype=float)
        self.L = float(limit)
        if self.x[0] != 0.0 or np.any(np.diff(self.x) <= 0):
            raise DomainError("x nodes must start at 0 and increase")
        if np.any(np.diff(self.F) > 1e-15 * max(1.0, abs(self.F).max())):
            raise DomainError("envelope must be non-increasing in x")
        dx = np.diff(self.x)
        self._cum = np.concatenate([[0.0], np.cumsum(0.5 * (self.F[1:] + self.F[:-1]) * dx)])
        self._slope = np.diff(self.F) / dx
        self.x_max = float(self.x[-1])
        self._v0_cum = None

    @property
    def total_mass(self) -> float:
        """int_0^W h = k(W) - k(0) = f(W) - L."""
        return float(self.F[0]) - self.L

    def _x(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0) or np.any(t > self.W * (1 + 1e-12)):
            raise DomainError("t must lie in (0, W]")
        return np.maximum(np.log(self.W / np.minimum(t, self.W)), 0.0)

    def f_x(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.interp(np.minimum(x, self.x_max), self.x, self.F)
        beyond = self.L + (self.F[-1] - self.L) * np.exp(-(x - self.x_max))
        return np.where(x <= self.x_max, inside, beyond)

    def I_x(self, x):
        """int_0^x f."""
        x = np.asarray(x, dtype=float)
        xc = np.minimum(x, self.x_max)
        j = np.clip(np.searchsorted(self.x, xc, side="right") - 1, 0, len(self.x) - 2)
        d = xc - self.x[j]
        inside = self._cum[j] + self.F[j] * d + 0.5 * self._slope[j] * d * d
        e = np.maximum(x - self.x_max, 0.0)
        beyond = self._cum[-1] + self.L * e + (self.F[-1] - self.L) * (-np.expm1(-e))
        return np.where(x <= self.x_max, inside, beyond)

    def k_x(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.I_x(x) / x
        return np.where(x > 0, out, self.F[0])

    def f(self, t):
        return _ret(self.f_x(self._x(t)))

    def k(self, t):
        return _ret(self.k_x(self._x(t)))

    def h(self, t):
        """k'(t) = (k - f) / (t log(W/t)), from the exact derivative of the representation."""
        t = np.asarray(t, dtype=float)
        x = self._x(t)
        kx, fx = self.k_x(x), self.f_x(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (kx - fx) / (t * x)
        # at t = W the quotient is 0/0; the one-sided limit is -f'(x=0)/(2W), and f is flat there
        return _ret(np.where(x > 0, out, 0.0))

    def integral_h(self, t):
        """int_0^t h = k(t) - k(0)."""
        return _ret(np.asarray(self.k(t)) - self.L)

    def _v0_weight(self, x):
        # |dN*/dt| dt written in x: K dx (n = 2), K p W^{-p} e^{p x} dx (n >= 3)
        g = self.geom
        K = g.kernel_constant
        if g.n == 2:
            return np.full_like(x, K)
        return K * g.p * self.W ** (-g.p) * np.exp(g.p * x)

    def _v0_integrand(self, x):
        return self.k_x(x) * self._v0_weight(x)

    def _gl(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        pts = mid[..., None] + half[..., None] * _GL_X
        return half * np.sum(self._v0_integrand(pts) * _GL_W, axis=-1)

    def v0_star(self, t):
        """(v0)*(t) = int_t^W k |dN*/ds| ds for the solution v0 on B_R with data h(|B_x|)."""
        if self._v0_cum is None:
            self._v0_cum = np.concatenate([[0.0], np.cumsum(self._gl(self.x[:-1], self.x[1:]))])
        x = self._x(t)
        xc = np.minimum(x, self.x_max)
        j = np.clip(np.searchsorted(self.x, xc, side="right") - 1, 0, len(self.x) - 2)
        out = self._v0_cum[j] + self._gl(self.x[j], xc)
        extra = x > self.x_max
        if np.any(extra):
            xe = np.atleast_1d(x)[np.atleast_1d(extra)]
            # geometric sub-intervals beyond the grid
            vals = []
            for xi in xe:
                edges = self.x_max + np.concatenate([[0.0], np.geomspace(1e-3, xi - self.x_max, 30)]) \
                    if xi - self.x_max > 1e-3 else np.array([self.x_max, xi])
                vals.append(self._v0_cum[-1] + float(np.sum(self._gl(edges[:-1], edges[1:]))))
            out = np.atleast_1d(np.array(out, dtype=float))
            out[np.atleast_1d(extra)] = vals
            out = out.reshape(np.shape(x))
        return _ret(out)


def _ret(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def majorant_density(u0_star: MonotoneProfile, geom: BallGeometry, points: int = 600,
                     t_min_rel: float = 1e-12, allow_limsup: bool = False) -> Majorant:
    """Build f, k, h for a truncated profile supported in a proper part of the ball.

    ``allow_limsup`` keeps a nonzero small-t defect limit L as k(0) = L
    instead of rejecting the input.
    """
    W = geom.V
    S = u0_star.level_measure(0.0)
    if S > W * (1 + 1e-12):
        raise DomainError("profile support exceeds the ball")
    if S <= 0:
        return Majorant(geom, np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    if S >= W * (1 - 1e-12):
        # g = u0**/N*_W is unbounded as t -> W; keep the support strictly inside
        raise DomainError("support must be a proper part of the ball (use a larger ball)")
    uss = maximal_function(u0_star)
    k_lead = KernelForm(geom, 1.0).leading()
    lim = _ratio_limit(uss.leading(), k_lead)
    if lim is None:
        lim = 0.0
    if not allow_limsup and lim > 0:
        raise PreconditionError(f"profile is not a member: u**/N* tends to {lim!r}")
    if math.isinf(lim):
        raise PreconditionError("u**/N* is unbounded as t -> 0")
    t_min = t_min_rel * W
    ts = np.geomspace(t_min, S, points)
    g = np.asarray(uss(ts)) / np.asarray(green_rearranged(geom, ts))
    # running sup from t -> 0 upward; guard each node with its right neighbour
    g_guard = np.maximum(g, np.append(g[1:], g[-1]))
    f = np.maximum.accumulate(np.maximum(g_guard, lim))
    # x grid ascending: x = 0 (t = W) first; f constant on [S, W]
    xs = np.log(W / ts)[::-1]
    fx = f[::-1]
    x_nodes = np.concatenate([[0.0], xs])
    f_nodes = np.concatenate([[fx[0]], fx])
    return Majorant(geom, x_nodes, f_nodes, limit=lim if allow_limsup else 0.0)


# --------------------------------------------------------------------------
# balanced majorant potential on B_{2R}


@dataclass
class MajorantPotential:
    geom: BallGeometry  # B_R
    outer: BallGeometry  # B_{2R}
    majorant: Majorant
    shell: RadialProfile  # w: the balancing annulus potential on B_{2R}
    v: RadialProfile  # compactly supported potential on B_{2R}
    C: float  # v1 <= v + C
    mass: float  # int_{B_R} f
    data_integral: float  # int F over B_{2R}

    def v0_star(self, t):
        t = np.asarray(t, dtype=float)
        W = self.geom.V
        out = np.zeros_like(t)
        m = t <= W * (1 + 1e-12)
        if np.any(m):
            out[m] = self.majorant.v0_star(np.minimum(t[m], W))
        return _ret(out)

    def v1_star(self, t):
        """v1 = v0 + mass N_{B_2R}(R) on B_R, mass N_{B_2R}(|x|) beyond."""
        t = np.asarray(t, dtype=float)
        W = self.geom.V
        out = np.zeros_like(t)
        m = t <= W
        NR = float(green_radial(self.outer, self.geom.R))
        if np.any(m):
            out[m] = self.majorant.v0_star(t[m]) + self.mass * NR
        far = (~m) & (t <= self.outer.V)
        if np.any(far):
            out[far] = self.mass * np.asarray(green_rearranged(self.outer, t[far]))
        return _ret(out)

    def v_star(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        m = t <= self.outer.V
        if np.any(m):
            r = self.outer.radius_of_volume(t[m])
            out[m] = self.v(np.minimum(r, self.outer.R))
        return _ret(out)


def majorant_potential(maj: Majorant, geom: BallGeometry | None = None) -> MajorantPotential:
    """Potential of F = h(|B_x|) on B_R, 0 up to 4R/3, a negative constant up to 5R/3, 0 after.

    F has zero mean, so v vanishes beyond 5R/3; v >= v1 - C with C the
    value of the annulus potential at the centre.
    """
    geom = maj.geom if geom is None else geom
    R = geom.R
    outer = geom.with_radius(2 * R)
    mass = maj.total_mass
    a1, a2 = 4 * R / 3, 5 * R / 3
    ann = outer.volume_of_radius(a2) - outer.volume_of_radius(a1)
    kappa = mass / ann
    w = solve_radial(outer, RadialProfile.piecewise_constant(outer, [0.0, a1, a2, 2 * R], [0.0, kappa, 0.0]))
    C = float(w.segments[0].form.b)
    NR = float(green_radial(outer, R))
    const = mass * NR - C
    vol = geom.volume_of_radius

    def inner(r):
        if r <= 0:
            return math.inf if mass > 0 else const
        return float(maj.v0_star(min(vol(r), geom.V))) + const

    inner_form = CallableForm(lambda t: float(maj.v0_star(min(t, geom.V))) + const,
                              Leading(1.0, 0.0, 1.0) if mass > 0 else Leading(const))
    segs = [RadialSegment(0.0, R, RadialCallable(inner, measure_form=inner_form,
                                                 leading=inner_form.leading()))]
    for s in w.segments:
        lo, hi = max(s.lo, R), s.hi
        if hi <= R:
            continue
        wf = s.form
        segs.append(RadialSegment(lo, hi, KernelQuadratic(mass - wf.a, -wf.b, -wf.c)))
    v = RadialProfile(outer, segs)
    data_integral = mass - kappa * ann
    return MajorantPotential(geom, outer, maj, w, v, C, mass, data_integral)


# --------------------------------------------------------------------------
# the full chain


@dataclass
class ChainReport:
    t: np.ndarray
    u: np.ndarray
    u0_plus: np.ndarray
    v0_plus: np.ndarray
    v1_plus: np.ndarray
    v_plus: np.ndarray
    domination_lhs: np.ndarray  # N*_W(t) int_0^t h on (0, W]
    domination_rhs: np.ndarray  # (u0)*(t)
    level: float
    C: float
    limsup: float
    potential: MajorantPotential
    violations: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v <= 0 for v in self.violations.values())


def _rel_violation(lo, hi, tol):
    """Largest (lo - hi) beyond tol relative; <= 0 means lo <= hi holds."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    scale = np.maximum(np.maximum(np.abs(lo), np.abs(hi)), 1e-300)
    return float(np.max((lo - hi) / scale - tol))


def domination_chain(u_star: MonotoneProfile, n: int, grid_points: int = 1000, tol: float = 1e-9,
                     density_points: int = 600, allow_limsup: bool = False) -> ChainReport:
    """Verify u* <= u0* + lam <= v0* + lam <= v1* + lam <= v* + C + lam (+ L N*).

    The domain has volume V = u_star.total_measure; the working ball B_R has
    |B_{2R}| = V, and the truncation level leaves |B_R|/2 of measure above it.
    With ``allow_limsup`` the extra term L N*_{|B_R|}(t) carries the small-t
    defect L of non-members.
    """
    V = u_star.total_measure
    W = V / 2.0**n
    geom = BallGeometry.from_volume(n, W)
    S = 0.5 * W
    level = level_for_measure(u_star, S)
    u0 = truncate_above(u_star, level)
    maj = majorant_density(u0, geom, points=density_points, allow_limsup=allow_limsup)
    pot = majorant_potential(maj, geom)
    L = maj.L

    ts = np.geomspace(1e-12 * V, V, grid_points)
    u = np.asarray(u_star(ts))
    u0v = np.asarray(u0(np.minimum(ts, V)))
    u0v = np.where(ts <= V, u0v, 0.0)
    in_ball = ts <= W
    extra = np.zeros_like(ts)
    if L > 0:
        extra[in_ball] = L * np.asarray(green_rearranged(geom, ts[in_ball]))
    v0 = np.asarray(pot.v0_star(ts))
    v1 = np.asarray(pot.v1_star(ts))
    vv = np.asarray(pot.v_star(ts))

    td = ts[in_ball]
    lhs = np.asarray(green_rearranged(geom, td)) * np.asarray(maj.integral_h(td))
    rhs = u0v[in_ball]

    viol = {
        "u<=u0+lam": _rel_violation(u, u0v + level, tol),
        "u0<=v0(+L N*)": _rel_violation(u0v, v0 + extra, tol),
        "v0<=v1": _rel_violation(v0, v1, tol),
        "v1<=v+C": _rel_violation(v1, vv + pot.C, tol),
        "domination": _rel_violation(rhs, lhs + extra[in_ball], tol),
    }
    return ChainReport(ts, u, u0v + level, v0 + level + extra, v1 + level + extra, vv + pot.C + level + extra,
                       lhs, rhs, level, pot.C, L, pot, viol)


def extended_domination(u_star: MonotoneProfile, n: int, **kw) -> ChainReport:
    """The chain for profiles with a nonzero defect limit L, carrying L N*."""
    return domination_chain(u_star, n, allow_limsup=True, **kw)


# --------------------------------------------------------------------------
# Fatou counterexample


@dataclass(frozen=True)
class FatouRow:
    m: float
    member: bool
    limit_defect: float
    norm: float


def fatou_table(geom: BallGeometry, heights=range(1, 21), threshold: float = DEFAULT_THRESHOLD):
    """Truncations min(N*_V, m) and the untruncated kernel: verdicts and norms.

    The norm is the Zygmund norm for n = 2 and the weak-type norm otherwise.
    """
    rows = []
    for m in heights:
        prof = truncated_kernel_profile(geom, float(m))
        verdict = target_defect(prof, geom, threshold=threshold)
        norm = lexp_norm(prof, geom.V) if geom.n == 2 else weak_norm(prof, geom.n, geom.V)
        rows.append(FatouRow(float(m), verdict.member, verdict.limit_defect, norm))
    full = MonotoneProfile([Segment(0.0, geom.V, KernelForm(geom, 1.0))], geom.V)
    verdict = target_defect(full, geom, threshold=threshold)
    return rows, verdict
