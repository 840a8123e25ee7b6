"""Radial functions on a ball and the radial Dirichlet solver.

For data f on B_R the solution of -Delta v = f, v = 0 on the sphere, is

    v(rho) = int_rho^R r^{1-n} M(r) dr,   M(r) = int_0^r f(s) s^{n-1} ds,

equivalently omega N(rho) M(rho) + omega int_rho^R N f r^{n-1} dr. For
piecewise-constant f each piece of v is a N(r) + b + c r^2 in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DivergenceError, DomainError
from .geometry import BallGeometry
from .green import green_radial
from .profiles import (
    CallableForm,
    Const,
    KernelForm,
    Leading,
    MonotoneProfile,
    Segment,
)

_CONT_TOL = 1e-11
QUAD_TOL = 1e-11


def integrate_green_shell(geom: BallGeometry, a: float, b: float) -> float:
    """int_{a <= |y| <= b} N_{B_R}(|y|) dy in closed form."""
    if not 0 <= a <= b <= geom.R * (1 + 1e-12):
        raise DomainError("need 0 <= a <= b <= R")
    b = min(b, geom.R)
    return _shell_antideriv(geom, b) - _shell_antideriv(geom, a)


def _shell_antideriv(geom: BallGeometry, r: float) -> float:
    if r == 0:
        return 0.0
    if geom.n == 2:
        return 0.5 * r * r * math.log(geom.R / r) + 0.25 * r * r
    n = geom.n
    return geom.omega * geom.c_n * (0.5 * r * r - geom.R ** (2 - n) * r**n / n)


# --------------------------------------------------------------------------
# radial forms


@dataclass(frozen=True)
class KernelQuadratic:
    """a N_{B_R}(r) + b + c r^2; constants are (0, b, 0)."""

    a: float
    b: float
    c: float = 0.0

    def value(self, geom, r):
        r = np.asarray(r, dtype=float)
        out = self.b + self.c * r * r
        if self.a != 0:
            with np.errstate(divide="ignore"):
                out = out + self.a * np.asarray(green_radial(geom, r))
        return out

    def derivative(self, geom, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return -self.a * r ** (1 - geom.n) / geom.omega + 2 * self.c * r

    def second_derivative(self, geom, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.a * (geom.n - 1) * r ** (-geom.n) / geom.omega + 2 * self.c

    def limit_at_zero(self) -> float:
        if self.a != 0:
            return math.copysign(math.inf, self.a)
        return self.b

    def mass(self, geom, lo, hi) -> float:
        """omega int_lo^hi form r^{n-1} dr."""
        n = geom.n
        out = self.b * (geom.volume_of_radius(hi) - geom.volume_of_radius(lo))
        out += self.c * geom.omega * (hi ** (n + 2) - lo ** (n + 2)) / (n + 2)
        if self.a != 0:
            out += self.a * integrate_green_shell(geom, lo, hi)
        return float(out)

    def critical_radius(self, geom) -> float | None:
        """Radius where the derivative vanishes, if any."""
        if self.a == 0 or self.c == 0:
            return None
        x = self.a / (2 * self.c * geom.omega)
        return x ** (1.0 / geom.n) if x > 0 else None

    def measure_form(self, geom, sign=1.0):
        return KernelForm(geom, sign * self.a, sign * self.b, sign * self.c)

    def negated(self):
        return KernelQuadratic(-self.a, -self.b, -self.c)


class RadialCallable:
    """General radial piece evaluated by a function of r.

    ``measure_form`` may supply the exact image on the measure axis,
    ``monotone`` declares the piece non-increasing or non-decreasing.
    """

    def __init__(self, func: Callable, measure_form=None, leading: Leading | None = None):
        self.func = func
        self._measure_form = measure_form
        self._leading = leading

    def value(self, geom, r):
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return np.asarray(float(self.func(float(r))))
        return np.array([float(self.func(float(x))) for x in r.ravel()]).reshape(r.shape)

    def limit_at_zero(self) -> float:
        if self._leading is not None:
            return self._leading.limit()
        return float(self.func(0.0))

    def mass(self, geom, lo, hi) -> float:
        g = lambda r: float(self.func(r)) * geom.omega * r ** (geom.n - 1)
        val, _ = integrate.quad(g, lo, hi, epsabs=QUAD_TOL, epsrel=1e-12, limit=400)
        return val

    def critical_radius(self, geom):
        return None

    def measure_form(self, geom, sign=1.0):
        if self._measure_form is not None and sign == 1.0:
            return self._measure_form
        f = self.func
        return CallableForm(lambda t: sign * float(f(geom.radius_of_volume(t))), self._leading)

    def negated(self):
        f = self.func
        return RadialCallable(lambda r: -f(r))


@dataclass(frozen=True)
class RadialSegment:
    lo: float
    hi: float
    form: object


class RadialProfile:
    """Radial function on B_R as tagged segments partitioning [0, R]."""

    def __init__(self, geom: BallGeometry, segments: Sequence[RadialSegment]):
        segments = list(segments)
        if not segments or segments[0].lo != 0.0:
            raise DomainError("segments must start at r = 0")
        for s0, s1 in zip(segments, segments[1:]):
            if s0.hi != s1.lo:
                raise DomainError("segments must be contiguous")
        if abs(segments[-1].hi - geom.R) > 1e-12 * geom.R:
            raise DomainError("segments must end at R")
        self.geom = geom
        self.segments = segments
        self._his = np.array([s.hi for s in segments])

    def __repr__(self):
        return f"RadialProfile(n={self.geom.n}, R={self.geom.R!r}, {len(self.segments)} segments)"

    # construction ------------------------------------------------------

    @classmethod
    def piecewise_constant(cls, geom: BallGeometry, radii, values) -> "RadialProfile":
        """Shells [r_k, r_{k+1}) with constant values; radii = (0, r_1, ..., R)."""
        radii = [float(r) for r in radii]
        if len(radii) != len(values) + 1 or radii[0] != 0.0 or abs(radii[-1] - geom.R) > 1e-12 * geom.R:
            raise DomainError("need radii 0 = r_0 < ... < r_m = R and m values")
        radii[-1] = geom.R
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError("radii must increase strictly")
        segs = [RadialSegment(a, b, KernelQuadratic(0.0, float(v))) for a, b, v in zip(radii, radii[1:], values)]
        return cls(geom, segs)

    @classmethod
    def constant(cls, geom, c: float) -> "RadialProfile":
        return cls.piecewise_constant(geom, [0.0, geom.R], [c])

    @classmethod
    def zero(cls, geom) -> "RadialProfile":
        return cls.constant(geom, 0.0)

    @classmethod
    def from_measure_profile(cls, u_star: MonotoneProfile, geom: BallGeometry) -> "RadialProfile":
        r_of = geom.radius_of_volume
        segs = []
        src = u_star.segments
        for i, s in enumerate(src):
            lo = 0.0 if s.lo == 0 else float(r_of(s.lo))
            hi = geom.R if i == len(src) - 1 else float(r_of(s.hi))
            form = s.form
            if isinstance(form, Const):
                rf = KernelQuadratic(0.0, form.c)
            elif isinstance(form, KernelForm) and form.geom == geom:
                rf = KernelQuadratic(form.a, form.b, form.c)
            else:
                rf = RadialCallable(lambda r, form=form: float(form.value(geom.volume_of_radius(r))),
                                    measure_form=form, leading=form.leading())
            segs.append(RadialSegment(lo, hi, rf))
        return cls(geom, segs)

    # evaluation --------------------------------------------------------

    def _locate(self, r):
        idx = np.searchsorted(self._his, r, side="right")
        return np.minimum(idx, len(self.segments) - 1)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.geom.R * (1 + 1e-12)):
            raise DomainError("radius outside [0, R]")
        flat = r.ravel()
        out = np.empty_like(flat)
        idx = self._locate(flat)
        for i in np.unique(idx):
            m = idx == i
            out[m] = self.segments[i].form.value(self.geom, flat[m])
        out = out.reshape(r.shape)
        return float(out) if out.ndim == 0 else out

    @property
    def is_piecewise_constant(self) -> bool:
        return all(isinstance(s.form, KernelQuadratic) and s.form.a == 0 and s.form.c == 0
                   for s in self.segments)

    @property
    def is_closed_form(self) -> bool:
        return all(isinstance(s.form, KernelQuadratic) for s in self.segments)

    def limit_at_zero(self) -> float:
        return self.segments[0].form.limit_at_zero()

    def laplacian(self, r):
        """v'' + (n-1) v'/r on closed-form segments."""
        r = np.asarray(r, dtype=float)
        n = self.geom.n
        out = np.empty_like(r.ravel())
        flat = r.ravel()
        idx = self._locate(flat)
        for i in np.unique(idx):
            m = idx == i
            form = self.segments[i].form
            if not isinstance(form, KernelQuadratic):
                raise DomainError("laplacian is available on closed-form segments only")
            x = flat[m]
            out[m] = form.second_derivative(self.geom, x) + (n - 1) * form.derivative(self.geom, x) / x
        return out.reshape(r.shape)

    # integrals ---------------------------------------------------------

    def mass(self) -> float:
        """int_{B_R} f."""
        return sum(s.form.mass(self.geom, s.lo, s.hi) for s in self.segments)

    def _pieces(self):
        """Monotone pieces (lo, hi, form) obtained by splitting at critical radii."""
        out = []
        for s in self.segments:
            rc = s.form.critical_radius(self.geom)
            if rc is not None and s.lo < rc < s.hi:
                out.append((s.lo, rc, s.form))
                out.append((rc, s.hi, s.form))
            else:
                out.append((s.lo, s.hi, s.form))
        return out

    def _sign_pieces(self):
        """Pieces (lo, hi, form, sign) on which the function keeps one sign."""
        geom = self.geom
        out = []
        for lo, hi, form in self._pieces():
            f = lambda r, form=form: float(form.value(geom, r))
            vlo = form.limit_at_zero() if lo == 0 else f(lo)
            vhi = f(hi)
            if vlo * vhi < 0:
                a = lo if lo > 0 else hi * 1e-300
                if f(a) * vhi < 0:
                    root = optimize.brentq(f, a, hi, xtol=1e-300, rtol=1e-15)
                    out.append((lo, root, form, math.copysign(1.0, vlo)))
                    out.append((root, hi, form, math.copysign(1.0, vhi)))
                    continue
            sgn = vhi if vhi != 0 else vlo
            if sgn == 0 and lo > 0:
                sgn = f(0.5 * (lo + hi))
            out.append((lo, hi, form, 0.0 if sgn == 0 else math.copysign(1.0, sgn)))
        return out

    def signed_mass_split(self) -> tuple[float, float]:
        """(int f^+, int f^-)."""
        plus = minus = 0.0
        for lo, hi, form, sgn in self._sign_pieces():
            m = form.mass(self.geom, lo, hi)
            if sgn > 0:
                plus += max(m, 0.0)
            elif sgn < 0:
                minus += max(-m, 0.0)
        return plus, minus

    def l1_norm(self) -> float:
        plus, minus = self.signed_mass_split()
        return plus + minus

    # level sets --------------------------------------------------------

    def distribution(self, s):
        """|{x in B_R : |v(x)| > s}| for an array of levels."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s < 0):
            raise DomainError("level must be nonnegative")
        if self.is_closed_form:
            return self._distribution_closed(s)
        geom = self.geom
        vol = geom.volume_of_radius
        total = np.zeros_like(s)
        for lo, hi, form in self._pieces():
            v = lambda r, form=form: form.value(geom, r)
            vlo = form.limit_at_zero() if lo == 0 else float(v(lo))
            vhi = float(v(hi))
            decreasing = vlo >= vhi
            for sign in (1.0, -1.0):
                a, b = sign * vlo, sign * vhi
                if max(a, b) <= 0 and not np.any(s < max(a, b)):
                    continue
                r_star = _level_radius(lambda r: sign * v(r), lo, hi, s, a, b)
                if decreasing == (sign > 0):
                    # sign*v decreasing: {sign*v > s} = [lo, r*)
                    total += vol(r_star) - vol(lo)
                else:
                    total += vol(hi) - vol(r_star)
        return total

    def _distribution_closed(self, s: np.ndarray, iters: int = 64) -> np.ndarray:
        """Level measures for closed-form pieces, all pieces and levels bisected at once."""
        geom = self.geom
        n, R, omega = geom.n, geom.R, geom.omega
        pieces = self._pieces()
        lo = np.array([p[0] for p in pieces])
        hi = np.array([p[1] for p in pieces])
        a = np.array([p[2].a for p in pieces])
        b = np.array([p[2].b for p in pieces])
        c = np.array([p[2].c for p in pieces])
        if n == 2:
            kern = lambda r: np.log(R / r) / (2 * np.pi)
        else:
            cn = geom.c_n
            kern = lambda r: cn * (r ** (2.0 - n) - R ** (2.0 - n))

        def value(r, a, b, c):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                out = b + c * r * r + np.where(a != 0, a * kern(r), 0.0)
            return out

        v_hi = value(hi, a, b, c)
        v_lo = np.where(lo > 0, value(np.where(lo > 0, lo, 1.0), a, b, c),
                        np.where(a != 0, np.copysign(np.inf, a), b))
        # stack both signs: rows are (piece, sign)
        sg = np.concatenate([np.ones_like(lo), -np.ones_like(lo)])
        lo2, hi2 = np.tile(lo, 2), np.tile(hi, 2)
        a2, b2, c2 = sg * np.tile(a, 2), sg * np.tile(b, 2), sg * np.tile(c, 2)
        A, B = sg * np.tile(v_lo, 2), sg * np.tile(v_hi, 2)
        dec = (A >= B)[:, None]
        S = s[None, :]
        Amax = np.maximum(A, B)[:, None]
        Amin = np.minimum(A, B)[:, None]
        # bisection in log r between lo (or hi e^-700 at the origin) and hi
        la = np.where(lo2 > 0, np.log(np.where(lo2 > 0, lo2, 1.0)), np.log(hi2) - 700.0)[:, None] + 0 * S
        lb = np.log(hi2)[:, None] + 0 * S
        aa, bb, cc = a2[:, None], b2[:, None], c2[:, None]
        for _ in range(iters):
            m = 0.5 * (la + lb)
            above = value(np.exp(m), aa, bb, cc) > S
            right = above == dec
            la = np.where(right, m, la)
            lb = np.where(right, lb, m)
        root = np.exp(0.5 * (la + lb))
        lo_c, hi_c = lo2[:, None] + 0 * S, hi2[:, None] + 0 * S
        # decreasing: {> s} = [lo, r*); increasing: (r*, hi]
        r_dec = np.where(S >= Amax, lo_c, np.where(S < Amin, hi_c, root))
        r_inc = np.where(S >= Amax, hi_c, np.where(S < Amin, lo_c, root))
        vol = lambda r: omega * r**n / n
        meas = np.where(dec, vol(r_dec) - vol(lo_c), vol(hi_c) - vol(r_inc))
        return np.sum(meas, axis=0)

    def rearrangement(self) -> MonotoneProfile:
        """Decreasing rearrangement of |v| on (0, |B_R|]."""
        geom = self.geom
        vol = geom.volume_of_radius
        vals_lo = [s.form.limit_at_zero() if s.lo == 0 else float(s.form.value(geom, s.lo)) for s in self.segments]
        vals_hi = [float(s.form.value(geom, s.hi)) for s in self.segments]
        seq = []
        for lo_v, hi_v in zip(vals_lo, vals_hi):
            seq.extend([lo_v, hi_v])
        monotone_pieces = all(s.form.critical_radius(geom) is None or not (s.lo < s.form.critical_radius(geom) < s.hi)
                              for s in self.segments)
        seq = np.array(seq)
        scale = np.max(np.abs(seq[np.isfinite(seq)])) if np.any(np.isfinite(seq)) else 1.0
        slack = 1e-12 * max(scale, 1e-300)
        if monotone_pieces and np.all(seq[1:] <= seq[:-1] + slack) and seq[-1] >= -slack:
            sign = 1.0
        elif monotone_pieces and np.all(seq[1:] >= seq[:-1] - slack) and seq[-1] <= slack:
            sign = -1.0
        else:
            return self._rearrangement_by_levels()
        segs = []
        for s in self.segments:
            segs.append(Segment(0.0 if s.lo == 0 else vol(s.lo), geom.V if s is self.segments[-1] else vol(s.hi),
                                s.form.measure_form(geom, sign)))
        return MonotoneProfile(segs, geom.V)

    def _rearrangement_by_levels(self) -> MonotoneProfile:
        lead = None
        first = self.segments[0].form
        if isinstance(first, KernelQuadratic) and first.a != 0:
            lead = KernelForm(self.geom, abs(first.a)).leading()
        top = abs(self.limit_at_zero())
        sup = max(top, max(abs(float(s.form.value(self.geom, s.hi))) for s in self.segments))
        # |v| is monotone on each piece, so its sup sits at a piece end (critical radii included)
        for lo, hi, form in self._pieces():
            for r in (lo, hi):
                if r > 0:
                    sup = max(sup, abs(float(form.value(self.geom, r))))

        def inverse(t):
            # u*(t) = inf{s : mu(s) <= t}, by bisection on the level
            lo_s, hi_s = 0.0, sup if math.isfinite(sup) else 1.0
            while math.isinf(sup) and self.distribution(hi_s)[0] > t:
                hi_s *= 2.0
            for _ in range(200):
                mid = 0.5 * (lo_s + hi_s)
                if self.distribution(mid)[0] > t:
                    lo_s = mid
                else:
                    hi_s = mid
                if hi_s - lo_s <= 1e-15 * hi_s:
                    break
            return hi_s

        return MonotoneProfile([Segment(0.0, self.geom.V, CallableForm(inverse, lead))], self.geom.V)

    def measure_radius_grid(self, ts):
        return self.geom.radius_of_volume(np.asarray(ts, dtype=float))


def _level_radius(v, lo, hi, s, vlo, vhi, iters: int = 200):
    """Radius r* in [lo, hi] where a monotone v crosses each level in ``s``.

    Returns lo where the whole piece is on the far side and hi where it is
    entirely above, so the caller can use r* as an interval endpoint.
    """
    s = np.asarray(s, dtype=float)
    dec = vlo >= vhi
    r = np.empty_like(s)
    if dec:
        r[s >= vlo] = lo
        r[s < vhi] = hi
    else:
        r[s >= vhi] = hi
        r[s < vlo] = lo
    mid_mask = (s < max(vlo, vhi)) & (s >= min(vlo, vhi))
    if not np.any(mid_mask):
        return r
    ss = s[mid_mask]
    use_log = lo == 0.0
    if use_log:
        a = np.full_like(ss, math.log(hi) - 700.0)
        b = np.full_like(ss, math.log(hi))
    else:
        a = np.full_like(ss, lo)
        b = np.full_like(ss, hi)
    for _ in range(iters):
        m = 0.5 * (a + b)
        rm = np.exp(m) if use_log else m
        above = np.asarray(v(rm)) > ss
        # v decreasing: above -> root lies to the right
        go_right = above if dec else ~above
        a = np.where(go_right, m, a)
        b = np.where(go_right, b, m)
        if np.all(b - a <= (1e-16 if use_log else 1e-16 * hi)):
            break
    rm = 0.5 * (a + b)
    r[mid_mask] = np.exp(rm) if use_log else rm
    return r


# --------------------------------------------------------------------------
# solver


def solve_radial(geom: BallGeometry, f: RadialProfile) -> RadialProfile:
    """v solving -Delta v = f on B_R with v = 0 on the sphere."""
    if f.geom != geom:
        raise DomainError("data and ball geometry differ")
    if f.is_piecewise_constant:
        return _solve_piecewise_constant(geom, f)
    return _solve_general(geom, f)


def _solve_piecewise_constant(geom: BallGeometry, f: RadialProfile) -> RadialProfile:
    n, omega = geom.n, geom.omega
    radii = [s.lo for s in f.segments] + [geom.R]
    cs = [s.form.b for s in f.segments]
    # M_k = int_0^{r_k} f s^{n-1} ds
    M = [0.0]
    absM = 0.0
    for k, c in enumerate(cs):
        dm = c * (radii[k + 1] ** n - radii[k] ** n) / n
        absM += abs(dm)
        m = M[-1] + dm
        # balanced data: snap the cancelled mass to an exact zero
        M.append(0.0 if abs(m) <= 64 * np.finfo(float).eps * absM else m)
    forms = [None] * len(cs)
    v_right = 0.0
    for k in range(len(cs) - 1, -1, -1):
        ck, r0, r1 = cs[k], radii[k], radii[k + 1]
        a = omega * (M[k] - ck * r0**n / n)
        c = -ck / (2 * n)
        Nr1 = float(green_radial(geom, r1)) if a != 0 else 0.0
        b = v_right - a * Nr1 - c * r1 * r1
        forms[k] = KernelQuadratic(a, b, c)
        v_right = float(forms[k].value(geom, r0)) if r0 > 0 else 0.0
    v = RadialProfile(geom, [RadialSegment(s.lo, s.hi, fm) for s, fm in zip(f.segments, forms)])
    _check_continuity(v)
    return v


def _check_continuity(v: RadialProfile):
    geom = v.geom
    pairs = [(float(s0.form.value(geom, s0.hi)), float(s1.form.value(geom, s1.lo)))
             for s0, s1 in zip(v.segments, v.segments[1:])]
    # relative to the size of the terms, so cancellation near zero does not trip it
    scale = 1e-300
    for s in v.segments:
        fm = s.form
        if isinstance(fm, KernelQuadratic):
            nr = float(green_radial(geom, s.hi)) if fm.a != 0 else 0.0
            scale = max(scale, abs(fm.a * nr) + abs(fm.b) + abs(fm.c) * s.hi**2)
    scale = max([scale] + [abs(x) for p in pairs for x in p])
    for s0, (left, right) in zip(v.segments, pairs):
        if abs(left - right) > _CONT_TOL * scale:
            raise ArithmeticError(f"solution discontinuous at r={s0.hi!r}: {left!r} vs {right!r}")


def _solve_general(geom: BallGeometry, f: RadialProfile) -> RadialProfile:
    """Adaptive-quadrature fallback on a radial grid refined toward 0."""
    n, omega, R = geom.n, geom.omega, geom.R
    N = lambda r: float(green_radial(geom, r))
    fr = lambda r: float(f(r))
    # grid: segment boundaries plus geometric refinement toward the origin
    nodes = set(s.lo for s in f.segments) | {R}
    nodes |= set(np.geomspace(R * 1e-8, R, 41).tolist())
    nodes = np.array(sorted(x for x in nodes if x > 0))
    inner = nodes[0]

    def quad(g, a, b):
        val, _ = integrate.quad(g, a, b, epsabs=QUAD_TOL, epsrel=1e-12, limit=400)
        return val

    # check integrability near 0 via the first segment
    m0 = quad(lambda r: abs(fr(r)) * r ** (n - 1), 0.0, inner)
    if not math.isfinite(m0):
        raise DivergenceError("data is not integrable at the origin")
    # M at nodes
    Mn = [quad(lambda r: fr(r) * r ** (n - 1), 0.0, inner)]
    for a, b in zip(nodes, nodes[1:]):
        Mn.append(Mn[-1] + quad(lambda r: fr(r) * r ** (n - 1), a, b))
    Mn = np.array(Mn)
    if abs(Mn[-1]) > 0 and not math.isfinite(Mn[-1]):
        raise DivergenceError("data is not integrable")
    # v at nodes, outer to inner, using the swapped form of int r^{1-n} M
    vn = np.zeros_like(nodes)
    for i in range(len(nodes) - 2, -1, -1):
        a, b = nodes[i], nodes[i + 1]
        Nb = N(b)
        q = quad(lambda x: fr(x) * x ** (n - 1) * omega * (N(x) - Nb), a, b)
        vn[i] = vn[i + 1] + Mn[i] * omega * (N(a) - Nb) + q

    def v_at(rho: float) -> float:
        if rho >= R:
            return 0.0
        if rho <= 0:
            return math.inf if Mn[0] != 0 or fr(inner * 0.5) != 0 else vn[0]
        j = int(np.searchsorted(nodes, rho, side="right"))
        if j == 0:
            b, vb = inner, vn[0]
            M_rho = quad(lambda r: fr(r) * r ** (n - 1), 0.0, rho)
        else:
            b, vb = nodes[j] if j < len(nodes) else R, vn[j] if j < len(nodes) else 0.0
            M_rho = Mn[j - 1] + quad(lambda r: fr(r) * r ** (n - 1), nodes[j - 1], rho)
        Nb = N(b)
        q = quad(lambda x: fr(x) * x ** (n - 1) * omega * (N(x) - Nb), rho, b)
        return vb + M_rho * omega * (N(rho) - Nb) + q

    return RadialProfile(geom, [RadialSegment(0.0, R, RadialCallable(v_at))])
