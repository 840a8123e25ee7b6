"""Monotone profiles on the measure axis (0, V].

A profile is a non-increasing function of the measure variable t, stored as
contiguous segments each carrying a tagged *form*. Forms know their own
values, integrals and small-t asymptotics, so that suprema and integrals
that are only attained in the limit t -> 0 are computed exactly instead of
being read off a grid.

Segments are half-open, [lo, hi); the last one also contains t = V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import integrate, optimize, special
from scipy.interpolate import PchipInterpolator

from .errors import DivergenceError, DomainError

QUAD_ABS_TOL = 1e-12
_EXP_TOL = 1e-12


def _as_array(t):
    return np.asarray(t, dtype=float)


def _ret(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def quad(func, a: float, b: float, power: float | None = None) -> float:
    """Adaptive quadrature of ``func`` over [a, b].

    When ``a == 0`` the integrand may be singular there; ``power`` is its
    leading exponent (integrand ~ t^power) and drives a substitution
    t = b w^m that makes the transformed integrand vanish at w = 0.
    """
    if b <= a:
        return 0.0
    if a == 0.0:
        m = 4.0 if power is None else max(1.0, 2.0 / (1.0 + power))

        def g(w):
            t = b * w**m
            if t <= 0.0:
                return 0.0
            return func(t) * m * b * w ** (m - 1)

        val, _ = integrate.quad(g, 0.0, 1.0, epsabs=QUAD_ABS_TOL * 1e-2, epsrel=1e-13, limit=500)
        return val
    if a > 0 and b / a > 1e3:
        # integrate in log t on long ranges
        def g(u):
            t = math.exp(u)
            return func(t) * t

        val, _ = integrate.quad(g, math.log(a), math.log(b), epsabs=QUAD_ABS_TOL * 1e-2, epsrel=1e-13, limit=500)
        return val
    val, _ = integrate.quad(func, a, b, epsabs=QUAD_ABS_TOL * 1e-2, epsrel=1e-13, limit=500)
    return val


@dataclass(frozen=True)
class Leading:
    """Small-t asymptotics coef * t^power * log(1/t)^logpow."""

    coef: float
    power: float = 0.0
    logpow: float = 0.0

    def times(self, other: "Leading") -> "Leading":
        return Leading(self.coef * other.coef, self.power + other.power, self.logpow + other.logpow)

    def pow(self, gamma: float) -> "Leading":
        return Leading(abs(self.coef) ** gamma, self.power * gamma, self.logpow * gamma)

    def averaged(self) -> "Leading":
        """Leading term of (1/t) int_0^t of this."""
        if self.coef != 0 and self.power <= -1:
            raise DivergenceError("non-integrable singularity at t = 0")
        return Leading(self.coef / (1.0 + self.power), self.power, self.logpow)

    @property
    def is_zero(self) -> bool:
        return self.coef == 0.0

    def limit(self) -> float:
        if self.coef == 0.0:
            return 0.0
        if abs(self.power) > 1e-14:
            return math.copysign(math.inf, self.coef) if self.power < 0 else 0.0
        if abs(self.logpow) > 1e-14:
            return math.copysign(math.inf, self.coef) if self.logpow > 0 else 0.0
        return self.coef

    def integrable(self, q: float = 1.0) -> bool:
        """Whether t -> (this)^q is integrable at 0."""
        if self.coef == 0.0:
            return True
        a, b = self.power * q, self.logpow * q
        if a > -1 + 1e-14:
            return True
        if abs(a + 1) <= 1e-14:
            return b < -1
        return False


ZERO = Leading(0.0)


# --------------------------------------------------------------------------
# forms


class Form:
    """Base class for a closed-form or sampled piece of a profile."""

    def value(self, t):
        raise NotImplementedError

    def leading(self) -> Leading | None:
        return None

    def integral(self, a: float, b):
        """int_a^b; ``b`` may be an array."""
        b = _as_array(b)
        lead = self.leading()
        power = lead.power if lead is not None else None
        if a == 0.0 and lead is not None and not lead.integrable():
            raise DivergenceError("non-integrable singularity at t = 0")
        out = np.array([quad(self.value, a, float(bb), power) for bb in b.ravel()]).reshape(b.shape)
        return _ret(out)

    def power_integral(self, a: float, b: float, q: float) -> float:
        """int_a^b |form|^q dt."""
        lead = self.leading()
        if a == 0.0 and lead is not None and not lead.integrable(q):
            raise DivergenceError(f"|u|^{q} is not integrable at t = 0")
        power = lead.power * q if lead is not None else None
        return quad(lambda t: abs(float(self.value(t))) ** q, a, b, power)

    def exp_integral(self, a: float, b: float, k: float) -> float:
        """int_a^b exp(k form) dt."""
        lead = self.leading()
        if a == 0.0 and lead is not None:
            if _exp_diverges(lead, k):
                return math.inf
        power = None
        if a == 0.0 and lead is not None and abs(lead.power) < 1e-14 and abs(lead.logpow - 1) < 1e-14:
            power = -k * lead.coef
        return quad(lambda t: math.exp(k * float(self.value(t))), a, b, power)

    def monotone_under(self, weight: "Weight") -> bool:
        """True when weight * form is monotone, so endpoints give the supremum."""
        return False


def _exp_diverges(lead: Leading, k: float) -> bool:
    if lead.coef <= 0:
        return False
    if lead.power < -1e-14:
        return True
    if abs(lead.power) > 1e-14:
        return False
    if lead.logpow > 1 + 1e-14:
        return True
    if abs(lead.logpow - 1) <= 1e-14:
        return k * lead.coef >= 1 - _EXP_TOL
    return False


@dataclass(frozen=True)
class Const(Form):
    c: float

    def value(self, t):
        return _ret(np.full_like(_as_array(t), self.c))

    def leading(self):
        return Leading(self.c)

    def integral(self, a, b):
        return _ret(self.c * (_as_array(b) - a))

    def power_integral(self, a, b, q):
        return abs(self.c) ** q * (b - a)

    def exp_integral(self, a, b, k):
        return math.exp(k * self.c) * (b - a)

    def monotone_under(self, weight):
        return True


@dataclass(frozen=True)
class PowerForm(Form):
    """a t^p + b."""

    a: float
    p: float
    b: float = 0.0

    def value(self, t):
        t = _as_array(t)
        with np.errstate(divide="ignore"):
            return _ret(self.a * t**self.p + self.b)

    def leading(self):
        if self.a != 0 and self.p < 0:
            return Leading(self.a, self.p)
        if self.b != 0:
            return Leading(self.b)
        return Leading(self.a, self.p)

    def _antideriv(self, t):
        t = _as_array(t)
        if abs(self.p + 1) < 1e-15:
            with np.errstate(divide="ignore"):
                return self.a * np.log(t) + self.b * t
        return self.a * t ** (self.p + 1) / (self.p + 1) + self.b * t

    def integral(self, a, b):
        if a == 0.0:
            if self.a != 0 and self.p <= -1:
                raise DivergenceError("non-integrable power at t = 0")
            return _ret(self._antideriv(b))
        return _ret(self._antideriv(b) - self._antideriv(a))

    def monotone_under(self, weight):
        if isinstance(weight, WeakWeight):
            return abs(weight.p + self.p) < 1e-14 or self.a == 0 or self.b == 0
        return self.a == 0


@dataclass(frozen=True)
class LogForm(Form):
    """a log(V0/t) + b."""

    a: float
    V0: float
    b: float = 0.0

    def value(self, t):
        with np.errstate(divide="ignore"):
            return _ret(self.a * np.log(self.V0 / _as_array(t)) + self.b)

    def leading(self):
        if self.a != 0:
            return Leading(self.a, 0.0, 1.0)
        return Leading(self.b)

    def _antideriv(self, t):
        t = _as_array(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.a * (t * np.log(self.V0 / t) + t) + self.b * t
        return np.where(t == 0, 0.0, out)

    def integral(self, a, b):
        return _ret(self._antideriv(b) - self._antideriv(a))

    def exp_integral(self, a, b, k):
        e = k * self.a
        scale = math.exp(k * self.b) * self.V0**e
        if abs(e - 1) < 1e-15:
            if a == 0.0:
                return math.inf
            return scale * math.log(b / a)
        if a == 0.0 and e > 1:
            return math.inf
        return scale * (b ** (1 - e) - a ** (1 - e)) / (1 - e)

    def monotone_under(self, weight):
        return isinstance(weight, LexpWeight) or self.a == 0


class KernelForm(Form):
    """a N*_V(t) + b + c r(t)^2 for the ball ``geom``, r(t) the radius of volume t.

    This is the image on the measure axis of a radial piece
    a N_{B_R}(r) + b + c r^2, the family closed under radial Poisson solves
    with piecewise-constant data.
    """

    def __init__(self, geom, a: float, b: float = 0.0, c: float = 0.0):
        self.geom = geom
        self.a = float(a)
        self.b = float(b)
        self.c = float(c)
        self._K = geom.kernel_constant
        self._V = geom.V
        self._r2 = (geom.n / geom.omega) ** (2.0 / geom.n)

    def __repr__(self):
        return f"KernelForm(n={self.geom.n}, R={self.geom.R!r}, a={self.a!r}, b={self.b!r}, c={self.c!r})"

    def kernel(self, t):
        t = _as_array(t)
        with np.errstate(divide="ignore"):
            if self.geom.n == 2:
                return self._K * np.log(self._V / t)
            p = self.geom.p
            return self._K * (t**-p - self._V**-p)

    def value(self, t):
        t = _as_array(t)
        out = self.b + self.c * self._r2 * t ** (2.0 / self.geom.n)
        if self.a != 0:
            out = out + self.a * self.kernel(t)
        return _ret(out)

    def leading(self):
        if self.a != 0:
            if self.geom.n == 2:
                return Leading(self.a * self._K, 0.0, 1.0)
            return Leading(self.a * self._K, -self.geom.p)
        return Leading(self.b)

    def _antideriv(self, t):
        t = _as_array(t)
        n = self.geom.n
        out = self.b * t + self.c * self._r2 * t ** (1 + 2.0 / n) / (1 + 2.0 / n)
        if self.a != 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                if n == 2:
                    k = self._K * (t * np.log(self._V / t) + t)
                else:
                    p = self.geom.p
                    k = self._K * (t ** (1 - p) / (1 - p) - self._V**-p * t)
            out = out + self.a * np.where(t == 0, 0.0, k)
        return out

    def integral(self, a, b):
        return _ret(self._antideriv(b) - self._antideriv(a))

    def exp_integral(self, a, b, k):
        if self.c == 0 and self.geom.n == 2:
            return LogForm(self.a * self._K, self._V, self.b).exp_integral(a, b, k)
        return super().exp_integral(a, b, k)

    def monotone_under(self, weight):
        if self.c != 0:
            return self.a == 0 and False
        if self.a == 0:
            return True
        if self.geom.n == 2:
            return isinstance(weight, LexpWeight)
        return isinstance(weight, WeakWeight) and abs(weight.p - self.geom.p) < 1e-14


class ScaledForm(Form):
    """scale * inner^gamma + shift."""

    def __init__(self, inner: Form, gamma: float = 1.0, scale: float = 1.0, shift: float = 0.0):
        self.inner = inner
        self.gamma = float(gamma)
        self.scale = float(scale)
        self.shift = float(shift)

    def __repr__(self):
        return f"ScaledForm({self.inner!r}, gamma={self.gamma}, scale={self.scale}, shift={self.shift})"

    def value(self, t):
        v = _as_array(self.inner.value(t))
        if self.gamma != 1.0:
            v = np.abs(v) ** self.gamma
        return _ret(self.scale * v + self.shift)

    def leading(self):
        lead = self.inner.leading()
        if lead is None:
            return None
        lim = lead.limit()
        if math.isinf(lim):
            out = lead.pow(self.gamma) if self.gamma != 1.0 else lead
            return Leading(self.scale * out.coef, out.power, out.logpow)
        return Leading(self.scale * abs(lim) ** self.gamma + self.shift if self.gamma != 1.0 else self.scale * lim + self.shift)

    def integral(self, a, b):
        if self.gamma == 1.0:
            b = _as_array(b)
            return _ret(self.scale * _as_array(self.inner.integral(a, b)) + self.shift * (b - a))
        return super().integral(a, b)


class AveragedForm(Form):
    """t -> (1/t) int_0^t src, the maximal function of a profile."""

    def __init__(self, src: "MonotoneProfile"):
        self.src = src

    def value(self, t):
        t = _as_array(t)
        return _ret(_as_array(self.src.integral_to(t)) / t)

    def leading(self):
        lead = self.src.leading()
        return None if lead is None else lead.averaged()


class TabulatedForm(Form):
    """Monotone (PCHIP) interpolation of sampled values; fallback only."""

    def __init__(self, ts, values, leading: Leading | None = None):
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        self._interp = PchipInterpolator(ts, values, extrapolate=True)
        self._anti = self._interp.antiderivative()
        self.ts = ts
        self._lead = leading

    def value(self, t):
        t = np.clip(_as_array(t), self.ts[0], self.ts[-1])
        return _ret(self._interp(t))

    def leading(self):
        return self._lead

    def integral(self, a, b):
        if a < self.ts[0]:
            return super().integral(a, b)
        b = np.clip(_as_array(b), self.ts[0], self.ts[-1])
        return _ret(self._anti(b) - self._anti(a))


class CallableForm(Form):
    """Black-box scalar function with optional declared asymptotics."""

    def __init__(self, func, leading: Leading | None = None):
        self.func = func
        self._lead = leading

    def value(self, t):
        t = _as_array(t)
        if t.ndim == 0:
            return float(self.func(float(t)))
        return np.array([self.func(float(x)) for x in t.ravel()]).reshape(t.shape)

    def leading(self):
        return self._lead


# --------------------------------------------------------------------------
# weights for the suprema defining the Zygmund and weak-type norms


class Weight:
    leading: Leading

    def __call__(self, t):
        raise NotImplementedError


class LexpWeight(Weight):
    """t -> 1/(1 + log(V/t))."""

    def __init__(self, V: float):
        self.V = V
        self.leading = Leading(1.0, 0.0, -1.0)

    def __call__(self, t):
        return 1.0 / (1.0 + np.log(self.V / _as_array(t)))

    def hyperbolic_critical(self, c, D):
        # d/dt [(c + D/t) w(t)] = 0  <=>  c t = D log(V/t)
        c = _as_array(c)
        D = _as_array(D)
        out = np.full(np.broadcast(c, D).shape, np.nan)
        ok = (c > 0) & (D > 0)
        if np.any(ok):
            x = special.lambertw(c[ok] * self.V / D[ok]).real
            out[ok] = self.V * np.exp(-x)
        return out


class WeakWeight(Weight):
    """t -> t^p."""

    def __init__(self, p: float):
        self.p = p
        self.leading = Leading(1.0, p, 0.0)

    def __call__(self, t):
        return _as_array(t) ** self.p

    def hyperbolic_critical(self, c, D):
        # d/dt [c t^p + D t^(p-1)] = 0  <=>  t = (1-p) D / (p c)
        c = _as_array(c)
        D = _as_array(D)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (1 - self.p) * D / (self.p * c)
        return np.where((c > 0) & (D > 0), out, np.nan)


def _refine_sup(func, lo: float, hi: float, samples: int = 24) -> float:
    """Max of a scalar function on (lo, hi] by log-grid scan plus Brent refinement."""
    lo_eff = lo if lo > 0 else hi * 1e-15
    ts = np.geomspace(lo_eff, hi, samples)
    vals = np.array([func(t) for t in ts])
    i = int(np.nanargmax(vals))
    best = vals[i]
    a = math.log(ts[max(i - 1, 0)])
    b = math.log(ts[min(i + 1, samples - 1)])
    if b > a:
        res = optimize.minimize_scalar(lambda u: -func(math.exp(u)), bounds=(a, b), method="bounded",
                                       options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return float(best)


# --------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    form: Form


class MonotoneProfile:
    """Non-increasing function on (0, V] built from tagged segments."""

    def __init__(self, segments: Sequence[Segment], total_measure: float, tail: str = "zero_beyond_V"):
        segments = list(segments)
        if not segments:
            raise DomainError("a profile needs at least one segment")
        if segments[0].lo != 0.0:
            raise DomainError("first segment must start at t = 0")
        for s0, s1 in zip(segments, segments[1:]):
            if s0.hi != s1.lo:
                raise DomainError("segments must be contiguous")
        for s in segments:
            if not s.hi > s.lo:
                raise DomainError("segments must have positive length")
        if abs(segments[-1].hi - total_measure) > 1e-12 * total_measure:
            raise DomainError("segments must end at the total measure")
        if tail not in ("zero_beyond_V", "analytic_extension"):
            raise DomainError(f"unknown tail behaviour {tail!r}")
        self.segments = segments
        self.total_measure = float(total_measure)
        self.tail = tail
        self._his = np.array([s.hi for s in segments])

    def __repr__(self):
        return f"{type(self).__name__}({len(self.segments)} segments, V={self.total_measure!r})"

    @property
    def is_step(self) -> bool:
        return all(isinstance(s.form, Const) for s in self.segments)

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([[0.0], self._his])

    def _locate(self, t: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._his, t, side="right")
        return np.minimum(idx, len(self.segments) - 1)

    def __call__(self, t):
        t = _as_array(t)
        if np.any(t < 0):
            raise DomainError("measure argument must be nonnegative")
        flat = t.ravel()
        out = np.zeros_like(flat)
        idx = self._locate(flat)
        for i in np.unique(idx):
            m = idx == i
            out[m] = self.segments[i].form.value(flat[m])
        beyond = flat > self.total_measure * (1 + 1e-14)
        if self.tail == "zero_beyond_V":
            out[beyond] = 0.0
        return _ret(out.reshape(t.shape))

    def leading(self) -> Leading | None:
        return self.segments[0].form.leading()

    def limit_at_zero(self) -> float:
        lead = self.leading()
        if lead is None:
            return float(self(self.segments[0].hi * 1e-300))
        return lead.limit()

    @cached_property
    def _cumulative(self) -> np.ndarray:
        cum = [0.0]
        for s in self.segments:
            cum.append(cum[-1] + float(s.form.integral(s.lo, s.hi)))
        return np.array(cum)

    def integral_to(self, t):
        """int_0^t u*(s) ds (vectorised in t, t <= V)."""
        t = np.minimum(_as_array(t), self.total_measure)
        flat = t.ravel()
        out = np.empty_like(flat)
        idx = self._locate(flat)
        for i in np.unique(idx):
            m = idx == i
            seg = self.segments[i]
            out[m] = self._cumulative[i] + _as_array(seg.form.integral(seg.lo, flat[m]))
        return _ret(out.reshape(t.shape))

    def total_integral(self) -> float:
        return float(self._cumulative[-1])

    def level_measure(self, s: float) -> float:
        """|{t : u*(t) > s}| read off the profile."""
        for seg in self.segments:
            hi_val = float(seg.form.value(seg.hi))
            if hi_val > s:
                continue
            if seg.lo == 0.0:
                lo_val = self.limit_at_zero()
            else:
                lo_val = float(seg.form.value(seg.lo))
            if lo_val <= s:
                return seg.lo
            a = seg.lo if seg.lo > 0 else seg.hi * 1e-300
            if float(seg.form.value(a)) <= s:
                # level is only crossed below the float range
                return 0.0
            f = lambda u: float(seg.form.value(math.exp(u))) - s
            root = optimize.brentq(f, math.log(a), math.log(seg.hi), xtol=1e-15, rtol=1e-15)
            return math.exp(root)
        return self.total_measure

    def weighted_sup(self, weight: Weight) -> float:
        """sup_{0 < t <= V} weight(t) u*(t), including the t -> 0 limit."""
        best = 0.0
        lead = self.leading()
        if lead is not None:
            lim = lead.times(weight.leading).limit()
            if math.isinf(lim):
                return lim
            best = max(best, lim)
        for seg in self.segments:
            form = seg.form
            func = lambda t, form=form: float(weight(t) * form.value(t))
            best = max(best, func(seg.hi))
            if seg.lo > 0:
                best = max(best, func(seg.lo))
            if not form.monotone_under(weight):
                best = max(best, _refine_sup(func, seg.lo, seg.hi))
        return best

    def scaled(self, k: float) -> "MonotoneProfile":
        return MonotoneProfile([Segment(s.lo, s.hi, ScaledForm(s.form, 1.0, k)) for s in self.segments],
                               self.total_measure, self.tail)

    def power(self, gamma: float) -> "MonotoneProfile":
        return MonotoneProfile([Segment(s.lo, s.hi, ScaledForm(s.form, gamma)) for s in self.segments],
                               self.total_measure, self.tail)

    def breakpoints(self) -> list[tuple[float, float]]:
        return [(s.lo, float(s.form.value(s.lo)) if s.lo > 0 else self.limit_at_zero()) for s in self.segments]


class StepProfile(MonotoneProfile):
    """Piecewise-constant profile stored as arrays (exact for sampled data)."""

    def __init__(self, edges, values, tail: str = "zero_beyond_V"):
        edges = np.asarray(edges, dtype=float)
        values = np.asarray(values, dtype=float)
        if edges.ndim != 1 or len(edges) != len(values) + 1 or len(values) == 0:
            raise DomainError("need len(edges) == len(values) + 1 >= 2")
        if edges[0] != 0.0 or np.any(np.diff(edges) <= 0):
            raise DomainError("edges must start at 0 and increase strictly")
        if np.any(np.diff(values) > 0):
            raise DomainError("step values must be non-increasing")
        self.step_edges = edges
        self.values = values
        self.total_measure = float(edges[-1])
        self.tail = tail
        self._his = edges[1:]

    @property
    def segments(self):
        e, v = self.step_edges, self.values
        return [Segment(float(e[i]), float(e[i + 1]), Const(float(v[i]))) for i in range(len(v))]

    @property
    def is_step(self):
        return True

    @property
    def edges(self):
        return self.step_edges

    def _locate(self, t):
        idx = np.searchsorted(self._his, t, side="right")
        return np.minimum(idx, len(self.values) - 1)

    def __call__(self, t):
        t = _as_array(t)
        if np.any(t < 0):
            raise DomainError("measure argument must be nonnegative")
        out = self.values[self._locate(t)]
        if self.tail == "zero_beyond_V":
            out = np.where(t > self.total_measure * (1 + 1e-14), 0.0, out)
        return _ret(out)

    def leading(self):
        return Leading(float(self.values[0]))

    def limit_at_zero(self):
        return float(self.values[0])

    @cached_property
    def _cumulative(self):
        return np.concatenate([[0.0], np.cumsum(self.values * np.diff(self.step_edges))])

    def integral_to(self, t):
        t = np.minimum(_as_array(t), self.total_measure)
        idx = self._locate(t)
        return _ret(self._cumulative[idx] + self.values[idx] * (t - self.step_edges[idx]))

    def level_measure(self, s):
        # values are non-increasing: count the steps strictly above s
        j = int(np.searchsorted(-self.values, -s, side="left"))
        return float(self.step_edges[j])

    def weighted_sup(self, weight):
        # both weights increase in t, so each step peaks at its right end
        return float(np.max(self.values * weight(self._his)))

    def scaled(self, k):
        if k < 0:
            raise DomainError("scale must be nonnegative")
        return StepProfile(self.step_edges, self.values * k, self.tail)

    def power(self, gamma):
        return StepProfile(self.step_edges, np.abs(self.values) ** gamma, self.tail)

    def breakpoints(self):
        return list(zip(self.step_edges[:-1].tolist(), self.values.tolist()))


class HyperbolicStepProfile(MonotoneProfile):
    """Maximal function of a step profile: c_i + D_i / t on each step."""

    def __init__(self, src: StepProfile):
        self.src = src
        self.step_edges = src.step_edges
        self.c = src.values
        self.D = src._cumulative[:-1] - src.values * src.step_edges[:-1]
        self.total_measure = src.total_measure
        self.tail = src.tail
        self._his = src.step_edges[1:]

    @property
    def segments(self):
        out = []
        for i in range(len(self.c)):
            out.append(Segment(float(self.step_edges[i]), float(self.step_edges[i + 1]),
                               _HyperbolicForm(float(self.c[i]), float(self.D[i]))))
        return out

    @property
    def is_step(self):
        return False

    def _locate(self, t):
        idx = np.searchsorted(self._his, t, side="right")
        return np.minimum(idx, len(self.c) - 1)

    def __call__(self, t):
        t = _as_array(t)
        idx = self._locate(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.c[idx] + np.where(self.D[idx] == 0, 0.0, self.D[idx] / t)
        if self.tail == "zero_beyond_V":
            out = np.where(t > self.total_measure * (1 + 1e-14), 0.0, out)
        return _ret(out)

    def leading(self):
        return Leading(float(self.c[0]))

    def limit_at_zero(self):
        return float(self.c[0])

    def integral_to(self, t):
        t = _as_array(t)
        idx = self._locate(t)
        lo = self.step_edges[idx]
        base = np.array([self._seg_integrals[i] for i in idx.ravel()]).reshape(idx.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(self.D[idx] == 0, 0.0, self.D[idx] * np.log(np.where(lo > 0, t / np.where(lo > 0, lo, 1), 1)))
        return _ret(base + self.c[idx] * (t - lo) + logs)

    @cached_property
    def _seg_integrals(self):
        e = self.step_edges
        inc = self.c * np.diff(e)
        with np.errstate(divide="ignore", invalid="ignore"):
            inc = inc + np.where(self.D == 0, 0.0, self.D * np.log(e[1:] / np.where(e[:-1] > 0, e[:-1], 1)))
        return np.concatenate([[0.0], np.cumsum(inc)])

    def level_measure(self, s):
        vals_hi = self(self._his)
        above = vals_hi > s
        j = int(np.argmin(above)) if not np.all(above) else len(self.c)
        if j == len(self.c):
            return self.total_measure
        lo = self.step_edges[j]
        if j > 0 and self(lo) <= s:
            return float(lo)
        c, D = self.c[j], self.D[j]
        if D == 0:
            return float(lo) if c <= s else float(self.step_edges[j + 1])
        return float(min(max(D / (s - c), lo), self.step_edges[j + 1]))

    def weighted_sup(self, weight):
        vals = self(self._his) * weight(self._his)
        best = float(np.max(vals))
        lo = self.step_edges[:-1]
        lo_pos = lo > 0
        if np.any(lo_pos):
            best = max(best, float(np.max(self(lo[lo_pos]) * weight(lo[lo_pos]))))
        tc = weight.hyperbolic_critical(self.c, self.D)
        ok = np.isfinite(tc) & (tc > lo) & (tc < self._his)
        if np.any(ok):
            tcs = tc[ok]
            v = (self.c[ok] + self.D[ok] / tcs) * weight(tcs)
            best = max(best, float(np.max(v)))
        return best


@dataclass(frozen=True)
class _HyperbolicForm(Form):
    c: float
    D: float

    def value(self, t):
        return _ret(self.c + self.D / _as_array(t))
