"""Suites behind the command-line subcommands.

Each suite takes a RunConfig and returns a SweepReport whose rows are
already sorted. Work is split into independent tasks that only depend on
their arguments, so they can run in a process pool and be gathered in a
fixed order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import RunConfig
from .errors import DomainError
from .extremals import (
    GridSpec,
    SharpnessRow,
    balanced_data,
    balanced_potential,
    bump_data,
    bump_potential,
    field_rearrangement,
    sharpness_ratio,
    translated_pair,
)
from .geometry import BallGeometry
from .green import green_profile, green_rearranged
from .norms import exp_integral, lq_norm, mazya_constant, mazya_constant_compact
from .profiles import StepProfile
from .radial import RadialProfile, solve_radial
from .report import SweepReport
from .target import domination_chain, extended_domination, fatou_table, kernel_power_profile, target_defect
from .target import truncated_kernel_profile

SHARPNESS_COLUMNS = ["family", "n", "t", "delta", "epsilon", "lambda", "R", "l1", "ratio", "target", "gap", "res_tol"]


def run_tasks(func, tasks, jobs: int = 1):
    """map func over tasks, in order; a process pool when jobs > 1."""
    if jobs <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, tasks))


# --------------------------------------------------------------------------
# inequality suites


def random_radial_data(geom: BallGeometry, rng: np.random.Generator, max_shells: int,
                       balanced: bool = False) -> RadialProfile:
    """Piecewise-constant data with 1..max_shells shells and values in [-1, 1].

    The balanced variant keeps the outermost shell at zero and shifts the
    inner values to zero mean, so the potential is compactly supported.
    """
    R = geom.R
    if balanced:
        m = int(rng.integers(3, max(max_shells, 3) + 1))
    else:
        m = int(rng.integers(1, max_shells + 1))
    inner = np.sort(rng.uniform(0.0, R, size=m - 1))
    # distinct radii; a repeated draw is vanishingly rare but cheap to guard
    inner = np.unique(inner[(inner > 0) & (inner < R)])
    radii = np.concatenate([[0.0], inner, [R]])
    m = len(radii) - 1
    values = rng.uniform(-1.0, 1.0, size=m)
    if balanced:
        if m < 3:
            radii = np.array([0.0, R / 3, 2 * R / 3, R])
            values = rng.uniform(-1.0, 1.0, size=3)
        vols = np.diff(geom.volume_of_radius(radii))
        values[-1] = 0.0
        mass = float(np.dot(values[:-1], vols[:-1]))
        values[:-1] -= mass / float(np.sum(vols[:-1]))
    return RadialProfile.piecewise_constant(geom, radii, values)


def _inequality_task(args):
    n, suite, seed, cfg = args
    geom = BallGeometry(n, 1.0)
    V = geom.V
    ts = np.geomspace(cfg.t_min_rel * V, V, cfg.t_points)
    kernel = np.asarray(green_rearranged(geom, ts)) * cfg.kernel_scale
    factors = [("general", 1.0)] if suite == "general" else [("two_to_minus_2_over_n", 2.0 ** (-2.0 / n)),
                                                              ("half_radial", 0.5)]
    rows = []
    for i in range(cfg.n_random):
        rng = np.random.default_rng([seed, n, i, 0 if suite == "general" else 1])
        f = random_radial_data(geom, rng, cfg.max_shells, balanced=(suite != "general"))
        v = solve_radial(geom, f)
        l1 = f.l1_norm()
        bounds = np.concatenate([fac * kernel * l1 for _, fac in factors])
        # u*(t) <= B(t)  <=>  |{|v| > B(t)}| <= t; the tolerance is applied to the level
        mu = v.distribution(bounds * (1.0 + cfg.tol))
        for j, (name, fac) in enumerate(factors):
            m = mu[j * len(ts):(j + 1) * len(ts)]
            excess = float(np.max(m / ts - 1.0))
            rows.append({
                "suite": suite, "check": name, "n": n, "sample": i, "shells": len(f.segments), "l1": l1,
                "factor": fac, "max_measure_excess": excess, "ok": excess <= 1e-12,
            })
    return rows


def check_inequalities(cfg: RunConfig) -> SweepReport:
    t0 = time.perf_counter()
    rep = SweepReport("check-inequalities",
                      ["suite", "check", "n", "sample", "shells", "l1", "factor", "max_measure_excess", "ok"],
                      config_hash=cfg.digest())
    tasks = [(n, suite, cfg.seed, cfg) for suite in ("general", "balanced") for n in cfg.dims]
    for rows in run_tasks(_inequality_task, tasks, cfg.jobs):
        rep.rows.extend(rows)
    rep.sort(key=lambda r: (r["suite"] != "general", r["check"], r["n"], r["sample"]))
    for r in rep.rows:
        if not r["ok"]:
            rep.fail(f"{r['suite']}/{r['check']} n={r['n']} sample={r['sample']}: level measure exceeds t "
                     f"by {r['max_measure_excess']:.3e}")
    rep.wall_time = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# sharpness sweeps


def bump_rows(n: int, R: float, delta: float, points: int) -> list[SharpnessRow]:
    """Bump on its own ball: the ratio is 1 on [|B_delta|, |B_R|)."""
    geom = BallGeometry(n, R)
    u = bump_potential(geom, delta).rearrangement()
    l1 = bump_data(geom, delta).l1_norm()
    # the ratio is 0/0 at t = |B_R|
    ts = np.geomspace(geom.volume_of_radius(delta), geom.V, points + 1)[:-1]
    ratios = sharpness_ratio(u, ts, geom.V, l1, n)
    return [SharpnessRow("bump", n, float(t), delta, math.nan, math.nan, R, l1, float(q), 1.0)
            for t, q in zip(ts, np.atleast_1d(ratios))]


def bump_subball_rows(n: int, R: float, t_rel, omega_factor: float = 2.0) -> list[SharpnessRow]:
    """Bump on B_R inside a domain of volume omega_factor^n |B_R|, with |B_delta| = t."""
    geom = BallGeometry(n, R)
    V_dom = omega_factor**n * geom.V
    rows = []
    for tr in t_rel:
        t = float(tr * geom.V)
        delta = float(geom.radius_of_volume(t))
        u = bump_potential(geom, delta).rearrangement()
        l1 = bump_data(geom, delta).l1_norm()
        q = sharpness_ratio(u, t, V_dom, l1, n)
        rows.append(SharpnessRow("bump_subball", n, t, delta, math.nan, math.nan, R, l1, q, 1.0))
    return rows


def balanced_rows(n: int, R: float, delta: float, t: float, eps_list) -> list[SharpnessRow]:
    geom = BallGeometry(n, R)
    rows = []
    for eps in eps_list:
        u = balanced_potential(geom, delta, eps).rearrangement()
        l1 = balanced_data(geom, delta, eps).l1_norm()
        q = sharpness_ratio(u, t, geom.V, l1, n)
        rows.append(SharpnessRow("balanced", n, t, delta, eps, math.nan, R, l1, q, 0.5))
    return rows


def translated_rows(n: int, delta: float, sigma: float, R_list, cells_per_delta: int = 32) -> list[SharpnessRow]:
    """Translated pair with lambda = R^sigma, ratio against N*_inf at t = 2|B_delta|."""
    rows = []
    for R in R_list:
        geom = BallGeometry(n, R)
        lam = R**sigma
        fld = translated_pair(geom, delta, lam, relaxed=True)
        t = 2 * geom.volume_of_radius(delta)
        fr = field_rearrangement(fld, GridSpec(cells_per_delta=cells_per_delta), t_eval=[t])
        if t > fr.t_valid:
            raise DomainError(f"t = {t!r} lies beyond the resolved windows at R = {R!r}")
        l1 = fld.data_l1()
        q = sharpness_ratio(fr.profile, t, math.inf, l1, n, kernel="infinite")
        rows.append(SharpnessRow("translated", n, t, delta, R / 4, lam, R, l1, q, 2.0 ** (-2.0 / n), fr.res_tol))
    return rows


def translated_bounded_rows(n: int, R: float, sigma: float, t_rel, cells_per_delta: int = 32) -> list[SharpnessRow]:
    """Translated pair on a fixed ball with 2|B_delta| = t and lambda = delta^sigma."""
    geom = BallGeometry(n, R)
    rows = []
    for tr in t_rel:
        t = float(tr * geom.V)
        delta = float(geom.radius_of_volume(t / 2))
        lam = delta**sigma
        fld = translated_pair(geom, delta, lam)
        fr = field_rearrangement(fld, GridSpec(cells_per_delta=cells_per_delta), t_eval=[t])
        l1 = fld.data_l1()
        q = sharpness_ratio(fr.profile, t, geom.V, l1, n)
        rows.append(SharpnessRow("translated_bounded", n, t, delta, R / 4, lam, R, l1, q, 2.0 ** (-2.0 / n),
                                 fr.res_tol))
    return rows


def _sharpness_task(args):
    family, n, cfg = args
    if family == "bump":
        return bump_rows(n, cfg.R, cfg.delta, cfg.sweep_t_points)
    if family == "bump_subball":
        t_rel = np.geomspace(cfg.sweep_t_min_rel, cfg.sweep_t_max_rel, cfg.sweep_t_points)
        return bump_subball_rows(n, cfg.R, t_rel)
    if family == "balanced":
        eps = [10.0 ** (-k) * cfg.R for k in cfg.eps_exponents]
        return balanced_rows(n, cfg.R, cfg.balanced_delta_rel * cfg.R,
                             cfg.balanced_t_rel * BallGeometry(n, cfg.R).V, eps)
    if family == "translated":
        return translated_rows(n, cfg.pair_delta, cfg.sigma, cfg.pair_R, cfg.cells_per_delta)
    if family == "translated_bounded":
        return translated_bounded_rows(n, 0.5, cfg.sigma, cfg.pair_bounded_t_rel, cfg.cells_per_delta)
    raise DomainError(f"unknown family {family!r}")


def _family_dims(family: str, dims) -> list[int]:
    if family in ("translated", "translated_bounded"):
        return [n for n in dims if n >= 3]
    return list(dims)


def _sweep_key(row: SharpnessRow):
    # sweep parameter per family: t for bump families, epsilon descending, R ascending, t descending
    if row.family == "bump":
        return row.t
    if row.family == "balanced":
        return -row.epsilon
    if row.family == "translated":
        return row.R
    return -row.t


def sweep_sharpness(cfg: RunConfig) -> SweepReport:
    t0 = time.perf_counter()
    families = ["bump", "bump_subball", "balanced", "translated", "translated_bounded"] \
        if cfg.family == "all" else [cfg.family]
    rep = SweepReport("sweep-sharpness", SHARPNESS_COLUMNS, config_hash=cfg.digest())
    tasks = [(fam, n, cfg) for fam in families for n in _family_dims(fam, cfg.dims)]
    results = run_tasks(_sharpness_task, tasks, cfg.jobs)
    order = {f: i for i, f in enumerate(families)}
    rows = [r for rs in results for r in rs]
    rows.sort(key=lambda r: (order[r.family], r.n, _sweep_key(r)))
    rep.rows = [r.as_record() for r in rows]
    rep.notes["families"] = families
    if not rows:
        rep.notes["empty"] = "no admissible dimension for the requested family"

    for fam in families:
        for n in _family_dims(fam, cfg.dims):
            fr = [r for r in rows if r.family == fam and r.n == n]
            if not fr:
                continue
            # upper bounds hold for every row
            for r in fr:
                if fam in ("bump", "balanced") and r.ratio > r.target * (1 + cfg.tol) + cfg.bump_gap_tol:
                    rep.fail(f"{fam} n={n} t={r.t:.3e}: ratio {r.ratio!r} exceeds the bound {r.target!r}")
            if fam == "bump":
                worst = max(r.gap for r in fr)
                if worst > cfg.bump_gap_tol:
                    rep.fail(f"bump n={n}: gap {worst:.3e} > {cfg.bump_gap_tol:.1e}")
            elif fam == "balanced":
                if fr[-1].gap > cfg.balanced_gap_tol:
                    rep.fail(f"balanced n={n}: final gap {fr[-1].gap:.3e} > {cfg.balanced_gap_tol:.1e}")
            elif fam == "translated" and n == 3:
                if fr[-1].gap > cfg.pair_gap_tol:
                    rep.fail(f"translated n=3: final gap {fr[-1].gap:.3e} > {cfg.pair_gap_tol:.1e}")
    rep.wall_time = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# exponential integrability


def fitted_slope(x, y) -> float:
    return float(np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)[0])


def brezis_merle(cfg: RunConfig) -> SweepReport:
    """Exponential integrals of the bump and balanced families in the plane."""
    t0 = time.perf_counter()
    cols = ["family", "alpha_over_pi", "delta", "epsilon", "V", "integral", "bound", "ratio_to_bound", "slope"]
    rep = SweepReport("brezis-merle", cols, config_hash=cfg.digest())
    geom = BallGeometry(2, cfg.R)
    V = geom.V
    deltas = [10.0 ** (-k) * cfg.R for k in cfg.bm_delta_exponents]
    profiles = [(d, bump_potential(geom, d).rearrangement(), bump_data(geom, d).l1_norm()) for d in deltas]

    for a in sorted(cfg.bm_alphas_over_pi):
        alpha = a * math.pi
        bound = 4 * math.pi * V / (4 * math.pi - alpha)
        for d, u, l1 in profiles:
            val = exp_integral(u, alpha, l1, V)
            rep.add(family="bump", alpha_over_pi=a, delta=d, epsilon=math.nan, V=V, integral=val, bound=bound,
                    ratio_to_bound=val / bound, slope=math.nan)
            if val > bound * (1 + cfg.tol):
                rep.fail(f"bump alpha={a}pi delta={d:.1e}: integral {val!r} exceeds {bound!r}")
        if a == 2.0:
            last = rep.rows[-1]["integral"]
            if abs(last - 2 * V) > cfg.bm_limit_tol * 2 * V:
                rep.fail(f"bump alpha=2pi: integral {last!r} not within {cfg.bm_limit_tol:.0%} of 2V = {2 * V!r}")

    # endpoint: linear growth in log(1/delta)
    alpha = 4 * math.pi
    vals = [exp_integral(u, alpha, l1, V) for d, u, l1 in profiles]
    logs = [math.log(1.0 / d) for d in deltas]
    k = min(4, len(deltas))
    slope = fitted_slope(logs[-k:], vals[-k:])
    for d, val in zip(deltas, vals):
        rep.add(family="bump", alpha_over_pi=4.0, delta=d, epsilon=math.nan, V=V, integral=val, bound=math.inf,
                ratio_to_bound=0.0, slope=slope)
    rep.notes["endpoint_slope"] = slope
    rep.notes["endpoint_slope_target"] = 2 * V
    if abs(slope - 2 * V) > cfg.bm_slope_tol * 2 * V:
        rep.fail(f"endpoint slope {slope!r} not within {cfg.bm_slope_tol:.0%} of 2V = {2 * V!r}")

    # compactly supported data: the bound doubles the admissible exponent
    eps = 1e-4 * cfg.R
    for a in sorted(cfg.bm_balanced_alphas_over_pi):
        alpha = a * math.pi
        bound = 8 * math.pi * V / (8 * math.pi - alpha)
        for d in deltas:
            if not d < cfg.R - 2 * eps:
                continue
            u = balanced_potential(geom, d, eps).rearrangement()
            l1 = balanced_data(geom, d, eps).l1_norm()
            val = exp_integral(u, alpha, l1, V)
            rep.add(family="balanced", alpha_over_pi=a, delta=d, epsilon=eps, V=V, integral=val, bound=bound,
                    ratio_to_bound=val / bound, slope=math.nan)
            if val > bound * (1 + cfg.tol):
                rep.fail(f"balanced alpha={a}pi delta={d:.1e}: integral {val!r} exceeds {bound!r}")
    order = {"bump": 0, "balanced": 1}
    rep.sort(key=lambda r: (order[r["family"]], r["alpha_over_pi"], -r["delta"]))
    rep.wall_time = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# L^q constants


def admissible_qs(n: int, fractions=(0.0, 0.25, 0.5, 0.75, 0.9)) -> list[float]:
    qmax = n / (n - 2)
    return [1.0 + f * (qmax - 1.0) for f in fractions]


def lq_constants(cfg: RunConfig) -> SweepReport:
    t0 = time.perf_counter()
    cols = ["kind", "n", "q", "V", "delta", "epsilon", "value", "reference", "rel_diff", "flag"]
    rep = SweepReport("lq-constants", cols, config_hash=cfg.digest())
    V = cfg.lq_V
    for n in cfg.dims:
        if n < 3:
            continue
        geom = BallGeometry.from_volume(n, V)
        kernel = green_profile(geom)
        for q in admissible_qs(n):
            closed = mazya_constant(n, q, V)
            quad = lq_norm(kernel, q)
            rel = abs(quad - closed) / closed
            rep.add(kind="identity", n=n, q=q, V=V, delta=math.nan, epsilon=math.nan, value=quad, reference=closed,
                    rel_diff=rel, flag="target")
            if rel > cfg.lq_identity_tol:
                rep.fail(f"n={n} q={q}: quadrature {quad!r} vs closed form {closed!r} (rel {rel:.2e})")
            # bump family approaches the constant from below
            for k in (2, 4, 6):
                d = 10.0 ** (-k) * geom.R
                u = bump_potential(geom, d).rearrangement()
                val = lq_norm(u, q) / bump_data(geom, d).l1_norm()
                rep.add(kind="bump", n=n, q=q, V=V, delta=d, epsilon=math.nan, value=val, reference=closed,
                        rel_diff=(closed - val) / closed, flag="sharp")
                if val > closed * (1 + cfg.tol):
                    rep.fail(f"bump n={n} q={q} delta={d:.0e}: norm exceeds the constant")
            # compactly supported variant: exploratory, no target
            comp = mazya_constant_compact(n, q, V)
            for k in (2, 4):
                d = 10.0 ** (-k) * geom.R
                eps = 1e-4 * geom.R
                u = balanced_potential(geom, d, eps).rearrangement()
                val = lq_norm(u, q) / balanced_data(geom, d, eps).l1_norm()
                rep.add(kind="balanced", n=n, q=q, V=V, delta=d, epsilon=eps, value=val, reference=comp,
                        rel_diff=(comp - val) / comp, flag="no-target")
                if val > comp * (1 + cfg.tol):
                    rep.fail(f"balanced n={n} q={q}: norm exceeds the compact-support constant")
    if not rep.rows:
        rep.notes["empty"] = "L^q constants need n >= 3"
    order = {"identity": 0, "bump": 1, "balanced": 2}
    rep.sort(key=lambda r: (r["n"], r["q"], order[r["kind"]], -r["delta"] if r["delta"] == r["delta"] else 0.0))
    rep.wall_time = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# target-space membership


def membership_profiles(geom: BallGeometry) -> list[tuple[str, object, bool]]:
    """(name, profile, expected membership) on a ball of volume V."""
    V = geom.V
    return [
        ("sqrt_kernel", kernel_power_profile(geom, 0.5), True),
        ("bounded_kernel", truncated_kernel_profile(geom, 1.0), True),
        ("two_step", StepProfile([0.0, 0.01 * V, V], [2.0, 1.0]), True),
        ("kernel", kernel_power_profile(geom, 1.0), False),
        ("twice_kernel", kernel_power_profile(geom, 1.0, 2.0), False),
    ]


def _membership_task(args):
    n, cfg = args
    geom = BallGeometry.from_volume(n, 1.0)
    rows, fails = [], []

    def add(section, profile, x, value, aux=math.nan, status=""):
        rows.append({"section": section, "profile": profile, "n": n, "x": x, "value": value, "aux": aux,
                     "status": status})

    for name, prof, expected in membership_profiles(geom):
        verdict = target_defect(prof, geom, threshold=cfg.threshold)
        for t, d in verdict.defect_curve[::10]:
            add("defect", name, t, d)
        add("verdict", name, verdict.limit_defect, verdict.smallest_grid_defect, verdict.sup_defect,
            "member" if verdict.member else "non-member")
        if verdict.member != expected:
            fails.append(f"n={n} {name}: membership verdict {verdict.member} (limit defect {verdict.limit_defect!r})")
        chain = domination_chain(prof, n, grid_points=cfg.chain_points, tol=cfg.tol) if expected else \
            extended_domination(prof, n, grid_points=cfg.chain_points, tol=cfg.tol)
        # x: grid size; value: largest relative excess of (u0)* over N* int_0^t h (+ L N*), <= 0 holds
        add("domination", name, float(chain.domination_lhs.size), chain.violations["domination"],
            chain.limsup, "ok" if chain.violations["domination"] <= 0 else "violated")
        for key, val in sorted(chain.violations.items()):
            add("chain", name + ":" + key, chain.level, val, chain.C, "ok" if val <= 0 else "violated")
        if not chain.ok:
            bad = [k for k, v in chain.violations.items() if v > 0]
            fails.append(f"n={n} {name}: chain violated at {', '.join(sorted(bad))}")

    table, full = fatou_table(geom, range(1, cfg.fatou_max + 1), threshold=cfg.threshold)
    for r in table:
        add("fatou", "truncated", r.m, r.norm, r.limit_defect, "member" if r.member else "non-member")
        if not r.member:
            fails.append(f"n={n} truncation m={r.m}: not a member")
    add("fatou", "untruncated", math.inf, full.smallest_grid_defect, full.limit_defect,
        "member" if full.member else "non-member")
    if full.member:
        fails.append(f"n={n}: the untruncated kernel passed membership")
    return rows, fails


def target_membership(cfg: RunConfig) -> SweepReport:
    t0 = time.perf_counter()
    rep = SweepReport("target-membership", ["section", "profile", "n", "x", "value", "aux", "status"],
                      config_hash=cfg.digest())
    order = {"defect": 0, "verdict": 1, "domination": 2, "chain": 3, "fatou": 4}
    for rows, fails in run_tasks(_membership_task, [(n, cfg) for n in cfg.dims], cfg.jobs):
        rep.rows.extend(rows)
        rep.failures.extend(fails)
    rep.sort(key=lambda r: (order[r["section"]], r["n"], r["profile"], r["x"]))
    rep.wall_time = time.perf_counter() - t0
    return rep


SUITES = {
    "check-inequalities": check_inequalities,
    "sweep-sharpness": sweep_sharpness,
    "brezis-merle": brezis_merle,
    "lq-constants": lq_constants,
    "target-membership": target_membership,
}
