"""Run configuration: a plain key = value file plus command-line overrides."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dims: list = field(default_factory=lambda: [2, 3, 4])
    seed: int = 0
    tol: float = 1e-9
    # inequality suite
    n_random: int = 200
    max_shells: int = 8
    t_points: int = 200
    t_min_rel: float = 1e-12
    # sharpness sweeps
    family: str = "bump"
    R: float = 1.0
    delta: float = 1e-3
    sweep_t_min_rel: float = 1e-10
    sweep_t_max_rel: float = 1e-1
    sweep_t_points: int = 10
    sigma: float = 0.5
    eps_exponents: list = field(default_factory=lambda: [1, 2, 3, 4])
    balanced_t_rel: float = 1e-2
    balanced_delta_rel: float = 1e-2
    pair_delta: float = 0.25
    pair_R: list = field(default_factory=lambda: [1e2, 1e3, 1e4])
    pair_bounded_t_rel: list = field(default_factory=lambda: [1e-3, 1e-4, 1e-5, 1e-6])
    cells_per_delta: int = 32
    bump_gap_tol: float = 1e-10
    balanced_gap_tol: float = 1e-3
    pair_gap_tol: float = 2e-2
    # Brezis-Merle
    bm_delta_exponents: list = field(default_factory=lambda: [2, 3, 4, 5, 6, 7, 8])
    bm_alphas_over_pi: list = field(default_factory=lambda: [1.0, 2.0, 3.0])
    bm_balanced_alphas_over_pi: list = field(default_factory=lambda: [2.0, 4.0, 6.0])
    bm_limit_tol: float = 1e-2
    bm_slope_tol: float = 5e-2
    # L^q constants
    lq_V: float = 1.0
    lq_identity_tol: float = 1e-8
    # membership
    threshold: float = 1e-3
    chain_points: int = 1000
    fatou_max: int = 20
    # test hook: scales every kernel bound; anything but 1 corrupts the checks
    kernel_scale: float = 1.0
    # output
    out: str = ""
    jobs: int = 1
    plot: bool = True

    def validate(self) -> "RunConfig":
        if not self.dims:
            raise ConfigError("dimension list is empty")
        for n in self.dims:
            if int(n) != n or n < 2:
                raise ConfigError(f"dimension must be an integer >= 2, got {n!r}")
        if self.n_random < 1:
            raise ConfigError("n_random must be positive")
        if not 1 <= self.max_shells:
            raise ConfigError("max_shells must be >= 1")
        if not 0 < self.sigma < 1:
            raise ConfigError("sigma must lie in (0, 1)")
        if not 0 < self.delta < self.R:
            raise ConfigError("need 0 < delta < R")
        if not self.tol >= 0:
            raise ConfigError("tol must be nonnegative")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if not 0 < self.pair_delta:
            raise ConfigError("pair_delta must be positive")
        for R in self.pair_R:
            lam = R**self.sigma
            if not (self.pair_delta < 0.5 * lam and self.pair_delta < 0.5 * R):
                raise ConfigError(f"pair schedule inadmissible at R={R!r}: need delta < lambda/2 and delta < R/2")
        if self.cells_per_delta < 1:
            raise ConfigError("cells_per_delta must be positive")
        return self

    def digest(self) -> str:
        d = dataclasses.asdict(self)
        for k in ("out", "jobs", "plot"):
            d.pop(k)
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


FAMILIES = ("bump", "bump_subball", "balanced", "translated", "translated_bounded", "all")

_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _parse_value(name: str, raw: str):
    f = _FIELDS[name]
    default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, list):
            if not raw:
                return []
            elem = type(default[0]) if default else float
            return [elem(x) for x in raw.replace(";", ",").split(",") if x.strip()]
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = (x.strip() for x in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _FIELDS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        values[key] = _parse_value(key, raw) if isinstance(raw, str) else raw
    return RunConfig(**values).validate()
