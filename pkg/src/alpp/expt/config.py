"""Experiment configuration: key/value files, CLI overrides and ``ALPP_*`` environment overrides."""
from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError

COMMANDS = ("figure2", "dimension", "exponent", "twcheck", "shear", "regularity", "nondegen")
ENV_PREFIX = "ALPP_"
EPS_COMMANDS = ("dimension", "exponent", "shear", "regularity")


def dyadic(lo: int, hi: int) -> tuple[float, ...]:
    return tuple(2.0 ** -k for k in range(lo, hi + 1))


# per-command defaults; anything not listed falls back to the dataclass default
DEFAULTS = {
    "figure2": dict(n=500, M=2.0, zstep=0.01),
    "dimension": dict(n=500, eps=dyadic(2, 6), M=2.0, seeds=(0, 20)),
    "exponent": dict(n=1000, eps=dyadic(3, 6), seeds=(0, 1000)),
    "twcheck": dict(n=20, delta=2.0 ** -15, seeds=(0, 2000)),
    "shear": dict(n=2000, eps=(2.0 ** -4,), x=0.0, y=0.5, seeds=(0, 500)),
    "regularity": dict(n=1000, eps=dyadic(3, 6), x=0.0, y=0.0, alpha=0.4, seeds=(0, 1000)),
    "nondegen": dict(n=500, mlist=(1.0, 2.0, 4.0), seeds=(0, 200)),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one experiment run.

    ``delta=None`` selects ``n^{-1/3}``; ``zstep=None`` selects ``min(eps)/4``.
    ``seeds=(base, count)`` enumerates seeds ``base .. base+count-1``.
    """

    command: str
    n: int = 500
    delta: float | None = None
    seeds: tuple[int, int] = (0, 1)
    eps: tuple[float, ...] = dyadic(2, 6)
    M: float = 2.0
    eta: float = 0.1
    out: str | None = None
    threads: int = 1
    alpha: float = 0.4
    x: float = 0.0
    y: float = 0.0
    zstep: float | None = None
    mlist: tuple[float, ...] = (1.0, 2.0, 4.0)
    K: float = 1.0
    avg_trials: int = 0
    synthetic: str = "none"
    n_boot: int = 1000

    def __post_init__(self):
        self.validate()

    @property
    def resolved_delta(self) -> float:
        return self.n ** (-1.0 / 3.0) if self.delta is None else float(self.delta)

    @property
    def resolved_zstep(self) -> float:
        return min(self.eps) / 4.0 if self.zstep is None else float(self.zstep)

    @property
    def seed_list(self) -> list[int]:
        base, count = self.seeds
        return list(range(base, base + count))

    @property
    def scaled_delta(self) -> float:
        return self.resolved_delta / (2.0 * self.n ** (2.0 / 3.0))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError("n must be a positive integer")
        d = self.resolved_delta
        if not (d > 0 and math.isfinite(d)):
            raise ConfigError("delta must be positive")
        if d > self.n ** (-1.0 / 3.0) * (1 + 1e-12):
            raise ConfigError(f"delta={d} exceeds n^(-1/3)={self.n ** (-1 / 3):.6g}")
        if self.seeds[1] < 1:
            raise ConfigError("replication count must be at least 1")
        if self.seeds[0] < 0:
            raise ConfigError("base seed must be non-negative")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not self.eps or any(not e > 0 for e in self.eps):
            raise ConfigError("eps ladder must be non-empty and positive")
        if self.command in EPS_COMMANDS and self.synthetic == "none":
            floor = 4.0 * self.scaled_delta
            if min(self.eps) < floor * (1 - 1e-9):
                raise ConfigError(f"eps={min(self.eps)} is below 4 x scaled delta = {floor:.3g}")
        if self.M <= 0 or any(m <= 0 for m in self.mlist):
            raise ConfigError("M must be positive")
        if self.zstep is not None and self.zstep <= 0:
            raise ConfigError("zstep must be positive")
        if self.command == "twcheck":
            if self.n > 200:
                raise ConfigError("twcheck needs n <= 200")
            if self.seeds[1] < 100:
                raise ConfigError("twcheck needs at least 100 samples")
        if self.synthetic not in ("none", "constant", "linear", "cantor", "cantor4"):
            raise ConfigError(f"unknown synthetic mode {self.synthetic!r}")

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["delta_resolved"] = self.resolved_delta
        return d


# --- parsing ------------------------------------------------------------------

def _floats(s) -> tuple[float, ...]:
    if isinstance(s, (list, tuple)):
        return tuple(float(v) for v in s)
    return tuple(_float(v) for v in str(s).replace(";", ",").split(",") if v.strip())


def _float(s) -> float:
    s = str(s).strip()
    if s.startswith("2^"):
        return 2.0 ** float(s[2:])
    return float(s)


def _seeds(s) -> tuple[int, int]:
    if isinstance(s, (list, tuple)):
        return int(s[0]), int(s[1])
    if ":" not in str(s):
        raise ConfigError(f"seeds must look like BASE:COUNT, got {s!r}")
    base, count = str(s).split(":", 1)
    return int(base), int(count)


def _opt_float(s):
    return None if s is None or str(s).strip().lower() in ("", "none", "auto") else _float(s)


_PARSERS = {
    "n": int, "delta": _opt_float, "seeds": _seeds, "eps": _floats, "M": _float, "eta": _float,
    "out": lambda s: None if str(s).strip() in ("", "none") else str(s), "threads": int,
    "alpha": _float, "x": _float, "y": _float, "zstep": _opt_float, "mlist": _floats, "K": _float,
    "avg_trials": int, "synthetic": str, "n_boot": int, "command": str,
}
_ALIASES = {k.lower(): k for k in _PARSERS}


def _key(k: str) -> str:
    k = k.strip().replace("-", "_")
    canon = _ALIASES.get(k.lower())
    if canon is None:
        raise ConfigError(f"unknown configuration key {k!r}")
    return canon


def parse_value(key: str, raw):
    key = _key(key)
    try:
        return key, _PARSERS[key](raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {path} not found")
    out = {}
    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = line.split("=", 1)
        k, v = parse_value(k, v.strip())
        out[k] = v
    return out


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for name, raw in environ.items():
        if name.startswith(ENV_PREFIX) and len(name) > len(ENV_PREFIX):
            k, v = parse_value(name[len(ENV_PREFIX):], raw)
            out[k] = v
    return out


def build_config(command: str, file_values: dict | None = None, cli_values: dict | None = None,
                 environ=None) -> ExperimentConfig:
    """Merge defaults < config file < CLI flags < ``ALPP_*`` environment variables."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    merged = dict(DEFAULTS[command])
    for layer in (file_values or {}, cli_values or {}, env_overrides(environ)):
        merged.update(layer)
    merged.pop("command", None)
    return ExperimentConfig(command=command, **merged)
