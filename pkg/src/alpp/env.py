"""Discretized two-sided Brownian environment.

A :class:`BrownianField` holds cumulative values ``B(k, x)`` on a uniform grid for
lines ``k = 0 .. n_lines - 1``.  Every line is anchored with ``B(k, 0) = 0``; the
increments to the right and to the left of the origin come from two independent
random streams keyed by ``(seed, stream_id, line, side)``, so values at a given
grid point do not depend on the order in which lines are generated or on how far
the grid extends.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError

_REL_TOL = 1e-9
MAGIC = b"ALPP"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIdddQQ")


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``x_min, x_min + delta, ..., x_max`` containing the origin."""

    x_min: float
    x_max: float
    delta: float

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ConfigError(f"grid spacing must be positive, got {self.delta!r}")
        if not self.x_min < self.x_max:
            raise ConfigError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if not self.x_min <= 0 <= self.x_max:
            raise ConfigError("the origin must lie inside the grid")
        lo = self.x_min / self.delta
        hi = self.x_max / self.delta
        if abs(lo - round(lo)) > _REL_TOL * max(1.0, abs(lo)):
            raise ConfigError("x_min must be an integer multiple of delta (0 must be a grid point)")
        if abs(hi - round(hi)) > _REL_TOL * max(1.0, abs(hi)):
            raise ConfigError("x_max must be an integer multiple of delta")

    @classmethod
    def covering(cls, lo: float, hi: float, delta: float) -> "GridSpec":
        """Smallest grid of spacing ``delta`` containing ``[lo, hi]`` and the origin."""
        i_lo = min(0, math.floor(lo / delta + _REL_TOL))
        i_hi = max(0, math.ceil(hi / delta - _REL_TOL))
        if i_hi == i_lo:
            i_hi += 1
        return cls(i_lo * delta, i_hi * delta, delta)

    @property
    def i_min(self) -> int:
        """Signed grid index of ``x_min`` (grid index of the origin is 0)."""
        return int(round(self.x_min / self.delta))

    @property
    def i_max(self) -> int:
        return int(round(self.x_max / self.delta))

    @property
    def m(self) -> int:
        """Number of grid points."""
        return self.i_max - self.i_min + 1

    @property
    def origin(self) -> int:
        """Array offset of the origin."""
        return -self.i_min

    def points(self) -> np.ndarray:
        return np.arange(self.i_min, self.i_max + 1) * self.delta

    def coord(self, idx):
        """Coordinate of array offset ``idx`` (scalar or array)."""
        return (idx + self.i_min) * self.delta

    def nearest(self, u: float) -> tuple[int, float]:
        """Array offset of the grid point nearest to ``u`` and the residual ``u - point``.

        Points outside the grid are clamped; the residual then exceeds ``delta / 2``.
        """
        k = int(round(u / self.delta)) - self.i_min
        k = min(max(k, 0), self.m - 1)
        return k, u - self.coord(k)

    def index(self, u: float) -> int:
        """Array offset of the grid point ``u``; raises if ``u`` is off-grid."""
        k, res = self.nearest(u)
        if abs(res) > _REL_TOL * max(self.delta, abs(u)):
            raise DomainError(f"{u!r} is not a point of the grid [{self.x_min}, {self.x_max}] step {self.delta}")
        return k


def _line_increments(seed: int, stream_id: int, line: int, side: int, count: int, delta: float) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(stream_id, line, side))
    rng = np.random.Generator(np.random.SFC64(ss))
    out = rng.standard_normal(count)
    out *= math.sqrt(delta)
    return out


@dataclass(frozen=True, eq=False)
class BrownianField:
    """Cumulative values of ``n_lines`` independent two-sided Brownian motions on ``grid``.

    ``values[k, p]`` is ``B(k, grid.coord(p))``.  The array is read-only so that a
    field can be shared between worker threads.
    """

    n_lines: int
    grid: GridSpec
    values: np.ndarray = dc_field(repr=False)
    seed: int | None = None
    stream_id: int | None = None

    def __post_init__(self):
        if self.values.shape != (self.n_lines, self.grid.m):
            raise ConfigError(f"values shape {self.values.shape} does not match ({self.n_lines}, {self.grid.m})")
        self.values.flags.writeable = False

    @classmethod
    def from_values(cls, values, grid: GridSpec) -> "BrownianField":
        """Wrap an explicit array of cumulative values (must vanish at the origin)."""
        arr = np.array(values, dtype=np.float64, order="C")
        if arr.ndim != 2:
            raise ConfigError("values must be a 2-d array (lines x grid points)")
        if np.any(arr[:, grid.origin] != 0.0):
            raise ConfigError("B(k, 0) must be 0 on every line")
        return cls(arr.shape[0], grid, arr)

    def index(self, u: float) -> int:
        return self.grid.index(u)

    def check_line(self, k: int) -> int:
        if not 0 <= k < self.n_lines:
            raise DomainError(f"line {k} outside 0..{self.n_lines - 1}")
        return int(k)

    def value(self, k: int, u: float) -> float:
        return float(self.values[self.check_line(k), self.index(u)])

    def dump(self, path) -> None:
        """Write the binary dump: ``ALPP`` header followed by little-endian f64 rows."""
        header = _HEADER.pack(
            MAGIC, FORMAT_VERSION, self.n_lines, self.grid.x_min, self.grid.x_max, self.grid.delta,
            (self.seed or 0) & 0xFFFFFFFFFFFFFFFF, (self.stream_id or 0) & 0xFFFFFFFFFFFFFFFF,
        )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "BrownianField":
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise ConfigError("truncated field dump")
        magic, version, n_lines, x_min, x_max, delta, seed, stream = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ConfigError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ConfigError(f"unsupported dump version {version}")
        grid = GridSpec(x_min, x_max, delta)
        body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
        if body.size != n_lines * grid.m:
            raise ConfigError("dump body size does not match header")
        return cls(n_lines, grid, body.reshape(n_lines, grid.m).astype(np.float64), seed, stream)


def sample_field(n_lines: int, grid: GridSpec, seed: int, stream_id: int = 0) -> BrownianField:
    """Sample ``n_lines`` independent two-sided Brownian motions on ``grid``.

    Increments are i.i.d. Normal(0, delta).  The right half of line ``k`` is drawn
    from the stream keyed ``(seed, stream_id, k, 0)`` and the left half from
    ``(seed, stream_id, k, 1)``.
    """
    if n_lines < 1:
        raise ConfigError("n_lines must be positive")
    if seed < 0 or stream_id < 0:
        raise ConfigError("seed and stream_id must be non-negative")
    m, o = grid.m, grid.origin
    n_right = m - 1 - o
    values = np.empty((n_lines, m))
    for k in range(n_lines):
        row = values[k]
        row[o] = 0.0
        if n_right:
            np.cumsum(_line_increments(seed, stream_id, k, 0, n_right, grid.delta), out=row[o + 1:])
        if o:
            left = np.cumsum(_line_increments(seed, stream_id, k, 1, o, grid.delta))
            row[:o] = left[::-1]
    return BrownianField(n_lines, grid, values, seed, stream_id)


def zero_field(n_lines: int, grid: GridSpec) -> BrownianField:
    """Field with every increment equal to zero (all paths tie)."""
    if n_lines < 1:
        raise ConfigError("n_lines must be positive")
    return BrownianField(n_lines, grid, np.zeros((n_lines, grid.m)))


def increment(field: BrownianField, k: int, a: float, b: float) -> float:
    """``B(k, b) - B(k, a)`` for grid points ``a <= b``."""
    if b < a:
        raise DomainError(f"increment needs a <= b, got a={a}, b={b}")
    k = field.check_line(k)
    return float(field.values[k, field.index(b)] - field.values[k, field.index(a)])
