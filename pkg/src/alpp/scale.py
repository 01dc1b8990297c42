"""Scaled coordinates, polymers and their weights.

The scaling map sends the unscaled point ``(u, k)`` to ``(x, t)`` with
``t = k / n`` and ``x = (u - k) / (2 n^{2/3})``, so ``(n, n) -> (0, 1)`` and
``(2 n^{2/3}, 0) -> (1, 0)``.  A polymer from ``(x, 0)`` to ``(y, 1)`` is the image
of a geodesic between ``(2 n^{2/3} x, 0)`` and ``(n + 2 n^{2/3} y, n)``; its weight is

    W_n(x, y) = 2^{-1/2} n^{-1/3} (M - 2n - 2 n^{2/3} (y - x)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import lpp
from .env import BrownianField, GridSpec, sample_field
from .errors import ConfigError, DomainError
from .lpp import LEFTMOST, Staircase, SweepTable


class ScaledPoint(NamedTuple):
    x: float
    t: float


class UnscaledPoint(NamedTuple):
    u: float
    k: int
    residual: float  # n * t - k


def width(n: int) -> float:
    """Unscaled horizontal length of one scaled unit, ``2 n^{2/3}``."""
    return 2.0 * n ** (2.0 / 3.0)


def scale_point(n: int, p) -> ScaledPoint:
    u, k = p
    if n < 1:
        raise DomainError("n must be a positive integer")
    return ScaledPoint((u - k) / width(n), k / n)


def unscale_point(n: int, q) -> UnscaledPoint:
    x, t = q
    if n < 1:
        raise DomainError("n must be a positive integer")
    h = n * t
    k = int(round(h))
    return UnscaledPoint(width(n) * x + h, k, h - k)


def parabola(z):
    """``Q(z) = 2^{-1/2} z^2``."""
    return z * z / math.sqrt(2.0)


def domain_ok(n: int, x: float, y: float) -> bool:
    return y - x >= -0.5 * n ** (1.0 / 3.0) - 1e-12


def scaled_weight(n: int, energy: float, x: float, y: float, s: float = 0.0, t: float = 1.0) -> float:
    """Centre and scale an energy for the journey ``(x, s) -> (y, t)``.

    The centring ``2 n (t - s) + 2 n^{2/3} (y - x)`` is linear in the endpoints,
    so weights of concatenated pieces add up exactly like energies.
    """
    return (energy - 2.0 * n * (t - s) - n ** (2.0 / 3.0) * 2.0 * (y - x)) / (math.sqrt(2.0) * n ** (1.0 / 3.0))


@dataclass(frozen=True, eq=False)
class Polymer:
    """A geodesic in scaled coordinates.

    ``start_x``/``end_y`` are the snapped scaled endpoints actually used;
    ``snap`` holds the unscaled residuals (requested - snapped) at both ends.
    """

    n: int
    start_x: float
    end_y: float
    staircase: Staircase
    weight: float
    start_t: float = 0.0
    end_t: float = 1.0
    snap: tuple[float, float] = (0.0, 0.0)

    @property
    def energy(self) -> float:
        return self.staircase.energy


def snap_offset(field: BrownianField, n: int, x: float, t: float) -> tuple[int, int, float]:
    """Grid offset and line of the scaled point ``(x, t)``; errors if it is off the field."""
    p = unscale_point(n, (x, t))
    if abs(p.residual) > 1e-9:
        raise DomainError(f"height {t} is not in n^-1 Z for n={n}")
    field.check_line(p.k)
    e, res = field.grid.nearest(p.u)
    if abs(res) > field.grid.delta / 2 * (1 + 1e-9):
        raise ConfigError(f"scaled point ({x}, {t}) maps to u={p.u}, outside the field grid")
    return e, p.k, res


def scaled_x(field: BrownianField, n: int, e: int, k: int) -> float:
    return float((field.grid.coord(e) - k) / width(n))


def polymer_from_staircase(field: BrownianField, n: int, st: Staircase, snap=(0.0, 0.0)) -> Polymer:
    s, t = st.i / n, st.j / n
    x = scaled_x(field, n, int(st.knots[0]), st.i)
    y = scaled_x(field, n, int(st.knots[-1]), st.j)
    return Polymer(n, x, y, st, scaled_weight(n, st.energy, x, y, s, t), s, t, tuple(snap))


def weight(field: BrownianField, n: int, x: float, y: float, side: str = LEFTMOST) -> Polymer:
    """Polymer ``rho_n(x, y)`` and its weight ``W_n(x, y)``."""
    if not domain_ok(n, x, y):
        raise DomainError(f"need y - x >= -n^(1/3)/2, got x={x}, y={y}, n={n}")
    a, _, ra = snap_offset(field, n, x, 0.0)
    e, _, re = snap_offset(field, n, y, 1.0)
    if e < a:
        raise DomainError("snapped end lies left of snapped start")
    table = SweepTable(field, (field.grid.coord(a), 0), n, side=side, hi=e)
    return polymer_from_staircase(field, n, table.staircase_at(e), (ra, re))


def field_grid(n: int, delta: float, xs, ys, pad: float = 0.0) -> GridSpec:
    """Grid covering starts at scaled ``xs`` (height 0) and ends at ``ys`` (height 1)."""
    w = width(n)
    lo = min(w * min(xs), n + w * min(ys)) - pad
    hi = max(w * max(xs), n + w * max(ys)) + pad
    return GridSpec.covering(lo, hi, delta)


def sample_scaled_field(n: int, delta: float, xs, ys, seed: int, stream_id: int = 0) -> BrownianField:
    """Field with lines ``0..n`` wide enough for every journey from ``xs`` to ``ys``."""
    return sample_field(n + 1, field_grid(n, delta, xs, ys, pad=delta), seed, stream_id)


def check_resolution(n: int, delta: float) -> None:
    """Grid spacing must not exceed ``n^{-1/3}``."""
    if delta > n ** (-1.0 / 3.0) * (1 + 1e-12):
        raise ConfigError(f"delta={delta} exceeds n^(-1/3)={n ** (-1 / 3):.6g} for n={n}")


def scaled_delta(n: int, delta: float) -> float:
    """Horizontal grid spacing in scaled units."""
    return delta / width(n)


def passage_scaled(field: BrownianField, n: int, x: float, y: float) -> float:
    """Unscaled passage value between snapped scaled endpoints (no geodesic)."""
    a, _, _ = snap_offset(field, n, x, 0.0)
    e, _, _ = snap_offset(field, n, y, 1.0)
    return lpp.passage_value(field, (field.grid.coord(a), 0), (field.grid.coord(e), n))


def default_delta(n: int) -> float:
    """Coarsest admissible grid spacing, ``n^{-1/3}``."""
    return n ** (-1.0 / 3.0)
