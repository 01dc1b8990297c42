"""Last-passage values and extremal geodesics by dynamic programming.

For a start ``(x, i)`` the DP keeps, on line ``k``, the best energy ``L_k(y)`` of a
staircase ending at ``(y, k)``::

    L_i(y) = B(i, y) - B(i, x)
    L_k(y) = B(k, y) + max_{x <= z <= y} (L_{k-1}(z) - B(k, z))

Each line is one left-to-right pass, so a sweep over lines ``i..j`` costs
``O((j - i) * m)``.  The position of the running maximum is the break ``z_k`` at
which the path steps up onto line ``k``; keeping the first (last) position of the
maximum and backtracking yields the leftmost (rightmost) geodesic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .env import BrownianField, GridSpec
from .errors import DomainError

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"
_SIDES = (LEFTMOST, RIGHTMOST)


@numba.njit(cache=True, nogil=True)
def _sweep(values, i, j, a, hi, rightmost, track):
    w = hi - a + 1
    L = np.empty(w)
    base = values[i, a]
    for y in range(w):
        L[y] = values[i, a + y] - base
    if track:
        args = np.empty((j - i, w), dtype=np.int32)
    else:
        args = np.empty((0, 0), dtype=np.int32)
    for k in range(i + 1, j + 1):
        row = values[k]
        best = -np.inf
        bi = 0
        for y in range(w):
            v = L[y] - row[a + y]
            if v > best or (rightmost and v == best):
                best = v
                bi = y
            if track:
                args[k - i - 1, y] = bi
            L[y] = best + row[a + y]
    return L, args


@numba.njit(cache=True, nogil=True)
def _backtrack(args, e):
    n_up = args.shape[0]
    knots = np.empty(n_up + 2, dtype=np.int64)
    knots[n_up + 1] = e
    y = e
    for r in range(n_up - 1, -1, -1):
        y = args[r, y]
        knots[r + 1] = y
    knots[0] = 0
    return knots


def _check_side(side: str) -> bool:
    if side not in _SIDES:
        raise ValueError(f"side must be one of {_SIDES}, got {side!r}")
    return side == RIGHTMOST


@dataclass(frozen=True, eq=False)
class Staircase:
    """Monotone path from ``(x, i)`` to ``(y, j)``.

    ``knots`` holds grid offsets ``z_i = x, z_{i+1}, ..., z_j, z_{j+1} = y``; the
    horizontal segment on line ``k`` is ``[knots[k - i], knots[k - i + 1]]``.
    """

    i: int
    j: int
    knots: np.ndarray
    grid: GridSpec
    energy: float

    @property
    def x(self) -> float:
        return float(self.grid.coord(int(self.knots[0])))

    @property
    def y(self) -> float:
        return float(self.grid.coord(int(self.knots[-1])))

    @property
    def start(self) -> tuple[float, int]:
        return self.x, self.i

    @property
    def end(self) -> tuple[float, int]:
        return self.y, self.j

    @property
    def breaks(self) -> np.ndarray:
        """Coordinates ``z_{i+1} <= ... <= z_j``."""
        return self.grid.coord(self.knots[1:-1])

    def segment(self, k: int) -> tuple[int, int]:
        """Grid offsets of the horizontal segment on line ``k``."""
        if not self.i <= k <= self.j:
            raise DomainError(f"line {k} not in {self.i}..{self.j}")
        return int(self.knots[k - self.i]), int(self.knots[k - self.i + 1])

    def recompute_energy(self, field: BrownianField) -> float:
        """Energy summed directly from field increments along the segments."""
        lines = np.arange(self.i, self.j + 1)
        v = field.values
        return float(np.sum(v[lines, self.knots[1:]] - v[lines, self.knots[:-1]]))


def _validate(field: BrownianField, start, j: int) -> tuple[int, int]:
    x, i = start
    i = field.check_line(i)
    field.check_line(j)
    if j < i:
        raise DomainError(f"end line {j} below start line {i}")
    return field.index(x), i


class SweepTable:
    """One DP sweep from a fixed start up to line ``j``.

    Holds the last-passage values ``M_{(x,i) -> (y,j)}`` for every grid point
    ``y`` in ``[x, x_hi]`` and, when a ``side`` is given, the argmax table needed
    to backtrack geodesics to any of those endpoints.
    """

    def __init__(self, field: BrownianField, start, j: int, side: str | None = None, hi: int | None = None):
        a, i = _validate(field, start, j)
        if hi is None:
            hi = field.grid.m - 1
        if not a <= hi < field.grid.m:
            raise DomainError("sweep range must start at the start point and stay on the grid")
        self.field, self.a, self.i, self.j, self.hi = field, a, i, j, hi
        self.side = side
        track = side is not None
        rightmost = _check_side(side) if track else False
        self.values, self._args = _sweep(field.values, i, j, a, hi, rightmost, track)

    def _offset(self, y: float) -> int:
        e = self.field.index(y)
        if not self.a <= e <= self.hi:
            raise DomainError(f"end point {y} outside swept range")
        return e - self.a

    def value(self, y: float) -> float:
        return float(self.values[self._offset(y)])

    def value_at(self, e: int) -> float:
        """Value at absolute grid offset ``e``."""
        return float(self.values[e - self.a])

    def staircase_at(self, e: int) -> Staircase:
        """Geodesic to absolute grid offset ``e`` on line ``j``."""
        if self.side is None:
            raise ValueError("table was built without a side; no geodesics available")
        if not self.a <= e <= self.hi:
            raise DomainError("end point outside swept range")
        knots = _backtrack(self._args, e - self.a) + self.a
        return Staircase(self.i, self.j, knots, self.field.grid, float(self.values[e - self.a]))

    def geodesic(self, y: float) -> Staircase:
        return self.staircase_at(self.field.index(y))


def passage_value(field: BrownianField, start, end) -> float:
    """Maximal energy ``M_{(x,i) -> (y,j)}`` over grid-restricted staircases."""
    y, j = end
    a, _ = _validate(field, start, j)
    e = field.index(y)
    if e < a:
        raise DomainError(f"end {y} lies left of start {start[0]}")
    return SweepTable(field, start, j, hi=e).value_at(e)


def passage_profile(field: BrownianField, start, j: int) -> tuple[np.ndarray, np.ndarray]:
    """All values ``y -> M_{(x,i) -> (y,j)}`` for grid points ``y >= x`` in one sweep.

    Returns ``(ys, values)``.
    """
    table = SweepTable(field, start, j)
    ys = field.grid.coord(np.arange(table.a, table.hi + 1))
    return ys, table.values


def geodesic(field: BrownianField, start, end, side: str = LEFTMOST) -> Staircase:
    """Leftmost or rightmost maximizing staircase from ``start`` to ``end``."""
    _check_side(side)
    y, j = end
    a, _ = _validate(field, start, j)
    e = field.index(y)
    if e < a:
        raise DomainError(f"end {y} lies left of start {start[0]}")
    return SweepTable(field, start, j, side=side, hi=e).staircase_at(e)
