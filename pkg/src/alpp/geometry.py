"""Polymer geometry: splitting, ordering, intersection and disjoint pairs.

Questions about *all* polymers between two sets of endpoints are reduced to the
extremal (leftmost / rightmost) geodesics.  Polymers from a common start are
ordered by their endpoints, so e.g. two disjoint polymers with starts in ``I`` and
ends in ``J`` exist iff the leftmost polymer of the left corner and the rightmost
polymer of the right corner are disjoint.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import replace

import numpy as np

from .env import BrownianField
from .errors import ConfigError, DomainError, ModelConsistencyError
from .lpp import LEFTMOST, RIGHTMOST, Staircase, SweepTable, passage_value
from .scale import Polymer, domain_ok, polymer_from_staircase, scaled_delta, snap_offset, unscale_point


def _stair(p) -> Staircase:
    return p.staircase if isinstance(p, Polymer) else p


def _common(a: Staircase, b: Staircase):
    lo, hi = max(a.i, b.i), min(a.j, b.j)
    if lo > hi:
        return None
    ka, kb = a.knots, b.knots
    la = ka[lo - a.i:hi - a.i + 1]
    ra = ka[lo - a.i + 1:hi - a.i + 2]
    lb = kb[lo - b.i:hi - b.i + 1]
    rb = kb[lo - b.i + 1:hi - b.i + 2]
    return la, ra, lb, rb


def intersects(a, b) -> bool:
    """True iff some common line carries closed horizontal segments that overlap.

    Vertical pieces never meet without their horizontal neighbours meeting, so this
    is planar intersection of the two staircases.
    """
    a, b = _stair(a), _stair(b)
    if a.grid != b.grid:
        raise DomainError("staircases live on different grids")
    c = _common(a, b)
    if c is None:
        return False
    la, ra, lb, rb = c
    return bool(np.any(np.maximum(la, lb) <= np.minimum(ra, rb)))


def precedes(a, b) -> bool:
    """``a`` is on or to the left of ``b`` on every common line."""
    a, b = _stair(a), _stair(b)
    c = _common(a, b)
    if c is None:
        return True
    la, ra, lb, rb = c
    return bool(np.all(lb >= la) and np.all(rb >= ra))


def split(field: BrownianField, p: Polymer, at, check: bool = True) -> tuple[Polymer, Polymer]:
    """Split ``p`` at the scaled point ``at = (z, s)``, ``s`` in ``n^{-1} Z``.

    Both pieces are polymers; with ``check`` their energies are compared with
    freshly computed passage values.
    """
    z, s = at
    n = p.n
    st = p.staircase
    q = unscale_point(n, (z, s))
    if abs(q.residual) > 1e-9 or not st.i <= q.k <= st.j:
        raise DomainError(f"height {s} is not a line of the polymer")
    e, res = field.grid.nearest(q.u)
    if abs(res) > field.grid.delta / 2 * (1 + 1e-9):
        raise DomainError(f"({z}, {s}) lies outside the field")
    left, right = st.segment(q.k)
    if not left <= e <= right:
        raise DomainError(f"({z}, {s}) is not on the polymer")
    r = q.k - st.i
    k_lo = np.append(st.knots[:r + 1], e)
    k_hi = np.insert(st.knots[r + 1:], 0, e)
    lo = Staircase(st.i, q.k, k_lo, st.grid, 0.0)
    hi = Staircase(q.k, st.j, k_hi, st.grid, 0.0)
    lo = replace(lo, energy=lo.recompute_energy(field))
    hi = replace(hi, energy=hi.recompute_energy(field))
    if check:
        tol = 1e-9 * (1.0 + abs(st.energy))
        for piece in (lo, hi):
            best = passage_value(field, piece.start, piece.end)
            if abs(best - piece.energy) > tol:
                raise ModelConsistencyError(f"split piece is not maximizing: {piece.energy} < {best}")
    return polymer_from_staircase(field, n, lo), polymer_from_staircase(field, n, hi)


class GeodesicCache:
    """Memoized DP tables from grid offsets on line 0 to line ``n``.

    Tables extend to grid offset ``hi`` (default: the whole grid) so one sweep
    serves every endpoint; at most ``maxsize`` tables are kept.
    """

    def __init__(self, field: BrownianField, n: int, hi: int | None = None, maxsize: int = 4):
        self.field, self.n = field, n
        self.hi = field.grid.m - 1 if hi is None else hi
        self.maxsize = maxsize
        self._tables: OrderedDict = OrderedDict()

    def table(self, a: int, side: str) -> SweepTable:
        key = (a, side)
        t = self._tables.get(key)
        if t is None:
            t = SweepTable(self.field, (self.field.grid.coord(a), 0), self.n, side=side, hi=self.hi)
            self._tables[key] = t
            while len(self._tables) > self.maxsize:
                self._tables.popitem(last=False)
        else:
            self._tables.move_to_end(key)
        return t

    def staircase(self, a: int, e: int, side: str) -> Staircase:
        if e > self.hi:
            raise DomainError("end point beyond cached sweep range")
        return self.table(a, side).staircase_at(e)


def _geodesic_idx(field, n, a, e, side, cache) -> Staircase:
    if e < a:
        raise DomainError("end lies left of start")
    if cache is not None and e <= cache.hi:
        return cache.staircase(a, e, side)
    return SweepTable(field, (field.grid.coord(a), 0), n, side=side, hi=e).staircase_at(e)


def _check_interval(n: int, delta: float, lo: float, hi: float) -> None:
    if hi < lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if 0 < hi - lo < scaled_delta(n, delta) * (1 - 1e-9):
        raise ConfigError(f"interval length {hi - lo} is below the scaled grid spacing {scaled_delta(n, delta)}")


def disjoint_witness(field: BrownianField, n: int, I, J, cache: GeodesicCache | None = None):
    """Two disjoint polymers with starts in ``I`` and ends in ``J``, or ``None``.

    The candidates are the leftmost polymer ``(a,0) -> (c,1)`` and the rightmost
    polymer ``(b,0) -> (d,1)`` for ``I = [a, b]``, ``J = [c, d]``.
    """
    a, b = I
    c, d = J
    _check_interval(n, field.grid.delta, a, b)
    _check_interval(n, field.grid.delta, c, d)
    if not (domain_ok(n, a, c) and domain_ok(n, b, d)):
        raise DomainError("interval endpoints violate y - x >= -n^(1/3)/2")
    ia, _, _ = snap_offset(field, n, a, 0.0)
    ib, _, _ = snap_offset(field, n, b, 0.0)
    ic, _, _ = snap_offset(field, n, c, 1.0)
    jd, _, _ = snap_offset(field, n, d, 1.0)
    left = _geodesic_idx(field, n, ia, ic, LEFTMOST, cache)
    right = _geodesic_idx(field, n, ib, jd, RIGHTMOST, cache)
    if intersects(left, right):
        return None
    return polymer_from_staircase(field, n, left), polymer_from_staircase(field, n, right)


def disjoint_pair(field: BrownianField, n: int, I, J, cache: GeodesicCache | None = None) -> bool:
    """Whether ``MaxDisjtPoly_n(I, J) >= 2``."""
    return disjoint_witness(field, n, I, J, cache) is not None


def _non_int_idx(field, n, a1, a2, e1, e2, cache) -> bool:
    r = _geodesic_idx(field, n, a1, e1, RIGHTMOST, cache)
    l = _geodesic_idx(field, n, a2, e2, LEFTMOST, cache)
    return not intersects(r, l)


def non_int(field: BrownianField, n: int, x1: float, x2: float, z1: float, z2: float,
            cache: GeodesicCache | None = None) -> bool:
    """No polymer ``(x1,0) -> (z1,1)`` meets any polymer ``(x2,0) -> (z2,1)``.

    Decided by the rightmost polymer of the first journey against the leftmost
    polymer of the second.
    """
    if not (x1 < x2 and z1 < z2):
        raise DomainError("non_int needs x1 < x2 and z1 < z2")
    if not (domain_ok(n, x1, z1) and domain_ok(n, x2, z2)):
        raise DomainError("endpoints violate y - x >= -n^(1/3)/2")
    a1, _, _ = snap_offset(field, n, x1, 0.0)
    a2, _, _ = snap_offset(field, n, x2, 0.0)
    e1, _, _ = snap_offset(field, n, z1, 1.0)
    e2, _, _ = snap_offset(field, n, z2, 1.0)
    return _non_int_idx(field, n, a1, a2, e1, e2, cache)


def drag_search(field: BrownianField, n: int, z: float, eps: float,
                cache: GeodesicCache | None = None, exhaustive: bool = False):
    """Interval ``I`` of length ``eps`` in ``[-1, 1]`` with ``MaxDisjtPoly_n(I, [z, z+eps]) >= 2``.

    Returns ``None`` unless the polymers ``(-1,0) -> (z,1)`` and ``(1,0) -> (z+eps,1)``
    are disjoint.  Otherwise locates ``X``, the last grid start ``x`` in ``[-1, 1)``
    for which ``(x,0) -> (z,1)`` still avoids ``(1,0) -> (z+eps,1)``.  Because the
    rightmost polymer from ``x`` moves right with ``x``, that event holds on an
    initial segment and ``X`` is found by bisection (``exhaustive=True`` scans every
    grid start instead).  If ``X`` is the last grid point below 1 the answer is
    ``[1-eps, 1]``; otherwise it is the length-``eps`` interval starting at ``X``,
    shifted left to stay inside ``[-1, 1]``.
    """
    if eps < scaled_delta(n, field.grid.delta) * (1 - 1e-9):
        raise ConfigError("eps is below the scaled grid spacing")
    if eps > 2:
        raise DomainError("eps must not exceed the length of [-1, 1]")
    lo, _, _ = snap_offset(field, n, -1.0, 0.0)
    top, _, _ = snap_offset(field, n, 1.0, 0.0)
    c, _, _ = snap_offset(field, n, z, 1.0)
    d, _, _ = snap_offset(field, n, z + eps, 1.0)
    if not domain_ok(n, 1.0, z):
        raise DomainError("need z - 1 >= -n^(1/3)/2 so every start in [-1, 1] reaches z")
    barrier = _geodesic_idx(field, n, top, d, LEFTMOST, cache)

    def free(a: int) -> bool:
        return not intersects(_geodesic_idx(field, n, a, c, RIGHTMOST, cache), barrier)

    if not free(lo):
        return None
    if exhaustive:
        best = lo
        for a in range(lo + 1, top):
            if free(a):
                best = a
    else:
        good, bad = lo, top
        while bad - good > 1:
            mid = (good + bad) // 2
            if free(mid):
                good = mid
            else:
                bad = mid
        best = good
    w = 2.0 * n ** (2.0 / 3.0)
    if best >= top - 1:
        I = (1.0 - eps, 1.0)
    else:
        u = field.grid.coord(best) / w
        I = (u, u + eps) if u + eps <= 1.0 else (1.0 - eps, 1.0)
    if not disjoint_pair(field, n, I, (z, z + eps), cache):
        raise ModelConsistencyError(f"drag interval {I} for z={z} carries no disjoint pair")
    return I


def mesh_starts(eps: float) -> np.ndarray:
    """``u`` in ``[-1, 1 - 2 eps]`` that are integer multiples of ``eps``."""
    k_lo = math.ceil(-1.0 / eps - 1e-9)
    k_hi = math.floor((1.0 - 2.0 * eps) / eps + 1e-9)
    return np.arange(k_lo, k_hi + 1) * eps


def mdp_search(field: BrownianField, n: int, z: float, eps: float, cache: GeodesicCache | None = None):
    """Smallest ``u`` in ``[-1, 1-2eps]`` on the ``eps`` mesh with a disjoint pair from
    ``[u, u + 2 eps]`` to ``[z, z + eps]``; ``None`` if there is none."""
    for u in mesh_starts(eps):
        if disjoint_pair(field, n, (u, u + 2 * eps), (z, z + eps), cache):
            return float(u)
    return None
