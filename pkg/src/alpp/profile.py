"""Weight profiles, the difference profile ``Z_n`` and local-variation meshes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from ._parallel import map_seeds
from .env import BrownianField
from .errors import ConfigError, DomainError, ModelConsistencyError
from .lpp import SweepTable
from .scale import (
    check_resolution, default_delta, domain_ok, parabola, sample_scaled_field, scaled_x, snap_offset, width,
)

NONDEGENERACY_FACTOR = 4.0 * (math.sqrt(2.0) - 1.0)


@dataclass(frozen=True, eq=False)
class DiffProfile:
    """Samples of ``z -> Z_n(z) = W_n(x_r, z) - W_n(x_l, z)`` on ``zgrid``."""

    n: int
    zgrid: np.ndarray
    values: np.ndarray
    tol: float
    starts: tuple[float, float] = (-1.0, 1.0)
    residuals: np.ndarray | None = dc_field(default=None, repr=False)

    def at(self, z: float) -> float:
        """Value at a zgrid point."""
        i = int(np.argmin(np.abs(self.zgrid - z)))
        if abs(self.zgrid[i] - z) > 1e-9 * max(1.0, abs(z)):
            raise DomainError(f"{z} is not a zgrid point")
        return float(self.values[i])

    def monotonicity_violations(self) -> np.ndarray:
        """Indices ``i`` with ``Z(z_{i+1}) - Z(z_i) < -tol``."""
        return np.flatnonzero(np.diff(self.values) < -self.tol)


@dataclass(frozen=True, eq=False)
class MeshReport:
    """Mesh intervals ``[u, u + eps]``, ``u`` in ``eps Z``, meeting ``[-M, M]``, on which
    the profile is not constant."""

    eps: float
    M: float
    marked: np.ndarray
    total: int

    @property
    def count(self) -> int:
        return int(self.marked.size)


def uniform_zgrid(M: float, step: float) -> np.ndarray:
    """``k * step`` for all integers ``k`` with ``|k * step| <= M``."""
    k = math.floor(M / step + 1e-9)
    return np.arange(-k, k + 1) * step


def boundary(n: int, starts=(-1.0, 1.0)) -> float:
    """Smallest ``z`` at which both weights are defined."""
    return max(starts) - 0.5 * n ** (1.0 / 3.0)


def diff_profile(field: BrownianField, n: int, zgrid, tol: float | None = None,
                 starts=(-1.0, 1.0), check: bool = True) -> DiffProfile:
    """Difference weight profile from two DP sweeps, one per start.

    Below the domain boundary ``max(starts) - n^{1/3}/2`` the profile is extended
    by its value at the boundary.  With ``check``, a decrease larger than ``tol``
    raises :class:`ModelConsistencyError` (the prelimit inequality is exact).
    """
    zgrid = np.asarray(zgrid, dtype=float)
    if zgrid.ndim != 1 or zgrid.size == 0 or np.any(np.diff(zgrid) <= 0):
        raise DomainError("zgrid must be a non-empty increasing sequence")
    x_l, x_r = starts
    zb = boundary(n, starts)
    zq = np.maximum(zgrid, zb)
    ends, res = [], []
    for z in zq:
        e, _, r = snap_offset(field, n, float(z), 1.0)
        ends.append(e)
        res.append(r)
    ends = np.asarray(ends)
    hi = int(ends.max())
    weights = []
    for x in (x_l, x_r):
        a, _, _ = snap_offset(field, n, x, 0.0)
        if ends.min() < a:
            raise DomainError(f"zgrid reaches left of the start {x}")
        table = SweepTable(field, (field.grid.coord(a), 0), n, hi=hi)
        xs = scaled_x(field, n, a, 0)
        ys = (field.grid.coord(ends) - n) / width(n)
        m = table.values[ends - a]
        weights.append((m - 2.0 * n - width(n) * (ys - xs)) / (math.sqrt(2.0) * n ** (1.0 / 3.0)))
    values = weights[1] - weights[0]
    if tol is None:
        tol = 1e-9 * (1.0 + float(np.max(np.abs(values))))
    p = DiffProfile(n, zgrid, values, tol, (x_l, x_r), np.asarray(res))
    if check:
        bad = p.monotonicity_violations()
        if bad.size:
            i = int(bad[0])
            raise ModelConsistencyError(
                f"Z_n decreases by {values[i] - values[i + 1]:.3e} > tol={tol:.3e} between "
                f"z={zgrid[i]:.6g} and z={zgrid[i + 1]:.6g} ({bad.size} violations)"
            )
    return p


def mesh_indices(eps: float, M: float) -> np.ndarray:
    """Integers ``k`` such that ``[k eps, (k+1) eps]`` overlaps ``[-M, M]`` in positive length."""
    k_lo = math.floor(-M / eps - 1.0 + 1e-9) + 1
    k_hi = math.ceil(M / eps - 1e-9) - 1
    return np.arange(k_lo, k_hi + 1)


def lv_mesh(p: DiffProfile, eps: float, M: float) -> MeshReport:
    """Mark the mesh intervals on which the oscillation of ``p`` exceeds ``p.tol``."""
    z = p.zgrid
    h = float(np.min(np.diff(z))) if z.size > 1 else math.inf
    if not eps >= 2.0 * h * (1 - 1e-9):
        raise ConfigError(f"eps={eps} is below twice the zgrid spacing {h}")
    ks = mesh_indices(eps, M)
    slack = 1e-9 * max(1.0, M)
    lo_u, hi_u = ks[0] * eps, (ks[-1] + 1) * eps
    if z[0] > lo_u + slack or z[-1] < hi_u - slack:
        raise ConfigError(f"zgrid [{z[0]}, {z[-1]}] does not cover the mesh [{lo_u}, {hi_u}]")
    left = np.searchsorted(z, ks * eps - slack, side="left")
    right = np.searchsorted(z, (ks + 1) * eps + slack, side="right")
    osc = np.array([np.ptp(p.values[l:r]) if r > l else 0.0 for l, r in zip(left, right)])
    marked = ks[osc > p.tol] * eps
    return MeshReport(eps, M, marked, int(ks.size))


@dataclass(frozen=True, eq=False)
class OscillationStats:
    """Per-sample oscillation of the (parabolically adjusted) weight profile over ``[y, y + eps]``."""

    n: int
    x: float
    y: float
    eps: np.ndarray
    osc: np.ndarray  # shape (samples, len(eps))
    seeds: np.ndarray
    in_regime: np.ndarray  # eps in (0, 2^-4]
    parabolic: bool = True

    @property
    def max_osc(self) -> np.ndarray:
        return self.osc.max(axis=0)

    @property
    def mean_osc(self) -> np.ndarray:
        return self.osc.mean(axis=0)

    def freq_exceed(self, alpha: float) -> np.ndarray:
        """Fraction of samples whose oscillation exceeds ``eps ** alpha``."""
        return np.mean(self.osc > self.eps ** alpha, axis=0)

    def freq_exceed_se(self, alpha: float) -> np.ndarray:
        f = self.freq_exceed(alpha)
        return np.sqrt(f * (1 - f) / self.osc.shape[0])


def oscillation_stats(n: int, x: float, y: float, eps, seeds, delta: float | None = None,
                      stream_id: int = 0, parabolic: bool = True, threads: int = 1) -> OscillationStats:
    """Sample ``sup |W_n(x,v2) + Q(v2-x) - W_n(x,v1) - Q(v1-x)|`` over ``v1, v2 in [y, y+eps]``.

    The supremum runs over every grid point in the window, i.e. at the finest
    available resolution.  Several ``eps`` are evaluated on the same fields.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if np.any(eps <= 0):
        raise DomainError("eps must be positive")
    if not domain_ok(n, x, y):
        raise DomainError("need y - x >= -n^(1/3)/2")
    delta = default_delta(n) if delta is None else delta
    check_resolution(n, delta)
    e_max = float(eps.max())
    w = width(n)

    def one(seed):
        field = sample_scaled_field(n, delta, [x], [y, y + e_max], seed, stream_id)
        a, _, _ = snap_offset(field, n, x, 0.0)
        e0, _, _ = snap_offset(field, n, y, 1.0)
        e1, _, _ = snap_offset(field, n, y + e_max, 1.0)
        table = SweepTable(field, (field.grid.coord(a), 0), n, hi=e1)
        xs = scaled_x(field, n, a, 0)
        ys = (field.grid.coord(np.arange(e0, e1 + 1)) - n) / w
        wt = (table.values[e0 - a:] - 2.0 * n - w * (ys - xs)) / (math.sqrt(2.0) * n ** (1.0 / 3.0))
        if parabolic:
            wt = wt + parabola(ys - xs)
        out = np.empty(eps.size)
        for i, e in enumerate(eps):
            sel = ys <= ys[0] + e + 1e-12
            out[i] = np.ptp(wt[sel])
        return out

    seeds = list(seeds)
    osc = np.array(map_seeds(one, seeds, threads)).reshape(len(seeds), eps.size)
    return OscillationStats(n, x, y, eps, osc, np.asarray(seeds), eps <= 2.0 ** -4, parabolic)


@dataclass(frozen=True)
class NondegeneracyResult:
    M: np.ndarray
    freq: np.ndarray
    half_width: np.ndarray  # 95% normal-approximation half width
    increments: np.ndarray  # Z_n(M) - Z_n(-M), shape (samples, len(M))

    @property
    def threshold(self) -> np.ndarray:
        return NONDEGENERACY_FACTOR * self.M


def nondegeneracy_check(n: int, M, seeds, delta: float | None = None, stream_id: int = 0,
                        starts=(-1.0, 1.0), threads: int = 1) -> NondegeneracyResult:
    """Frequency of ``Z_n(M) - Z_n(-M) >= 4 (2^{1/2} - 1) M`` over independent fields."""
    Ms = np.atleast_1d(np.asarray(M, dtype=float))
    if np.any(Ms <= 0):
        raise DomainError("M must be positive")
    delta = default_delta(n) if delta is None else delta
    check_resolution(n, delta)
    zs = np.unique(np.concatenate([-Ms, Ms]))
    m_max = float(Ms.max())

    def one(seed):
        field = sample_scaled_field(n, delta, list(starts), [-m_max, m_max], seed, stream_id)
        p = diff_profile(field, n, zs, starts=starts)
        lookup = dict(zip(zs.tolist(), p.values.tolist()))
        return [lookup[float(m)] - lookup[float(-m)] for m in Ms]

    seeds = list(seeds)
    inc = np.array(map_seeds(one, seeds, threads)).reshape(len(seeds), Ms.size)
    hits = inc >= NONDEGENERACY_FACTOR * Ms
    freq = hits.mean(axis=0)
    hw = 1.96 * np.sqrt(freq * (1 - freq) / len(seeds))
    return NondegeneracyResult(Ms, freq, hw, inc)
