"""Box-counting dimension of local-variation sets, plus synthetic calibration profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .profile import DiffProfile, MeshReport, lv_mesh

DEFAULT_LADDER = tuple(2.0 ** -k for k in range(2, 8))


@dataclass(frozen=True, eq=False)
class DimensionReport:
    """Fit of ``N(eps) ~ eps^{-slope}``.

    ``counts`` are seed-averaged; ``per_seed`` has shape ``(seeds, len(eps_list))``.
    An empty report (every count zero) has ``empty=True`` and NaN slope: the
    dimension of the empty set is left undefined rather than reported as 0.
    """

    eps_list: np.ndarray
    counts: np.ndarray
    per_seed: np.ndarray
    slope: float
    intercept: float
    r2: float
    ci: tuple[float, float]
    used: np.ndarray
    empty: bool = False

    @property
    def dimension(self) -> float | None:
        return None if self.empty else self.slope


def _fit(log_inv_eps, counts, mask):
    x = log_inv_eps[mask]
    y = np.log(counts[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def _as_matrix(reports) -> tuple[np.ndarray, np.ndarray]:
    """``reports`` is one sequence of MeshReports or a sequence of them per seed."""
    if reports and isinstance(reports[0], MeshReport):
        reports = [reports]
    if not reports:
        raise DomainError("no mesh reports given")
    eps = np.array([r.eps for r in reports[0]])
    for rs in reports:
        if not np.allclose([r.eps for r in rs], eps, rtol=1e-12, atol=0):
            raise DomainError("every seed must use the same eps ladder")
    counts = np.array([[r.count for r in rs] for rs in reports], dtype=float)
    order = np.argsort(-eps)
    return eps[order], counts[:, order]


def boxcount_dimension(reports, n_boot: int = 1000, seed: int = 0, min_count: int = 5) -> DimensionReport:
    """Least-squares slope of ``log N`` against ``log(1/eps)`` with a per-seed bootstrap CI.

    Scales whose seed-averaged count is below ``min_count`` are excluded from the
    fit; if fewer than two scales survive, every nonzero scale is used.
    """
    eps, per_seed = _as_matrix(list(reports))
    if np.any(np.diff(eps) >= 0):
        raise DomainError("eps ladder must be strictly decreasing without repeats")
    counts = per_seed.mean(axis=0)
    nan = float("nan")
    if not np.any(counts > 0):
        return DimensionReport(eps, counts, per_seed, nan, nan, nan, (nan, nan), np.zeros(eps.size, bool), True)
    nonzero = counts > 0
    if nonzero.sum() < 3:
        raise DomainError(f"need at least 3 scales with nonzero counts, got {int(nonzero.sum())}")
    used = counts >= min_count
    if used.sum() < 2:
        used = nonzero
    lx = np.log(1.0 / eps)
    slope, intercept, r2 = _fit(lx, counts, used)

    n_seeds = per_seed.shape[0]
    if n_seeds > 1 and n_boot > 0:
        rng = np.random.default_rng(seed)
        boots = []
        for _ in range(n_boot):
            c = per_seed[rng.integers(0, n_seeds, n_seeds)].mean(axis=0)
            if np.all(c[used] > 0):
                boots.append(_fit(lx, c, used)[0])
        lo, hi = np.percentile(boots, [2.5, 97.5]) if boots else (nan, nan)
        ci = (float(lo), float(hi))
    else:
        ci = (slope, slope)
    return DimensionReport(eps, counts, per_seed, slope, intercept, r2, ci, used)


def content_upper(report, d: float) -> float:
    """Cover sum ``sum_marked eps^d`` at the finest mesh (seed-averaged)."""
    if not d > 0:
        raise DomainError("d must be positive")
    if isinstance(report, MeshReport):
        return report.count * report.eps ** d
    if report.empty:
        return 0.0
    i = int(np.argmin(report.eps_list))
    return float(report.counts[i] * report.eps_list[i] ** d)


def mesh_reports(p: DiffProfile, eps_list: Sequence[float], M: float) -> list[MeshReport]:
    return [lv_mesh(p, e, M) for e in sorted(eps_list, reverse=True)]


# --- synthetic fixtures -------------------------------------------------------

def cantor_function(z, ratio: float = 1.0 / 3.0, depth: int = 12) -> np.ndarray:
    """Devil's staircase of the two-piece Cantor set with contraction ``ratio`` on ``[0, 1]``.

    Constant 0 left of 0 and 1 right of 1.  The recursion is truncated after
    ``depth`` levels, below which the function is linear on the surviving pieces.
    The set has dimension ``log 2 / log(1/ratio)``.
    """
    if not 0 < ratio < 0.5:
        raise DomainError("ratio must lie in (0, 1/2)")
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    out = np.zeros_like(z)
    scale = np.ones_like(z)
    x = z.copy()
    for _ in range(depth):
        left = x <= ratio
        right = x >= 1.0 - ratio
        mid = ~(left | right)
        scale *= 0.5
        out[mid] += scale[mid]
        x = np.where(left, x / ratio, np.where(right, (x - 1.0 + ratio) / ratio, 0.0))
        out[right] += scale[right]
        # points in a gap are finished: freeze them by zeroing their scale
        scale[mid] = 0.0
    return out + scale * x


def synthetic_profile(kind: str, zgrid, ratio: float = 1.0 / 3.0, depth: int = 12,
                      tol: float = 1e-12) -> DiffProfile:
    """Profile with a known local-variation set: ``constant``, ``linear`` or ``cantor``.

    Synthetic profiles carry ``n = 0``.
    """
    zgrid = np.asarray(zgrid, dtype=float)
    if kind == "constant":
        v = np.zeros_like(zgrid)
    elif kind == "linear":
        v = zgrid.copy()
    elif kind == "cantor":
        v = cantor_function(zgrid, ratio, depth)
    else:
        raise DomainError(f"unknown synthetic profile {kind!r}")
    return DiffProfile(0, zgrid, v, tol, (0.0, 0.0))
