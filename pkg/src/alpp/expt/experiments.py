"""The named experiments.  Each ``run_*`` is a pure function of its config."""
from __future__ import annotations

import math
import platform
import time
from dataclasses import dataclass, field as dc_field

import numba
import numpy as np
from scipy import stats

from .. import __version__
from .._parallel import map_seeds
from ..env import GridSpec, sample_field
from ..errors import ConfigError
from ..fractal import boxcount_dimension, content_upper, mesh_reports, synthetic_profile
from ..geometry import GeodesicCache, disjoint_pair
from ..lpp import SweepTable
from ..profile import diff_profile, mesh_indices, nondegeneracy_check, oscillation_stats, uniform_zgrid
from ..scale import sample_scaled_field, width
from .config import ExperimentConfig
from .gue import gue_top

RNG_DESCRIPTION = "numpy SFC64 seeded by SeedSequence(seed, spawn_key=(stream_id, line, side))"

# one random stream per experiment family
STREAMS = dict(figure2=0, twcheck=0, exponent=1, shear_target=2, shear_reference=3, average=4,
               regularity=5, nondegen=6, dimension=7)


@dataclass
class ExperimentResult:
    config: dict
    columns: list[str]
    records: list[dict]
    summary: dict
    provenance: dict
    tables: dict = dc_field(default_factory=dict)  # name -> (columns, rows)


def _provenance(cfg: ExperimentConfig, t0: float, streams) -> dict:
    return {
        "package_version": __version__,
        "numpy": np.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
        "rng": RNG_DESCRIPTION,
        "streams": streams,
        "seeds": list(cfg.seeds),
        "threads": cfg.threads,
        "wall_seconds": time.perf_counter() - t0,
    }


def _binom_se(p: np.ndarray, n: int) -> np.ndarray:
    return np.sqrt(p * (1 - p) / n)


def _non_increasing(p, se, k: float = 2.0) -> bool:
    """Each value is at most the previous one plus ``k`` combined standard errors."""
    return all(p[i + 1] <= p[i] + k * math.hypot(se[i], se[i + 1]) for i in range(len(p) - 1))


# --- figure 2 -----------------------------------------------------------------

def run_figure2(cfg: ExperimentConfig) -> ExperimentResult:
    """Energy difference of geodesics ``(-+n^{2/3}, 0) -> (z, n)`` against ``z``, plus ``Z_n``.

    ``energy_diff`` is the right-start energy minus the left-start energy, which is
    non-decreasing in ``z``.
    """
    t0 = time.perf_counter()
    n, delta, M = cfg.n, cfg.resolved_delta, cfg.M
    zs = uniform_zgrid(M, cfg.resolved_zstep)
    w = width(n)
    half = n ** (2.0 / 3.0)

    def one(seed):
        field = sample_scaled_field(n, delta, [-1.0, 1.0], [-M, M], seed, STREAMS["figure2"])
        prof = diff_profile(field, n, zs)
        g = field.grid
        a_l, _ = g.nearest(-half)
        a_r, _ = g.nearest(half)
        ends = np.array([g.nearest(n + w * z)[0] for z in zs])
        keep = ends >= a_r
        ends = ends[keep]
        hi = int(ends.max())
        t_l = SweepTable(field, (g.coord(a_l), 0), n, hi=hi)
        t_r = SweepTable(field, (g.coord(a_r), 0), n, hi=hi)
        diff = t_r.values[ends - a_r] - t_l.values[ends - a_l]
        fig = [dict(seed=seed, z=float(g.coord(e)), energy_diff=float(d)) for e, d in zip(ends, diff)]
        prof_rows = [dict(seed=seed, z=float(z), Z=float(v)) for z, v in zip(zs, prof.values)]
        stats_ = dict(seed=seed, steps=int(np.sum(np.diff(prof.values) > prof.tol)),
                      fig_violations=int(np.sum(np.diff(diff) < -1e-9 * (1 + np.max(np.abs(diff))))),
                      profile_violations=int(prof.monotonicity_violations().size),
                      Z_range=float(prof.values[-1] - prof.values[0]))
        return fig, prof_rows, stats_

    out = map_seeds(one, cfg.seed_list, cfg.threads)
    records = [r for fig, _, _ in out for r in fig]
    prof_rows = [r for _, p, _ in out for r in p]
    per_seed = [s for _, _, s in out]
    summary = {
        "monotone": all(s["fig_violations"] == 0 and s["profile_violations"] == 0 for s in per_seed),
        "per_seed": per_seed,
        "start_offset_unscaled": half,
    }
    return ExperimentResult(cfg.as_dict(), ["seed", "z", "energy_diff"], records, summary,
                            _provenance(cfg, t0, {"field": STREAMS["figure2"]}),
                            {"profile": (["seed", "z", "Z"], prof_rows)})


# --- Tracy-Widom check --------------------------------------------------------

def ks_critical(n1: int, n2: int, level: float = 0.01) -> float:
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    return math.sqrt(-0.5 * math.log(level / 2.0)) * math.sqrt((n1 + n2) / (n1 * n2))


def dp_point_to_point(n: int, delta: float, seed: int, stream_id: int = 0) -> float:
    """``M_{(0,0) -> (n,n)}`` on a grid of spacing ``delta`` (end snapped to the grid)."""
    grid = GridSpec.covering(0.0, float(n), delta)
    field = sample_field(n + 1, grid, seed, stream_id)
    e, _ = grid.nearest(float(n))
    return SweepTable(field, (0.0, 0), n, hi=e).value_at(e)


def scaled_energy(n: int, m) -> np.ndarray:
    return (np.asarray(m) - 2.0 * n) / (math.sqrt(2.0) * n ** (1.0 / 3.0))


def run_twcheck(cfg: ExperimentConfig) -> ExperimentResult:
    """DP maximal energies against top GUE eigenvalues, both centred and scaled as ``W_n``."""
    t0 = time.perf_counter()
    n, delta = cfg.n, cfg.resolved_delta

    def one(seed):
        return dp_point_to_point(n, delta, seed, STREAMS["twcheck"]), gue_top(n + 1, float(n), seed)

    pairs = map_seeds(one, cfg.seed_list, cfg.threads)
    m_dp = np.array([p[0] for p in pairs])
    lam = np.array([p[1] for p in pairs])
    w_dp, w_gue = scaled_energy(n, m_dp), scaled_energy(n, lam)
    ks = stats.ks_2samp(w_dp, w_gue)
    crit = ks_critical(w_dp.size, w_gue.size, 0.01)
    records = [dict(seed=s, M_dp=float(a), lambda_gue=float(b), W_dp=float(c), W_gue=float(d))
               for s, a, b, c, d in zip(cfg.seed_list, m_dp, lam, w_dp, w_gue)]

    def moments(x):
        return {"mean": float(x.mean()), "var": float(x.var(ddof=1)), "skew": float(stats.skew(x)),
                "mean_se": float(x.std(ddof=1) / math.sqrt(x.size))}

    summary = {
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "ks_critical_1pct": crit,
        "reject_1pct": bool(ks.statistic > crit),
        "dp": moments(w_dp),
        "gue": moments(w_gue),
    }
    return ExperimentResult(cfg.as_dict(), ["seed", "M_dp", "lambda_gue", "W_dp", "W_gue"], records, summary,
                            _provenance(cfg, t0, {"field": STREAMS["twcheck"], "gue": "GUE_STREAM"}))


# --- disjoint-pair exponent -----------------------------------------------------

def fit_power(eps, p) -> tuple[float, float]:
    """Least-squares ``(exponent, intercept)`` in ``log p = intercept - exponent * log(1/eps)``,
    i.e. ``p ~ eps^exponent``."""
    slope, intercept = np.polyfit(np.log(1.0 / np.asarray(eps)), np.log(np.asarray(p)), 1)
    return float(-slope), float(intercept)


def exponent_hits(n: int, delta: float, eps_desc, seed: int, stream_id: int) -> list[bool]:
    """Indicators of ``MaxDisjtPoly_n([0,2e],[0,2e]) >= 2`` for decreasing ``e``.

    The event shrinks with ``e`` (intervals are nested), so after the first miss the
    remaining scales are misses as well.
    """
    e_max = eps_desc[0]
    field = sample_scaled_field(n, delta, [0.0, 2 * e_max], [0.0, 2 * e_max], seed, stream_id)
    cache = GeodesicCache(field, n)
    out, alive = [], True
    for e in eps_desc:
        alive = alive and disjoint_pair(field, n, (0.0, 2 * e), (0.0, 2 * e), cache)
        out.append(alive)
    return out


def averaged_sum(n: int, delta: float, eps: float, K: float, seed: int, stream_id: int) -> int:
    """Number of pairs ``(I, J)`` in ``I(1,eps) x I(K,eps)`` carrying two disjoint polymers."""
    us = mesh_indices(eps, 1.0) * eps
    vs = mesh_indices(eps, K) * eps
    field = sample_scaled_field(n, delta, [us[0], us[-1] + eps], [vs[0], vs[-1] + eps], seed, stream_id)
    cache = GeodesicCache(field, n)
    hits = 0
    for u in us:
        for v in vs:
            if v + eps - u < -0.5 * n ** (1.0 / 3.0) or v - (u + eps) < -0.5 * n ** (1.0 / 3.0):
                continue
            hits += disjoint_pair(field, n, (u, u + eps), (v, v + eps), cache)
    return hits


def run_exponent(cfg: ExperimentConfig) -> ExperimentResult:
    """Monte Carlo ``P(MaxDisjtPoly_n([0,2e],[0,2e]) >= 2)`` per ``e`` and its log-log slope."""
    t0 = time.perf_counter()
    n, delta = cfg.n, cfg.resolved_delta
    eps = np.array(sorted(cfg.eps, reverse=True))
    if 2 * eps.min() < 4 * cfg.scaled_delta:
        raise ConfigError("interval length 2 eps is below the grid resolution")
    hits = np.array(map_seeds(lambda s: exponent_hits(n, delta, list(eps), s, STREAMS["exponent"]),
                              cfg.seed_list, cfg.threads), dtype=bool)
    trials = hits.shape[0]
    p = hits.mean(axis=0)
    se = _binom_se(p, trials)
    use = p > 0
    dropped = [float(e) for e in eps[~use]]
    summary = {"eps": eps.tolist(), "p": p.tolist(), "se": se.tolist(), "hits": hits.sum(axis=0).tolist(),
               "trials": trials, "dropped_zero_hit_eps": dropped,
               "non_increasing": _non_increasing(p, se)}
    if use.sum() >= 2:
        expo, icpt = fit_power(eps[use], p[use])
        rng = np.random.default_rng(cfg.seeds[0])
        boots = []
        for _ in range(cfg.n_boot):
            pb = hits[rng.integers(0, trials, trials)].mean(axis=0)[use]
            if np.all(pb > 0):
                boots.append(fit_power(eps[use], pb)[0])
        ci = [float(v) for v in np.percentile(boots, [2.5, 97.5])] if boots else [float("nan")] * 2
        summary.update(exponent=expo, intercept=icpt, ci=ci, target=1.5)
    else:
        summary.update(exponent=float("nan"), ci=[float("nan")] * 2, target=1.5)
    if cfg.avg_trials > 0:
        e = float(eps[0])
        base = cfg.seeds[0]
        counts = map_seeds(lambda s: averaged_sum(n, delta, e, cfg.K, s, STREAMS["average"]),
                           range(base, base + cfg.avg_trials), cfg.threads)
        avg = e * e * float(np.mean(counts))
        summary["averaged_sum"] = {"eps": e, "K": cfg.K, "trials": cfg.avg_trials, "value": avg,
                                   "lower_bound": 2.0 ** -3 * e ** (1.5 + cfg.eta),
                                   "pairs": int(mesh_indices(e, 1.0).size * mesh_indices(e, cfg.K).size)}
    records = [dict(seed=s, eps=float(e), hit=bool(h)) for s, row in zip(cfg.seed_list, hits)
               for e, h in zip(eps, row)]
    return ExperimentResult(cfg.as_dict(), ["seed", "eps", "hit"], records, summary,
                            _provenance(cfg, t0, {"field": STREAMS["exponent"], "average": STREAMS["average"]}))


# --- shear invariance -----------------------------------------------------------

def sheared_eps(n: int, eps: float, x: float, y: float) -> float:
    """Interval length ``eps'`` for which ``[0,eps'] -> [0,eps']`` has the law of
    ``[x,x+eps] -> [y,y+eps]``.

    Rescaling the horizontal axis by ``a = 1 + 2 n^{-1/3} (y - x)`` maps the second
    journey onto the first up to a variance change, which leaves geodesic geometry
    unchanged in law.
    """
    a = 1.0 + 2.0 * n ** (-1.0 / 3.0) * (y - x)
    if a <= 0:
        raise ConfigError("need y - x > -n^(1/3)/2")
    return eps / a


def run_shear(cfg: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    n, delta = cfg.n, cfg.resolved_delta
    e, x, y = float(cfg.eps[0]), cfg.x, cfg.y
    e2 = sheared_eps(n, e, x, y)

    def one(seed):
        f1 = sample_scaled_field(n, delta, [x, x + e], [y, y + e], seed, STREAMS["shear_target"])
        a = disjoint_pair(f1, n, (x, x + e), (y, y + e))
        top = max(e, e2)
        f2 = sample_scaled_field(n, delta, [0.0, top], [0.0, top], seed, STREAMS["shear_reference"])
        c = GeodesicCache(f2, n)
        b = disjoint_pair(f2, n, (0.0, e2), (0.0, e2), c)
        u = disjoint_pair(f2, n, (0.0, e), (0.0, e), c)
        return a, b, u

    res = np.array(map_seeds(one, cfg.seed_list, cfg.threads), dtype=bool)
    N = res.shape[0]
    p = res.mean(axis=0)
    se = _binom_se(p, N)
    diff = p[0] - p[1]
    comb = math.hypot(se[0], se[1])
    summary = {"eps": e, "eps_prime": e2, "x": x, "y": y, "trials": N,
               "p_target": p[0], "p_reference": p[1], "p_unadjusted": p[2],
               "se_target": se[0], "se_reference": se[1], "se_unadjusted": se[2],
               "difference": diff, "combined_se": comb, "agree_2se": bool(abs(diff) <= 2 * comb)}
    records = [dict(seed=s, target=bool(r[0]), reference=bool(r[1]), unadjusted=bool(r[2]))
               for s, r in zip(cfg.seed_list, res)]
    return ExperimentResult(cfg.as_dict(), ["seed", "target", "reference", "unadjusted"], records, summary,
                            _provenance(cfg, t0, {"target": STREAMS["shear_target"],
                                                  "reference": STREAMS["shear_reference"]}))


# --- modulus of continuity ------------------------------------------------------

def run_regularity(cfg: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    eps = np.array(sorted(cfg.eps, reverse=True))
    st = oscillation_stats(cfg.n, cfg.x, cfg.y, eps, cfg.seed_list, cfg.resolved_delta,
                           STREAMS["regularity"], parabolic=True, threads=cfg.threads)
    f = st.freq_exceed(cfg.alpha)
    se = st.freq_exceed_se(cfg.alpha)
    summary = {
        "eps": eps.tolist(), "alpha": cfg.alpha, "freq_exceed": f.tolist(), "se": se.tolist(),
        "max_osc": st.max_osc.tolist(), "mean_osc": st.mean_osc.tolist(),
        "non_increasing": _non_increasing(f, se),
        "regime": {"eps_le_2^-4": st.in_regime.tolist(), "alpha_in_(0,1/2)": 0 < cfg.alpha < 0.5,
                   "n_and_|x-y|_bounds": "unverifiable: constants c, C are not specified"},
    }
    records = [dict(seed=s, eps=float(e), osc=float(o)) for s, row in zip(st.seeds, st.osc)
               for e, o in zip(eps, row)]
    return ExperimentResult(cfg.as_dict(), ["seed", "eps", "osc"], records, summary,
                            _provenance(cfg, t0, {"field": STREAMS["regularity"]}))


# --- non-degeneracy ---------------------------------------------------------------

def run_nondegen(cfg: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    r = nondegeneracy_check(cfg.n, cfg.mlist, cfg.seed_list, cfg.resolved_delta, STREAMS["nondegen"],
                            threads=cfg.threads)
    summary = {"M": r.M.tolist(), "threshold": r.threshold.tolist(), "freq": r.freq.tolist(),
               "half_width_95": r.half_width.tolist(),
               "increasing_in_M": bool(np.all(np.diff(r.freq) >= -(r.half_width[1:] + r.half_width[:-1]))),
               "min_increment": float(r.increments.min())}
    records = [dict(seed=s, M=float(m), increment=float(v), hit=bool(v >= t))
               for s, row in zip(cfg.seed_list, r.increments) for m, v, t in zip(r.M, row, r.threshold)]
    return ExperimentResult(cfg.as_dict(), ["seed", "M", "increment", "hit"], records, summary,
                            _provenance(cfg, t0, {"field": STREAMS["nondegen"]}))


# --- dimension --------------------------------------------------------------------

_SYNTHETIC = {"constant": ("constant", 1 / 3), "linear": ("linear", 1 / 3), "cantor": ("cantor", 1 / 3),
              "cantor4": ("cantor", 1 / 4)}


def run_dimension(cfg: ExperimentConfig) -> ExperimentResult:
    """Mesh counts of ``LV(Z_n)`` per seed and the box-counting slope."""
    t0 = time.perf_counter()
    eps = sorted(cfg.eps, reverse=True)
    M = cfg.M
    reach = M + max(eps)
    zs = uniform_zgrid(reach, cfg.resolved_zstep)

    if cfg.synthetic != "none":
        kind, ratio = _SYNTHETIC[cfg.synthetic]
        prof = synthetic_profile(kind, zs, ratio=ratio)
        reports = [mesh_reports(prof, eps, M)]
        seeds = [cfg.seeds[0]]
    else:
        def one(seed):
            field = sample_scaled_field(cfg.n, cfg.resolved_delta, [-1.0, 1.0], [-reach, reach], seed,
                                        STREAMS["dimension"])
            return mesh_reports(diff_profile(field, cfg.n, zs), eps, M)

        seeds = cfg.seed_list
        reports = map_seeds(one, seeds, cfg.threads)
    rep = boxcount_dimension(reports, n_boot=cfg.n_boot, seed=cfg.seeds[0])
    summary = {
        "eps": rep.eps_list.tolist(), "mean_counts": rep.counts.tolist(), "slope": rep.slope,
        "ci": list(rep.ci), "r2": rep.r2, "empty": rep.empty, "used_in_fit": rep.used.tolist(),
        "content_d0.7": [float(c * e ** 0.7) for c, e in zip(rep.counts, rep.eps_list)],
        "content_upper_d0.7": content_upper(rep, 0.7),
        "synthetic": cfg.synthetic,
    }
    records = [dict(seed=s, eps=float(r.eps), count=r.count) for s, rs in zip(seeds, reports) for r in rs]
    return ExperimentResult(cfg.as_dict(), ["seed", "eps", "count"], records, summary,
                            _provenance(cfg, t0, {"field": STREAMS["dimension"]}))


RUNNERS = {
    "figure2": run_figure2, "twcheck": run_twcheck, "exponent": run_exponent, "shear": run_shear,
    "regularity": run_regularity, "nondegen": run_nondegen, "dimension": run_dimension,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.command](cfg)
