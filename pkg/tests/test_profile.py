import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alpp.errors import ConfigError, DomainError, ModelConsistencyError
from alpp.fractal import synthetic_profile
from alpp.geometry import GeodesicCache, _geodesic_idx, intersects
from alpp.lpp import LEFTMOST, RIGHTMOST
from alpp.profile import (
    NONDEGENERACY_FACTOR, DiffProfile, boundary, diff_profile, lv_mesh, mesh_indices, nondegeneracy_check,
    oscillation_stats, uniform_zgrid,
)
from alpp.scale import sample_scaled_field, snap_offset, weight

from oracles import boxcount_line


def make(n, seed, M=1.0):
    return sample_scaled_field(n, n ** (-1 / 3), [-1.0, 1.0], [-M, M], seed)


def test_matches_pointwise_weights():
    n = 64
    f = make(n, 1)
    zs = uniform_zgrid(1.0, 0.125)
    p = diff_profile(f, n, zs)
    for z, v in zip(zs, p.values):
        ref = weight(f, n, 1.0, float(z)).weight - weight(f, n, -1.0, float(z)).weight
        assert v == pytest.approx(ref, abs=1e-9)
    assert p.at(0.25) == pytest.approx(p.values[10])
    with pytest.raises(DomainError):
        p.at(0.3)


@pytest.mark.parametrize("seed", range(8))
def test_monotone(seed):
    n = 125
    p = diff_profile(make(n, seed, 2.0), n, uniform_zgrid(2.0, 0.01))
    assert p.monotonicity_violations().size == 0
    assert np.all(np.diff(p.values) >= -p.tol)


def test_equal_starts_give_zero():
    n = 64
    f = sample_scaled_field(n, n ** (-1 / 3), [0.5], [-1.0, 1.0], seed=3)
    p = diff_profile(f, n, uniform_zgrid(1.0, 0.05), starts=(0.5, 0.5))
    assert np.all(p.values == 0.0)


def test_reversed_starts_raise():
    n = 64
    f = make(n, 2)
    with pytest.raises(ModelConsistencyError):
        diff_profile(f, n, uniform_zgrid(1.0, 0.01), starts=(1.0, -1.0))
    # without the check the reversed profile is non-increasing
    p = diff_profile(f, n, uniform_zgrid(1.0, 0.01), starts=(1.0, -1.0), check=False)
    assert np.all(np.diff(p.values) <= p.tol)


def test_constant_extension_below_boundary():
    n = 8  # boundary 1 - n^{1/3}/2 = 0
    assert boundary(n) == pytest.approx(0.0)
    f = sample_scaled_field(n, 0.5, [-1.0, 1.0], [-1.0, 1.0], seed=5)
    zs = uniform_zgrid(1.0, 0.125)
    p = diff_profile(f, n, zs)
    below = p.values[zs <= 0]
    assert np.all(below == below[-1])


def test_bad_zgrid():
    n = 27
    f = make(n, 0)
    with pytest.raises(DomainError):
        diff_profile(f, n, [0.1, 0.0])
    with pytest.raises(ConfigError):
        diff_profile(f, n, [0.0, 5.0])


@pytest.mark.parametrize("seed", range(4))
def test_local_constancy(seed):
    # rightmost (-1 -> z1) meeting leftmost (1 -> z2) forces Z(z1) = Z(z2)
    n = 125
    f = make(n, seed)
    zs = uniform_zgrid(1.0, 0.05)
    p = diff_profile(f, n, zs)
    c = GeodesicCache(f, n, maxsize=8)
    a_l, _, _ = snap_offset(f, n, -1.0, 0.0)
    a_r, _, _ = snap_offset(f, n, 1.0, 0.0)
    ends = [snap_offset(f, n, float(z), 1.0)[0] for z in zs]
    hits = 0
    for i in range(len(zs)):
        r = _geodesic_idx(f, n, a_l, ends[i], RIGHTMOST, c)
        for j in range(i + 1, len(zs)):
            if intersects(r, _geodesic_idx(f, n, a_r, ends[j], LEFTMOST, c)):
                hits += 1
                assert abs(p.values[j] - p.values[i]) <= p.tol
    assert hits > 0


def test_mesh_indices_convention():
    assert list(mesh_indices(0.5, 1.0)) == [-2, -1, 0, 1]
    assert list(mesh_indices(0.3, 1.0)) == [-4, -3, -2, -1, 0, 1, 2, 3]


def test_lv_mesh_trivial_profiles():
    zs = uniform_zgrid(2.0, 1 / 64)
    flat = synthetic_profile("constant", zs)
    lin = synthetic_profile("linear", zs)
    for eps in (0.5, 0.25, 1 / 16, 0.3):
        assert lv_mesh(flat, eps, 1.5).count == 0
        r = lv_mesh(lin, eps, 1.5)
        assert r.count == boxcount_line(1.5, eps) == r.total
        assert np.all(r.marked < 1.5) and np.all(r.marked + eps > -1.5)


def test_lv_mesh_errors():
    lin = synthetic_profile("linear", uniform_zgrid(1.0, 0.1))
    with pytest.raises(ConfigError):
        lv_mesh(lin, 0.15, 0.5)
    assert lv_mesh(lin, 0.25, 1.0).count == 8
    with pytest.raises(ConfigError):
        lv_mesh(lin, 0.25, 1.1)


def step_profile(jumps, zs):
    v = np.zeros_like(zs)
    for j in jumps:
        v += zs >= j
    return DiffProfile(0, zs, v, 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.99, 0.99), min_size=0, max_size=12), st.integers(1, 4))
def test_mesh_consistency(jumps, k):
    # the union of fine marked intervals lies inside the union of coarse marked ones
    zs = uniform_zgrid(1.0, 2.0 ** -9)
    p = step_profile(jumps, zs)
    coarse = lv_mesh(p, 2.0 ** -k, 1.0)
    fine = lv_mesh(p, 2.0 ** -(k + 2), 1.0)
    for u in fine.marked:
        mid = u + fine.eps / 2
        assert np.any((coarse.marked <= mid) & (mid <= coarse.marked + coarse.eps))
    assert fine.count >= coarse.count


def test_lv_mesh_step_oracle():
    zs = uniform_zgrid(1.0, 1 / 256)
    p = step_profile([0.3, -0.55], zs)
    r = lv_mesh(p, 0.125, 1.0)
    # a jump at z is seen by the closed intervals containing z and the previous grid point
    np.testing.assert_allclose(sorted(r.marked), [-0.625, 0.25])


def test_oscillation_single_point_is_zero():
    n = 64
    st_ = oscillation_stats(n, 0.0, 0.0, [1e-6, 0.25], range(5))
    assert np.all(st_.osc[:, 0] == 0.0)
    assert np.all(st_.osc[:, 1] > 0.0)
    assert st_.osc.shape == (5, 2)
    f = st_.freq_exceed(0.4)
    assert np.all((0 <= f) & (f <= 1))
    assert st_.in_regime.tolist() == [True, False]


def test_oscillation_nested_windows_monotone():
    st_ = oscillation_stats(64, 0.0, 0.3, [0.5, 0.25, 0.125], range(10))
    assert np.all(st_.osc[:, 0] >= st_.osc[:, 1]) and np.all(st_.osc[:, 1] >= st_.osc[:, 2])


def test_parabolic_adjustment_matters():
    # without Q the window picks up the parabolic drift, growing with |y - x|
    n, eps, seeds = 216, 0.25, range(60)
    near = oscillation_stats(n, 0.0, 0.0, [eps], seeds, parabolic=False).mean_osc[0]
    far = oscillation_stats(n, 0.0, 2.5, [eps], seeds, parabolic=False).mean_osc[0]
    far_q = oscillation_stats(n, 0.0, 2.5, [eps], seeds, parabolic=True).mean_osc[0]
    assert far > near
    assert far_q < far


def test_oscillation_errors():
    with pytest.raises(DomainError):
        oscillation_stats(8, 0.0, -2.0, [0.1], [0])
    with pytest.raises(DomainError):
        oscillation_stats(8, 0.0, 0.0, [0.0], [0])


def test_nondegeneracy_basic():
    r = nondegeneracy_check(64, [0.5, 1.0], range(20))
    assert np.all(r.increments >= 0)
    assert np.all((r.freq >= 0) & (r.freq <= 1))
    assert r.threshold == pytest.approx(NONDEGENERACY_FACTOR * np.array([0.5, 1.0]))
    flat = nondegeneracy_check(64, [1.0], range(5), starts=(0.5, 0.5))
    assert flat.freq[0] == 0.0 and np.all(flat.increments == 0.0)
