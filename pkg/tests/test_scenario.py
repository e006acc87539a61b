import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsas.exceptions import GeometryError
from lsas.scenario import (Scenario, build_layout, compute_largescale, drop_users,
                           in_hexagon, pathloss, realize)


def test_defaults_are_valid():
    s = Scenario()
    assert s.pathloss_exponent == 3.7
    assert s.reference_distance == 1.0
    assert s.shadowing_sigma == 8.0
    assert s.min_access_distance == 10.0


@pytest.mark.parametrize("bad", [dict(M=0), dict(K=-1), dict(L=1.5), dict(gamma_p=0),
                                 dict(gamma_ul=-1), dict(correlation_coefficient=1.0),
                                 dict(min_access_distance=0), dict(rng_seed=-1)])
def test_invalid_scenarios_rejected(bad):
    with pytest.raises(ValueError):
        Scenario(**bad)


def test_single_site_at_origin():
    lay = build_layout(Scenario(L=1, N=1))
    np.testing.assert_array_equal(lay.rru_positions, np.zeros((1, 1, 2)))


def test_first_ring_of_neighbours():
    R = 500.0
    lay = build_layout(Scenario(L=7, N=1, cell_radius=R))
    c = lay.cell_centers
    np.testing.assert_array_equal(c[0], [0.0, 0.0])
    np.testing.assert_allclose(np.hypot(*c[1:].T), np.sqrt(3) * R, rtol=1e-12)
    # six distinct directions 60 degrees apart
    ang = np.sort(np.degrees(np.arctan2(c[1:, 1], c[1:, 0])) % 360)
    np.testing.assert_allclose(np.diff(ang), 60.0, atol=1e-9)


def test_second_ring_distances():
    R = 1.0
    c = build_layout(Scenario(L=19, cell_radius=R)).cell_centers
    d = np.sort(np.hypot(*c.T))
    np.testing.assert_allclose(d[7:13], 3.0, rtol=1e-12)
    np.testing.assert_allclose(d[13:], 2 * np.sqrt(3), rtol=1e-12)


def test_rru_ring_matches_polar_construction():
    R = 500.0
    lay = build_layout(Scenario(L=1, N=7, cell_radius=R))
    # independent construction from polar coordinates in degrees
    expected = [(0.0, 0.0)]
    for deg in (0, 60, 120, 180, 240, 300):
        t = deg * np.pi / 180.0
        expected.append((0.65 * R * np.cos(t), 0.65 * R * np.sin(t)))
    np.testing.assert_allclose(lay.rru_positions[0], expected, atol=1e-9)


def test_users_inside_hexagon_and_far_enough():
    s = Scenario(L=7, N=7, K=20, min_access_distance=30.0)
    lay, _ = realize(s)
    for l in range(s.L):
        rel = lay.user_positions[l] - lay.cell_centers[l]
        assert np.all(in_hexagon(rel, s.cell_radius))
    d = np.hypot(*(lay.user_positions.reshape(-1, 1, 2)
                   - lay.rru_positions.reshape(1, -1, 2)).transpose(2, 0, 1))
    assert d.min() >= s.min_access_distance


def test_user_drop_is_uniform_on_average():
    s = Scenario(L=1, N=1, K=100_000, cell_radius=1.0, min_access_distance=1e-3)
    lay = drop_users(s, build_layout(s), np.random.default_rng(3))
    p = lay.user_positions[0]
    # per-axis standard deviation of a uniform hexagon point is below 0.5 R
    tol = 4 * 0.5 / np.sqrt(p.shape[0])
    np.testing.assert_allclose(p.mean(axis=0), [0.0, 0.0], atol=tol)
    # second moment of a uniform regular hexagon: E|p|^2 = 5/12 R^2
    assert np.mean(np.sum(p ** 2, axis=1)) == pytest.approx(5 / 12, rel=0.01)


def test_infeasible_distance_raises():
    s = Scenario(L=1, N=1, K=1, cell_radius=100.0, min_access_distance=100.0)
    with pytest.raises(GeometryError):
        drop_users(s, build_layout(s), np.random.default_rng(0), max_retries=500)


def test_same_seed_same_positions():
    s = Scenario(L=7, N=3, K=5, rng_seed=99)
    a, la = realize(s)
    b, lb = realize(s)
    np.testing.assert_array_equal(a.user_positions, b.user_positions)
    assert la.lam.tobytes() == lb.lam.tobytes()


def test_largescale_independent_of_M():
    s = Scenario(L=3, K=4, rng_seed=5)
    _, a = realize(s.replace(M=8))
    _, b = realize(s.replace(M=256))
    np.testing.assert_array_equal(a.lam, b.lam)


def test_pathloss_reference_points():
    s = Scenario(shadowing_sigma=0.0, min_access_distance=0.5)
    assert pathloss(1.0, s) == 1.0
    assert pathloss(2.0, s) == pytest.approx(2 ** -3.7)
    assert pathloss(2.0, s) == pytest.approx(0.0770, rel=1e-3)


def test_pathloss_clamped_below():
    s = Scenario(min_access_distance=10.0)
    assert pathloss(0.0, s) == pathloss(10.0, s)


def test_shadowing_log_mean():
    s = Scenario(L=1, N=1, K=100_000, shadowing_sigma=8.0, cell_radius=300.0)
    lay = drop_users(s, build_layout(s), np.random.default_rng(1))
    lsm = compute_largescale(s, lay, np.random.default_rng(2))
    d = np.hypot(*lay.user_positions[0].T)
    db = 10 * np.log10(lsm.lam[0, 0] * (np.maximum(d, s.min_access_distance)
                                        / s.reference_distance) ** s.pathloss_exponent)
    assert abs(db.mean()) < 0.1
    assert db.std() == pytest.approx(8.0, rel=0.01)


def test_largescale_positive_finite():
    _, lsm = realize(Scenario(L=7, N=7, K=10))
    assert np.all(lsm.lam > 0) and np.all(np.isfinite(lsm.lam))


@settings(max_examples=50, deadline=None)
@given(d1=st.floats(0.1, 5000), d2=st.floats(0.1, 5000), alpha=st.floats(2.0, 5.0))
def test_pathloss_monotone(d1, d2, alpha):
    s = Scenario(pathloss_exponent=alpha, shadowing_sigma=0.0)
    lo, hi = sorted((d1, d2))
    assert pathloss(hi, s) <= pathloss(lo, s)
