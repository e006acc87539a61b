import numpy as np
import pytest

from lsas.channel import gen_smallscale
from lsas.exceptions import DegenerateBoundError, SingularMatrixError
from lsas.reciprocity import (DB2_TO_NAT, MismatchConfig, RfGains, calibrated_zf_precoder,
                              downlink_sumrate, effective_channels, ergodic_mismatch, max_offdiag,
                              mismatch_bound, mismatch_lambdas, normalized_loss, sample_rf_gains,
                              sinc, zf_precoder)
from lsas.seeding import make_rng

PI = np.pi


def random_gains(rng, M, K):
    cfg = MismatchConfig(*([0.7] * 4), *([0.2] * 4))
    return sample_rf_gains(cfg, M, K, rng)


def sinr_oracle(G_dl, W, rho):
    total = 0.0
    K = G_dl.shape[0]
    for k in range(K):
        sig = abs(sum(G_dl[k, m] * W[m, k] for m in range(G_dl.shape[1]))) ** 2
        intf = sum(abs(sum(G_dl[k, m] * W[m, j] for m in range(G_dl.shape[1]))) ** 2
                   for j in range(K) if j != k)
        total += np.log2(1 + rho * sig / (rho * intf + 1))
    return total


def test_config_validation():
    with pytest.raises(ValueError, match="theta_bs_t"):
        MismatchConfig(theta_bs_t=-0.1)
    with pytest.raises(ValueError, match="theta_ue_r"):
        MismatchConfig(theta_ue_r=4.0)
    with pytest.raises(ValueError, match="delta2_bs_r"):
        MismatchConfig(delta2_bs_r=float("nan"))
    assert MismatchConfig().is_perfect()
    assert MismatchConfig.from_db(delta2_bs_t_db=3.0).delta2_bs_t == pytest.approx(3 * DB2_TO_NAT)


def test_sinc_convention():
    assert sinc(0.0) == 1.0
    assert sinc(PI / 3) == pytest.approx(0.82699, abs=1e-5)
    assert sinc(PI) == pytest.approx(0.0, abs=1e-15)


def test_no_mismatch_gains_are_exactly_one(rng):
    g = sample_rf_gains(MismatchConfig(), 16, 4, rng)
    for c in (g.c_bs_t, g.c_bs_r, g.c_ue_t, g.c_ue_r):
        assert np.all(c == 1)


@pytest.mark.parametrize("theta,delta2", [(PI / 3, 0.0), (0.0, 0.3), (PI / 4, 0.1)])
def test_gain_moments(theta, delta2):
    cfg = MismatchConfig(theta_bs_t=theta, delta2_bs_t=delta2)
    c = sample_rf_gains(cfg, 100_000, 1, make_rng(2024, 0)).c_bs_t
    assert np.mean(np.abs(c) ** 2) == pytest.approx(np.exp(2 * delta2), rel=0.01)
    assert abs(np.mean(c) - np.exp(delta2 / 2) * sinc(theta)) <= 0.01 * np.exp(delta2 / 2) * sinc(theta)


def test_effective_channels_identity_gains(rng):
    H = gen_smallscale(rng, (3, 6))
    G_ul, G_dl = effective_channels(H, RfGains.ideal(6, 3))
    np.testing.assert_array_equal(G_ul, H.T)
    np.testing.assert_array_equal(G_dl, H)


def test_effective_channels_scalar():
    g = RfGains(np.array([2.0 + 0j]), np.array([3j]), np.array([0.5 + 0j]), np.array([-1 + 1j]))
    G_ul, G_dl = effective_channels(np.array([[1 + 2j]]), g)
    assert G_ul[0, 0] == pytest.approx(3j * (1 + 2j) * 0.5)
    assert G_dl[0, 0] == pytest.approx((-1 + 1j) * (1 + 2j) * 2.0)


def test_effective_channels_elementwise(rng):
    K, M = 4, 8
    H = gen_smallscale(rng, (K, M))
    g = random_gains(rng, M, K)
    G_ul, G_dl = effective_channels(H, g)
    ul = np.diag(g.c_bs_r) @ H.T @ np.diag(g.c_ue_t)
    dl = np.diag(g.c_ue_r) @ H @ np.diag(g.c_bs_t)
    for m in range(M):
        for k in range(K):
            assert G_ul[m, k] == pytest.approx(ul[m, k], rel=1e-14)
            assert G_dl[k, m] == pytest.approx(dl[k, m], rel=1e-14)


def test_zf_identity_channel():
    W = zf_precoder(np.eye(4, dtype=complex))
    np.testing.assert_allclose(W, np.eye(4) / 2, atol=1e-15)


def test_zf_inverts_reciprocal_channel(rng):
    H = gen_smallscale(rng, (4, 16))
    np.testing.assert_allclose(H @ zf_precoder(H.T, scale=False), np.eye(4), atol=1e-12)
    W = zf_precoder(H.T)
    assert np.linalg.norm(W) == pytest.approx(1.0)


def test_zf_rank_deficient():
    G = np.ones((8, 2), dtype=complex)
    with pytest.raises(SingularMatrixError):
        zf_precoder(G)
    with pytest.raises(SingularMatrixError):
        zf_precoder(np.ones((2, 3), dtype=complex))


def test_mismatch_creates_interference(rng):
    H = gen_smallscale(rng, (4, 32))
    g = random_gains(rng, 32, 4)
    G_ul, G_dl = effective_channels(H, g)
    assert max_offdiag(G_dl @ zf_precoder(G_ul)) > 1e-3


def test_calibrated_reduces_to_zf_without_mismatch(rng):
    H = gen_smallscale(rng, (3, 8))
    one = np.ones(8, dtype=complex)
    np.testing.assert_array_equal(calibrated_zf_precoder(H.T, one, one), zf_precoder(H.T))


def test_calibrated_gives_ue_ratio_diagonal(rng):
    H = gen_smallscale(rng, (4, 16))
    g = random_gains(rng, 16, 4)
    G_ul, G_dl = effective_channels(H, g)
    W = calibrated_zf_precoder(G_ul, g.c_bs_t, g.c_bs_r, scale=False)
    np.testing.assert_allclose(G_dl @ W, np.diag(g.c_ue_r / g.c_ue_t), atol=1e-12)


def test_calibrated_offdiagonal_residual(rng):
    H = gen_smallscale(rng, (8, 64))
    g = random_gains(rng, 64, 8)
    G_ul, G_dl = effective_channels(H, g)
    W = calibrated_zf_precoder(G_ul, g.c_bs_t, g.c_bs_r)
    assert max_offdiag(G_dl @ W) <= 1e-10


def test_calibrated_zero_gain(rng):
    H = gen_smallscale(rng, (2, 4))
    c = np.ones(4, dtype=complex)
    c[2] = 0
    with pytest.raises(ZeroDivisionError):
        calibrated_zf_precoder(H.T, c, np.ones(4))


def test_sumrate_without_interference():
    d, K, rho = 0.4 + 0.3j, 3, 10.0
    assert downlink_sumrate(np.eye(K), d * np.eye(K), rho) == pytest.approx(
        K * np.log2(1 + rho * abs(d) ** 2))


def test_sumrate_vanishes_at_zero_power(rng):
    H = gen_smallscale(rng, (3, 6))
    assert downlink_sumrate(H, zf_precoder(H.T), 1e-14) < 1e-12


def test_sumrate_matches_sinr_oracle(rng):
    H = gen_smallscale(rng, (3, 5))
    g = random_gains(rng, 5, 3)
    G_ul, G_dl = effective_channels(H, g)
    W = zf_precoder(G_ul)
    assert downlink_sumrate(G_dl, W, 7.0) == pytest.approx(sinr_oracle(G_dl, W, 7.0), rel=1e-12)


def test_lambdas_example():
    l1, l2 = mismatch_lambdas(MismatchConfig(theta_bs_t=PI / 3, theta_bs_r=PI / 3))
    assert l1 == pytest.approx(0.4677, abs=1e-4)
    assert l2 == pytest.approx(0.6322, abs=1e-4)
    assert mismatch_lambdas(MismatchConfig()) == (1.0, 0.0)


def test_ue_amplitude_term():
    cfg = MismatchConfig(theta_bs_t=0.1, delta2_ue_t=0.5)
    assert mismatch_bound(64, 8, 10.0, cfg).delta_r_ue == pytest.approx(11.542, abs=1e-3)


def test_bound_terms_assemble():
    M, K, rho = 64, 8, 10.0
    b = mismatch_bound(M, K, rho, MismatchConfig(theta_bs_t=PI / 6, theta_bs_r=PI / 6))
    assert b.r_lb_perfect == pytest.approx(K * np.log2(rho * (M - K) / K))
    assert b.bound == pytest.approx(b.r_lb_perfect - b.delta_r_bs - b.delta_r_ue)
    assert b.delta_r_ue == 0


def test_bound_degenerate_and_preconditions():
    with pytest.raises(DegenerateBoundError):
        mismatch_bound(64, 8, 10.0, MismatchConfig(theta_ue_t=0.5))
    with pytest.raises(ValueError):
        mismatch_bound(8, 8, 10.0, MismatchConfig(theta_bs_t=0.1))
    with pytest.raises(ValueError):
        mismatch_bound(8, 1, 10.0, MismatchConfig(theta_bs_t=0.1))
    with pytest.raises(ValueError):
        mismatch_bound(8, 2, 0.0, MismatchConfig(theta_bs_t=0.1))


def test_lambda1_monotone_in_theta():
    grid = np.linspace(0, PI, 50)
    l1 = [mismatch_lambdas(MismatchConfig(theta_bs_t=t, theta_bs_r=0.4))[0] for t in grid]
    assert np.all(np.diff(l1) <= 1e-15)
    l1 = [mismatch_lambdas(MismatchConfig(theta_bs_r=t))[0] for t in grid]
    assert np.all(np.diff(l1) <= 1e-15)


def test_normalized_loss_edges():
    assert normalized_loss(5.0, 5.0) == 0.0
    assert normalized_loss(0.0, 5.0) == 1.0
    with pytest.warns(RuntimeWarning):
        assert normalized_loss(6.0, 5.0) == 0.0
    with pytest.raises(ValueError):
        normalized_loss(1.0, 0.0)


def test_perfect_config_has_zero_loss():
    r = ergodic_mismatch(16, 4, 10.0, MismatchConfig(), trials=20, seed=1)
    assert r.loss == 0.0
    assert r.mismatch.mean == r.perfect.mean


def test_loss_grows_with_bs_phase():
    res = [ergodic_mismatch(32, 4, 10.0, MismatchConfig(theta_bs_t=t, theta_bs_r=t), 200, 5)
           for t in (0, PI / 6, PI / 3, PI / 2)]
    for a, b in zip(res, res[1:]):
        assert b.loss + 3 * np.hypot(a.loss_std_error, b.loss_std_error) >= a.loss
    assert res[-1].loss > res[0].loss


def test_calibration_recovers_perfect_rate_scale():
    cfg = MismatchConfig(theta_bs_t=PI / 2, theta_bs_r=PI / 2)
    r = ergodic_mismatch(32, 4, 10.0, cfg, 100, 11)
    assert r.calibrated.mean > r.mismatch.mean
