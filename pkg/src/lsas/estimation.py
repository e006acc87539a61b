"""Pilot transmission with full pilot reuse and MMSE channel estimation.

Every cell uses the ``K x K`` identity pilot matrix, so user k of every cell
shares one pilot and the estimation runs independently per user index.
Covariances are passed as ``RL = R_{l,k} Lambda_{l,k}`` matrices; the
diagonal ``Lambda`` commutes with the block-diagonal ``R``, so ``RL`` is
Hermitian.
"""

from dataclasses import dataclass

import numpy as np

from .channel import gen_smallscale
from .linalg import hermitian_part, inv_sqrt_pd, solve_hpd


def _rl(R, Lambda):
    R = np.asarray(R, dtype=complex)
    return R * np.asarray(Lambda, dtype=float)[..., None, :]


def observe_pilot(g, gamma_p, rng):
    """Pilot observation of one user index: sum over cells plus noise.

    ``g`` has shape ``(L, MN)``, the channels of user k of every cell, or
    ``(L, MN, T)`` for ``T`` independent realisations.
    """
    g = np.asarray(g, dtype=complex)
    return g.sum(axis=0) + np.sqrt(gamma_p) * gen_smallscale(rng, g.shape[1:])


def pilot_covariance(RL, gamma_p):
    """``Q_k = sum_i R_{i,k} Lambda_{i,k} + gamma_p I`` from ``RL`` of shape (L, MN, MN)."""
    RL = np.asarray(RL)
    return hermitian_part(RL.sum(axis=0)) + gamma_p * np.eye(RL.shape[-1])


def mmse_estimate(y_p, R, Lambda, gamma_p):
    """MMSE estimates of all ``L`` channels sharing the pilot.

    Parameters
    ----------
    y_p : ndarray, shape (MN,) or (MN, T)
    R : ndarray, shape (L, MN, MN)
    Lambda : ndarray, shape (L, MN)
    gamma_p : float

    Returns
    -------
    ndarray, shape (L, MN) or (L, MN, T)
        Entry l is ``R_l Lambda_l Q^{-1} y_p``.
    """
    RL = _rl(R, Lambda)
    Q = pilot_covariance(RL, gamma_p)
    x = solve_hpd(Q, np.asarray(y_p, dtype=complex))
    return RL @ x


def error_covariance(R, Lambda, Q):
    """Estimation-error covariance ``RL - RL Q^{-1} RL`` (stack-aware in R/Lambda)."""
    RL = _rl(R, Lambda)
    if RL.ndim == 2:
        return hermitian_part(RL - RL @ solve_hpd(Q, RL))
    return np.stack([hermitian_part(m - m @ solve_hpd(Q, m)) for m in RL])


def equivalent_channel_sample(R, Lambda, Q, rng=None, h_hat=None):
    """Draw estimates from the equivalent model ``RL Q^{-1/2} h_hat``.

    With stacked ``R`` (L, MN, MN) and ``Lambda`` (L, MN) all ``L`` rows use
    the same ``h_hat``, which is what makes estimates of co-pilot users
    collinear.
    """
    RL = _rl(R, Lambda)
    if h_hat is None:
        h_hat = gen_smallscale(rng, RL.shape[-1])
    return RL @ (inv_sqrt_pd(Q) @ h_hat)


def interference_noise_cov(err_covs, gamma_ul):
    """``Sigma``: all estimation-error covariances plus ``gamma_ul I``.

    ``err_covs`` has shape (L, K, MN, MN) (any leading axes are summed).
    """
    err_covs = np.asarray(err_covs)
    MN = err_covs.shape[-1]
    total = err_covs.reshape(-1, MN, MN).sum(axis=0)
    return hermitian_part(total) + gamma_ul * np.eye(MN)


@dataclass(frozen=True)
class EstimateSet:
    """Second-order statistics of the estimates plus, optionally, realisations.

    Attributes
    ----------
    RL : ndarray, shape (L, K, MN, MN)
        Channel covariances ``R_{l,k} Lambda_{l,k}``.
    Q : ndarray, shape (K, MN, MN)
    err_cov : ndarray, shape (L, K, MN, MN)
    Sigma : ndarray, shape (MN, MN)
    g_hat : ndarray, shape (L, MN, K) or None
        ``g_hat[l]`` is the estimated ``G_l``.
    """

    RL: np.ndarray
    Q: np.ndarray
    err_cov: np.ndarray
    Sigma: np.ndarray
    g_hat: np.ndarray = None

    @property
    def L(self):
        return self.RL.shape[0]

    @property
    def K(self):
        return self.RL.shape[1]

    @property
    def MN(self):
        return self.RL.shape[-1]


def estimate_statistics(RL, gamma_p, gamma_ul):
    """Build ``Q_k``, error covariances and ``Sigma`` from ``RL`` (L, K, MN, MN)."""
    RL = np.asarray(RL, dtype=complex)
    L, K, MN, _ = RL.shape
    Q = np.stack([pilot_covariance(RL[:, k], gamma_p) for k in range(K)])
    err = np.empty_like(RL)
    for k in range(K):
        for l in range(L):
            m = RL[l, k]
            err[l, k] = hermitian_part(m - m @ solve_hpd(Q[k], m))
    Sigma = interference_noise_cov(err, gamma_ul)
    return EstimateSet(RL=RL, Q=Q, err_cov=err, Sigma=Sigma)


def estimate_channels(G, RL, gamma_p, gamma_ul, rng):
    """Simulate the pilot phase on true channels ``G`` (L, MN, K) and estimate them."""
    stats = estimate_statistics(RL, gamma_p, gamma_ul)
    L, MN, K = G.shape
    g_hat = np.empty((L, MN, K), dtype=complex)
    for k in range(K):
        y = observe_pilot(G[:, :, k], gamma_p, rng)
        x = solve_hpd(stats.Q[k], y)
        g_hat[:, :, k] = stats.RL[:, k] @ x
    return EstimateSet(RL=stats.RL, Q=stats.Q, err_cov=stats.err_cov,
                       Sigma=stats.Sigma, g_hat=g_hat)
