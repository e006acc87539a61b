"""Instantaneous MMSE-receiver uplink sum-rate and its Monte Carlo average.

The sum-rate of the reference cell is

    log2 det(sum_l G_l G_l^H + Sigma) - log2 det(sum_{l>=2} G_l G_l^H + Sigma).

It is evaluated after whitening by ``Sigma``: with ``B = Sigma^{-1/2} [G_1 ... G_L]``
the rate equals ``log2 det`` of the Schur complement of the ``LK x LK`` Gram
matrix ``I + B^H B`` with respect to its interfering-cell block. The
Schur complement is ``I + (something PSD)`` so the result is non-negative.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .channel import covariances, gen_smallscale
from .estimation import estimate_statistics
from .linalg import cholesky, inv_sqrt_pd, logdet_hpd
from .seeding import UPLINK_MC, make_rng


@dataclass(frozen=True)
class RateSample:
    value: float
    trial_index: int


@dataclass(frozen=True)
class ErgodicRate:
    """Monte Carlo mean (bits/s/Hz) and its standard error."""

    mean: float
    std_error: float
    trials: int

    @classmethod
    def from_samples(cls, values):
        values = np.asarray(values, dtype=float)
        n = values.size
        if n < 1:
            raise ValueError("need at least one sample")
        se = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        return cls(mean=float(np.mean(values)), std_error=se, trials=n)


def _rate_from_whitened(B, K):
    """Sum-rate from whitened channels ``B`` of shape (..., MN, L*K), cell-major columns."""
    Bh = np.conj(np.swapaxes(B, -1, -2))
    gram = Bh @ B
    LK = gram.shape[-1]
    eye_k = np.eye(K)
    if LK == K:
        return logdet_hpd(eye_k + gram)
    P = np.eye(LK - K) + gram[..., K:, K:]
    X = gram[..., K:, :K]
    V = np.linalg.solve(cholesky(P), X)
    S = eye_k + gram[..., :K, :K] - np.conj(np.swapaxes(V, -1, -2)) @ V
    return logdet_hpd(S)


def instantaneous_sumrate(G_hat, Sigma):
    """Uplink sum-rate of the reference cell for one channel realisation.

    Parameters
    ----------
    G_hat : ndarray, shape (L, MN, K)
        Estimated channel matrices; ``G_hat[0]`` belongs to the reference cell.
    Sigma : ndarray, shape (MN, MN)
        Hermitian positive definite interference-plus-noise covariance.

    Returns
    -------
    float
        bits/s/Hz.
    """
    G_hat = np.asarray(G_hat, dtype=complex)
    L, MN, K = G_hat.shape
    Lc = cholesky(Sigma)
    stacked = np.concatenate(list(G_hat), axis=1)  # MN x LK, cell-major
    B = la.solve_triangular(Lc, stacked, lower=True)
    return float(_rate_from_whitened(B, K))


def whitened_factors(stats):
    """``Sigma^{-1/2}``-whitened equivalent-model factors, shape (L, K, MN, MN).

    Factor ``(l, k)`` maps ``h_hat_k`` to the whitened estimate of ``g_{l,k}``.
    """
    Lc = cholesky(stats.Sigma)
    L, K, MN, _ = stats.RL.shape
    out = np.empty((L, K, MN, MN), dtype=complex)
    for k in range(K):
        q_isqrt = inv_sqrt_pd(stats.Q[k])
        for l in range(L):
            out[l, k] = la.solve_triangular(Lc, stats.RL[l, k] @ q_isqrt, lower=True)
    return out


def _chunk_rates(W, seed, trials):
    L, K, MN, _ = W.shape
    T = len(trials)
    H = np.stack([gen_smallscale(make_rng(seed, UPLINK_MC, t), (K, MN)) for t in trials])
    B = np.empty((T, MN, L, K), dtype=complex)
    for k in range(K):
        # (L, MN, MN) @ (MN, T) -> (L, MN, T)
        Bk = W[:, k] @ H[:, k, :].T
        B[:, :, :, k] = np.transpose(Bk, (2, 1, 0))
    return _rate_from_whitened(B.reshape(T, MN, L * K), K)


def sumrate_samples(stats, trials, seed, chunk=128, workers=1):
    """Per-trial sum-rates under the equivalent estimated-channel model.

    Trial ``t`` draws its ``h_hat`` from the stream ``(seed, UPLINK_MC, t)``,
    so the output does not depend on ``chunk`` or ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    W = whitened_factors(stats)
    bounds = [range(a, min(a + chunk, trials)) for a in range(0, trials, chunk)]
    out = np.empty(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: _chunk_rates(W, seed, r), bounds))
    else:
        parts = [_chunk_rates(W, seed, r) for r in bounds]
    for r, vals in zip(bounds, parts):
        out[r.start:r.stop] = vals
    return out


def ergodic_sumrate_mc(s, largescale, corr, trials=None, seed=None, **kwargs):
    """Ergodic uplink sum-rate with the large-scale state held fixed.

    Parameters
    ----------
    s : Scenario
        Supplies ``gamma_p``, ``gamma_ul`` and the defaults for ``trials``/``seed``.
    largescale : LargeScaleMap
    corr : CorrelationSet
    trials, seed : int, optional
        Override ``s.num_trials`` and ``s.rng_seed``.

    Returns
    -------
    ErgodicRate
    """
    trials = s.num_trials if trials is None else int(trials)
    seed = s.rng_seed if seed is None else int(seed)
    stats = estimate_statistics(covariances(corr, largescale.lam), s.gamma_p, s.gamma_ul)
    return ErgodicRate.from_samples(sumrate_samples(stats, trials, seed, **kwargs))
