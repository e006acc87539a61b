"""TDD reciprocity mismatch, zero-forcing precoding and the sum-rate loss bound.

RF chains are diagonal complex gains ``exp(x) * exp(j phi)`` with
``x ~ N(0, delta2)`` (natural-log amplitude) and ``phi ~ U[-theta, theta]``.
Precoders are normalised to unit total power and ``rho`` is the transmit SNR
with unit noise at every user.
"""

import warnings
from dataclasses import dataclass, fields

import numpy as np

from .channel import gen_smallscale
from .exceptions import DegenerateBoundError, SingularMatrixError
from .rate_mc import ErgodicRate
from .seeding import RECIPROCITY_MC, make_rng

#: Converts a variance of ``20 log10 |c|`` (dB^2) to a natural-log variance.
DB2_TO_NAT = (np.log(10.0) / 20.0) ** 2


def sinc(x):
    """Unnormalised ``sin(x) / x`` with ``sinc(0) = 1``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class MismatchConfig:
    """Phase half-ranges (rad) and log-amplitude variances (natural-log units)."""

    theta_bs_t: float = 0.0
    theta_bs_r: float = 0.0
    theta_ue_t: float = 0.0
    theta_ue_r: float = 0.0
    delta2_bs_t: float = 0.0
    delta2_bs_r: float = 0.0
    delta2_ue_t: float = 0.0
    delta2_ue_r: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{f.name} must be >= 0, got {value!r}")
            if f.name.startswith("theta") and value > np.pi:
                raise ValueError(f"{f.name} must be <= pi, got {value!r}")
            object.__setattr__(self, f.name, value)

    @classmethod
    def from_db(cls, delta2_bs_t_db=0.0, delta2_bs_r_db=0.0, delta2_ue_t_db=0.0,
                delta2_ue_r_db=0.0, **thetas):
        """Build from amplitude variances given in dB^2."""
        return cls(delta2_bs_t=delta2_bs_t_db * DB2_TO_NAT,
                   delta2_bs_r=delta2_bs_r_db * DB2_TO_NAT,
                   delta2_ue_t=delta2_ue_t_db * DB2_TO_NAT,
                   delta2_ue_r=delta2_ue_r_db * DB2_TO_NAT, **thetas)

    def is_perfect(self):
        return all(getattr(self, f.name) == 0 for f in fields(self))


@dataclass(frozen=True)
class RfGains:
    """Diagonals of the four RF matrices."""

    c_bs_t: np.ndarray
    c_bs_r: np.ndarray
    c_ue_t: np.ndarray
    c_ue_r: np.ndarray

    @classmethod
    def ideal(cls, M_total, K):
        one_m = np.ones(M_total, dtype=complex)
        one_k = np.ones(K, dtype=complex)
        return cls(one_m, one_m.copy(), one_k, one_k.copy())


def _draw(rng, n, theta, delta2):
    amp = rng.standard_normal(n) * np.sqrt(delta2)
    phase = rng.uniform(-theta, theta, n)
    return np.exp(amp + 1j * phase)


def sample_rf_gains(cfg, M_total, K, rng):
    """Draw all four gain diagonals (independent entries)."""
    return RfGains(c_bs_t=_draw(rng, M_total, cfg.theta_bs_t, cfg.delta2_bs_t),
                   c_bs_r=_draw(rng, M_total, cfg.theta_bs_r, cfg.delta2_bs_r),
                   c_ue_t=_draw(rng, K, cfg.theta_ue_t, cfg.delta2_ue_t),
                   c_ue_r=_draw(rng, K, cfg.theta_ue_r, cfg.delta2_ue_r))


def effective_channels(H, gains):
    """Uplink (``M x K``) and downlink (``K x M``) channels seen through the RF chains."""
    H = np.asarray(H, dtype=complex)
    G_ul = gains.c_bs_r[:, None] * H.T * gains.c_ue_t[None, :]
    G_dl = gains.c_ue_r[:, None] * H * gains.c_bs_t[None, :]
    return G_ul, G_dl


def normalize_power(W):
    """Scale ``W`` to unit total power, ``Tr(W W^H) = 1``."""
    return W / np.linalg.norm(W)


def _zf_unscaled(G_ul):
    G_ul = np.asarray(G_ul, dtype=complex)
    M, K = G_ul.shape
    if M < K:
        raise SingularMatrixError(f"ZF needs at least as many antennas as users ({M} < {K})")
    A = G_ul.T @ np.conj(G_ul)
    c = np.linalg.cond(A)
    if not np.isfinite(c) or c > 1e12:
        raise SingularMatrixError(f"uplink Gram matrix is rank deficient (cond {c:.3g})")
    # W = G* A^{-1}  <=>  W^T = A^{-T} G^H
    return np.linalg.solve(A.T, np.conj(G_ul).T).T


def zf_precoder(G_ul, scale=True):
    """Zero-forcing precoder built from the transposed uplink channel."""
    W = _zf_unscaled(G_ul)
    return normalize_power(W) if scale else W


def calibrated_zf_precoder(G_ul, c_bs_t, c_bs_r, scale=True):
    """ZF precoder with the BS calibration matrix ``C_BS,t^{-1} C_BS,r`` applied."""
    c_bs_t = np.asarray(c_bs_t, dtype=complex)
    if np.any(c_bs_t == 0):
        raise ZeroDivisionError("BS transmit gain has a zero entry")
    W = (np.asarray(c_bs_r) / c_bs_t)[:, None] * _zf_unscaled(G_ul)
    return normalize_power(W) if scale else W


def downlink_sumrate(G_dl, W, rho):
    """Sum of per-user ``log2(1 + SINR)`` with inter-user interference and unit noise."""
    E = np.abs(np.asarray(G_dl) @ np.asarray(W)) ** 2
    signal = np.diagonal(E)
    interference = E.sum(axis=1) - signal
    return float(np.sum(np.log2(1.0 + rho * signal / (rho * interference + 1.0))))


def max_offdiag(A):
    A = np.abs(np.asarray(A))
    return float(np.max(A - np.diag(np.diagonal(A)))) if A.shape[0] > 1 else 0.0


@dataclass(frozen=True)
class MismatchBound:
    """Terms of the ergodic sum-rate lower bound (bits/s/Hz)."""

    r_lb_perfect: float
    delta_r_bs: float
    delta_r_ue: float
    bound: float
    lambda1: float
    lambda2: float
    rho: float


def mismatch_lambdas(cfg):
    s_r = sinc(cfg.theta_bs_r)
    s_t = sinc(cfg.theta_bs_t)
    lambda1 = float(s_r ** 2 * s_t ** 2)
    lambda2 = float(np.exp(2 * cfg.delta2_bs_t) + np.exp(2 * cfg.delta2_bs_r)
                    - 2 * np.exp(cfg.delta2_bs_t / 2 + cfg.delta2_bs_r / 2) * s_r * s_t)
    return lambda1, max(lambda2, 0.0)


def mismatch_bound(M, K, rho, cfg):
    """Lower bound on the ergodic ZF sum-rate under BS and UE mismatch.

    Raises
    ------
    DegenerateBoundError
        When the BS chains are perfectly matched (``lambda2 == 0``); the BS
        loss term is then infinite and the bound says nothing.
    """
    if not M > K >= 2:
        raise ValueError(f"need M > K >= 2, got M={M}, K={K}")
    if rho <= 0:
        raise ValueError("rho must be > 0")
    lambda1, lambda2 = mismatch_lambdas(cfg)
    r_lb = K * (np.log2(rho) + np.log2((M - K) / K))
    delta_ue = K * np.log2(np.e) * 2 * cfg.delta2_ue_t
    if lambda2 <= 0:
        raise DegenerateBoundError("BS chains perfectly matched: lambda2 = 0, bound vacuous")
    delta_bs = K * (np.log2(rho) + np.log2(lambda1 / lambda2)
                    + np.log2(M * K / ((M - K) * (K - 1))))
    return MismatchBound(r_lb_perfect=float(r_lb), delta_r_bs=float(delta_bs),
                         delta_r_ue=float(delta_ue),
                         bound=float(r_lb - delta_bs - delta_ue),
                         lambda1=lambda1, lambda2=lambda2, rho=float(rho))


def normalized_loss(rate_mismatch, rate_perfect):
    """``1 - rate_mismatch / rate_perfect`` clamped to [0, 1]."""
    if rate_perfect <= 0:
        raise ValueError("rate_perfect must be > 0")
    loss = 1.0 - rate_mismatch / rate_perfect
    if not 0.0 <= loss <= 1.0:
        warnings.warn(f"normalized loss {loss:.4g} outside [0, 1]; clamped",
                      RuntimeWarning, stacklevel=2)
    return float(np.clip(loss, 0.0, 1.0))


@dataclass(frozen=True)
class MismatchResult:
    """Paired ergodic rates and the normalised loss between them."""

    mismatch: ErgodicRate
    perfect: ErgodicRate
    calibrated: ErgodicRate
    loss: float
    loss_std_error: float


def _paired_loss_se(a, b):
    # delta method for 1 - mean(a)/mean(b) on paired samples
    n = a.size
    if n < 2:
        return 0.0
    ma, mb = a.mean(), b.mean()
    cov = np.cov(a, b, ddof=1) / n
    grad = np.array([-1.0 / mb, ma / mb ** 2])
    return float(np.sqrt(max(grad @ cov @ grad, 0.0)))


def mismatch_trial(M, K, rho, cfg, rng):
    """One channel/gain draw: (naive ZF, perfect reciprocity, calibrated ZF) rates."""
    H = gen_smallscale(rng, (K, M))
    gains = sample_rf_gains(cfg, M, K, rng)
    G_ul, G_dl = effective_channels(H, gains)
    r_mis = downlink_sumrate(G_dl, zf_precoder(G_ul), rho)
    r_cal = downlink_sumrate(G_dl, calibrated_zf_precoder(G_ul, gains.c_bs_t, gains.c_bs_r), rho)
    r_perf = downlink_sumrate(H, zf_precoder(H.T), rho)
    return r_mis, r_perf, r_cal


def ergodic_mismatch(M, K, rho, cfg, trials, seed):
    """Ergodic downlink rates with and without mismatch on the same channel draws.

    Trial ``t`` uses the stream ``(seed, RECIPROCITY_MC, t)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rates = np.array([mismatch_trial(M, K, rho, cfg, make_rng(seed, RECIPROCITY_MC, t))
                      for t in range(trials)])
    mis, perf, cal = rates.T
    return MismatchResult(mismatch=ErgodicRate.from_samples(mis),
                          perfect=ErgodicRate.from_samples(perf),
                          calibrated=ErgodicRate.from_samples(cal),
                          loss=normalized_loss(mis.mean(), perf.mean()),
                          loss_std_error=_paired_loss_se(mis, perf))


def calibration_residual(M, K, cfg, rng):
    """Largest off-diagonal magnitude of ``G_DL W`` for the calibrated precoder."""
    H = gen_smallscale(rng, (K, M))
    gains = sample_rf_gains(cfg, M, K, rng)
    G_ul, G_dl = effective_channels(H, gains)
    W = calibrated_zf_precoder(G_ul, gains.c_bs_t, gains.c_bs_r)
    return max_offdiag(G_dl @ W)
