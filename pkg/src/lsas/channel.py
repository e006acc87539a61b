"""Correlated Rayleigh channels toward the reference cell.

Conventions
-----------
Antenna index ``n * M + m`` is antenna ``m`` of RRU ``n``. A large-scale
matrix is stored as its diagonal, a length ``MN`` vector in which every
RRU's gain is repeated over its ``M`` antennas.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .linalg import psd_sqrt

CORRELATION_MODELS = ("exponential",)


def build_correlation(model_id, M, r):
    """``M x M`` receive correlation matrix.

    Only the real exponential model is provided: entry ``(i, j)`` is
    ``r ** |i - j|``.
    """
    if model_id not in CORRELATION_MODELS:
        raise ValueError(f"unknown correlation model {model_id!r}")
    if not 0.0 <= r < 1.0:
        raise ValueError(f"correlation coefficient must be in [0, 1), got {r!r}")
    idx = np.arange(M)
    return (float(r) ** np.abs(idx[:, None] - idx[None, :])).astype(complex)


@dataclass(frozen=True)
class CorrelationSet:
    """Per-(l, n, k) ``M x M`` correlation blocks.

    ``blocks`` has shape ``(L, N, K, M, M)``; a broadcast (read-only) view is
    fine when every block is the same.
    """

    blocks: np.ndarray

    @classmethod
    def uniform(cls, L, N, K, M, r=0.0, model_id="exponential"):
        block = build_correlation(model_id, M, r)
        return cls(np.broadcast_to(block, (L, N, K, M, M)))

    @classmethod
    def for_scenario(cls, s):
        return cls.uniform(s.L, s.N, s.K, s.M, s.correlation_coefficient)

    @property
    def L(self):
        return self.blocks.shape[0]

    @property
    def N(self):
        return self.blocks.shape[1]

    @property
    def K(self):
        return self.blocks.shape[2]

    @property
    def M(self):
        return self.blocks.shape[3]

    def is_identity(self):
        return bool(np.all(self.blocks == np.eye(self.M)))

    def full(self, l, k):
        """Block-diagonal ``MN x MN`` matrix ``R_{l,k}``."""
        return la.block_diag(*self.blocks[l, :, k])

    def full_all(self):
        """All ``R_{l,k}`` stacked, shape ``(L, K, MN, MN)``."""
        L, N, K, M = self.L, self.N, self.K, self.M
        out = np.zeros((L, K, N * M, N * M), dtype=complex)
        for n in range(N):
            sl = slice(n * M, (n + 1) * M)
            out[:, :, sl, sl] = self.blocks[:, n]
        return out


def expand_largescale(lam, M):
    """Diagonals of ``Lambda_{l,k}`` from ``lam[l, n, k]``: shape ``(L, K, MN)``."""
    lam = np.asarray(lam, dtype=float)
    return np.repeat(np.transpose(lam, (0, 2, 1)), M, axis=-1)


def covariances(corr, lam):
    """``R_{l,k} Lambda_{l,k}`` for every (l, k), shape ``(L, K, MN, MN)``."""
    return corr.full_all() * expand_largescale(lam, corr.M)[:, :, None, :]


def gen_smallscale(rng, dim):
    """i.i.d. CN(0, 1) entries; ``dim`` may be an int or a shape tuple."""
    shape = (dim,) if np.isscalar(dim) else tuple(dim)
    if any(d < 1 for d in shape):
        raise ValueError("dimensions must be >= 1")
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def blockwise_sqrt(R, M):
    """Hermitian square root of a block-diagonal matrix with ``M x M`` blocks."""
    MN = R.shape[-1]
    out = np.zeros_like(R, dtype=complex)
    for start in range(0, MN, M):
        sl = slice(start, start + M)
        out[..., sl, sl] = psd_sqrt(R[..., sl, sl])
    return out


def assemble_channel(R, Lambda, h, M=None):
    """``g = R^{1/2} Lambda^{1/2} h``.

    Parameters
    ----------
    R : ndarray, shape (MN, MN)
        Block-diagonal PSD correlation matrix.
    Lambda : ndarray, shape (MN,)
        Diagonal of the large-scale matrix.
    h : ndarray, shape (MN,) or (MN, T)
        Small-scale fading; columns are independent realisations.
    M : int, optional
        Block size used for the square root. Defaults to the full matrix.
    """
    Lambda = np.asarray(Lambda, dtype=float)
    if np.any(Lambda < 0):
        raise ValueError("large-scale gains must be >= 0")
    R = np.asarray(R, dtype=complex)
    Rh = blockwise_sqrt(R, M or R.shape[-1])
    scale = np.sqrt(Lambda)
    if np.ndim(h) == 2:
        scale = scale[:, None]
    return Rh @ (scale * h)


@dataclass(frozen=True)
class ChannelSet:
    """True channels. ``G[l]`` is ``MN x K`` with column k equal to ``g_{l,k}``."""

    G: np.ndarray
    h: np.ndarray


def channel_factors(corr, lam):
    """``R_{l,k}^{1/2} Lambda_{l,k}^{1/2}`` for every (l, k), shape ``(L, K, MN, MN)``."""
    lam_full = expand_largescale(lam, corr.M)
    out = np.empty((corr.L, corr.K, corr.M * corr.N, corr.M * corr.N), dtype=complex)
    for l in range(corr.L):
        for k in range(corr.K):
            out[l, k] = blockwise_sqrt(corr.full(l, k), corr.M) * np.sqrt(lam_full[l, k])
    return out


def draw_channels(corr, lam, rng, trials=None):
    """Sample the true channel matrices ``G_l`` of every cell.

    With ``trials=None`` the result holds ``G`` of shape (L, MN, K) and ``h`` of
    shape (L, K, MN); otherwise both gain a leading trial axis.
    """
    S = channel_factors(corr, lam)
    L, K, MN, _ = S.shape
    T = 1 if trials is None else int(trials)
    h = gen_smallscale(rng, (T, L, K, MN))
    G = np.einsum("lkij,tlkj->tlik", S, h)
    if trials is None:
        return ChannelSet(G=G[0], h=h[0])
    return ChannelSet(G=G, h=h)
