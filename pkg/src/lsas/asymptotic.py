"""Closed-form large-array approximations of the uplink sum-rate.

Indices are 0-based: cell 0 is the reference cell.
"""

from dataclasses import dataclass

import numpy as np

from .channel import covariances
from .estimation import estimate_statistics
from .exceptions import SingularMatrixError, UnboundedLimitError
from .linalg import check_invertible, solve_hpd


@dataclass(frozen=True)
class XiTable:
    """``xi[i, l, k] = Tr(Q_k^{-1} Lambda_{i,k} R_{i,k} Sigma^{-1} R_{l,k} Lambda_{l,k})``.

    Stored as complex; for real correlation models the imaginary part is
    rounding noise. ``xi[l, i, k]`` is the conjugate of ``xi[i, l, k]``.
    """

    xi: np.ndarray

    @property
    def L(self):
        return self.xi.shape[0]

    @property
    def K(self):
        return self.xi.shape[2]

    def xi_prime(self, k):
        """Interfering-cell block, shape (L-1, L-1)."""
        return self.xi[1:, 1:, k]

    def row(self, k):
        """``xi[0, 1:, k]``."""
        return self.xi[0, 1:, k]

    def col(self, k):
        """``xi[1:, 0, k]``."""
        return self.xi[1:, 0, k]


@dataclass(frozen=True)
class AsymptoticRate:
    """``c_inf`` in bits/s/Hz and the per-user log2 arguments."""

    c_inf: float
    per_user_terms: np.ndarray


def xi_coeff(i, l, k, Q, Lambdas, Rs, Sigma):
    """One coefficient of the deterministic equivalent.

    Parameters
    ----------
    i, l, k : int
    Q : ndarray, shape (K, MN, MN)
    Lambdas : ndarray, shape (L, K, MN)
        Large-scale diagonals.
    Rs : ndarray, shape (L, K, MN, MN)
    Sigma : ndarray, shape (MN, MN)
    """
    lam_i = np.asarray(Lambdas[i, k], dtype=float)
    lam_l = np.asarray(Lambdas[l, k], dtype=float)
    left = solve_hpd(Q[k], lam_i[:, None] * Rs[i, k])          # Q^{-1} Lambda_i R_i
    right = solve_hpd(Sigma, Rs[l, k] * lam_l[None, :])         # Sigma^{-1} R_l Lambda_l
    return complex(np.einsum("ij,ji->", left, right))


def xi_table(stats):
    """All coefficients from an ``EstimateSet`` (uses ``RL`` directly)."""
    L, K, MN, _ = stats.RL.shape
    xi = np.empty((L, L, K), dtype=complex)
    right = np.stack([[solve_hpd(stats.Sigma, stats.RL[l, k]) for k in range(K)]
                      for l in range(L)])
    for k in range(K):
        left = [solve_hpd(stats.Q[k], stats.RL[i, k]) for i in range(L)]
        for i in range(L):
            for l in range(L):
                xi[i, l, k] = np.einsum("ij,ji->", left[i], right[l, k])
    return XiTable(xi)


def c_inf(table):
    """Deterministic-equivalent sum-rate from a ``XiTable``.

    Raises
    ------
    SingularMatrixError
        If ``Xi'_k + I`` is singular for some user.
    """
    terms = np.empty(table.K)
    for k in range(table.K):
        arg = 1.0 + table.xi[0, 0, k]
        if table.L > 1:
            A = table.xi_prime(k) + np.eye(table.L - 1)
            check_invertible(A, f"Xi' + I for user {k}")
            arg = arg - table.row(k) @ np.linalg.solve(A, table.col(k))
        terms[k] = np.real(arg)
    if np.any(terms <= 0):
        raise SingularMatrixError("non-positive SINR argument in c_inf")
    return AsymptoticRate(c_inf=float(np.sum(np.log2(terms))), per_user_terms=terms)


def deterministic_equivalent(corr, largescale, gamma_p, gamma_ul):
    """Convenience chain: covariances, estimation statistics, xi table, ``c_inf``."""
    stats = estimate_statistics(covariances(corr, largescale.lam), gamma_p, gamma_ul)
    return c_inf(xi_table(stats))


def _as_cells_users(lam):
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 3:
        if lam.shape[1] != 1:
            raise ValueError("collocated closed forms need N == 1")
        lam = lam[:, 0, :]
    if lam.ndim != 2:
        raise ValueError("lam must have shape (L, 1, K) or (L, K)")
    return lam


def c_inf_special(lam, M, gamma_p, gamma_ul, corr=None):
    """Closed form for one RRU per cell with uncorrelated antennas.

    Parameters
    ----------
    lam : ndarray, shape (L, 1, K) or (L, K)
    M : int
        Antennas at the reference BS.
    gamma_p, gamma_ul : float
    corr : CorrelationSet, optional
        If given, it must be the identity (checked).
    """
    if corr is not None and (corr.N != 1 or not corr.is_identity()):
        raise ValueError("c_inf_special requires N == 1 and identity correlation")
    lam = _as_cells_users(lam)
    q = lam.sum(axis=0) + gamma_p                      # per user
    eps = lam.sum() - np.sum((lam ** 2).sum(axis=0) / q)
    interference = (lam[1:] ** 2).sum(axis=0)
    sinr = lam[0] ** 2 / (interference + (eps + gamma_ul) / M * q)
    return float(np.sum(np.log2(1.0 + sinr)))


def c_limit(lam):
    """Infinite-antenna limit, set by pilot contamination alone.

    Raises
    ------
    UnboundedLimitError
        If some user has no co-pilot interference.
    """
    lam = _as_cells_users(lam)
    interference = (lam[1:] ** 2).sum(axis=0)
    if np.any(interference <= 0):
        raise UnboundedLimitError(
            "no pilot contamination for some user: the limit is unbounded")
    return float(np.sum(np.log2(1.0 + lam[0] ** 2 / interference)))
