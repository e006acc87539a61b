"""Hermitian matrix helpers shared by the estimation and rate modules.

All routines accept stacks of matrices (leading batch axes) unless noted.
"""

import warnings

import numpy as np
import scipy.linalg as la

from .exceptions import SingularMatrixError

#: Eigenvalues below this are treated as zero by the PSD square root and repair.
EIG_FLOOR = 1e-12

_repairs = {"count": 0}


def repair_count():
    """Number of Cholesky failures that were patched by an eigenvalue clamp."""
    return _repairs["count"]


def reset_repair_count():
    _repairs["count"] = 0


def hermitian_part(A):
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def psd_sqrt(A):
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues below ``EIG_FLOOR`` (relative to the largest one) are clamped
    to zero. Clearly negative eigenvalues raise ``SingularMatrixError``.
    """
    A = hermitian_part(np.asarray(A, dtype=complex))
    w, V = np.linalg.eigh(A)
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    scale = np.where(scale > 0, scale, 1.0)
    if np.any(w < -1e-8 * scale):
        raise SingularMatrixError("matrix is not positive semi-definite")
    w = np.where(w < EIG_FLOOR * scale, 0.0, w)
    return (V * np.sqrt(w)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def inv_sqrt_pd(A):
    """Inverse Hermitian square root ``A^{-1/2}`` of a positive definite matrix."""
    A = hermitian_part(np.asarray(A, dtype=complex))
    w, V = np.linalg.eigh(A)
    if np.any(w <= 0):
        raise SingularMatrixError("matrix is not positive definite")
    return (V / np.sqrt(w)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def cholesky(A):
    """Lower Cholesky factor of a Hermitian PD matrix (or stack).

    Clearly indefinite input raises ``SingularMatrixError``. Otherwise, on
    failure the matrix is repaired by clamping its eigenvalues at
    ``EIG_FLOOR`` times the largest one; each repair bumps ``repair_count()``
    and emits a ``RuntimeWarning``.
    """
    A = hermitian_part(np.asarray(A, dtype=complex))
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        pass
    w, V = np.linalg.eigh(A)
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    if np.any(scale == 0):
        raise SingularMatrixError("cannot factor an all-zero matrix")
    if np.any(w < -1e-8 * scale):
        raise SingularMatrixError("matrix is not positive definite")
    w = np.maximum(w, EIG_FLOOR * scale)
    _repairs["count"] += 1
    warnings.warn("Cholesky failed; matrix repaired by eigenvalue clamp",
                  RuntimeWarning, stacklevel=2)
    A = (V * w[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    return np.linalg.cholesky(hermitian_part(A))


def logdet_hpd(A, base=2.0):
    """log-determinant of a Hermitian PD matrix from its Cholesky factor."""
    L = cholesky(A)
    d = np.real(np.diagonal(L, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log(d), axis=-1) / np.log(base)


def solve_hpd(A, B):
    """Solve ``A X = B`` for Hermitian PD ``A`` (single matrix)."""
    try:
        return la.solve(A, B, assume_a="pos")
    except (la.LinAlgError, ValueError) as exc:
        raise SingularMatrixError(str(exc)) from exc


def check_invertible(A, what="matrix", rcond=None):
    """Raise ``SingularMatrixError`` if ``A`` is numerically singular."""
    if rcond is None:
        rcond = 1.0 / (np.finfo(float).eps * max(A.shape[-1], 1))
    c = np.linalg.cond(A)
    if not np.isfinite(c) or c > rcond:
        raise SingularMatrixError(f"{what} is singular (condition number {c:.3g})")
