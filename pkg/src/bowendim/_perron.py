"""Perron-Frobenius data for nonnegative irreducible matrices."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

POWER_TOL = 1e-14
POWER_MAX_ITER = 20000
DENSE_LIMIT = 512


@dataclass(frozen=True)
class PerronData:
    """Perron root with strictly positive right/left eigenvectors.

    ``right`` is normalised to sum 1 and ``left`` so that ``left @ right == 1``.
    ``method`` records which solver produced the numbers.
    """

    rho: float
    right: np.ndarray
    left: np.ndarray
    method: str


def _power(M, tol, max_iter):
    n = M.shape[0]
    v = np.full(n, 1.0 / n)
    # shifting by the identity makes an irreducible matrix primitive
    for it in range(1, max_iter + 1):
        w = M @ v + v
        w = np.asarray(w).ravel()
        w /= w.sum()
        if np.max(np.abs(w - v)) <= tol:
            return w, it
        v = w
    return None, max_iter


def _dense_vector(M, transpose=False):
    A = M.toarray() if sp.issparse(M) else np.asarray(M)
    if transpose:
        A = A.T
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    return v / v.sum()


def _sparse_vector(M, transpose=False):
    A = M.T if transpose else M
    vals, vecs = spla.eigs(sp.csr_matrix(A), k=1, which="LR", tol=1e-15)
    v = np.abs(vecs[:, 0].real)
    return v / v.sum()


def _vector(M, transpose, tol, max_iter, dense_limit):
    A = M.T if transpose else M
    v, _ = _power(A, tol, max_iter)
    if v is not None:
        return v, "power"
    if M.shape[0] <= dense_limit:
        return _dense_vector(M, transpose), "dense-eig"
    return _sparse_vector(M, transpose), "arnoldi"


def perron(M, tol=POWER_TOL, max_iter=POWER_MAX_ITER, dense_limit=DENSE_LIMIT):
    """Compute Perron data of a nonnegative irreducible matrix.

    Power iteration from the uniform vector is tried first; if it has not
    converged after ``max_iter`` steps a full eigensolve is used for matrices
    up to ``dense_limit`` rows and ARPACK beyond that.
    """
    if M.shape[0] == 1:
        val = float(M.toarray()[0, 0] if sp.issparse(M) else np.asarray(M)[0, 0])
        one = np.ones(1)
        return PerronData(val, one, one, "scalar")
    right, m1 = _vector(M, False, tol, max_iter, dense_limit)
    left, m2 = _vector(M, True, tol, max_iter, dense_limit)
    Mr = np.asarray(M @ right).ravel()
    rho = float(Mr.sum() / right.sum())
    left = left / float(left @ right)
    method = m1 if m1 == m2 else f"{m1}/{m2}"
    return PerronData(rho, right, left, method)


def spectral_radius(M):
    """Perron root of a nonnegative irreducible matrix."""
    return perron(M).rho
