"""Dense matrix kernels: thresholding, truncated SVD, pseudoinverse, sampling,
and the incoherence / sparsity diagnostics used throughout the toolkit.

All matrices are 2-D float64 ``numpy.ndarray`` objects. Index sets are sorted
1-D integer arrays with distinct entries.
"""

from typing import NamedTuple

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, svds

# Below this dimension a full LAPACK SVD is cheap enough that iterative
# methods are not worth their overhead.
_DENSE_SVD_MAX = 600


class TruncatedSVD(NamedTuple):
    """Rank-r factorization W @ diag(sigma) @ V.T.

    W : (m, r) left singular vectors, orthonormal columns
    sigma : (r,) singular values, non-negative, non-increasing
    V : (n, r) right singular vectors, orthonormal columns
    """

    W: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def require_matrix(a, name="matrix"):
    """Validate and return *a* as a 2-D float64 array with finite entries."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def require_indices(idx, n, name="index set"):
    """Validate *idx* as a sorted 1-D array of distinct integers in [0, n)."""
    idx = np.asarray(idx, dtype=np.intp)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D integer array")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"{name} out of bounds for dimension {n}: [{idx[0]}, {idx[-1]}]")
    if np.any(np.diff(idx) <= 0):
        raise ValueError(f"{name} must be strictly increasing with distinct entries")
    return idx


def hard_threshold(a, zeta):
    """Zero out entries of *a* with magnitude strictly below *zeta*.

    Entries with |a[i, j]| >= zeta are kept unchanged; the operator is
    idempotent and never grows a magnitude.
    """
    if zeta < 0:
        raise ValueError(f"threshold must be non-negative, got {zeta}")
    a = np.asarray(a, dtype=np.float64)
    return np.where(np.abs(a) >= zeta, a, 0.0)


def _sign_fix(w, v):
    """Flip singular-vector pairs so each W column's first nonzero entry is >= 0."""
    for k in range(w.shape[1]):
        col = w[:, k]
        nz = np.flatnonzero(col)
        if nz.size and col[nz[0]] < 0:
            w[:, k] = -col
            v[:, k] = -v[:, k]
    return w, v


def truncated_svd(a, r):
    """Top-r singular triplets of a dense matrix.

    Parameters
    ----------
    a : (m, n) array
    r : int, 1 <= r <= min(m, n)

    Returns
    -------
    TruncatedSVD
        Best rank-r factorization in the Frobenius sense (Eckart-Young).

    Small matrices go through a full LAPACK SVD; large ones through ARPACK
    with a fixed start vector so results are deterministic.
    """
    a = require_matrix(a)
    m, n = a.shape
    if not 1 <= r <= min(m, n):
        raise ValueError(f"rank {r} out of range for shape {a.shape}")

    if min(m, n) <= _DENSE_SVD_MAX or r > min(m, n) // 4:
        w, sigma, vt = np.linalg.svd(a, full_matrices=False)
        w, sigma, v = w[:, :r], sigma[:r], vt[:r].T
    else:
        v0 = np.full(min(m, n), 1.0 / np.sqrt(min(m, n)))
        try:
            w, sigma, vt = svds(a, k=r, v0=v0)
        except ArpackNoConvergence:
            w, sigma, vt = np.linalg.svd(a, full_matrices=False)
        order = np.argsort(sigma)[::-1][:r]
        w, sigma, v = w[:, order], sigma[order], vt[order].T

    w, v = _sign_fix(np.ascontiguousarray(w), np.ascontiguousarray(v))
    return TruncatedSVD(w, np.maximum(sigma, 0.0), v)


def pinv_truncated(a, r, rel_tol=1e-12, tikhonov=False):
    """Rank-r truncated Moore-Penrose pseudoinverse.

    Keeps the top-r singular triplets and inverts sigma_i only where
    sigma_i > rel_tol * sigma_1; smaller values map to zero. With
    ``tikhonov=True`` every kept singular value is shifted by
    1e-10 * sigma_1 before inversion, which tames ill-conditioned
    intersection blocks at the price of a small bias.

    Returns the (n, m) pseudoinverse of an (m, n) input.
    """
    a = require_matrix(a)
    if not 1 <= r <= min(a.shape):
        raise ValueError(f"rank {r} out of range for shape {a.shape}")
    w, sigma, vt = np.linalg.svd(a, full_matrices=False)
    w, sigma, vt = w[:, :r], sigma[:r], vt[:r]
    top = sigma[0]
    if tikhonov and top > 0:
        inv = 1.0 / (sigma + 1e-10 * top)
    else:
        inv = np.where(sigma > rel_tol * top, 1.0 / np.where(sigma > 0, sigma, 1.0), 0.0)
    return (vt.T * inv) @ w.T


def sample_uniform_indices(n, m, rng):
    """Sample m distinct indices from [0, n) uniformly without replacement.

    Output is sorted; deterministic for a given ``numpy.random.Generator``
    state.
    """
    if not 1 <= m <= n:
        raise ValueError(f"cannot sample {m} distinct indices from {n}")
    return np.sort(rng.choice(n, size=m, replace=False))


def incoherence_estimate(svd):
    """Smallest incoherence constant mu consistent with the given factors.

    For an (m, r) block W and (n, r) block V this is
    max((m/r) * max_i ||W[i, :]||^2, (n/r) * max_j ||V[j, :]||^2),
    i.e. the tightest mu for which every row of W and V obeys the
    sqrt(mu * r / n) bound. Always >= 1 for orthonormal blocks.
    """
    w, v = svd.W, svd.V
    r = w.shape[1]
    mu_w = (w.shape[0] / r) * np.max(np.sum(w * w, axis=1))
    mu_v = (v.shape[0] / r) * np.max(np.sum(v * v, axis=1))
    return float(max(mu_w, mu_v))


def sparsity_profile(s):
    """Smallest alpha such that every row and column of *s* is alpha-sparse.

    Returns max over all rows and columns of (nonzero count / length); a
    single dense row drives the value to 1 regardless of global density.
    """
    s = np.asarray(s)
    nz = s != 0
    row_frac = np.max(np.sum(nz, axis=1)) / s.shape[1]
    col_frac = np.max(np.sum(nz, axis=0)) / s.shape[0]
    return float(max(row_frac, col_frac))
