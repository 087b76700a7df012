"""CUR factor algebra.

A low-rank matrix is carried as the product C @ Upinv @ R where C holds full
columns, R holds full rows, and Upinv is the rank-truncated pseudoinverse of
the intersection block. The full product is never formed during iteration;
row/column slices and a truncated SVD are computed directly from the factors.
"""

from dataclasses import dataclass

import numpy as np

from .matrix_core import (
    TruncatedSVD,
    _sign_fix,
    pinv_truncated,
    require_indices,
    require_matrix,
)


@dataclass(frozen=True)
class CURFactors:
    """Factored representation C @ Upinv @ R of a rank-<=r matrix.

    C : (n_rows, |J|) sampled columns
    Upinv : (|J|, |I|) stored pseudoinverse of the intersection block
    R : (|I|, n_cols) sampled rows
    row_idx, col_idx : the sampled row set I and column set J
    rank : truncation rank used when inverting the intersection
    """

    C: np.ndarray
    Upinv: np.ndarray
    R: np.ndarray
    row_idx: np.ndarray
    col_idx: np.ndarray
    rank: int

    @property
    def shape(self):
        return (self.C.shape[0], self.R.shape[1])


def cur_build(C, U, R, row_idx, col_idx, rank, tikhonov=False):
    """Assemble CURFactors from sampled blocks.

    *U* is the |I| x |J| intersection block; its rank-*rank* truncated
    pseudoinverse is computed once and stored, since it is applied many
    times per iteration. No dense product is formed.
    """
    C = require_matrix(C, "C")
    U = require_matrix(U, "U")
    R = require_matrix(R, "R")
    row_idx = require_indices(row_idx, C.shape[0], "row index set")
    col_idx = require_indices(col_idx, R.shape[1], "column index set")
    if U.shape != (row_idx.size, col_idx.size):
        raise ValueError(
            f"intersection block has shape {U.shape}, "
            f"expected ({row_idx.size}, {col_idx.size})"
        )
    if C.shape[1] != col_idx.size:
        raise ValueError(f"C has {C.shape[1]} columns, expected {col_idx.size}")
    if R.shape[0] != row_idx.size:
        raise ValueError(f"R has {R.shape[0]} rows, expected {row_idx.size}")
    upinv = pinv_truncated(U, rank, tikhonov=tikhonov)
    return CURFactors(C, upinv, R, row_idx, col_idx, rank)


def cur_cols(factors, col_idx):
    """Columns *col_idx* of the represented matrix, as C @ (Upinv @ R[:, J2]).

    Contracts through the small dimensions first, so the cost is
    O(n |I| |J|) rather than O(n^2).
    """
    col_idx = require_indices(col_idx, factors.R.shape[1], "column index set")
    return factors.C @ (factors.Upinv @ factors.R[:, col_idx])


def cur_rows(factors, row_idx):
    """Rows *row_idx* of the represented matrix, as (C[I2, :] @ Upinv) @ R."""
    row_idx = require_indices(row_idx, factors.C.shape[0], "row index set")
    return (factors.C[row_idx, :] @ factors.Upinv) @ factors.R


def cur_full(factors):
    """Materialize the represented matrix densely (O(n^2) cost and memory)."""
    return (factors.C @ factors.Upinv) @ factors.R


def cur_truncated_svd(factors, r):
    """Rank-r truncated SVD of C @ Upinv @ R without forming the product.

    Thin QR of C and of R.T reduce the problem to an SVD of the small
    |J| x |I| core, so the cost stays O(n (r log n)^2). Singular-vector
    signs follow the first-nonzero-entry convention of
    :func:`riecur.matrix_core.truncated_svd`.
    """
    n_i, n_j = factors.Upinv.shape[1], factors.Upinv.shape[0]
    if not 1 <= r <= min(n_i, n_j):
        raise ValueError(f"rank {r} out of range for {n_i} rows / {n_j} columns sampled")
    q_c, r_c = np.linalg.qr(factors.C)
    q_r, r_r = np.linalg.qr(factors.R.T)
    core = r_c @ factors.Upinv @ r_r.T
    if r > min(core.shape):
        raise ValueError(f"rank {r} exceeds ambient dimensions {factors.shape}")
    u_core, sigma, vt_core = np.linalg.svd(core, full_matrices=False)
    w = q_c @ u_core[:, :r]
    v = q_r @ vt_core[:r].T
    w, v = _sign_fix(w, v)
    return TruncatedSVD(w, sigma[:r].copy(), v)
