"""Projection onto the tangent space of the fixed-rank manifold.

Given orthonormal blocks W (m x r) and V (n x r) spanning the column and row
spaces of the current low-rank iterate, the tangent space is
{W A^T + B V^T} and the orthogonal projection of X onto it is

    P(X) = W W^T X + X V V^T - W W^T X V V^T.

`project_tangent_dense` is the dense reference operator. The slice variants
compute rows or columns of P(C @ Upinv @ R) directly from CUR blocks without
ever materializing an n x n intermediate, using the auxiliary blocks
Ct = W W^T C and Rt = R V V^T.
"""

import numpy as np

from .matrix_core import require_indices, require_matrix

_ORTHO_TOL = 1e-8


def _check_frame(b, n_ambient, name):
    """Validate an orthonormal block: shape (n_ambient, r), B^T B = I."""
    b = require_matrix(b, name)
    if b.shape[0] != n_ambient:
        raise ValueError(f"{name} has {b.shape[0]} rows, expected {n_ambient}")
    r = b.shape[1]
    gram_err = np.linalg.norm(b.T @ b - np.eye(r))
    if gram_err > _ORTHO_TOL * np.sqrt(r):
        raise ValueError(f"{name} columns are not orthonormal (defect {gram_err:.2e})")
    return b


def project_tangent_dense(x, w, v):
    """Dense reference projection W W^T X + X V V^T - W W^T X V V^T.

    Idempotent, self-adjoint, and rank(P(X)) <= 2r. Orthonormality of *w*
    and *v* is checked; pass the output of a truncated SVD.
    """
    x = require_matrix(x, "X")
    w = _check_frame(w, x.shape[0], "W")
    v = _check_frame(v, x.shape[1], "V")
    if w.shape[1] != v.shape[1]:
        raise ValueError(f"W and V disagree on rank: {w.shape[1]} vs {v.shape[1]}")
    wtx = w.T @ x
    xv = x @ v
    wtxv = wtx @ v
    return w @ wtx + (xv - w @ wtxv) @ v.T


def projected_rows(c_blk, u_pinv, r_blk, w, v, row_idx):
    """Rows *row_idx* of the tangent projection of C @ Upinv @ R.

    Uses Ct = W (W^T C) and Rt = (R V) V^T so the contraction always runs
    through an r- or sample-sized dimension:

        rows = Ct[I, :] Upinv R + (C - Ct)[I, :] Upinv Rt

    Cost O(n r |J| + n r^2); the |I| x n output is the only large block.
    """
    c_blk, u_pinv, r_blk, w, v = _check_blocks(c_blk, u_pinv, r_blk, w, v)
    row_idx = require_indices(row_idx, c_blk.shape[0], "row index set")
    wtc = w.T @ c_blk
    ct_rows = w[row_idx, :] @ wtc
    rt = (r_blk @ v) @ v.T
    return (ct_rows @ u_pinv) @ r_blk + ((c_blk[row_idx, :] - ct_rows) @ u_pinv) @ rt


def projected_cols(c_blk, u_pinv, r_blk, w, v, col_idx):
    """Columns *col_idx* of the tangent projection of C @ Upinv @ R.

    Mirror of :func:`projected_rows`:

        cols = Ct Upinv (R - Rt)[:, J] + C Upinv Rt[:, J]
    """
    c_blk, u_pinv, r_blk, w, v = _check_blocks(c_blk, u_pinv, r_blk, w, v)
    col_idx = require_indices(col_idx, r_blk.shape[1], "column index set")
    ct = w @ (w.T @ c_blk)
    rv = r_blk @ v
    rt_cols = rv @ v[col_idx, :].T
    return ct @ (u_pinv @ (r_blk[:, col_idx] - rt_cols)) + c_blk @ (u_pinv @ rt_cols)


def projected_intersection(c_blk, u_pinv, r_blk, w, v, row_idx, col_idx):
    """The |I| x |J| block of the tangent projection of C @ Upinv @ R.

    Agrees with slicing either projected_rows at *col_idx* or
    projected_cols at *row_idx* up to floating-point reassociation.
    """
    c_blk, u_pinv, r_blk, w, v = _check_blocks(c_blk, u_pinv, r_blk, w, v)
    row_idx = require_indices(row_idx, c_blk.shape[0], "row index set")
    col_idx = require_indices(col_idx, r_blk.shape[1], "column index set")
    wtc = w.T @ c_blk
    ct_rows = w[row_idx, :] @ wtc
    rt = (r_blk @ v) @ v.T
    return (ct_rows @ u_pinv) @ r_blk[:, col_idx] + (
        (c_blk[row_idx, :] - ct_rows) @ u_pinv
    ) @ rt[:, col_idx]


def _check_blocks(c_blk, u_pinv, r_blk, w, v):
    c_blk = require_matrix(c_blk, "column block")
    u_pinv = require_matrix(u_pinv, "intersection pseudoinverse")
    r_blk = require_matrix(r_blk, "row block")
    if c_blk.shape[1] != u_pinv.shape[0]:
        raise ValueError(
            f"column block width {c_blk.shape[1]} does not match "
            f"pseudoinverse rows {u_pinv.shape[0]}"
        )
    if r_blk.shape[0] != u_pinv.shape[1]:
        raise ValueError(
            f"row block height {r_blk.shape[0]} does not match "
            f"pseudoinverse columns {u_pinv.shape[1]}"
        )
    w = _check_frame(w, c_blk.shape[0], "W")
    v = _check_frame(v, r_blk.shape[1], "V")
    if w.shape[1] != v.shape[1]:
        raise ValueError(f"W and V disagree on rank: {w.shape[1]} vs {v.shape[1]}")
    return c_blk, u_pinv, r_blk, w, v
