"""Baseline Robust PCA solvers for comparison.

``ircur_solve`` reuses the sampled-slice iteration skeleton of the main
solver but feeds the raw slices of D - S_k straight back into the CUR
factors, skipping the tangent projection and the per-step SVD refresh.

``accaltproj_solve`` is the dense accelerated alternating-projections
method: it keeps full n x n iterates, projects D - S_k onto the tangent
space of the current rank-r iterate, and truncates back to rank r through
a structured small-core SVD.
"""

import time

import numpy as np

from .matrix_core import TruncatedSVD, _sign_fix, hard_threshold, require_matrix, truncated_svd
from .solver import DegenerateInputError, RawSliceProvider, SolveResult, _resolve_betas, _solve_sampled
from .tangent import project_tangent_dense


def ircur_solve(d, cfg):
    """Run the raw-slice CUR solver on D.

    Shares initialization, threshold schedule, stopping criterion, and
    result layout with the tangent-projected solver; only the slice update
    differs.
    """
    return _solve_sampled(d, cfg, RawSliceProvider())


def _tangent_rank_truncation(x, w, v, rank):
    """Rank-r SVD of the tangent-space projection of x at (w, v).

    The projection has rank at most 2r and factors as
    [w, Q_b] @ M @ [v, Q_c]^T with M a 2r x 2r core built from two thin QR
    sweeps, so only the core is ever decomposed in full.
    """
    a1 = w.T @ x
    a3 = a1 @ v
    q_b, r_b = np.linalg.qr(x @ v - w @ a3)
    q_c, r_c = np.linalg.qr((a1 - a3 @ v.T).T)
    r = w.shape[1]
    core = np.zeros((2 * r, 2 * r))
    core[:r, :r] = a3
    core[:r, r:] = r_c.T
    core[r:, :r] = r_b
    u_core, sigma, vt_core = np.linalg.svd(core)
    w_new = np.hstack([w, q_b]) @ u_core[:, :rank]
    v_new = np.hstack([v, q_c]) @ vt_core[:rank].T
    w_new, v_new = _sign_fix(w_new, v_new)
    return TruncatedSVD(w_new, sigma[:rank].copy(), v_new)


def accaltproj_solve(d, cfg):
    """Run the dense alternating-projections baseline on D.

    Initialization thresholds and the geometric threshold decay follow the
    same schedule as the CUR solvers but act on full matrices, and the
    stopping criterion is the dense relative residual
    ||D - L_k - S_k||_F / ||D||_F. The result carries the factored SVD of
    L and a dense sparse estimate (``sparse_dense``).
    """
    d = require_matrix(d, "D")
    if cfg.rank > min(d.shape):
        raise ValueError(f"rank {cfg.rank} out of range for shape {d.shape}")
    d_norm = np.linalg.norm(d)
    if d_norm == 0:
        raise DegenerateInputError("observed matrix is identically zero")

    beta1, beta2 = _resolve_betas(d, d, cfg)
    cleaned = np.where(np.abs(d) < beta1, d, 0.0)
    svd = truncated_svd(cleaned, cfg.rank)
    low = (svd.W * svd.sigma) @ svd.V.T
    s = hard_threshold(d - low, beta2)

    zeta0 = cfg.zeta0
    if zeta0 is None:
        zeta0 = float(np.max(np.abs(d - low - s)))
        if zeta0 == 0.0:
            zeta0 = 1.0

    history, times = [], []
    converged = False
    for k in range(cfg.max_iters):
        t0 = time.perf_counter()
        x = d - s
        if cfg.dense_svd:
            svd = truncated_svd(project_tangent_dense(x, svd.W, svd.V), cfg.rank)
        else:
            svd = _tangent_rank_truncation(x, svd.W, svd.V, cfg.rank)
        low = (svd.W * svd.sigma) @ svd.V.T
        s = hard_threshold(d - low, cfg.gamma**k * zeta0)
        err = float(np.linalg.norm(d - low - s) / d_norm)
        times.append(time.perf_counter() - t0)
        history.append(err)
        if err <= cfg.tol:
            converged = True
            break
    return SolveResult(
        factors=None,
        svd=svd,
        sparse=None,
        sparse_dense=s,
        iterations=len(history),
        error_history=history,
        step_times=times,
        converged=converged,
    )
