"""Riemannian CUR solver for Robust PCA.

Recovers a low-rank L and sparse S from observations D = L + S. The solver
keeps L in CUR-factored form and S only on the sampled rows and columns, so
no iteration ever touches a dense n x n intermediate. Each step projects the
sampled slices of D - S_k onto the tangent space at the current iterate,
rebuilds the CUR factors from the projected slices, and shrinks the hard
threshold geometrically.

The iteration skeleton is shared with the raw-slice baseline (see
:mod:`riecur.baselines`): the two solvers differ only in the slice provider
that produces the next C, U, R blocks.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from .cur import CURFactors, cur_build, cur_cols, cur_full, cur_rows, cur_truncated_svd
from .matrix_core import (
    TruncatedSVD,
    hard_threshold,
    pinv_truncated,
    require_indices,
    require_matrix,
    sample_uniform_indices,
)
from .tangent import projected_cols, projected_intersection, projected_rows


class SolverError(RuntimeError):
    """Base class for runtime failures inside a solver."""


class SingularIntersectionError(SolverError):
    """An intersection block had no invertible singular values.

    ``iteration`` is the 0-based step index, or None when raised during
    initialization.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class DegenerateInputError(SolverError):
    """The observed matrix vanishes on the sampled slices."""


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters shared by all three solvers.

    rank : target rank of the low-rank component
    tol : stopping tolerance on the relative residual
    zeta0 : initial hard threshold; default is the largest sampled residual
        magnitude after initialization
    gamma : per-iteration threshold decay rate, in (0, 1)
    row_samples, col_samples : number of sampled rows / columns; default
        max(ceil(3 rank ln n), rank + 2)
    max_iters : iteration cap
    resample : redraw the sampled index sets every iteration
    beta1, beta2 : initialization thresholds; defaults derive from the data
        scale (see :func:`init_cur`)
    seed : RNG seed controlling index sampling
    tikhonov : regularize ill-conditioned intersection blocks instead of
        raising (recommended for real data such as video)
    dense_svd : dense-baseline debug switch; route its rank truncation
        through a full SVD instead of the structured small-core path
    """

    rank: int
    tol: float = 1e-6
    zeta0: float | None = None
    gamma: float = 0.65
    row_samples: int | None = None
    col_samples: int | None = None
    max_iters: int = 40
    resample: bool = False
    beta1: float | None = None
    beta2: float | None = None
    seed: int = 0
    tikhonov: bool = False
    dense_svd: bool = False

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.zeta0 is not None and not self.zeta0 > 0:
            raise ValueError(f"zeta0 must be positive, got {self.zeta0}")
        for name in ("beta1", "beta2"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be non-negative, got {val}")
        for name in ("row_samples", "col_samples"):
            val = getattr(self, name)
            if val is not None and val < self.rank:
                raise ValueError(f"{name}={val} is below the target rank {self.rank}")


@dataclass(frozen=True)
class SparseBlocks:
    """Sparse estimate stored only on the sampled slices.

    rows : (|I|, n) block S[I, :]
    cols : (m, |J|) block S[:, J]

    The two blocks agree exactly on the |I| x |J| intersection; both are
    written from the same thresholding pass.
    """

    rows: np.ndarray
    cols: np.ndarray
    row_idx: np.ndarray
    col_idx: np.ndarray

    @property
    def intersection(self):
        return self.rows[:, self.col_idx]


def threshold_blocks(rows_resid, cols_resid, zeta, row_idx, col_idx):
    """Hard-threshold residual slices into a consistent SparseBlocks.

    The rows block is authoritative on the intersection; its thresholded
    values are copied into the columns block so the two agree bitwise even
    where the residuals differ by floating-point reassociation.
    """
    rows = hard_threshold(rows_resid, zeta)
    cols = hard_threshold(cols_resid, zeta)
    cols[row_idx, :] = rows[:, col_idx]
    return SparseBlocks(rows, cols, row_idx, col_idx)


@dataclass
class SolveResult:
    """Outcome of a solver run.

    The CUR-based solvers fill ``factors`` and ``sparse`` (the sparse
    estimate restricted to the sampled slices); the dense baseline fills
    ``svd`` and ``sparse_dense`` instead. The tangent-projected solver
    also carries the factored SVD of the final iterate in ``svd``.
    ``error_history`` has one entry per executed iteration and
    ``converged`` is true iff its last entry is at or below the
    configured tolerance.
    """

    factors: CURFactors | None
    svd: TruncatedSVD | None
    sparse: SparseBlocks | None
    sparse_dense: np.ndarray | None
    iterations: int
    error_history: list
    step_times: list
    converged: bool

    def low_rank(self):
        """Materialize the recovered low-rank matrix densely."""
        if self.factors is not None:
            return cur_full(self.factors)
        if self.svd is not None:
            return (self.svd.W * self.svd.sigma) @ self.svd.V.T
        raise ValueError("result carries no low-rank payload")


@dataclass
class IterationState:
    """Mutable loop state threaded through the shared iteration skeleton."""

    factors: CURFactors
    sparse: SparseBlocks
    svd: TruncatedSVD | None
    zeta0: float
    zeta_current: float
    k: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    rng: np.random.Generator


class TangentSliceProvider:
    """Next C, U, R as slices of the tangent-space projection of D - S_k."""

    needs_tangent = True

    def slices(self, ds_cols, ds_rows, ds_int, svd, row_idx, col_idx, cfg, k):
        if not np.any(np.linalg.svd(ds_int, compute_uv=False) > 0):
            raise SingularIntersectionError(
                f"intersection block of D - S is singular at iteration {k}", iteration=k
            )
        u_pinv = pinv_truncated(ds_int, cfg.rank, tikhonov=cfg.tikhonov)
        w, v = svd.W, svd.V
        c_new = projected_cols(ds_cols, u_pinv, ds_rows, w, v, col_idx)
        r_new = projected_rows(ds_cols, u_pinv, ds_rows, w, v, row_idx)
        u_new = projected_intersection(ds_cols, u_pinv, ds_rows, w, v, row_idx, col_idx)
        return c_new, u_new, r_new


class RawSliceProvider:
    """Next C, U, R as raw slices of D - S_k (no tangent projection)."""

    needs_tangent = False

    def slices(self, ds_cols, ds_rows, ds_int, svd, row_idx, col_idx, cfg, k):
        return ds_cols, ds_int, ds_rows


def _resolve_betas(d_rows, d_cols, cfg):
    """Initialization thresholds; defaults scale with the sampled data."""
    beta1 = cfg.beta1
    if beta1 is None:
        beta1 = 0.5 * max(np.max(np.abs(d_rows)), np.max(np.abs(d_cols)))
    beta2 = cfg.beta2 if cfg.beta2 is not None else cfg.gamma * beta1
    return beta1, beta2


def init_cur(d, cfg, row_idx, col_idx):
    """Two-step initialization of the factors and sparse blocks.

    Entries of magnitude >= beta1 are treated as outliers and zeroed on the
    sampled slices only; the CUR factors of the cleaned slices give L_0, and
    the sparse blocks come from thresholding the remaining residual at
    beta2. Raises SingularIntersectionError when the cleaned intersection
    block has no nonzero singular value (e.g. beta1 = 0 zeroes everything).
    """
    d = require_matrix(d, "D")
    row_idx = require_indices(row_idx, d.shape[0], "row index set")
    col_idx = require_indices(col_idx, d.shape[1], "column index set")
    d_rows = d[row_idx, :]
    d_cols = d[:, col_idx]
    beta1, beta2 = _resolve_betas(d_rows, d_cols, cfg)

    r_blk = np.where(np.abs(d_rows) < beta1, d_rows, 0.0)
    c_blk = np.where(np.abs(d_cols) < beta1, d_cols, 0.0)
    u_blk = r_blk[:, col_idx]
    if not np.any(np.linalg.svd(u_blk, compute_uv=False) > 0):
        raise SingularIntersectionError(
            "initialization produced a singular intersection block "
            f"(beta1={beta1:g} removed all sampled data)"
        )
    factors = cur_build(c_blk, u_blk, r_blk, row_idx, col_idx, cfg.rank, tikhonov=cfg.tikhonov)
    rows_resid = d_rows - cur_rows(factors, row_idx)
    cols_resid = d_cols - cur_cols(factors, col_idx)
    sparse = threshold_blocks(rows_resid, cols_resid, beta2, row_idx, col_idx)
    return factors, sparse


def compute_error(d, factors, sparse):
    """Sampled-slice relative residual.

    (||(D - L - S)[I, :]||_F + ||(D - L - S)[:, J]||_F)
    / (||D[I, :]||_F + ||D[:, J]||_F), with the L slices taken from the
    CUR factors.
    """
    row_idx, col_idx = sparse.row_idx, sparse.col_idx
    d_rows = d[row_idx, :]
    d_cols = d[:, col_idx]
    den = np.linalg.norm(d_rows) + np.linalg.norm(d_cols)
    if den == 0:
        raise DegenerateInputError("observed matrix vanishes on the sampled slices")
    num = np.linalg.norm(d_rows - cur_rows(factors, row_idx) - sparse.rows) + np.linalg.norm(
        d_cols - cur_cols(factors, col_idx) - sparse.cols
    )
    return float(num / den)


def _step(d, state, cfg, provider):
    """Advance the shared iteration by one step.

    Optionally resamples indices, forms the sampled blocks of D - S_k,
    asks the provider for the next C, U, R, rebuilds the factors, shrinks
    the threshold to gamma^k * zeta0, and rewrites the sparse blocks from
    the new residual.
    """
    k = state.k
    row_idx, col_idx = state.row_idx, state.col_idx
    sparse = state.sparse
    if cfg.resample:
        row_idx = sample_uniform_indices(d.shape[0], row_idx.size, state.rng)
        col_idx = sample_uniform_indices(d.shape[1], col_idx.size, state.rng)
        rows_resid = d[row_idx, :] - cur_rows(state.factors, row_idx)
        cols_resid = d[:, col_idx] - cur_cols(state.factors, col_idx)
        sparse = threshold_blocks(rows_resid, cols_resid, state.zeta_current, row_idx, col_idx)

    ds_rows = d[row_idx, :] - sparse.rows
    ds_cols = d[:, col_idx] - sparse.cols
    ds_int = ds_rows[:, col_idx]

    c_new, u_new, r_new = provider.slices(
        ds_cols, ds_rows, ds_int, state.svd, row_idx, col_idx, cfg, k
    )
    if not np.any(np.linalg.svd(u_new, compute_uv=False) > 0):
        raise SingularIntersectionError(
            f"updated intersection block is singular at iteration {k}", iteration=k
        )
    factors = cur_build(c_new, u_new, r_new, row_idx, col_idx, cfg.rank, tikhonov=cfg.tikhonov)

    zeta = cfg.gamma**k * state.zeta0
    rows_resid = d[row_idx, :] - cur_rows(factors, row_idx)
    cols_resid = d[:, col_idx] - cur_cols(factors, col_idx)
    sparse = threshold_blocks(rows_resid, cols_resid, zeta, row_idx, col_idx)
    svd = cur_truncated_svd(factors, cfg.rank) if provider.needs_tangent else None
    return IterationState(
        factors, sparse, svd, state.zeta0, zeta, k + 1, row_idx, col_idx, state.rng
    )


def riecur_step(d, state, cfg):
    """One tangent-projected iteration; returns the advanced state."""
    return _step(d, state, cfg, TangentSliceProvider())


def _resolve_samples(requested, n, rank):
    # Default grows with r log n; CUR reconstructions with fewer rows and
    # columns than that are routinely too ill-conditioned to recover from
    # entry-scale outliers.
    if requested is None:
        return min(n, max(int(np.ceil(3.0 * rank * np.log(n))), rank + 2))
    if requested > n:
        raise ValueError(f"cannot sample {requested} of {n} indices")
    return requested


def initial_state(d, cfg, tangent=True):
    """Sample index sets, run the CUR initialization, and resolve zeta0."""
    d = require_matrix(d, "D")
    if cfg.rank > min(d.shape):
        raise ValueError(f"rank {cfg.rank} out of range for shape {d.shape}")
    rng = np.random.default_rng(cfg.seed)
    n_i = _resolve_samples(cfg.row_samples, d.shape[0], cfg.rank)
    n_j = _resolve_samples(cfg.col_samples, d.shape[1], cfg.rank)
    row_idx = sample_uniform_indices(d.shape[0], n_i, rng)
    col_idx = sample_uniform_indices(d.shape[1], n_j, rng)

    beta1, beta2 = _resolve_betas(d[row_idx, :], d[:, col_idx], cfg)
    cfg_resolved = replace(cfg, beta1=beta1, beta2=beta2)
    factors, sparse = init_cur(d, cfg_resolved, row_idx, col_idx)

    zeta0 = cfg.zeta0
    if zeta0 is None:
        rows_resid = d[row_idx, :] - cur_rows(factors, row_idx)
        cols_resid = d[:, col_idx] - cur_cols(factors, col_idx)
        zeta0 = float(max(np.max(np.abs(rows_resid)), np.max(np.abs(cols_resid))))
        if zeta0 == 0.0:
            # Sampled residual already vanished; any positive threshold is
            # equivalent from here on.
            zeta0 = 1.0
    svd = cur_truncated_svd(factors, cfg.rank) if tangent else None
    return IterationState(factors, sparse, svd, zeta0, beta2, 0, row_idx, col_idx, rng)


def _solve_sampled(d, cfg, provider):
    """Shared driver for the two CUR-based solvers."""
    d = require_matrix(d, "D")
    state = initial_state(d, cfg, tangent=provider.needs_tangent)
    history, times = [], []
    converged = False
    for _ in range(cfg.max_iters):
        t0 = time.perf_counter()
        state = _step(d, state, cfg, provider)
        err = compute_error(d, state.factors, state.sparse)
        times.append(time.perf_counter() - t0)
        history.append(err)
        if err <= cfg.tol:
            converged = True
            break
    return SolveResult(
        factors=state.factors,
        svd=state.svd,
        sparse=state.sparse,
        sparse_dense=None,
        iterations=len(history),
        error_history=history,
        step_times=times,
        converged=converged,
    )


def riecur_solve(d, cfg):
    """Run the tangent-projected CUR solver on D.

    Returns a SolveResult whose ``factors`` represent the recovered
    low-rank matrix; call ``result.low_rank()`` to materialize it. A run
    that hits the iteration cap returns ``converged=False`` rather than
    raising; an identically-zero intersection block raises
    SingularIntersectionError.
    """
    return _solve_sampled(d, cfg, TangentSliceProvider())
