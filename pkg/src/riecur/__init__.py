"""Robust PCA via CUR-factored Riemannian iterations.

Recovers a low-rank matrix L and a sparse matrix S from their observed
sum D. The main solver keeps L as a CUR product and S on sampled slices
only; baselines (a raw-slice CUR iteration and a dense alternating
projection method) share its configuration and result types.
"""

from .baselines import accaltproj_solve, ircur_solve
from .cur import CURFactors, cur_build, cur_cols, cur_full, cur_rows, cur_truncated_svd
from .harness import (
    GridSpec,
    SyntheticProblem,
    gen_low_rank,
    gen_sparse_outliers,
    load_grid_spec,
    make_problem,
    parse_grid_spec,
    run_grid,
    trial_seed,
)
from .matrix_core import (
    TruncatedSVD,
    hard_threshold,
    incoherence_estimate,
    pinv_truncated,
    sample_uniform_indices,
    sparsity_profile,
    truncated_svd,
)
from .matrix_io import (
    FormatError,
    VideoMatrixMeta,
    matrix_to_frames,
    read_matrix,
    read_pgm,
    video_to_matrix,
    write_matrix,
    write_pgm,
)
from .solver import (
    DegenerateInputError,
    IterationState,
    SingularIntersectionError,
    SolveResult,
    SolverConfig,
    SolverError,
    SparseBlocks,
    compute_error,
    init_cur,
    initial_state,
    riecur_solve,
    riecur_step,
    threshold_blocks,
)
from .tangent import (
    project_tangent_dense,
    projected_cols,
    projected_intersection,
    projected_rows,
)

__version__ = "0.1.0"

__all__ = [
    "CURFactors",
    "DegenerateInputError",
    "FormatError",
    "GridSpec",
    "IterationState",
    "SingularIntersectionError",
    "SolveResult",
    "SolverConfig",
    "SolverError",
    "SparseBlocks",
    "SyntheticProblem",
    "TruncatedSVD",
    "VideoMatrixMeta",
    "accaltproj_solve",
    "compute_error",
    "cur_build",
    "cur_cols",
    "cur_full",
    "cur_rows",
    "cur_truncated_svd",
    "gen_low_rank",
    "gen_sparse_outliers",
    "hard_threshold",
    "incoherence_estimate",
    "init_cur",
    "initial_state",
    "ircur_solve",
    "load_grid_spec",
    "make_problem",
    "matrix_to_frames",
    "parse_grid_spec",
    "pinv_truncated",
    "project_tangent_dense",
    "projected_cols",
    "projected_intersection",
    "projected_rows",
    "read_matrix",
    "read_pgm",
    "riecur_solve",
    "riecur_step",
    "run_grid",
    "sample_uniform_indices",
    "sparsity_profile",
    "threshold_blocks",
    "trial_seed",
    "truncated_svd",
    "video_to_matrix",
    "write_matrix",
    "write_pgm",
]
