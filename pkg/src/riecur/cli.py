"""Command-line interface.

Subcommands: solve (matrix in, factors and optional dense output),
synth (write a synthetic problem), bench (grid spec in, CSV and figures
out), video (PGM frame dir in, background/foreground frame dirs out),
selftest (run bundled invariant checks).

Exit codes: 0 success, 2 invalid arguments, 3 file format error,
4 solver failure (or non-convergence under --strict).
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .harness import SOLVERS, load_grid_spec, make_problem, run_grid
from .matrix_io import (
    FormatError,
    matrix_to_frames,
    read_matrix,
    video_to_matrix,
    write_matrix,
)
from .solver import SolverConfig, SolverError


def _add_solver_flags(p, rank_default=None, tikhonov_default=False):
    if rank_default is None:
        p.add_argument("--rank", type=int, required=True, help="target rank of L")
    else:
        p.add_argument("--rank", type=int, default=rank_default, help="target rank of L")
    p.add_argument("--solver", choices=sorted(SOLVERS), default="riecur")
    p.add_argument("--tol", type=float, default=1e-6, help="stopping tolerance")
    p.add_argument("--gamma", type=float, default=0.65, help="threshold decay rate")
    p.add_argument("--zeta0", type=float, default=None, help="initial threshold")
    p.add_argument("--beta1", type=float, default=None, help="first init threshold")
    p.add_argument("--beta2", type=float, default=None, help="second init threshold")
    p.add_argument("--samples-rows", type=int, default=None, help="sampled row count")
    p.add_argument("--samples-cols", type=int, default=None, help="sampled column count")
    p.add_argument("--max-iters", type=int, default=40)
    p.add_argument("--resample", action="store_true", help="redraw indices every iteration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--tikhonov",
        action=argparse.BooleanOptionalAction,
        default=tikhonov_default,
        help="regularize ill-conditioned intersection blocks",
    )
    p.add_argument(
        "--strict", action="store_true", help="exit 4 when the solver does not converge"
    )


def _config_from_args(args):
    return SolverConfig(
        rank=args.rank,
        tol=args.tol,
        zeta0=args.zeta0,
        gamma=args.gamma,
        row_samples=args.samples_rows,
        col_samples=args.samples_cols,
        max_iters=args.max_iters,
        resample=args.resample,
        beta1=args.beta1,
        beta2=args.beta2,
        seed=args.seed,
        tikhonov=args.tikhonov,
    )


def _report(pairs):
    for key, value in pairs:
        if isinstance(value, bool):
            value = "true" if value else "false"
        print(f"{key} = {value}")


def _write_factors(result, outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if result.factors is not None:
        f = result.factors
        write_matrix(f.C, outdir / "C.mat")
        write_matrix(f.Upinv, outdir / "Upinv.mat")
        write_matrix(f.R, outdir / "R.mat")
        np.savetxt(outdir / "row_idx.csv", f.row_idx, fmt="%d")
        np.savetxt(outdir / "col_idx.csv", f.col_idx, fmt="%d")
    elif result.svd is not None:
        write_matrix(result.svd.W, outdir / "W.mat")
        write_matrix(result.svd.sigma[:, None], outdir / "sigma.mat")
        write_matrix(result.svd.V, outdir / "V.mat")


def cmd_solve(args):
    d = read_matrix(args.matrix)
    cfg = _config_from_args(args)
    t0 = time.perf_counter()
    result = SOLVERS[args.solver](d, cfg)
    wall = time.perf_counter() - t0
    _report(
        [
            ("solver", args.solver),
            ("rows", d.shape[0]),
            ("cols", d.shape[1]),
            ("iterations", result.iterations),
            ("converged", result.converged),
            ("final_error", result.error_history[-1]),
            ("wall_time_s", f"{wall:.6f}"),
        ]
    )
    if args.factors_out:
        _write_factors(result, args.factors_out)
        print(f"factors_out = {args.factors_out}")
    if args.lowrank_out:
        write_matrix(result.low_rank(), args.lowrank_out)
        print(f"lowrank_out = {args.lowrank_out}")
    if args.strict and not result.converged:
        return 4
    return 0


def cmd_synth(args):
    problem = make_problem(args.n, args.rank, args.alpha, args.seed, args.amplitude)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_matrix(problem.d, outdir / "D.mat")
    write_matrix(problem.l_true, outdir / "L.mat")
    write_matrix(problem.s_true, outdir / "S.mat")
    _report(
        [
            ("n", args.n),
            ("rank", args.rank),
            ("alpha", args.alpha),
            ("seed", args.seed),
            ("outdir", outdir),
        ]
    )
    return 0


def cmd_bench(args):
    spec = load_grid_spec(args.spec)
    rows = run_grid(spec, args.output)
    print(f"csv = {args.output}")
    if args.plot:
        from .plots import bench_figures

        for path in bench_figures(rows, spec, args.output):
            print(f"figure = {path}")
    return 0


def cmd_video(args):
    d, meta = video_to_matrix(args.frames)
    cfg = _config_from_args(args)
    t0 = time.perf_counter()
    result = SOLVERS[args.solver](d, cfg)
    wall = time.perf_counter() - t0
    background = result.low_rank()
    outdir = Path(args.outdir)
    matrix_to_frames(background, meta, outdir / "background")
    matrix_to_frames(d - background, meta, outdir / "foreground")
    _report(
        [
            ("frames", meta.frame_count),
            ("frame_size", f"{meta.frame_height}x{meta.frame_width}"),
            ("solver", args.solver),
            ("iterations", result.iterations),
            ("converged", result.converged),
            ("final_error", result.error_history[-1]),
            ("wall_time_s", f"{wall:.6f}"),
            ("background_dir", outdir / "background"),
            ("foreground_dir", outdir / "foreground"),
        ]
    )
    if args.plot:
        from .plots import video_summary

        path = video_summary(d, background, meta, outdir / "summary.png")
        print(f"figure = {path}")
    if args.strict and not result.converged:
        return 4
    return 0


def _selftest_checks(seed):
    from . import cur, harness, matrix_core, solver, tangent

    rng = np.random.default_rng(seed)

    def check_threshold():
        a = np.array([[3.0, 0.5], [-2.0, 1.0]])
        out = matrix_core.hard_threshold(a, 1.0)
        assert np.array_equal(out, np.array([[3.0, 0.0], [-2.0, 1.0]]))

    def check_cur_exactness():
        a = rng.standard_normal((30, 3)) @ rng.standard_normal((3, 30))
        idx = matrix_core.sample_uniform_indices(30, 8, rng)
        jdx = matrix_core.sample_uniform_indices(30, 8, rng)
        f = cur.cur_build(a[:, jdx], a[np.ix_(idx, jdx)], a[idx, :], idx, jdx, 3)
        assert np.linalg.norm(cur.cur_full(f) - a) <= 1e-9 * np.linalg.norm(a)

    def check_tangent_slices():
        n, r = 40, 3
        x = rng.standard_normal((n, n))
        w = np.linalg.qr(rng.standard_normal((n, r)))[0]
        v = np.linalg.qr(rng.standard_normal((n, r)))[0]
        idx = matrix_core.sample_uniform_indices(n, 10, rng)
        jdx = matrix_core.sample_uniform_indices(n, 10, rng)
        u_pinv = matrix_core.pinv_truncated(x[np.ix_(idx, jdx)], r)
        dense = tangent.project_tangent_dense(
            x[:, jdx] @ (u_pinv @ x[idx, :]), w, v
        )
        rows = tangent.projected_rows(x[:, jdx], u_pinv, x[idx, :], w, v, idx)
        assert np.linalg.norm(rows - dense[idx, :]) <= 1e-10 * max(
            1.0, np.linalg.norm(dense[idx, :])
        )

    def check_fixed_point():
        d = harness.gen_low_rank(60, 3, rng)
        cfg = solver.SolverConfig(
            rank=3, beta1=2 * float(np.max(np.abs(d))), seed=seed, max_iters=5, tol=1e-12
        )
        result = solver.riecur_solve(d, cfg)
        assert result.converged and result.iterations <= 3

    def check_matrix_roundtrip():
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            from . import matrix_io

            m = rng.standard_normal((4, 7))
            path = Path(tmp) / "m.mat"
            matrix_io.write_matrix(m, path)
            assert np.array_equal(matrix_io.read_matrix(path), m)

    def check_pgm_roundtrip():
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            from . import matrix_io

            frame = rng.integers(0, 256, size=(6, 9), dtype=np.uint8)
            path = Path(tmp) / "f.pgm"
            matrix_io.write_pgm(frame, path)
            assert np.array_equal(matrix_io.read_pgm(path), frame)

    return [
        ("hard-threshold", check_threshold),
        ("cur-exactness", check_cur_exactness),
        ("tangent-slices", check_tangent_slices),
        ("solver-fixed-point", check_fixed_point),
        ("matrix-roundtrip", check_matrix_roundtrip),
        ("pgm-roundtrip", check_pgm_roundtrip),
    ]


def cmd_selftest(args):
    failed = 0
    for name, fn in _selftest_checks(args.seed):
        try:
            fn()
            status = "PASS"
        except Exception as exc:  # noqa: BLE001 - report, do not crash
            status = f"FAIL ({exc or type(exc).__name__})"
            failed += 1
        print(f"{name}: {status}")
    return 4 if failed else 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="riecur",
        description="Robust PCA via CUR-factored Riemannian iterations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decompose a matrix file into low-rank + sparse")
    p.add_argument("matrix", help="input matrix (.mat container or .csv)")
    _add_solver_flags(p)
    p.add_argument("--lowrank-out", default=None, help="write the dense recovered L here")
    p.add_argument("--factors-out", default=None, help="write factor files to this directory")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("synth", help="generate a synthetic problem")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run a benchmark grid")
    p.add_argument("spec", help="grid spec file (key = value lines)")
    p.add_argument("--output", required=True, help="output CSV path")
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("video", help="split PGM frames into background and foreground")
    p.add_argument("frames", help="directory of PGM frames")
    p.add_argument("--outdir", required=True)
    _add_solver_flags(p, rank_default=1, tikhonov_default=True)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_video)

    p = sub.add_parser("selftest", help="run bundled invariant checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
