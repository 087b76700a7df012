"""Synthetic Robust PCA problems and reproducible benchmark grids.

Problems are square: a rank-r Gaussian factor product plus uniformly
valued outliers whose support respects a per-row and per-column cap.
``run_grid`` sweeps dimension or sparsity over a solver list and emits a
flat CSV, one row per trial plus one aggregate row per solver and grid
point. Output is restartable: completed rows are reused, not re-run.
"""

import csv
import os
import time
from dataclasses import dataclass

import numpy as np

from .baselines import accaltproj_solve, ircur_solve
from .solver import SolverConfig, riecur_solve

CSV_COLUMNS = [
    "solver",
    "n",
    "r",
    "alpha",
    "trial",
    "seed",
    "iterations",
    "converged",
    "final_ek",
    "final_rel_error",
    "wall_time_s",
    "time_exclusive",
    "status",
]

SOLVERS = {
    "riecur": riecur_solve,
    "ircur": ircur_solve,
    "accaltproj": accaltproj_solve,
}


def gen_low_rank(n, r, rng, factors=None):
    """Rank-r n x n matrix A @ B.T with i.i.d. standard normal factors.

    ``factors`` substitutes explicit (A, B) for the random draw, which
    keeps deterministic instances expressible in tests.
    """
    if r > n:
        raise ValueError(f"rank {r} exceeds dimension {n}")
    if factors is None:
        a = rng.standard_normal((n, r))
        b = rng.standard_normal((n, r))
    else:
        a, b = factors
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape != (n, r) or b.shape != (n, r):
            raise ValueError(f"injected factors must both be {n}x{r}")
    return a @ b.T


def gen_sparse_outliers(n, alpha, amplitude, rng):
    """Outlier matrix with at most floor(alpha*n) nonzeros per row and column.

    Support is dealt in floor(alpha*n) rounds; each round assigns every
    row one column slot from a fresh random permutation, so the per-row
    and per-column caps hold simultaneously (duplicate slots collapse).
    Nonzero values are i.i.d. uniform on [-amplitude, amplitude].
    """
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if amplitude < 0:
        raise ValueError(f"amplitude must be non-negative, got {amplitude}")
    s = np.zeros((n, n))
    per_line = int(np.floor(alpha * n))
    if per_line == 0:
        return s
    mask = np.zeros((n, n), dtype=bool)
    rows = np.arange(n)
    for _ in range(per_line):
        mask[rows, rng.permutation(n)] = True
    s[mask] = rng.uniform(-amplitude, amplitude, size=int(mask.sum()))
    return s


@dataclass(frozen=True)
class SyntheticProblem:
    """A generated instance D = Ltrue + Strue with its parameters."""

    d: np.ndarray
    l_true: np.ndarray
    s_true: np.ndarray
    n: int
    r: int
    alpha: float
    seed: int


def make_problem(n, r, alpha, seed, amplitude=None):
    """Generate a synthetic instance; outlier amplitude defaults to r.

    The default matches the mean-entry scale of the low-rank part
    (E[L_ij^2] = r), so outliers are not separable by magnitude alone.
    """
    rng = np.random.default_rng(seed)
    l_true = gen_low_rank(n, r, rng)
    s_true = gen_sparse_outliers(n, alpha, r if amplitude is None else amplitude, rng)
    return SyntheticProblem(l_true + s_true, l_true, s_true, n, r, alpha, seed)


@dataclass(frozen=True)
class GridSpec:
    """One benchmark sweep: vary dimension or sparsity, fix the rest."""

    variable: str
    values: tuple
    r: int = 5
    n: int | None = None
    alpha: float | None = None
    tol: float = 1e-6
    max_iters: int = 40
    trials: int = 5
    solvers: tuple = ("riecur", "ircur", "accaltproj")
    seed: int = 0
    amplitude: float | None = None

    def __post_init__(self):
        if self.variable not in ("dimension", "sparsity"):
            raise ValueError(f"variable must be dimension or sparsity, got {self.variable!r}")
        vals = tuple(self.values)
        if not vals:
            raise ValueError("values must be non-empty")
        if any(v <= 0 for v in vals):
            raise ValueError("values must be positive")
        if list(vals) != sorted(vals):
            raise ValueError("values must be sorted ascending")
        object.__setattr__(self, "values", vals)
        if self.variable == "dimension" and self.alpha is None:
            raise ValueError("dimension sweep needs a fixed alpha")
        if self.variable == "sparsity" and self.n is None:
            raise ValueError("sparsity sweep needs a fixed n")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown:
            raise ValueError(f"unknown solvers: {sorted(unknown)}")
        if not self.solvers:
            raise ValueError("solvers must be non-empty")


_GRID_KEYS = {
    "variable": str,
    "n": int,
    "alpha": float,
    "r": int,
    "tol": float,
    "max_iters": int,
    "trials": int,
    "seed": int,
    "amplitude": float,
}


def parse_grid_spec(text):
    """Parse the flat key = value grid format (lists comma-separated)."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"grid spec line {lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "values":
            fields[key] = tuple(_parse_number(v.strip()) for v in value.split(","))
        elif key == "solvers":
            fields[key] = tuple(v.strip() for v in value.split(","))
        elif key in _GRID_KEYS:
            fields[key] = _GRID_KEYS[key](value)
        else:
            raise ValueError(f"grid spec line {lineno}: unknown key {key!r}")
    try:
        return GridSpec(**fields)
    except TypeError as exc:
        raise ValueError(f"grid spec incomplete: {exc}") from exc


def _parse_number(token):
    try:
        return int(token)
    except ValueError:
        return float(token)


def load_grid_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grid_spec(fh.read())


def trial_seed(base, grid_index, trial):
    """Stable per-trial seed; identical across solvers at one grid point."""
    return int(np.random.SeedSequence((base, grid_index, trial)).generate_state(1)[0])


def _grid_point(spec, grid_index):
    value = spec.values[grid_index]
    if spec.variable == "dimension":
        return int(value), float(spec.alpha)
    return int(spec.n), float(value)


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _run_trial(spec, problem, solver_name):
    cfg = SolverConfig(
        rank=spec.r, tol=spec.tol, max_iters=spec.max_iters, seed=problem.seed
    )
    row = {
        "solver": solver_name,
        "n": problem.n,
        "r": spec.r,
        "alpha": problem.alpha,
        "seed": problem.seed,
        "time_exclusive": True,
    }
    t0 = time.perf_counter()
    try:
        result = SOLVERS[solver_name](problem.d, cfg)
    except Exception as exc:  # noqa: BLE001 - a failed trial must not kill the grid
        row.update(
            wall_time_s=time.perf_counter() - t0,
            iterations=0,
            converged=False,
            final_ek=float("nan"),
            final_rel_error=float("nan"),
            status=type(exc).__name__,
        )
        return row
    wall = time.perf_counter() - t0
    l_hat = result.low_rank()
    rel = float(np.linalg.norm(l_hat - problem.l_true) / np.linalg.norm(problem.l_true))
    row.update(
        wall_time_s=wall,
        iterations=result.iterations,
        converged=result.converged,
        final_ek=result.error_history[-1],
        final_rel_error=rel,
        status="ok",
    )
    return row


def _aggregate(spec, grid_index, solver_name, trial_rows):
    n, alpha = _grid_point(spec, grid_index)
    ek = [float(r["final_ek"]) for r in trial_rows]
    rel = [float(r["final_rel_error"]) for r in trial_rows]
    ok = all(str(r["status"]) == "ok" for r in trial_rows)
    return {
        "solver": solver_name,
        "n": n,
        "r": spec.r,
        "alpha": alpha,
        "trial": "agg",
        "seed": spec.seed,
        "iterations": float(np.mean([float(r["iterations"]) for r in trial_rows])),
        "converged": sum(str(r["converged"]) == "true" for r in trial_rows),
        "final_ek": float(np.median(ek)),
        "final_rel_error": float(np.median(rel)),
        "wall_time_s": float(np.mean([float(r["wall_time_s"]) for r in trial_rows])),
        "time_exclusive": trial_rows[0]["time_exclusive"],
        "status": "ok" if ok else "partial",
    }


def _read_existing(path):
    rows = {}
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        return rows
    with fh:
        for row in csv.DictReader(fh):
            rows[(row["solver"], row["n"], row["alpha"], row["trial"])] = row
    return rows


def run_grid(spec, out_path=None):
    """Run the sweep, return all rows in file order, optionally write CSV.

    When ``out_path`` exists its completed rows are reused verbatim and
    only missing trials run; rerunning a finished grid rewrites nothing.
    """
    existing = _read_existing(out_path) if out_path else {}
    out = None
    writer = None
    if out_path:
        try:
            fresh = os.path.getsize(out_path) == 0
        except OSError:
            fresh = True
        out = open(out_path, "a", encoding="utf-8", newline="")
        writer = csv.writer(out)
        if fresh:
            writer.writerow(CSV_COLUMNS)
            out.flush()

    def emit(row):
        text_row = {k: _format_value(row[k]) for k in CSV_COLUMNS}
        if writer is not None:
            writer.writerow([text_row[k] for k in CSV_COLUMNS])
            out.flush()
        return text_row

    all_rows = []
    try:
        for gi in range(len(spec.values)):
            n, alpha = _grid_point(spec, gi)
            per_solver = {name: [] for name in spec.solvers}
            for trial in range(spec.trials):
                seed = trial_seed(spec.seed, gi, trial)
                todo = [
                    name
                    for name in spec.solvers
                    if (name, str(n), _format_value(alpha), str(trial)) not in existing
                ]
                problem = make_problem(n, spec.r, alpha, seed, spec.amplitude) if todo else None
                for name in spec.solvers:
                    key = (name, str(n), _format_value(alpha), str(trial))
                    if key in existing:
                        row = existing[key]
                    else:
                        row = _run_trial(spec, problem, name)
                        row["trial"] = trial
                        row = emit(row)
                    per_solver[name].append(row)
                    all_rows.append(row)
            for name in spec.solvers:
                key = (name, str(n), _format_value(alpha), "agg")
                if key in existing:
                    row = existing[key]
                else:
                    row = emit(_aggregate(spec, gi, name, per_solver[name]))
                all_rows.append(row)
    finally:
        if out is not None:
            out.close()
    return all_rows
