"""Figure rendering for benchmark reports and the video pipeline.

Figures are written next to the artifacts they summarize (the benchmark
CSV, the output frame directories) using the non-interactive Agg
backend, so everything works headless.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLES = {
    "riecur": dict(color="tab:blue", marker="o"),
    "ircur": dict(color="tab:orange", marker="s"),
    "accaltproj": dict(color="tab:green", marker="^"),
}


def _series(rows, solver, variable, column):
    xs, ys = [], []
    key = "n" if variable == "dimension" else "alpha"
    for row in rows:
        if row["trial"] == "agg" and row["solver"] == solver:
            xs.append(float(row[key]))
            ys.append(float(row[column]))
    return xs, ys


def bench_figures(rows, spec, csv_path):
    """Render mean-time and median-error figures alongside the CSV.

    Returns the written figure paths: <csv stem>_time.png and
    <csv stem>_error.png.
    """
    csv_path = Path(csv_path)
    xlabel = "dimension n" if spec.variable == "dimension" else "outlier fraction alpha"
    written = []
    for column, ylabel, suffix in [
        ("wall_time_s", "mean wall time (s)", "_time.png"),
        ("final_rel_error", "median relative error", "_error.png"),
    ]:
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for solver in spec.solvers:
            xs, ys = _series(rows, solver, spec.variable, column)
            if xs:
                ax.plot(xs, ys, label=solver, **_STYLES.get(solver, {}))
        if spec.variable == "dimension":
            ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        out = csv_path.with_name(csv_path.stem + suffix)
        fig.savefig(out, dpi=120)
        plt.close(fig)
        written.append(out)
    return written


def video_summary(d, background, meta, path, frame=None):
    """Render one frame as original / background / foreground panels."""
    if frame is None:
        frame = meta.frame_count // 2
    shape = (meta.frame_height, meta.frame_width)
    panels = [
        ("original", d[:, frame].reshape(shape)),
        ("background", background[:, frame].reshape(shape)),
        ("foreground", (d[:, frame] - background[:, frame]).reshape(shape)),
    ]
    fig, axes = plt.subplots(1, 3, figsize=(9.0, 3.0))
    for ax, (title, img) in zip(axes, panels):
        ax.imshow(img, cmap="gray", vmin=0, vmax=255)
        ax.set_title(title)
        ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
