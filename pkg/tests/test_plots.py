"""Unit tests for figure rendering (headless, file-based)."""

import numpy as np

from riecur.harness import GridSpec
from riecur.matrix_io import VideoMatrixMeta
from riecur.plots import bench_figures, video_summary

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def agg_row(solver, n, alpha, t, err):
    return {
        "solver": solver,
        "trial": "agg",
        "n": str(n),
        "alpha": repr(alpha),
        "wall_time_s": repr(t),
        "final_rel_error": repr(err),
    }


class TestBenchFigures:
    def test_writes_both_figures(self, tmp_path):
        spec = GridSpec(variable="dimension", values=(100, 200), alpha=0.3,
                        solvers=("riecur", "ircur"))
        rows = [
            agg_row("riecur", 100, 0.3, 0.5, 1e-6),
            agg_row("riecur", 200, 0.3, 1.1, 2e-6),
            agg_row("ircur", 100, 0.3, 0.4, 5e-6),
            agg_row("ircur", 200, 0.3, 0.9, 9e-6),
            # non-aggregate rows must be ignored by the figure code
            {"solver": "riecur", "trial": "0", "n": "100", "alpha": "0.3",
             "wall_time_s": "99.0", "final_rel_error": "99.0"},
        ]
        csv_path = tmp_path / "bench.csv"
        csv_path.write_text("placeholder\n")
        written = bench_figures(rows, spec, csv_path)
        assert [p.name for p in written] == ["bench_time.png", "bench_error.png"]
        for p in written:
            assert p.exists()
            assert p.read_bytes()[:8] == PNG_MAGIC

    def test_sparsity_sweep_axes(self, tmp_path):
        spec = GridSpec(variable="sparsity", values=(0.5, 0.7), n=100,
                        solvers=("riecur",))
        rows = [
            agg_row("riecur", 100, 0.5, 0.2, 1e-5),
            agg_row("riecur", 100, 0.7, 0.3, 1e-2),
        ]
        csv_path = tmp_path / "sweep.csv"
        written = bench_figures(rows, spec, csv_path)
        assert all(p.exists() for p in written)


class TestVideoSummary:
    def test_writes_png(self, tmp_path):
        rng = np.random.default_rng(0)
        meta = VideoMatrixMeta(frame_height=6, frame_width=8, frame_count=4)
        d = rng.uniform(0, 255, size=(48, 4))
        bg = np.tile(d[:, :1], (1, 4))
        out = video_summary(d, bg, meta, tmp_path / "summary.png")
        assert out.exists()
        assert out.read_bytes()[:8] == PNG_MAGIC

    def test_explicit_frame_index(self, tmp_path):
        meta = VideoMatrixMeta(frame_height=4, frame_width=4, frame_count=3)
        d = np.zeros((16, 3))
        out = video_summary(d, d, meta, tmp_path / "s.png", frame=2)
        assert out.exists()
