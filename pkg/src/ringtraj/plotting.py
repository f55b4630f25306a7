"""Matplotlib figures written next to the CSV/JSON outputs."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ringtraj.evaluate import EvalReport, SimTrace, reconstruct_ift, resample_path  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    # fixed metadata keeps repeated runs byte-stable
    "svg.hashsalt": "ringtraj",
}


@contextmanager
def _figure(*args, **kwargs):
    with plt.rc_context(_RC):
        fig = plt.figure(*args, **kwargs)
        try:
            yield fig
        finally:
            plt.close(fig)


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)


def plot_eval(report: EvalReport, paths: dict[str, np.ndarray], out: str | Path,
              terms_shown: tuple[int, ...] = (2, 5, 50), N: int = 100) -> None:
    """Targets with truncated reconstructions (top) and MSE per approach (bottom)."""
    names = report.figures
    with _figure(figsize=(3.2 * len(names), 6.0)) as fig:
        axes = fig.subplots(2, len(names), squeeze=False)
        for j, name in enumerate(names):
            pts = resample_path(paths[name], N)
            ax = axes[0, j]
            ax.plot(*np.vstack([pts, pts[:1]])[:, :2].T, "k.-", ms=2, lw=0.8, label="target")
            for t in terms_shown:
                rec = reconstruct_ift(pts, min(t, len(pts)))
                ax.plot(*np.vstack([rec, rec[:1]])[:, :2].T, lw=1.0, label=f"IFT-{t}")
            ax.set_title(name)
            ax.set_aspect("equal")
            if j == 0:
                ax.legend(loc="best")

            ax = axes[1, j]
            for prefix, marker in (("IFT", "o-"), ("Poly", "s--")):
                rows = [(int(a.split("-")[1]), report.value(a, name))
                        for a in report.approaches if a.startswith(prefix)]
                if rows:
                    x, y = zip(*rows)
                    ax.semilogy(x, np.maximum(y, 1e-32), marker, label=prefix)
            ax.set_xlabel("terms / degree")
            if j == 0:
                ax.set_ylabel("MSE")
                ax.legend(loc="best")
        fig.tight_layout()
        _save(fig, out)


def plot_plan(rows: np.ndarray, out: str | Path, target: np.ndarray | None = None) -> None:
    """3D view of sampled waypoints (``t, x, y, z, ...`` rows)."""
    with _figure(figsize=(5.0, 4.5)) as fig:
        ax = fig.add_subplot(projection="3d")
        if target is not None:
            ax.scatter(target[:, 0], target[:, 1], target[:, 2], s=2, c="0.6", label="target")
        ax.plot(rows[:, 1], rows[:, 2], rows[:, 3], lw=1.0, label="trajectory")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.set_zlabel("z [m]")
        ax.legend(loc="upper left")
        _save(fig, out)


def plot_xy(rings: list[np.ndarray], out: str | Path) -> None:
    """Top-down projection, one line per ring."""
    with _figure(figsize=(4.5, 4.5)) as fig:
        ax = fig.add_subplot()
        for i, r in enumerate(rings, start=1):
            ax.plot(r[:, 0], r[:, 1], lw=1.0, label=f"ring {i}")
        ax.set_aspect("equal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        if len(rings) <= 10:
            ax.legend(loc="best")
        _save(fig, out)


def plot_trace(trace: SimTrace, out: str | Path) -> None:
    """Reference vs. followed path and the position error over time."""
    err = np.linalg.norm(trace.position - trace.ref_position, axis=1)
    with _figure(figsize=(8.0, 3.5)) as fig:
        a0, a1 = fig.subplots(1, 2)
        a0.plot(trace.ref_position[:, 0], trace.ref_position[:, 1], "k--", lw=0.8, label="reference")
        a0.plot(trace.position[:, 0], trace.position[:, 1], lw=1.0, label="follower")
        a0.set_aspect("equal")
        a0.set_xlabel("x [m]")
        a0.set_ylabel("y [m]")
        a0.legend(loc="best")
        a1.plot(trace.t, err)
        a1.set_xlabel("t [s]")
        a1.set_ylabel("|error| [m]")
        fig.tight_layout()
        _save(fig, out)
