"""Command-line front end.

Exit codes: 0 ok, 2 invalid input, 3 empty slice or no contour, 4 infeasible
trajectory with period adjustment disabled, 5 simulation diverged.
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click
import numpy as np

from ringtraj import io as rio
from ringtraj.errors import (
    EmptySliceError,
    InfeasibleTrajectoryError,
    InvalidInputError,
    SimulationDivergedError,
)

EXIT_INVALID = 2
EXIT_EMPTY = 3
EXIT_INFEASIBLE = 4
EXIT_DIVERGED = 5

log = logging.getLogger("ringtraj")


def _exit_on_error(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InvalidInputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INVALID)
        except EmptySliceError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_EMPTY)
        except InfeasibleTrajectoryError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INFEASIBLE)
        except SimulationDivergedError as exc:
            click.echo(f"error: simulation diverged: {exc}", err=True)
            sys.exit(EXIT_DIVERGED)

    return wrapper


def _figures_option(fn):
    return click.option(
        "--figures/--no-figures", default=True, show_default=True,
        help="Render PNG figures next to the data outputs.",
    )(fn)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Smooth Fourier-series inspection trajectories around 2.5D buildings."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command()
@click.option("--heightmap", required=True, type=click.Path(dir_okay=False), help="Heightmap CSV.")
@click.option("--meta", required=True, type=click.Path(dir_okay=False), help="Metadata JSON (cell_size, origin).")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Planner config JSON.")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
@click.option("--debug-dir", type=click.Path(file_okay=False), default=None, help="Dump slice/contour PGMs here.")
@_figures_option
@_exit_on_error
def plan(heightmap, meta, config_path, out_dir, debug_dir, figures):
    """Plan an inspection trajectory for a heightmap."""
    from ringtraj.geometry import load_heightmap
    from ringtraj.planner import PlannerConfig, plan_inspection

    cfg = PlannerConfig.from_dict(rio.read_json(config_path))
    hm = load_heightmap(heightmap, meta_path=meta)
    result = plan_inspection(hm, cfg, debug_dir=debug_dir)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rio.write_json(out / "trajectory.json", result.trajectory.to_dict())
    rows = result.trajectory.waypoints()
    rio.write_rows(out / "waypoints.csv", rio.WAYPOINT_HEADER, rows)
    tp = result.target
    rio.write_rows(
        out / "target_path.csv",
        ("i", "x", "y", "z", "yaw"),
        np.column_stack([np.arange(len(tp)), tp.xs, tp.ys, tp.zs, tp.yaw]),
    )
    rio.write_json(out / "feasibility.json", result.feasibility_dict())
    if figures:
        from ringtraj.plotting import plot_plan

        plot_plan(rows, out / "trajectory.png", target=tp.points())
    click.echo(
        f"rings={result.slices.n} delta_h={result.slices.delta_h:.6g} "
        f"duration={result.trajectory.duration:.6g} feasible={str(result.feasible).lower()}"
    )


def _load_fixtures(directory: Path) -> dict[str, np.ndarray]:
    from ringtraj.evaluate import load_path

    if not directory.is_dir():
        raise InvalidInputError(f"fixture directory not found: {directory}")
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise InvalidInputError(f"no path fixtures (*.csv) in {directory}")
    return {f.stem: load_path(f) for f in files}


@main.command("eval")
@click.option("--fixtures", required=True, type=click.Path(), help="Directory of x,y[,z] path CSVs.")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Report CSV.")
@click.option("--samples", default=100, show_default=True, help="Resample each path to this many points.")
@_figures_option
@_exit_on_error
def eval_cmd(fixtures, out, samples, figures):
    """Reconstruction-error table for truncated Fourier and polynomial fits."""
    from ringtraj.evaluate import build_table

    paths = _load_fixtures(Path(fixtures))
    report = build_table(paths, N=samples)
    with rio.atomic_write(out) as fh:
        report.to_csv(fh)
    if figures:
        from ringtraj.plotting import plot_eval

        plot_eval(report, paths, Path(out).with_suffix(".png"), N=samples)
    click.echo(report.to_text())


@main.command()
@click.option("--trajectory", required=True, type=click.Path(dir_okay=False), help="Trajectory JSON.")
@click.option("--follower", required=True, type=click.Path(dir_okay=False), help="Follower config JSON.")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Trace CSV.")
@_figures_option
@_exit_on_error
def simulate(trajectory, follower, out, figures):
    """Fly the trajectory with a PD-controlled double integrator."""
    from ringtraj.evaluate import FollowerConfig, simulate_follow, tracking_error
    from ringtraj.planner import PlannedTrajectory

    plan_ = PlannedTrajectory.from_dict(rio.read_json(trajectory))
    fdoc = rio.read_json(follower)
    cfg = FollowerConfig.from_dict(fdoc)
    periods = float(fdoc.get("periods", 1.0))
    if len(plan_.segments) == 1:
        ref = plan_.segments[0]
        duration = periods * ref.T
    else:
        ref = plan_
        duration = periods * plan_.duration
    trace = simulate_follow(ref, cfg, duration)
    with rio.atomic_write(out) as fh:
        trace.to_csv(fh)
    if figures:
        from ringtraj.plotting import plot_trace

        plot_trace(trace, Path(out).with_suffix(".png"))
    rms, emax = tracking_error(trace)
    click.echo(f"samples={len(trace)} rms_error={rms:.6g} max_error={emax:.6g}")


@main.command("export-plot")
@click.option("--trajectory", required=True, type=click.Path(dir_okay=False), help="Trajectory JSON.")
@click.option("--svg", "svg_path", required=True, type=click.Path(dir_okay=False), help="SVG output.")
@click.option("--csv", "csv_path", required=True, type=click.Path(dir_okay=False), help="Per-axis series CSV.")
@click.option("--samples", default=400, show_default=True, help="Rows in the CSV series.")
@click.option("--ring-samples", default=200, show_default=True, help="Vertices per ring in the SVG.")
@click.option("--png", "png_path", type=click.Path(dir_okay=False), default=None, help="Also render a PNG.")
@_exit_on_error
def export_plot(trajectory, svg_path, csv_path, samples, ring_samples, png_path):
    """Export an x-y SVG projection and sampled per-axis series."""
    from ringtraj.planner import PlannedTrajectory

    if samples < 1 or ring_samples < 1:
        raise InvalidInputError("sample counts must be >= 1")
    plan_ = PlannedTrajectory.from_dict(rio.read_json(trajectory))
    rings = []
    for seg in plan_.segments:
        pts = seg.position(np.arange(ring_samples) * seg.T / ring_samples)
        rings.append(pts)
    with rio.atomic_write(svg_path) as fh:
        fh.write(rio.svg_projection(rings))
    rio.write_rows(csv_path, rio.WAYPOINT_HEADER, plan_.sample_uniform(samples))
    if png_path:
        from ringtraj.plotting import plot_xy

        plot_xy(rings, png_path)


if __name__ == "__main__":
    main()
