"""End-to-end planning: heightmap -> rings -> Fourier trajectories."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ringtraj import contour as ct
from ringtraj.errors import EmptySliceError, InfeasibleTrajectoryError, InvalidInputError
from ringtraj.geometry import HeightMap, VoxelGrid, voxelize
from ringtraj.ringpath import (
    RingSignal,
    TargetPath,
    build_ring_signal,
    build_target_path,
    polyline_length,
    slice_centroid,
)
from ringtraj.slicing import SensorConfig, SlicePlan, plan_slices, ring_slices
from ringtraj.spectral import (
    YAW_MODES,
    Z_MODES,
    FeasibilityReport,
    FourierTrajectory,
    feasibility_check,
    fit_ring,
    make_feasible,
)

log = logging.getLogger(__name__)

SCOPES = ("per-ring", "whole-path")


@dataclass(frozen=True)
class PlannerConfig:
    sensor: SensorConfig
    resolution: float
    samples_per_ring: int = 100
    terms: int = 21
    yaw_mode: str = "centroid"
    z_mode: str = "linear"
    synthesis_scope: str = "per-ring"
    adjust_period: bool = True
    standoff_radius_cells: int | None = None
    kernel_shape: str = "disk"
    fixed_yaw: float = 0.0
    cruise_fraction: float = 0.5  # initial period uses this fraction of v_max

    def __post_init__(self) -> None:
        if not self.resolution > 0:
            raise InvalidInputError("resolution must be positive")
        if self.samples_per_ring < 3:
            raise InvalidInputError("samples_per_ring must be >= 3")
        if not 1 <= self.terms <= self.samples_per_ring:
            raise InvalidInputError("terms must lie in 1..samples_per_ring")
        if self.yaw_mode not in YAW_MODES:
            raise InvalidInputError(f"yaw_mode must be one of {YAW_MODES}")
        if self.z_mode not in Z_MODES:
            raise InvalidInputError(f"z_mode must be one of {Z_MODES}")
        if self.synthesis_scope not in SCOPES:
            raise InvalidInputError(f"synthesis_scope must be one of {SCOPES}")
        if not 0 < self.cruise_fraction <= 1:
            raise InvalidInputError("cruise_fraction must lie in (0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "PlannerConfig":
        """Build from the planner JSON; sensor keys may sit at top level or under ``sensor``."""
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a JSON object")
        sensor = SensorConfig.from_dict(data.get("sensor", data))
        if "resolution" not in data:
            raise InvalidInputError("missing config key 'resolution'")
        optional = (
            "samples_per_ring", "terms", "yaw_mode", "z_mode", "synthesis_scope",
            "adjust_period", "standoff_radius_cells", "kernel_shape", "fixed_yaw",
            "cruise_fraction",
        )
        kwargs = {k: data[k] for k in optional if k in data}
        try:
            return cls(sensor=sensor, resolution=float(data["resolution"]), **kwargs)
        except TypeError as exc:
            raise InvalidInputError(str(exc)) from exc


@dataclass(frozen=True)
class PlannedTrajectory:
    """Rings flown back to back; ring ``i`` starts at ``t_starts[i]``."""

    segments: tuple[FourierTrajectory, ...]
    synthesis_scope: str = "per-ring"

    @property
    def t_starts(self) -> NDArray[np.float64]:
        return np.concatenate([[0.0], np.cumsum([s.T for s in self.segments])[:-1]])

    @property
    def duration(self) -> float:
        return float(sum(s.T for s in self.segments))

    def _locate(self, t: float) -> tuple[FourierTrajectory, float]:
        starts = self.t_starts
        i = int(np.searchsorted(starts, t, side="right") - 1)
        i = min(max(i, 0), len(self.segments) - 1)
        return self.segments[i], t - starts[i]

    def state(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Reference position and velocity; holds the final point after the end."""
        if t >= self.duration:
            last = self.segments[-1]
            return last.position(last.T), np.zeros(3)
        seg, tau = self._locate(t)
        return seg.state(tau)

    def states(self, t: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Vectorized :meth:`state` over an array of times."""
        t = np.asarray(t, dtype=np.float64)
        pos = np.empty(t.shape + (3,))
        vel = np.zeros(t.shape + (3,))
        starts = self.t_starts
        idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(self.segments) - 1)
        after = t >= self.duration
        for i, seg in enumerate(self.segments):
            m = (idx == i) & ~after
            if m.any():
                pos[m], vel[m] = seg.states(t[m] - starts[i])
        if after.any():
            last = self.segments[-1]
            pos[after] = last.position(last.T)
        return pos, vel

    def waypoints(self) -> NDArray[np.float64]:
        """Rows ``t, x, y, z, vx, vy, vz, psi`` at each ring's fitted sample times."""
        rows = []
        for t0, seg in zip(self.t_starts, self.segments):
            Q = seg.sample_count or (2 * seg.N + 1)
            tau = np.arange(Q) * seg.T / Q
            p = seg.position(tau)
            v = seg.velocity(tau)
            psi = seg.yaw(tau)
            rows.append(np.column_stack([t0 + tau, p, v, psi]))
        return np.vstack(rows)

    def sample_uniform(self, count: int) -> NDArray[np.float64]:
        """``count`` rows of ``t, x, y, z, vx, vy, vz, psi`` evenly over the whole duration."""
        if count < 1:
            raise InvalidInputError("count must be >= 1")
        ts = np.arange(count) * self.duration / count
        rows = []
        for t in ts:
            seg, tau = self._locate(t)
            rows.append([t, *seg.position(tau), *seg.velocity(tau), float(seg.yaw(tau))])
        return np.asarray(rows)

    def to_dict(self) -> dict:
        rings = []
        for t0, seg in zip(self.t_starts, self.segments):
            d = seg.to_dict()
            d["t_start"] = float(t0)
            rings.append(d)
        return {
            "synthesis_scope": self.synthesis_scope,
            "total_duration": self.duration,
            "order": [s.ring_index for s in self.segments],
            "rings": rings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlannedTrajectory":
        """Accept a plan document or a single trajectory object."""
        if not isinstance(d, dict):
            raise InvalidInputError("trajectory document must be a JSON object")
        if "rings" not in d:
            return cls((FourierTrajectory.from_dict(d),), "per-ring")
        by_index = {int(r.get("ring_index", i + 1)): r for i, r in enumerate(d["rings"])}
        order = d.get("order") or [int(r.get("ring_index", i + 1)) for i, r in enumerate(d["rings"])]
        try:
            segs = tuple(FourierTrajectory.from_dict(by_index[i]) for i in order)
        except KeyError as exc:
            raise InvalidInputError(f"order refers to unknown ring {exc}") from exc
        if not segs:
            raise InvalidInputError("plan has no rings")
        return cls(segs, d.get("synthesis_scope", "per-ring"))


@dataclass
class PlanResult:
    config: PlannerConfig
    grid: VoxelGrid
    slices: SlicePlan
    kernel: ct.StructuringElement
    rings: list[RingSignal]
    target: TargetPath
    trajectory: PlannedTrajectory
    reports: list[FeasibilityReport]
    contours: list[ct.Contour] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return all(r.feasible for r in self.reports)

    def feasibility_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "rings": [
                {"ring_index": seg.ring_index, **rep.to_dict()}
                for seg, rep in zip(self.trajectory.segments, self.reports)
            ],
        }


def _initial_period(perimeter: float, cfg: PlannerConfig) -> float:
    return max(perimeter, 1e-9) / (cfg.cruise_fraction * cfg.sensor.v_max)


def _finalize(tr: FourierTrajectory, cfg: PlannerConfig) -> tuple[FourierTrajectory, FeasibilityReport]:
    rep = feasibility_check(tr, cfg.sensor.a_max, cfg.sensor.v_max)
    if rep.feasible:
        return tr, rep
    if not cfg.adjust_period:
        raise InfeasibleTrajectoryError(
            f"ring {tr.ring_index}: max speed {rep.max_speed:.3f} m/s, max accel "
            f"{rep.max_acceleration:.3f} m/s^2 exceed limits at T={tr.T:.3f} s "
            f"(needs T >= {rep.min_period:.3f} s)"
        )
    log.info("ring %d: stretching period %.3f -> %.3f s", tr.ring_index, tr.T, rep.min_period)
    return make_feasible(tr, cfg.sensor.a_max, cfg.sensor.v_max)


def plan_inspection(
    hm: HeightMap, cfg: PlannerConfig, debug_dir: str | Path | None = None
) -> PlanResult:
    """Run the whole pipeline on a heightmap."""
    h_b = hm.building_height
    if not h_b > 0:
        raise EmptySliceError("heightmap has zero building height")
    se = ct.StructuringElement.for_standoff(cfg.sensor.d, cfg.resolution, cfg.standoff_radius_cells)
    if cfg.kernel_shape != "disk":
        se = ct.StructuringElement(se.radius, cfg.kernel_shape)
    grid = voxelize(hm, cfg.resolution, pad=se.radius + 2)
    splan = plan_slices(h_b, cfg.sensor, grid.nz)
    slices = ring_slices(grid, splan)
    climb = h_b / splan.n
    N = cfg.samples_per_ring

    if debug_dir is not None:
        debug_dir = Path(debug_dir)
        debug_dir.mkdir(parents=True, exist_ok=True)

    rings: list[RingSignal] = []
    contours: list[ct.Contour] = []
    anchor: tuple[float, float] | None = None
    for s in slices:
        dilated = ct.dilate(s.image, se)
        c = ct.largest_contour(ct.find_contours(dilated))
        c, ok = ct.orient_ccw(c)
        if not ok:
            raise EmptySliceError(f"ring {s.ring_index}: degenerate contour")
        if anchor is not None:
            # previous ring closes back on its first point; start the next one nearby
            c = ct.rotate_to_nearest(c, anchor)
        anchor = c.points[0]
        contours.append(c)
        centroid = slice_centroid(s.image, grid)
        rings.append(build_ring_signal(c, grid, s.ring_index, s.altitude, climb, N, centroid))
        if debug_dir is not None:
            ct.write_pgm(debug_dir / f"slice_{s.ring_index:02d}.pgm", s.image)
            ct.write_pgm(debug_dir / f"dilated_{s.ring_index:02d}.pgm", dilated)
            ct.write_pgm(debug_dir / f"contour_{s.ring_index:02d}.pgm", ct.contour_image(dilated.shape, c))

    target = build_target_path(rings, cfg.yaw_mode, cfg.fixed_yaw)
    common = dict(yaw_mode=cfg.yaw_mode, fixed_yaw=cfg.fixed_yaw)
    segments = []
    reports = []
    if cfg.synthesis_scope == "per-ring":
        for r in rings:
            T0 = _initial_period(polyline_length(r.xs, r.ys), cfg)
            tr = fit_ring(
                r.xs, r.ys, r.zs, T0, cfg.terms, z_mode=cfg.z_mode, climb=climb,
                centroid=r.centroid, ring_index=r.ring_index, **common,
            )
            tr, rep = _finalize(tr, cfg)
            segments.append(tr)
            reports.append(rep)
    else:
        T0 = _initial_period(sum(polyline_length(r.xs, r.ys) for r in rings), cfg)
        centroid = tuple(np.mean([r.centroid for r in rings], axis=0).tolist())
        terms = min(cfg.terms, len(target))
        tr = fit_ring(
            target.xs, target.ys, target.zs, T0, terms, z_mode=cfg.z_mode, climb=h_b,
            centroid=centroid, ring_index=1, **common,
        )
        tr, rep = _finalize(tr, cfg)
        segments.append(tr)
        reports.append(rep)

    traj = PlannedTrajectory(tuple(segments), cfg.synthesis_scope)
    return PlanResult(
        config=cfg,
        grid=grid,
        slices=splan,
        kernel=se,
        rings=rings,
        target=target,
        trajectory=traj,
        reports=reports,
        contours=contours,
    )


def box_heightmap(
    size: float = 20.0, height: float = 10.0, cell_size: float = 1.0, margin: float = 0.0
) -> HeightMap:
    """Rectangular block building, handy for demos and tests."""
    cells = int(round(size / cell_size))
    pad = int(round(margin / cell_size))
    h = np.zeros((cells + 2 * pad, cells + 2 * pad))
    h[pad : pad + cells, pad : pad + cells] = height
    return HeightMap(h, cell_size=cell_size, origin=(-pad * cell_size, -pad * cell_size))

