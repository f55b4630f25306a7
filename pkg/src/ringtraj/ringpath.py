"""Per-ring discrete signals and the concatenated target path."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringtraj.contour import Contour
from ringtraj.errors import InvalidInputError
from ringtraj.geometry import VoxelGrid
from ringtraj.spectral import YAW_MODES, wrap_angle


@dataclass(frozen=True)
class RingSignal:
    ring_index: int
    xs: NDArray[np.float64]
    ys: NDArray[np.float64]
    zs: NDArray[np.float64]
    centroid: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not len(self.xs) == len(self.ys) == len(self.zs):
            raise InvalidInputError("ring components must have equal length")

    @property
    def m(self) -> int:
        return len(self.xs)


@dataclass(frozen=True)
class TargetPath:
    xs: NDArray[np.float64]
    ys: NDArray[np.float64]
    zs: NDArray[np.float64]
    yaw: NDArray[np.float64]
    boundaries: tuple[int, ...]  # sample offsets where rings 2..n start

    def __len__(self) -> int:
        return len(self.xs)

    def points(self) -> NDArray[np.float64]:
        return np.column_stack([self.xs, self.ys, self.zs])


def contour_to_signals(c: Contour) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    if len(c) < 1:
        raise InvalidInputError("empty contour")
    pts = c.as_array()
    return pts[:, 0].copy(), pts[:, 1].copy()


def interpolate_z(m: int, h_start: float, dz: float) -> NDArray[np.float64]:
    """Half-open linear climb ``h_start + dz * i / m`` for ``i = 0..m-1``."""
    if m < 2:
        raise InvalidInputError("need at least two samples for a ramp")
    if dz < 0:
        raise InvalidInputError("climb must be non-negative")
    return h_start + dz * np.arange(m) / m


def resample_closed(
    xs: ArrayLike, ys: ArrayLike, N: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """``N`` points equally spaced in arc length around the closed polyline.

    The first output point is the first input point.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) != len(ys):
        raise InvalidInputError("xs and ys differ in length")
    if len(xs) < 3 or N < 3:
        raise InvalidInputError("need >= 3 input points and N >= 3")
    px = np.append(xs, xs[0])
    py = np.append(ys, ys[0])
    seg = np.hypot(np.diff(px), np.diff(py))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    L = cum[-1]
    if not L > 0:
        raise InvalidInputError("zero-length polyline")
    s = np.arange(N) * (L / N)
    # segment containing each target; zero-length segments are skipped by side="right"
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    frac = np.where(seg[idx] > 0, (s - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0), 0.0)
    rx = px[idx] + frac * (px[idx + 1] - px[idx])
    ry = py[idx] + frac * (py[idx + 1] - py[idx])
    return rx, ry


def polyline_length(xs: ArrayLike, ys: ArrayLike) -> float:
    """Perimeter of the closed polyline."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    return float(np.hypot(np.diff(xs, append=xs[0]), np.diff(ys, append=ys[0])).sum())


def pixels_to_world(
    xs: ArrayLike, ys: ArrayLike, grid: VoxelGrid
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    nx, ny, _ = grid.dims
    if xs.size and (xs.min() < 0 or xs.max() > nx - 1 or ys.min() < 0 or ys.max() > ny - 1):
        raise IndexError("pixel coordinates outside the grid footprint")
    r = grid.resolution
    return grid.origin[0] + (xs + 0.5) * r, grid.origin[1] + (ys + 0.5) * r


def slice_centroid(image: NDArray[np.bool_], grid: VoxelGrid) -> tuple[float, float]:
    """World x-y centroid of the occupied pixels."""
    ix, iy = np.nonzero(image)
    if ix.size == 0:
        raise InvalidInputError("empty slice has no centroid")
    wx, wy = pixels_to_world(ix.mean(), iy.mean(), grid)
    return float(wx), float(wy)


def yaw_profile(
    path: TargetPath | tuple[ArrayLike, ArrayLike],
    centroid_per_ring: list[tuple[float, float]] | None = None,
    boundaries: tuple[int, ...] = (),
    mode: str = "centroid",
    fixed_yaw: float = 0.0,
) -> NDArray[np.float64]:
    """Heading per sample, wrapped to (-pi, pi].

    ``centroid`` points the nose at the active ring's slice centroid;
    ``tangent`` follows the direction of travel; ``fixed`` holds ``fixed_yaw``.
    A sample with no defined direction keeps the previous heading (0 at start).
    """
    if isinstance(path, TargetPath):
        xs, ys = path.xs, path.ys
        boundaries = boundaries or path.boundaries
    else:
        xs, ys = (np.asarray(a, dtype=np.float64) for a in path)
    if mode not in YAW_MODES:
        raise InvalidInputError(f"unknown yaw mode {mode!r}")
    n = len(xs)
    if mode == "fixed":
        return np.full(n, float(wrap_angle(fixed_yaw)))
    if mode == "tangent":
        dx = np.roll(xs, -1) - xs
        dy = np.roll(ys, -1) - ys
    else:
        if not centroid_per_ring:
            raise InvalidInputError("centroid mode needs one centroid per ring")
        ring_of = np.searchsorted(np.asarray(boundaries, dtype=int), np.arange(n), side="right")
        if ring_of.max(initial=0) >= len(centroid_per_ring):
            raise InvalidInputError("fewer centroids than rings")
        c = np.asarray(centroid_per_ring, dtype=np.float64)[ring_of]
        dx = c[:, 0] - xs
        dy = c[:, 1] - ys
    yaw = np.empty(n)
    prev = 0.0
    for i in range(n):
        if dx[i] == 0 and dy[i] == 0:
            yaw[i] = prev
        else:
            yaw[i] = prev = math.atan2(dy[i], dx[i])
    return wrap_angle(yaw)


def build_ring_signal(
    c: Contour,
    grid: VoxelGrid,
    ring_index: int,
    altitude: float,
    climb: float,
    N: int,
    centroid: tuple[float, float] = (0.0, 0.0),
) -> RingSignal:
    """Oriented contour -> world x-y resampled to ``N`` points plus z ramp."""
    px, py = contour_to_signals(c)
    wx, wy = pixels_to_world(px, py, grid)
    if len(wx) < 3:
        raise InvalidInputError(f"ring {ring_index}: contour too short to resample")
    rx, ry = resample_closed(wx, wy, N)
    zs = interpolate_z(N, altitude, climb)
    return RingSignal(ring_index=ring_index, xs=rx, ys=ry, zs=zs, centroid=centroid)


def build_target_path(
    rings: list[RingSignal], yaw_mode: str = "centroid", fixed_yaw: float = 0.0
) -> TargetPath:
    if not rings:
        raise InvalidInputError("no rings to concatenate")
    m = rings[0].m
    if any(r.m != m for r in rings):
        raise InvalidInputError("all rings must share one sample count")
    xs = np.concatenate([r.xs for r in rings])
    ys = np.concatenate([r.ys for r in rings])
    zs = np.concatenate([r.zs for r in rings])
    boundaries = tuple(m * i for i in range(1, len(rings)))
    yaw = yaw_profile(
        (xs, ys),
        [r.centroid for r in rings],
        boundaries=boundaries,
        mode=yaw_mode,
        fixed_yaw=fixed_yaw,
    )
    return TargetPath(xs=xs, ys=ys, zs=zs, yaw=yaw, boundaries=boundaries)
