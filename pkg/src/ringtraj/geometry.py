"""2.5D heightmap ingestion and binary voxel occupancy grids.

Heightmaps are stored as ``heights[y, x]`` (rows are the y index, columns the
x index). Voxel grids are stored as ``occupancy[i, j, k]`` with ``i`` along x,
``j`` along y and ``k`` along z. Both use the cell-center convention: index
``i`` covers ``[origin + i*res, origin + (i+1)*res)`` and maps to the world
point ``origin + (i + 0.5)*res``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ringtraj.errors import InvalidInputError


@dataclass(frozen=True)
class HeightMap:
    """Altitude per ground cell, in meters."""

    heights: NDArray[np.float64]
    cell_size: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        h = np.array(self.heights, dtype=np.float64)
        if h.ndim != 2 or h.shape[0] < 1 or h.shape[1] < 1:
            raise InvalidInputError("heights must be a non-empty 2D matrix")
        if not np.all(np.isfinite(h)):
            raise InvalidInputError("heights must be finite")
        if np.any(h < 0):
            raise InvalidInputError("heights must be non-negative")
        if not self.cell_size > 0:
            raise InvalidInputError("cell_size must be positive")
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def width(self) -> int:
        return self.heights.shape[1]

    @property
    def depth(self) -> int:
        return self.heights.shape[0]

    @property
    def building_height(self) -> float:
        return float(self.heights.max())

    def meta(self) -> "BuildingMeta":
        """Building height and bounding box of the non-zero footprint."""
        ys, xs = np.nonzero(self.heights > 0)
        if xs.size == 0:
            lo = hi = self.origin
        else:
            lo = (
                self.origin[0] + xs.min() * self.cell_size,
                self.origin[1] + ys.min() * self.cell_size,
            )
            hi = (
                self.origin[0] + (xs.max() + 1) * self.cell_size,
                self.origin[1] + (ys.max() + 1) * self.cell_size,
            )
        return BuildingMeta(h_b=self.building_height, footprint_min=lo, footprint_max=hi)


@dataclass(frozen=True)
class BuildingMeta:
    h_b: float
    footprint_min: tuple[float, float]
    footprint_max: tuple[float, float]


@dataclass(frozen=True)
class VoxelGrid:
    """Binary occupancy grid ``M``; ``nz`` is the vertical voxel count ``r``."""

    occupancy: NDArray[np.bool_]
    resolution: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    source_height: float = field(default=0.0)

    def __post_init__(self) -> None:
        occ = np.array(self.occupancy, dtype=bool)
        if occ.ndim != 3:
            raise InvalidInputError("occupancy must be a 3D array")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.occupancy.shape  # type: ignore[return-value]

    @property
    def nz(self) -> int:
        return self.occupancy.shape[2]

    def grid_to_world(self, i: int, j: int, k: int) -> tuple[float, float, float]:
        return grid_to_world(self, i, j, k)

    def world_to_grid(self, x: float, y: float, z: float) -> tuple[int, int, int]:
        return world_to_grid(self, x, y, z)


def _read_matrix(path: Path) -> NDArray[np.float64]:
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if not any(cells):
                continue
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise InvalidInputError(f"{path}:{lineno}: non-numeric entry") from exc
    if not rows:
        raise InvalidInputError(f"{path}: empty heightmap")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise InvalidInputError(
                f"{path}: row {lineno} has {len(row)} entries, expected {width}"
            )
    return np.asarray(rows, dtype=np.float64)


def load_meta(path: str | Path) -> dict:
    """Read the sidecar JSON: ``{"cell_size": m, "origin": [x, y]}``."""
    try:
        with open(path) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read metadata {path}: {exc}") from exc
    if not isinstance(meta, dict):
        raise InvalidInputError(f"{path}: metadata must be a JSON object")
    for key in ("cell_size", "origin"):
        if key not in meta:
            raise InvalidInputError(f"{path}: missing key '{key}'")
    return meta


def load_heightmap(
    path: str | Path,
    cell_size: float = 1.0,
    origin: tuple[float, float] = (0.0, 0.0),
    meta_path: str | Path | None = None,
) -> HeightMap:
    """Load a CSV heightmap; metadata from ``meta_path`` overrides the arguments."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"heightmap not found: {path}")
    if meta_path is not None:
        meta = load_meta(meta_path)
        cell_size = meta["cell_size"]
        origin = tuple(meta["origin"])  # type: ignore[assignment]
        if len(origin) != 2:
            raise InvalidInputError(f"{meta_path}: origin must be [x, y]")
    heights = _read_matrix(path)
    if np.any(heights < 0):
        raise InvalidInputError(f"{path}: negative height in model")
    return HeightMap(heights=heights, cell_size=float(cell_size), origin=origin)


def voxelize(hm: HeightMap, resolution: float, pad: int = 0) -> VoxelGrid:
    """Column-fill a heightmap into a binary voxel grid.

    Voxel ``(i, j, k)`` is occupied iff the heightmap cell under its (x, y)
    center is taller than the voxel center altitude ``(k + 0.5)*resolution``.
    ``pad`` adds that many free voxels around the footprint so that later
    dilation has room to grow.
    """
    if not resolution > 0:
        raise InvalidInputError("resolution must be positive")
    if pad < 0:
        raise InvalidInputError("pad must be non-negative")
    extent_x = hm.width * hm.cell_size
    extent_y = hm.depth * hm.cell_size
    if resolution > max(extent_x, extent_y):
        raise InvalidInputError(
            f"resolution {resolution} m exceeds the heightmap footprint "
            f"({extent_x} x {extent_y} m)"
        )
    core_x = math.ceil(extent_x / resolution - 1e-9)
    core_y = math.ceil(extent_y / resolution - 1e-9)
    nz = max(1, math.ceil(hm.building_height / resolution - 1e-9))

    # height of the ground cell under each voxel column center
    cx = (np.arange(core_x) + 0.5) * resolution
    cy = (np.arange(core_y) + 0.5) * resolution
    ci = np.minimum((cx // hm.cell_size).astype(int), hm.width - 1)
    cj = np.minimum((cy // hm.cell_size).astype(int), hm.depth - 1)
    column = hm.heights[np.ix_(cj, ci)].T  # -> [i, j]

    zc = (np.arange(nz) + 0.5) * resolution
    core = zc[None, None, :] < column[:, :, None]
    occ = np.zeros((core_x + 2 * pad, core_y + 2 * pad, nz), dtype=bool)
    occ[pad : pad + core_x, pad : pad + core_y, :] = core
    origin = (hm.origin[0] - pad * resolution, hm.origin[1] - pad * resolution, 0.0)
    return VoxelGrid(
        occupancy=occ,
        resolution=float(resolution),
        origin=origin,
        source_height=hm.building_height,
    )


def grid_to_world(g: VoxelGrid, i: int, j: int, k: int) -> tuple[float, float, float]:
    """World coordinates of a voxel center."""
    nx, ny, nz = g.dims
    if not (0 <= i < nx and 0 <= j < ny and 0 <= k < nz):
        raise IndexError(f"voxel ({i}, {j}, {k}) outside grid {g.dims}")
    r = g.resolution
    return (
        g.origin[0] + (i + 0.5) * r,
        g.origin[1] + (j + 0.5) * r,
        g.origin[2] + (k + 0.5) * r,
    )


def world_to_grid(g: VoxelGrid, x: float, y: float, z: float) -> tuple[int, int, int]:
    """Index of the voxel containing a world point."""
    r = g.resolution
    idx = (
        math.floor((x - g.origin[0]) / r),
        math.floor((y - g.origin[1]) / r),
        math.floor((z - g.origin[2]) / r),
    )
    nx, ny, nz = g.dims
    if not (0 <= idx[0] < nx and 0 <= idx[1] < ny and 0 <= idx[2] < nz):
        raise IndexError(f"point ({x}, {y}, {z}) outside grid")
    return idx
