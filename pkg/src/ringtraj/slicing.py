"""Ring spacing, ring altitudes and horizontal slices of the voxel grid.

The formulas use 1-based ring indices ``l = 1..n`` and 1-based voxel layers.
:func:`layer_to_array_index` is the one place where a 1-based layer becomes a
0-based array index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ringtraj.errors import EmptySliceError, InvalidInputError
from ringtraj.geometry import VoxelGrid


@dataclass(frozen=True)
class SensorConfig:
    """Camera and vehicle parameters.

    Attributes:
        d: Standoff distance to the wall [m].
        f: Focal length [m].
        h_s: Sensor height [m].
        o: Vertical image overlap fraction in [0, 1).
        v_max: Speed limit [m/s].
        a_max: Acceleration limit [m/s^2].
    """

    d: float
    f: float
    h_s: float
    o: float
    v_max: float = 2.0
    a_max: float = 5.0

    def __post_init__(self) -> None:
        for name in ("d", "f", "h_s", "v_max", "a_max"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidInputError(f"sensor parameter '{name}' must be positive, got {value!r}")
        if not 0 <= self.o < 1:
            raise InvalidInputError(f"overlap 'o' must lie in [0, 1), got {self.o!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SensorConfig":
        missing = [k for k in ("d", "f", "h_s", "o", "v_max", "a_max") if k not in data]
        if missing:
            raise InvalidInputError(f"missing config key '{missing[0]}'")
        return cls(**{k: float(data[k]) for k in ("d", "f", "h_s", "o", "v_max", "a_max")})


@dataclass(frozen=True)
class SlicePlan:
    delta_h: float
    n: int
    h_b: float
    altitudes: tuple[float, ...]
    slice_indices: tuple[int, ...]  # 1-based layers


@dataclass(frozen=True)
class Slice:
    ring_index: int  # 1-based
    image: NDArray[np.bool_]  # indexed [x, y]
    altitude: float
    layer: int  # 1-based


def altitude_increment(cfg: SensorConfig) -> float:
    """Vertical spacing between rings that keeps the requested image overlap."""
    if not cfg.o < 1:
        raise InvalidInputError("overlap must be < 1")
    dh = cfg.d / cfg.f * cfg.h_s * (1.0 - cfg.o)
    if not dh > 0:
        raise InvalidInputError("degenerate sensor footprint")
    return dh


def ring_count(h_b: float, delta_h: float) -> int:
    if not (h_b > 0 and delta_h > 0):
        raise InvalidInputError("building height and altitude increment must be positive")
    return max(1, math.ceil(h_b / delta_h))


def ring_altitude(l: int, h_b: float, n: int) -> float:
    if not 1 <= l <= n:
        raise InvalidInputError(f"ring index {l} outside 1..{n}")
    return h_b / n * (l - 1)


def slice_index(l: int, h_b: float, r: int, n: int) -> int:
    """1-based voxel layer for ring ``l``, clamped to ``[1, r]``."""
    if not (h_b > 0 and r >= 1 and n >= 1):
        raise InvalidInputError("h_b, r and n must be positive")
    h = ring_altitude(l, h_b, n)
    # tolerance absorbs rounding such as (2/3 * 3) -> 1.9999999999999998
    k = math.floor(h / h_b * r + 1e-9) + 1
    return min(max(k, 1), r)


def layer_to_array_index(k: int) -> int:
    return k - 1


def plan_slices(h_b: float, cfg: SensorConfig, r: int) -> SlicePlan:
    dh = altitude_increment(cfg)
    n = ring_count(h_b, dh)
    altitudes = tuple(ring_altitude(l, h_b, n) for l in range(1, n + 1))
    indices = tuple(slice_index(l, h_b, r, n) for l in range(1, n + 1))
    return SlicePlan(delta_h=dh, n=n, h_b=h_b, altitudes=altitudes, slice_indices=indices)


def extract_slice(
    grid: VoxelGrid, k: int, ring_index: int = 1, altitude: float = 0.0
) -> Slice:
    """Binary image of 1-based layer ``k``; may be empty."""
    if not 1 <= k <= grid.nz:
        raise InvalidInputError(f"layer {k} outside 1..{grid.nz}")
    image = np.array(grid.occupancy[:, :, layer_to_array_index(k)], dtype=bool)
    return Slice(ring_index=ring_index, image=image, altitude=altitude, layer=k)


def ring_slices(grid: VoxelGrid, plan: SlicePlan) -> list[Slice]:
    """All ring slices; raises :class:`EmptySliceError` if any is empty."""
    out = []
    for l, (h, k) in enumerate(zip(plan.altitudes, plan.slice_indices), start=1):
        s = extract_slice(grid, k, ring_index=l, altitude=h)
        if not s.image.any():
            raise EmptySliceError(f"ring {l} at {h:.3f} m (layer {k}) does not intersect the building")
        out.append(s)
    return out
