"""Slice dilation and outer-border extraction.

Images are boolean arrays indexed ``[x, y]``. Contour points are ``(x, y)``
pixel pairs. Occupied regions use 8-connectivity, background 4-connectivity,
and everything outside the image counts as background.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ringtraj.errors import EmptySliceError

log = logging.getLogger(__name__)

# 8-neighbourhood in counter-clockwise order for (row, col) with rows growing
# downward: E, NE, N, NW, W, SW, S, SE.
_NEIGHBOURS = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))
_DIR = {d: n for n, d in enumerate(_NEIGHBOURS)}


@dataclass(frozen=True)
class StructuringElement:
    """Centered kernel; ``shape`` is ``"disk"`` or ``"box"``."""

    radius: int
    shape: str = "disk"

    def __post_init__(self) -> None:
        if self.radius < 1:
            raise ValueError("kernel radius must be >= 1")
        if self.shape not in ("disk", "box"):
            raise ValueError(f"unknown kernel shape {self.shape!r}")

    def offsets(self) -> list[tuple[int, int]]:
        r = self.radius
        out = []
        for dx in range(-r, r + 1):
            for dy in range(-r, r + 1):
                if self.shape == "box" or dx * dx + dy * dy <= r * r:
                    out.append((dx, dy))
        return out

    def diameter(self, resolution: float) -> float:
        return (2 * self.radius + 1) * resolution

    @classmethod
    def for_standoff(cls, d: float, resolution: float, radius_cells: int | None = None) -> "StructuringElement":
        """Disk whose radius puts the outer border a full ``d`` from the wall."""
        if radius_cells is None:
            radius_cells = max(1, math.ceil(d / resolution - 1e-9))
        return cls(radius=int(radius_cells))


@dataclass(frozen=True)
class Contour:
    points: tuple[tuple[int, int], ...]
    closed: bool = True

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> NDArray[np.float64]:
        return np.asarray(self.points, dtype=np.float64).reshape(-1, 2)

    @property
    def signed_area(self) -> float:
        return shoelace(self.as_array())

    @property
    def area(self) -> float:
        return abs(self.signed_area)


def shoelace(pts: NDArray[np.float64]) -> float:
    """Signed polygon area; positive for counter-clockwise (x right, y up)."""
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def dilate(img: NDArray[np.bool_], se: StructuringElement) -> NDArray[np.bool_]:
    """Minkowski sum of the occupied set with the kernel, clipped to the image."""
    img = np.asarray(img, dtype=bool)
    out = np.zeros_like(img)
    nx, ny = img.shape
    for dx, dy in se.offsets():
        if abs(dx) >= nx or abs(dy) >= ny:
            continue
        # out[x + dx, y + dy] |= img[x, y]
        sx = slice(max(0, -dx), min(nx, nx - dx))
        sy = slice(max(0, -dy), min(ny, ny - dy))
        tx = slice(max(0, dx), min(nx, nx + dx))
        ty = slice(max(0, dy), min(ny, ny + dy))
        out[tx, ty] |= img[sx, sy]
    return out


def _follow(f: NDArray[np.int64], i: int, j: int, i2: int, j2: int, nbd: int) -> list[tuple[int, int]]:
    """Trace one border starting at (i, j) with (i2, j2) the 0-pixel it was entered from.

    Marks ``f`` in place as in Suzuki & Abe border following and returns the
    visited pixels in padded-array coordinates.
    """
    start = _DIR[(i2 - i, j2 - j)]
    # step 3.1: clockwise search for a non-zero neighbour
    found = None
    for s in range(8):
        d = (start - s) % 8
        di, dj = _NEIGHBOURS[d]
        if f[i + di, j + dj] != 0:
            found = (i + di, j + dj)
            break
    if found is None:
        f[i, j] = -nbd
        return [(i, j)]

    i1, j1 = found
    i2, j2 = i1, j1
    i3, j3 = i, j
    pts: list[tuple[int, int]] = []
    while True:
        pts.append((i3, j3))
        # step 3.3: counter-clockwise search starting after (i2, j2)
        d0 = _DIR[(i2 - i3, j2 - j3)]
        east_zero = False
        for s in range(1, 9):
            d = (d0 + s) % 8
            di, dj = _NEIGHBOURS[d]
            if f[i3 + di, j3 + dj] != 0:
                i4, j4 = i3 + di, j3 + dj
                break
            if d == 0:
                east_zero = True
        # step 3.4
        if east_zero:
            f[i3, j3] = -nbd
        elif f[i3, j3] == 1:
            f[i3, j3] = nbd
        # step 3.5
        if (i4, j4) == (i, j) and (i3, j3) == (i1, j1):
            return pts
        i2, j2 = i3, j3
        i3, j3 = i4, j4


def find_contours(img: NDArray[np.bool_]) -> list[Contour]:
    """Outer borders of every 8-connected component, in raster order.

    Hole borders are traced (the marks keep the scan consistent) but not
    returned.
    """
    img = np.asarray(img, dtype=bool)
    f = np.zeros((img.shape[0] + 2, img.shape[1] + 2), dtype=np.int64)
    f[1:-1, 1:-1] = img
    rows, cols = f.shape
    nbd = 1
    out = []
    for i in range(1, rows - 1):
        for j in range(1, cols - 1):
            v = f[i, j]
            if v == 0:
                continue
            if v == 1 and f[i, j - 1] == 0:
                nbd += 1
                pts = _follow(f, i, j, i, j - 1, nbd)
                out.append(Contour(tuple((a - 1, b - 1) for a, b in pts)))
            elif v >= 1 and f[i, j + 1] == 0:
                nbd += 1
                _follow(f, i, j, i, j + 1, nbd)
    return out


def largest_contour(cs: list[Contour]) -> Contour:
    """Contour with the largest enclosed area (then most points, then lowest first point)."""
    if not cs:
        raise EmptySliceError("no contour found in slice")
    return min(cs, key=lambda c: (-c.area, -len(c), c.points[0]))


def orient_ccw(c: Contour) -> tuple[Contour, bool]:
    """Return the contour in counter-clockwise order and whether it was usable.

    Degenerate contours (fewer than 3 points or zero area) come back unchanged
    with ``False``.
    """
    if len(c) < 3:
        log.warning("degenerate contour with %d points", len(c))
        return c, False
    area = c.signed_area
    if area == 0:
        log.warning("zero-area contour with %d points", len(c))
        return c, False
    if area < 0:
        return Contour(tuple(reversed(c.points)), c.closed), True
    return c, True


def rotate_to_nearest(c: Contour, target: tuple[float, float]) -> Contour:
    """Cyclically shift the contour so it starts at the point closest to ``target``."""
    pts = c.as_array()
    d2 = (pts[:, 0] - target[0]) ** 2 + (pts[:, 1] - target[1]) ** 2
    start = int(np.argmin(d2))
    return Contour(c.points[start:] + c.points[:start], c.closed)


def contour_image(shape: tuple[int, int], c: Contour) -> NDArray[np.bool_]:
    img = np.zeros(shape, dtype=bool)
    for x, y in c.points:
        img[x, y] = True
    return img


def write_pgm(path: str | Path, img: NDArray) -> None:
    """Write a binary-ish image as 8-bit PGM (P5), y axis pointing up."""
    arr = np.asarray(img)
    data = (arr.astype(bool) * 255).astype(np.uint8).T[::-1]
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
