"""File outputs: atomic writes, waypoint/target CSVs and SVG projections."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from ringtraj.errors import InvalidInputError

WAYPOINT_HEADER = ("t", "x", "y", "z", "vx", "vy", "vz", "psi")


@contextmanager
def atomic_write(path: str | Path, mode: str = "w"):
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        kwargs = {"newline": ""} if "b" not in mode else {}
        with os.fdopen(fd, mode, **kwargs) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def write_json(path: str | Path, data: dict) -> None:
    with atomic_write(path) as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def write_rows(path: str | Path, header: tuple[str, ...], rows: np.ndarray) -> None:
    """CSV with ``repr`` floats so values survive a round trip exactly."""
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def read_rows(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = [[float(v) for v in row] for row in r if row]
    return header, np.asarray(data, dtype=np.float64)


def svg_projection(rings: list[np.ndarray], margin: float = 1.0, stroke: float | None = None) -> str:
    """x-y projection as SVG, one ``polyline`` per ring (a ``circle`` for a stationary ring).

    World y points up; SVG y points down, so y is negated.
    """
    if not rings:
        raise InvalidInputError("nothing to draw")
    allp = np.vstack([r[:, :2] for r in rings])
    # plain floats: repr of a numpy scalar is not valid SVG
    lo = [float(v) for v in allp.min(axis=0) - margin]
    hi = [float(v) for v in allp.max(axis=0) + margin]
    w, h = hi[0] - lo[0], hi[1] - lo[1]
    stroke = float(stroke) if stroke is not None else max(w, h) / 400
    buf = io.StringIO()
    buf.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{lo[0]!r} {-hi[1]!r} {w!r} {h!r}" width="600" height="{600 * h / w:.0f}">\n'
    )
    for i, r in enumerate(rings, start=1):
        xy = r[:, :2].tolist()
        if np.ptp(r[:, :2], axis=0).max() == 0:
            buf.write(f'  <circle id="ring{i}" cx="{xy[0][0]!r}" cy="{-xy[0][1]!r}" r="{3 * stroke!r}"/>\n')
            continue
        pts = " ".join(f"{x!r},{-y!r}" for x, y in xy)
        buf.write(
            f'  <polyline id="ring{i}" fill="none" stroke="black" '
            f'stroke-width="{stroke!r}" points="{pts}"/>\n'
        )
    buf.write("</svg>\n")
    return buf.getvalue()
