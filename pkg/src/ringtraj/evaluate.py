"""Reconstruction error tables and a double-integrator tracking simulation."""

from __future__ import annotations

import csv
import math
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringtraj.baseline import ConditioningWarning, fit_samples
from ringtraj.errors import InvalidInputError, SimulationDivergedError
from ringtraj.ringpath import resample_closed
from ringtraj.spectral import reconstruct

DEFAULT_TERMS = (1, 2, 5, 50, 100)
DEFAULT_DEGREES = (1, 2, 5, 50, 100)


def mse(a: ArrayLike, b: ArrayLike) -> float:
    """Mean over samples of the squared Euclidean distance."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.ndim == 1:
        a, b = a[:, None], b[:, None]
    return float(np.mean(np.sum((a - b) ** 2, axis=1)))


# -- Table of reconstruction errors -----------------------------------------


def load_path(path: str | Path) -> NDArray[np.float64]:
    """Read an ``x,y[,z]`` CSV (optional header) into an (m, d) array."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not any(c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                if rows:
                    raise InvalidInputError(f"{path}: non-numeric row {row}")
                continue  # header
    if len(rows) < 3:
        raise InvalidInputError(f"{path}: need at least 3 points")
    if len({len(r) for r in rows}) != 1 or len(rows[0]) not in (2, 3):
        raise InvalidInputError(f"{path}: rows must all be x,y or x,y,z")
    return np.asarray(rows, dtype=np.float64)


def resample_path(points: NDArray[np.float64], N: int = 100) -> NDArray[np.float64]:
    """Arc-length resampling in x-y; z (if any) is interpolated along the same parameter."""
    rx, ry = resample_closed(points[:, 0], points[:, 1], N)
    if points.shape[1] == 2:
        return np.column_stack([rx, ry])
    # z follows the x-y arc-length parameter
    px = np.append(points[:, 0], points[0, 0])
    py = np.append(points[:, 1], points[0, 1])
    pz = np.append(points[:, 2], points[0, 2])
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(px), np.diff(py)))])
    s = np.arange(N) * cum[-1] / N
    rz = np.interp(s, cum, pz)
    return np.column_stack([rx, ry, rz])


@dataclass(frozen=True)
class EvalReport:
    figures: tuple[str, ...]
    approaches: tuple[str, ...]
    mse: NDArray[np.float64]  # (approaches, figures)
    millis: NDArray[np.float64]

    def value(self, approach: str, figure: str) -> float:
        return float(self.mse[self.approaches.index(approach), self.figures.index(figure)])

    def column(self, figure: str, prefix: str) -> list[float]:
        j = self.figures.index(figure)
        return [float(self.mse[i, j]) for i, a in enumerate(self.approaches) if a.startswith(prefix)]

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["approach", *self.figures])
        for i, a in enumerate(self.approaches):
            w.writerow([a, *(f"{v:.6e}" for v in self.mse[i])])

    def to_text(self, timings: bool = True) -> str:
        head = ["Approach", *self.figures]
        rows = []
        for i, a in enumerate(self.approaches):
            cells = [f"{v:.2E}" for v in self.mse[i]]
            if timings:
                cells = [f"{c} ({t:.2f} ms)" for c, t in zip(cells, self.millis[i])]
            rows.append([a, *cells])
        widths = [max(len(r[c]) for r in [head, *rows]) for c in range(len(head))]
        fmt = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()
        return "\n".join([fmt(head), fmt(["-" * w for w in widths]), *map(fmt, rows)])


def _approach_name(kind: str, n: int) -> str:
    return f"IFT-{n}" if kind == "ift" else f"Poly-{n}"


def reconstruct_ift(points: NDArray[np.float64], terms: int) -> NDArray[np.float64]:
    return np.column_stack([reconstruct(points[:, a], terms) for a in range(points.shape[1])])


def reconstruct_poly(points: NDArray[np.float64], degree: int) -> NDArray[np.float64]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        return np.column_stack([fit_samples(points[:, a], degree) for a in range(points.shape[1])])


def build_table(
    paths: dict[str, NDArray[np.float64]],
    terms: tuple[int, ...] = DEFAULT_TERMS,
    degrees: tuple[int, ...] = DEFAULT_DEGREES,
    N: int | None = 100,
) -> EvalReport:
    """MSE of truncated-Fourier and polynomial reconstructions per path.

    Paths are resampled to ``N`` points first (``None`` uses them as given).
    """
    if not paths:
        raise InvalidInputError("no paths to evaluate")
    names = tuple(paths)
    prepared = {k: (resample_path(v, N) if N else np.asarray(v, dtype=np.float64)) for k, v in paths.items()}
    approaches = [("ift", t) for t in terms] + [("poly", d) for d in degrees]
    err = np.zeros((len(approaches), len(names)))
    ms = np.zeros_like(err)
    for j, name in enumerate(names):
        pts = prepared[name]
        for i, (kind, n) in enumerate(approaches):
            t0 = time.perf_counter()
            if kind == "ift":
                rec = reconstruct_ift(pts, min(n, len(pts)))
            else:
                rec = reconstruct_poly(pts, n)
            ms[i, j] = (time.perf_counter() - t0) * 1e3
            err[i, j] = mse(pts, rec)
    return EvalReport(
        figures=names,
        approaches=tuple(_approach_name(k, n) for k, n in approaches),
        mse=err,
        millis=ms,
    )


# -- Tracking simulation ----------------------------------------------------


class Reference(Protocol):
    def state(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]: ...


def _reference_states(ref: Reference, t: NDArray[np.float64]) -> tuple[NDArray, NDArray]:
    """Reference position and velocity at every step; uses ``ref.states`` when available."""
    batch = getattr(ref, "states", None)
    if batch is not None:
        p, v = batch(t)
        return np.asarray(p, dtype=np.float64), np.asarray(v, dtype=np.float64)
    pv = [ref.state(float(ti)) for ti in t]
    return np.array([a for a, _ in pv], dtype=np.float64), np.array([b for _, b in pv], dtype=np.float64)


@dataclass(frozen=True)
class ConstantReference:
    """Stationary set-point (hover or step target)."""

    position: tuple[float, float, float]

    def state(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.asarray(self.position, dtype=np.float64), np.zeros(3)

    def states(self, t: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        n = len(t)
        return np.tile(np.asarray(self.position, dtype=np.float64), (n, 1)), np.zeros((n, 3))


@dataclass(frozen=True)
class CircleReference:
    """Horizontal circle of radius ``R`` at angular rate ``omega``."""

    R: float
    omega: float

    def state(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        p, v = self.states(np.asarray([t], dtype=np.float64))
        return p[0], v[0]

    def states(self, t: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        c, s = np.cos(self.omega * t), np.sin(self.omega * t)
        z = np.zeros_like(t)
        w, R = self.omega, self.R
        return np.column_stack([R * c, R * s, z]), np.column_stack([-R * w * s, R * w * c, z])


@dataclass(frozen=True)
class FollowerConfig:
    kp: float = 4.0
    kd: float = 4.0
    a_max: float | None = 5.0  # None disables the clamp
    dt: float = 0.01

    def __post_init__(self) -> None:
        if not (self.kp > 0 and self.kd > 0 and self.dt > 0):
            raise InvalidInputError("kp, kd and dt must be positive")
        if self.a_max is not None and not self.a_max > 0:
            raise InvalidInputError("a_max must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "FollowerConfig":
        known = {k: d[k] for k in ("kp", "kd", "a_max", "dt") if k in d}
        return cls(**known)


@dataclass(frozen=True)
class SimTrace:
    dt: float
    t: NDArray[np.float64]
    position: NDArray[np.float64]
    velocity: NDArray[np.float64]
    ref_position: NDArray[np.float64]
    ref_velocity: NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "z", "x_ref", "y_ref", "z_ref"])
        for i in range(len(self.t)):
            w.writerow([repr(float(v)) for v in (self.t[i], *self.position[i], *self.ref_position[i])])


def simulate_follow(
    ref: Reference,
    cfg: FollowerConfig,
    duration: float,
    initial: tuple[ArrayLike, ArrayLike] | None = None,
) -> SimTrace:
    """Per-axis double integrator under clamped PD control, semi-implicit Euler.

    The commanded acceleration ``kp (p_ref - p) + kd (v_ref - v)`` is clamped
    in norm to ``a_max``. The vehicle starts on the reference unless
    ``initial = (p0, v0)`` is given.
    """
    period = getattr(ref, "T", None)
    if period is not None and duration < period:
        raise InvalidInputError(f"duration {duration} shorter than one period {period}")
    steps = int(round(duration / cfg.dt))
    if steps < 1:
        raise InvalidInputError("duration shorter than one time step")
    t = np.arange(steps) * cfg.dt
    pos = np.empty((steps, 3))
    vel = np.empty((steps, 3))
    # the reference is open loop, so it can be evaluated up front
    rpos, rvel = _reference_states(ref, t)
    if initial is None:
        p, v = rpos[0].copy(), rvel[0].copy()
    else:
        p, v = (np.array(a, dtype=np.float64).reshape(3) for a in initial)
    # overflow is caught below as a non-finite state
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(steps):
            pr, vr = rpos[i], rvel[i]
            pos[i], vel[i] = p, v
            a = cfg.kp * (pr - p) + cfg.kd * (vr - v)
            if cfg.a_max is not None:
                na = math.sqrt(float(a @ a))
                if na > cfg.a_max:
                    a = a * (cfg.a_max / na)
            v = v + a * cfg.dt
            p = p + v * cfg.dt
            if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v))):
                raise SimulationDivergedError(f"non-finite state at t={t[i]:.3f} s")
    return SimTrace(dt=cfg.dt, t=t, position=pos, velocity=vel, ref_position=rpos, ref_velocity=rvel)


def tracking_error(trace: SimTrace, discard: float = 0.1) -> tuple[float, float]:
    """RMS and max position error after dropping the first ``discard`` fraction."""
    if len(trace) == 0:
        raise InvalidInputError("empty trace")
    start = int(math.floor(discard * len(trace)))
    e = np.linalg.norm(trace.position[start:] - trace.ref_position[start:], axis=1)
    return float(np.sqrt(np.mean(e**2))), float(e.max())

