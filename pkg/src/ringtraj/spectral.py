"""Discrete Fourier analysis of ring signals and real Fourier-series trajectories.

A trajectory has the form::

    s(t) = A + sum_{k=1..N} A_k cos(2 pi k t / T) + B_k sin(2 pi k t / T)

with ``A, A_k, B_k`` in R^3. Two optional extensions keep the z axis honest
for climbing rings: a constant ``climb`` (meters per period, added as a linear
ramp) and ``z_mirror``, a 1-D series with period ``2T`` that replaces z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringtraj.errors import InvalidInputError

YAW_MODES = ("centroid", "tangent", "fixed")
Z_MODES = ("linear", "fourier-mirrored")

# relative tolerance on the imaginary residue of a symmetric inverse transform
_IMAG_GUARD = 1e-6


@dataclass(frozen=True)
class Spectrum:
    coefficients: NDArray[np.complex128]

    @property
    def Q(self) -> int:
        return len(self.coefficients)


def dft(signal: ArrayLike) -> Spectrum:
    """Forward transform ``F_k = sum_t s_t exp(-j 2 pi k t / Q)`` (FFT route)."""
    s = np.asarray(signal, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise InvalidInputError("dft needs a non-empty 1-D signal")
    return Spectrum(np.fft.fft(s))


def is_conjugate_symmetric(sp: Spectrum, rtol: float = 1e-12) -> bool:
    F = sp.coefficients
    mirrored = np.conj(F[(-np.arange(sp.Q)) % sp.Q])
    scale = max(float(np.abs(F).max(initial=0.0)), 1e-300)
    return bool(np.abs(F - mirrored).max(initial=0.0) <= rtol * scale)


def idft(sp: Spectrum) -> NDArray[np.float64]:
    """Inverse transform, real part.

    For conjugate-symmetric spectra the discarded imaginary part must be
    negligible; anything larger means the spectrum did not come from a real
    signal.
    """
    z = np.fft.ifft(sp.coefficients)
    if is_conjugate_symmetric(sp):
        scale = max(float(np.abs(z.real).max(initial=0.0)), 1.0)
        resid = float(np.abs(z.imag).max(initial=0.0))
        if resid >= _IMAG_GUARD * scale:
            raise ArithmeticError(f"imaginary residue {resid:.3e} in inverse transform")
    return z.real.copy()


def frequency_order(Q: int) -> NDArray[np.int64]:
    """Bin indices sorted by absolute frequency: 0, +1, -1, +2, -2, ..."""
    order = [0]
    for k in range(1, Q // 2 + 1):
        order.append(k)
        if (Q - k) != k:
            order.append(Q - k)
    return np.asarray(order[:Q], dtype=np.int64)


def truncate(sp: Spectrum, terms: int) -> Spectrum:
    """Keep the ``terms`` lowest-frequency complex bins and zero the rest."""
    if not 1 <= terms <= sp.Q:
        raise InvalidInputError(f"terms must lie in 1..{sp.Q}, got {terms}")
    keep = frequency_order(sp.Q)[:terms]
    out = np.zeros_like(sp.coefficients)
    out[keep] = sp.coefficients[keep]
    return Spectrum(out)


def reconstruct(signal: ArrayLike, terms: int) -> NDArray[np.float64]:
    return idft(truncate(dft(signal), terms))


@dataclass(frozen=True)
class FourierSeries:
    """Scalar real Fourier series with its own period."""

    period: float
    a0: float
    a: NDArray[np.float64]
    b: NDArray[np.float64]

    def __call__(self, t: ArrayLike, order: int = 0) -> NDArray[np.float64]:
        t = np.asarray(t, dtype=np.float64)
        out = np.full(t.shape, self.a0 if order == 0 else 0.0)
        w = 2 * math.pi / self.period
        for k in range(1, len(self.a) + 1):
            out = out + _harmonic(self.a[k - 1], self.b[k - 1], k * w, t, order)
        return out


def _harmonic(a, b, w, t, order):
    """d^order/dt^order of a*cos(w t) + b*sin(w t)."""
    c, s = np.cos(w * t), np.sin(w * t)
    if order == 0:
        return a * c + b * s
    if order == 1:
        return w * (-a * s + b * c)
    if order == 2:
        return -w * w * (a * c + b * s)
    raise ValueError("order must be 0, 1 or 2")


def wrap_angle(a: ArrayLike) -> NDArray[np.float64]:
    """Wrap to (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(a, dtype=np.float64), 2 * math.pi)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    position: NDArray[np.float64]
    velocity: NDArray[np.float64]
    yaw: float


@dataclass(frozen=True)
class FourierTrajectory:
    """Periodic position series plus yaw policy for one ring (or a whole path)."""

    T: float
    A: NDArray[np.float64]
    Ak: NDArray[np.float64]  # (N, 3)
    Bk: NDArray[np.float64]  # (N, 3)
    climb: float = 0.0
    z_mirror: FourierSeries | None = None
    yaw_mode: str = "centroid"
    centroid: tuple[float, float] = (0.0, 0.0)
    fixed_yaw: float = 0.0
    ring_index: int = 1
    sample_count: int = 0
    z_mode: str = "linear"
    terms: int = 0

    def __post_init__(self) -> None:
        if not (self.T > 0 and math.isfinite(self.T)):
            raise InvalidInputError("period T must be positive")
        A = np.asarray(self.A, dtype=np.float64).reshape(3)
        Ak = np.asarray(self.Ak, dtype=np.float64).reshape(-1, 3)
        Bk = np.asarray(self.Bk, dtype=np.float64).reshape(-1, 3)
        if Ak.shape != Bk.shape:
            raise InvalidInputError("A_k and B_k must have the same number of harmonics")
        if self.yaw_mode not in YAW_MODES:
            raise InvalidInputError(f"unknown yaw mode {self.yaw_mode!r}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Ak", Ak)
        object.__setattr__(self, "Bk", Bk)

    @property
    def N(self) -> int:
        return self.Ak.shape[0]

    def with_period(self, T: float) -> "FourierTrajectory":
        """Same shape, new period; the mirrored z series keeps its 2T relation."""
        zm = None
        if self.z_mirror is not None:
            zm = replace(self.z_mirror, period=2 * T)
        return replace(self, T=float(T), z_mirror=zm)

    # -- evaluation ---------------------------------------------------------

    def derivative(self, t: ArrayLike, order: int = 0) -> NDArray[np.float64]:
        """Position (order 0), velocity (1) or acceleration (2) at times ``t``; shape (..., 3)."""
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros(t.shape + (3,))
        if order == 0:
            out += self.A
        w = 2 * math.pi / self.T
        for k in range(1, self.N + 1):
            out += _harmonic(self.Ak[k - 1], self.Bk[k - 1], k * w, t[..., None], order)
        if order == 0:
            out[..., 2] += self.climb * t / self.T
        elif order == 1:
            out[..., 2] += self.climb / self.T
        if self.z_mirror is not None:
            out[..., 2] = self.z_mirror(t, order)
        return out

    def position(self, t: ArrayLike) -> NDArray[np.float64]:
        return self.derivative(t, 0)

    def velocity(self, t: ArrayLike) -> NDArray[np.float64]:
        return self.derivative(t, 1)

    def acceleration(self, t: ArrayLike) -> NDArray[np.float64]:
        return self.derivative(t, 2)

    def state(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self.derivative(t, 0), self.derivative(t, 1)

    def states(self, t: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self.derivative(t, 0), self.derivative(t, 1)

    def yaw(self, t: ArrayLike) -> NDArray[np.float64]:
        t = np.asarray(t, dtype=np.float64)
        if self.yaw_mode == "fixed":
            return np.full(t.shape, float(wrap_angle(self.fixed_yaw)))
        if self.yaw_mode == "tangent":
            v = self.velocity(t)
            dx, dy = v[..., 0], v[..., 1]
        else:
            p = self.position(t)
            dx, dy = self.centroid[0] - p[..., 0], self.centroid[1] - p[..., 1]
        # degenerate direction falls back to 0
        return wrap_angle(np.where((dx == 0) & (dy == 0), 0.0, np.arctan2(dy, dx)))

    def uniform_samples(self, M: int, order: int = 0) -> NDArray[np.float64]:
        """Exact values at ``t_i = i T / M`` for ``i < M`` via an inverse real FFT."""
        if M <= 2 * self.N:
            t = np.arange(M) * self.T / M
            return self.derivative(t, order)
        w = 2 * math.pi / self.T
        k = np.arange(1, self.N + 1)
        C = (self.Ak - 1j * self.Bk) * ((1j * k * w) ** order)[:, None]
        X = np.zeros((M // 2 + 1, 3), dtype=np.complex128)
        X[1 : self.N + 1] = C * (M / 2)
        if order == 0:
            X[0] = self.A * M
        out = np.fft.irfft(X, n=M, axis=0)
        t = np.arange(M) * self.T / M
        if order == 0:
            out[:, 2] += self.climb * t / self.T
        elif order == 1:
            out[:, 2] += self.climb / self.T
        if self.z_mirror is not None:
            out[:, 2] = self.z_mirror(t, order)
        return out

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "T": self.T,
            "A": self.A.tolist(),
            "harmonics": [
                {"k": k + 1, "A_k": self.Ak[k].tolist(), "B_k": self.Bk[k].tolist()}
                for k in range(self.N)
            ],
            "yaw_mode": self.yaw_mode,
            "ring_index": self.ring_index,
            "climb": self.climb,
            "centroid": [float(c) for c in self.centroid],
            "fixed_yaw": self.fixed_yaw,
            "sample_count": self.sample_count,
            "z_mode": self.z_mode,
            "terms": self.terms,
        }
        if self.z_mirror is not None:
            d["z_mirror"] = {
                "period": self.z_mirror.period,
                "a0": self.z_mirror.a0,
                "a": self.z_mirror.a.tolist(),
                "b": self.z_mirror.b.tolist(),
            }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FourierTrajectory":
        try:
            harmonics = sorted(d.get("harmonics", []), key=lambda h: h["k"])
            if [h["k"] for h in harmonics] != list(range(1, len(harmonics) + 1)):
                raise InvalidInputError("harmonic indices must be 1..N without gaps")
            Ak = np.array([h["A_k"] for h in harmonics], dtype=np.float64).reshape(-1, 3)
            Bk = np.array([h["B_k"] for h in harmonics], dtype=np.float64).reshape(-1, 3)
            zm = None
            if d.get("z_mirror") is not None:
                z = d["z_mirror"]
                zm = FourierSeries(
                    float(z["period"]), float(z["a0"]),
                    np.asarray(z["a"], dtype=np.float64), np.asarray(z["b"], dtype=np.float64),
                )
            return cls(
                T=float(d["T"]),
                A=np.asarray(d["A"], dtype=np.float64),
                Ak=Ak,
                Bk=Bk,
                climb=float(d.get("climb", 0.0)),
                z_mirror=zm,
                yaw_mode=d.get("yaw_mode", "centroid"),
                centroid=tuple(d.get("centroid", (0.0, 0.0))),
                fixed_yaw=float(d.get("fixed_yaw", 0.0)),
                ring_index=int(d.get("ring_index", 1)),
                sample_count=int(d.get("sample_count", 0)),
                z_mode=d.get("z_mode", "linear"),
                terms=int(d.get("terms", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed trajectory: {exc}") from exc


def sample(tr: FourierTrajectory, t: float) -> TrajectorySample:
    if t < 0:
        raise InvalidInputError("t must be non-negative")
    return TrajectorySample(
        t=float(t),
        position=tr.position(t),
        velocity=tr.velocity(t),
        yaw=float(tr.yaw(t)),
    )


def _series_coefficients(sp: Spectrum, harmonics: int) -> tuple[float, NDArray, NDArray]:
    F = sp.coefficients
    Q = sp.Q
    k = np.arange(1, harmonics + 1)
    return float(F[0].real / Q), 2 * F[k].real / Q, -2 * F[k].imag / Q


def to_fourier_trajectory(
    spectra: list[Spectrum] | tuple[Spectrum, ...],
    T: float,
    harmonics: int,
    **kwargs,
) -> FourierTrajectory:
    """Real-series form of per-axis spectra (x, y, z) keeping ``harmonics`` terms.

    Sampling the result at ``i T / Q`` reproduces the inverse transform of the
    spectra truncated to ``2*harmonics + 1`` bins.
    """
    if len(spectra) != 3:
        raise InvalidInputError("need one spectrum per axis (x, y, z)")
    Q = spectra[0].Q
    if any(sp.Q != Q for sp in spectra):
        raise InvalidInputError("all axes must have the same sample count")
    if not 0 <= harmonics <= (Q - 1) // 2:
        raise InvalidInputError(f"harmonics must lie in 0..{(Q - 1) // 2} for Q={Q}")
    A = np.zeros(3)
    Ak = np.zeros((harmonics, 3))
    Bk = np.zeros((harmonics, 3))
    for axis, sp in enumerate(spectra):
        A[axis], Ak[:, axis], Bk[:, axis] = _series_coefficients(sp, harmonics)
    kwargs.setdefault("sample_count", Q)
    kwargs.setdefault("terms", 2 * harmonics + 1)
    return FourierTrajectory(T=float(T), A=A, Ak=Ak, Bk=Bk, **kwargs)


def harmonics_for_terms(terms: int, Q: int) -> int:
    """Largest symmetric harmonic count that uses at most ``terms`` bins."""
    return max(0, min((terms - 1) // 2, (Q - 1) // 2))


def fit_ring(
    xs: ArrayLike,
    ys: ArrayLike,
    zs: ArrayLike,
    T: float,
    terms: int,
    z_mode: str = "linear",
    climb: float | None = None,
    **kwargs,
) -> FourierTrajectory:
    """Fit one closed ring sampled at ``t_i = i T / Q``.

    ``linear`` keeps z as ``zs[0] + climb * t / T`` (``climb`` defaults to the
    ramp implied by the samples); ``fourier-mirrored`` transforms the
    mirror-extended z sequence with period ``2T``.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    zs = np.asarray(zs, dtype=np.float64)
    Q = len(xs)
    if not (len(ys) == Q and len(zs) == Q) or Q < 3:
        raise InvalidInputError("ring signals must have equal length >= 3")
    if z_mode not in Z_MODES:
        raise InvalidInputError(f"unknown z_mode {z_mode!r}")
    N = harmonics_for_terms(terms, Q)
    zero = Spectrum(np.zeros(Q, dtype=np.complex128))
    tr = to_fourier_trajectory([dft(xs), dft(ys), zero], T, N, z_mode=z_mode, **kwargs)
    A = tr.A.copy()
    if z_mode == "linear":
        if climb is None:
            climb = (zs[-1] - zs[0]) * Q / (Q - 1) if Q > 1 else 0.0
        A[2] = zs[0]
        return replace(tr, A=A, climb=float(climb), terms=terms)
    mirrored = np.concatenate([zs, zs[::-1]])
    Nz = min(2 * N, (len(mirrored) - 1) // 2)
    a0, a, b = _series_coefficients(dft(mirrored), Nz)
    zm = FourierSeries(period=2 * float(T), a0=a0, a=a, b=b)
    return replace(tr, A=A, z_mirror=zm, terms=terms)


@dataclass(frozen=True)
class FeasibilityReport:
    T: float
    velocity_bound: NDArray[np.float64]  # per axis, analytic
    acceleration_bound: NDArray[np.float64]
    max_velocity_axis: NDArray[np.float64]  # per axis, sampled
    max_acceleration_axis: NDArray[np.float64]
    max_speed: float  # sampled norm
    max_acceleration: float
    v_max: float
    a_max: float
    samples: int
    min_period: float

    @property
    def feasible(self) -> bool:
        return self.max_speed <= self.v_max and self.max_acceleration <= self.a_max

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "feasible": self.feasible,
            "max_speed": self.max_speed,
            "max_acceleration": self.max_acceleration,
            "v_max": self.v_max,
            "a_max": self.a_max,
            "velocity_bound": self.velocity_bound.tolist(),
            "acceleration_bound": self.acceleration_bound.tolist(),
            "max_velocity_axis": self.max_velocity_axis.tolist(),
            "max_acceleration_axis": self.max_acceleration_axis.tolist(),
            "samples": self.samples,
            "min_period": self.min_period,
        }


def _analytic_bounds(tr: FourierTrajectory) -> tuple[NDArray, NDArray]:
    w = 2 * math.pi * np.arange(1, tr.N + 1) / tr.T
    amp = np.hypot(tr.Ak, tr.Bk)  # (N, 3)
    vb = (w[:, None] * amp).sum(axis=0)
    ab = ((w**2)[:, None] * amp).sum(axis=0)
    vb[2] += abs(tr.climb) / tr.T
    if tr.z_mirror is not None:
        zm = tr.z_mirror
        wz = 2 * math.pi * np.arange(1, len(zm.a) + 1) / zm.period
        az = np.hypot(zm.a, zm.b)
        vb[2] = float((wz * az).sum())
        ab[2] = float((wz**2 * az).sum())
    return vb, ab


def feasibility_check(
    tr: FourierTrajectory, a_max: float, v_max: float, samples: int | None = None
) -> FeasibilityReport:
    """Compare the trajectory's speed and acceleration against vehicle limits.

    The sampled maxima use ``max(10 * N * Q, 1000)`` uniform samples over one
    period (``Q`` is the fitted sample count, ``2N+1`` if unknown).
    """
    if not (a_max > 0 and v_max > 0):
        raise InvalidInputError("limits must be positive")
    vb, ab = _analytic_bounds(tr)
    if samples is None:
        Q = tr.sample_count or (2 * tr.N + 1)
        samples = max(10 * max(tr.N, 1) * Q, 1000)
    if tr.z_mirror is not None:
        # mirrored z has period 2T; cover it fully
        t = np.arange(2 * samples) * tr.T / samples
        v = tr.derivative(t, 1)
        a = tr.derivative(t, 2)
    else:
        v = tr.uniform_samples(samples, 1)
        a = tr.uniform_samples(samples, 2)
    speed = float(np.linalg.norm(v, axis=1).max())
    acc = float(np.linalg.norm(a, axis=1).max())
    scale = max(speed / v_max, math.sqrt(acc / a_max))
    return FeasibilityReport(
        T=tr.T,
        velocity_bound=vb,
        acceleration_bound=ab,
        max_velocity_axis=np.abs(v).max(axis=0),
        max_acceleration_axis=np.abs(a).max(axis=0),
        max_speed=speed,
        max_acceleration=acc,
        v_max=float(v_max),
        a_max=float(a_max),
        samples=int(samples),
        min_period=tr.T * scale,
    )


def make_feasible(
    tr: FourierTrajectory, a_max: float, v_max: float, margin: float = 1.0
) -> tuple[FourierTrajectory, FeasibilityReport]:
    """Stretch the period (never shrink it) until the limits hold, with ``margin`` >= 1."""
    rep = feasibility_check(tr, a_max, v_max)
    if rep.feasible and margin == 1.0:
        return tr, rep
    T_new = max(tr.T, rep.min_period * margin)
    # guard against rounding right at the limit
    for _ in range(8):
        tr2 = tr.with_period(T_new)
        rep2 = feasibility_check(tr2, a_max, v_max)
        if rep2.feasible:
            return tr2, rep2
        T_new *= 1.0 + 1e-6
    return tr2, rep2
