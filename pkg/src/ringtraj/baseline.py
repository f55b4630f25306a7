"""Least-squares polynomial baseline for per-axis ring signals.

Signals are fitted against the normalized sample index ``u`` in [-1, 1].
The basis is the set of polynomials orthonormal on the sample nodes, built by
Arnoldi iteration (Vandermonde with Arnoldi). Monomial or even Legendre
Vandermonde matrices on equispaced nodes are too ill-conditioned for the
degree-100 row of the comparison table; the Arnoldi basis stays orthonormal
and its fits are nested, so the residual cannot grow with the degree.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringtraj.errors import InvalidInputError


class ConditioningWarning(UserWarning):
    """The requested degree cannot be determined by the available samples."""


@dataclass(frozen=True)
class PolyTrajectory:
    """Polynomial in ``u`` = 2 t / duration - 1, stored as Arnoldi recurrence + coefficients.

    ``hessenberg`` is the (degree+1, degree) recurrence matrix, ``coefficients``
    the weights of the orthonormal basis polynomials and ``fitted`` the fit at
    the sample nodes. Off-node evaluation of degrees near the sample count is
    intrinsically ill-conditioned on equispaced nodes; the node values are not.
    """

    coefficients: NDArray[np.float64]
    hessenberg: NDArray[np.float64]
    degree: int
    fitted: NDArray[np.float64]
    duration: float = 1.0

    def u_of(self, t: ArrayLike) -> NDArray[np.float64]:
        return 2.0 * np.asarray(t, dtype=np.float64) / self.duration - 1.0


def _arnoldi(u: NDArray[np.float64], degree: int) -> tuple[NDArray, NDArray]:
    m = u.size
    Qb = np.ones((m, degree + 1))
    H = np.zeros((degree + 1, degree))
    for k in range(degree):
        q = u * Qb[:, k]
        # modified Gram-Schmidt, twice for good measure
        for _ in range(2):
            for j in range(k + 1):
                c = Qb[:, j] @ q / m
                H[j, k] += c
                q -= c * Qb[:, j]
        H[k + 1, k] = np.linalg.norm(q) / np.sqrt(m)
        Qb[:, k + 1] = q / H[k + 1, k]
    return Qb, H


def polyfit(signal: ArrayLike, degree: int, duration: float = 1.0) -> PolyTrajectory:
    """Least-squares fit of ``signal`` sampled on ``u = linspace(-1, 1, Q)``.

    A degree at or above the sample count falls back to the interpolating
    degree ``Q - 1`` and emits :class:`ConditioningWarning`.
    """
    y = np.asarray(signal, dtype=np.float64)
    Q = y.size
    if degree < 1:
        raise InvalidInputError("degree must be >= 1")
    if Q < 2:
        raise InvalidInputError("need at least two samples")
    fit_degree = degree
    if degree >= Q:
        warnings.warn(
            f"degree {degree} >= {Q} samples; using interpolating degree {Q - 1}",
            ConditioningWarning,
            stacklevel=2,
        )
        fit_degree = Q - 1
    u = np.linspace(-1.0, 1.0, Q)
    Qb, H = _arnoldi(u, fit_degree)
    # columns are orthonormal up to the 1/m scaling, so the solve is a projection
    d = np.linalg.lstsq(Qb, y, rcond=None)[0]
    return PolyTrajectory(
        coefficients=d, hessenberg=H, degree=fit_degree, fitted=Qb @ d, duration=duration
    )


def polyeval_u(p: PolyTrajectory, u: ArrayLike) -> NDArray[np.float64]:
    """Evaluate by replaying the Arnoldi recurrence at ``u``."""
    u = np.asarray(u, dtype=np.float64)
    shape = u.shape
    s = u.reshape(-1)
    H = p.hessenberg
    W = np.ones((s.size, p.degree + 1))
    for k in range(p.degree):
        w = s * W[:, k]
        for j in range(k + 1):
            w -= H[j, k] * W[:, j]
        W[:, k + 1] = w / H[k + 1, k]
    return (W @ p.coefficients).reshape(shape)


def polyeval(p: PolyTrajectory, t: ArrayLike) -> NDArray[np.float64]:
    return polyeval_u(p, p.u_of(t))


def fit_samples(signal: ArrayLike, degree: int) -> NDArray[np.float64]:
    """Fitted values at the original sample positions."""
    return polyfit(signal, degree).fitted
