"""Averaged adaptation dynamics and their stability.

With a constant set point the gradient updates can be averaged at zero
frequency: every transfer function collapses to its DC gain, leaving an
autonomous three-state system in the controller gains,

    dk1/dt = -gamma * r^2 * (k1/(1+k2) - 1)
    dk2/dt = +gamma * r^2 * (k1/(1+k2) - 1) * k1/(1+k2)
    dk3/dt = 0.

Its Jacobian has a zero third row and column and a singular upper block,
so two eigenvalues are exactly zero and the third equals the block trace,
which is strictly negative for nonnegative gains: the averaged adaptation
never diverges.  In saturated-actuator mode all rates are zero and every
eigenvalue vanishes (marginal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError

VERDICT_TOL = 1e-9

#: CSV header for grid reports
REPORT_HEADER = ("k1", "k2", "k3", "gamma", "r", "lam1", "lam2", "lam3",
                 "verdict")


@dataclass(frozen=True)
class AveragedPoint:
    """Operating point of the averaged gain dynamics."""

    k1: float
    k2: float
    k3: float = 0.7
    r: float = 0.55
    gamma: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in
                   (self.k1, self.k2, self.k3, self.r, self.gamma)):
            raise DomainError(f"averaged point must be finite, got {self}")
        if not (self.k1 >= 0.0 and self.k2 >= 0.0 and self.k3 >= 0.0):
            raise DomainError(f"gains must be >= 0, got {self}")
        if 1.0 + self.k2 <= 0.0:
            raise DomainError(f"k2 = {self.k2} makes 1 + k2 nonpositive "
                              "(dynamics singular at k2 = -1)")
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class AveragedReportRow:
    point: AveragedPoint
    eigenvalues: tuple[float, float, float]
    verdict: str


def averaged_rhs(p: AveragedPoint) -> tuple[float, float, float]:
    """Gain rates of the averaged dynamics at the given point."""
    amp = p.gamma * p.r * p.r
    q = p.k1 / (1.0 + p.k2)
    return -amp * (q - 1.0), amp * (q - 1.0) * q, 0.0


def averaged_jacobian(p: AveragedPoint) -> np.ndarray:
    """Analytic 3x3 Jacobian of :func:`averaged_rhs`."""
    amp = p.gamma * p.r * p.r
    c = 1.0 + p.k2
    q = p.k1 / c
    return amp * np.array([
        [-1.0 / c, p.k1 / (c * c), 0.0],
        [(2.0 * q - 1.0) / c, -(2.0 * q - 1.0) * p.k1 / (c * c), 0.0],
        [0.0, 0.0, 0.0],
    ])


def averaged_eigenvalues(p: AveragedPoint) -> tuple[float, float, float]:
    """Eigenvalues of the averaged Jacobian, sorted descending.

    Computed numerically from the matrix.  By its structure two are zero
    and the third is the upper-block trace
    -gamma*r^2 * ((1+k2)^2 - k1*(1+k2) + 2*k1^2) / (1+k2)^3,
    a negative-definite quadratic in (1+k2, k1): never positive.
    """
    lam = np.linalg.eigvals(averaged_jacobian(p))
    if np.abs(lam.imag).max() > 1e-9:
        raise DomainError(f"unexpected complex eigenvalues at {p}: {lam}")
    return tuple(sorted(lam.real, reverse=True))


def saturated_mode_eigenvalues() -> tuple[float, float, float]:
    """Eigenvalues while the actuator saturates: all rates are zero."""
    return 0.0, 0.0, 0.0


def stability_verdict(points: Iterable[AveragedPoint],
                      tol: float = VERDICT_TOL) -> list[AveragedReportRow]:
    """Per-point eigenvalues with a stable/unstable verdict.

    Stable means the largest eigenvalue does not exceed ``tol``; the
    marginal all-zero saturated case therefore counts as stable.
    """
    rows = []
    for p in points:
        lam = averaged_eigenvalues(p)
        verdict = "stable" if max(lam) <= tol else "unstable"
        rows.append(AveragedReportRow(p, lam, verdict))
    return rows


def grid_points(k1_lo: float, k1_hi: float, k2_lo: float, k2_hi: float,
                n: int, k3: float = 0.7, r: float = 0.55,
                gamma: float = 1.0) -> list[AveragedPoint]:
    """n-by-n grid of averaged points over [k1_lo, k1_hi] x [k2_lo, k2_hi]."""
    if n < 2:
        raise DomainError(f"grid needs n >= 2, got {n}")
    if not (k1_lo <= k1_hi and k2_lo <= k2_hi):
        raise DomainError("grid bounds must be ordered")
    return [AveragedPoint(k1=float(k1), k2=float(k2), k3=k3, r=r, gamma=gamma)
            for k1 in np.linspace(k1_lo, k1_hi, n)
            for k2 in np.linspace(k2_lo, k2_hi, n)]
