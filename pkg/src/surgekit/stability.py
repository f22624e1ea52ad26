"""Equilibrium stability analysis of the surge model.

Everything here works on the equilibrium manifold, where the throttle
parameter and the plenum pressure can be eliminated so that the Jacobian,
its characteristic polynomial, the discriminant, the eigenvalue real part
and the divergence indicator are all functions of the equilibrium flow
alone.  A trajectory-based limit-cycle detector complements the local
analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compressor import (CompressorMap, DEFAULT_MAP, FLOW_GAIN,
                         PRESSURE_GAIN, map_pressure_rise, map_slope)
from .errors import AnalysisError, DomainError
from .odesim import Trajectory

#: classification threshold on the eigenvalue real part
CLASS_TOL = 1e-9

STABLE_FOCUS = "stable-focus"
UNSTABLE_FOCUS = "unstable-focus"
BOUNDARY = "boundary"

#: CSV header for stability scans
SCAN_HEADER = ("phi", "delta", "real_part", "bendixson_r", "class")


@dataclass(frozen=True)
class StabilityRow:
    phi: float
    discriminant: float
    real_part: float
    bendixson_r: float
    classification: str


@dataclass(frozen=True)
class LimitCycleReport:
    detected: bool
    amplitude_phi: float
    amplitude_psi: float
    period: float
    cycles_analyzed: int


def _check_phi(cmap: CompressorMap, phi: float) -> None:
    if not math.isfinite(phi) or not cmap.domain_lo < phi < cmap.domain_hi:
        raise DomainError(
            f"equilibrium flow must lie in ({cmap.domain_lo}, "
            f"{cmap.domain_hi}), got {phi}")


def jacobian_at_equilibrium(cmap: CompressorMap, phi: float,
                            a: float = FLOW_GAIN,
                            b: float = PRESSURE_GAIN) -> np.ndarray:
    """2x2 Jacobian of the surge model at the equilibrium with flow phi.

    At an equilibrium psi = psi_c(phi) and g = phi/sqrt(psi), which turns
    the throttle entry -b*g/(2*sqrt(psi)) into -b*phi/(2*psi_c(phi)).
    """
    _check_phi(cmap, phi)
    psi = map_pressure_rise(cmap, phi)
    if psi <= 0.0:
        raise DomainError(f"map value at phi={phi} is {psi}; need psi_c > 0")
    return np.array([
        [a * map_slope(cmap, phi), -a],
        [b, -b * phi / (2.0 * psi)],
    ])


def char_poly(cmap: CompressorMap, phi: float, a: float = FLOW_GAIN,
              b: float = PRESSURE_GAIN) -> tuple[float, float]:
    """Coefficients (b, c) of the characteristic polynomial s^2 + b*s + c."""
    jac = jacobian_at_equilibrium(cmap, phi, a, b)
    trace = jac[0, 0] + jac[1, 1]
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    return -trace, det


def discriminant(cmap: CompressorMap, phi: float, a: float = FLOW_GAIN,
                 b: float = PRESSURE_GAIN) -> float:
    """Discriminant b^2 - 4c of the characteristic polynomial.

    Negative throughout the working flow range of the shipped map: the
    equilibria are foci, never nodes.
    """
    pb, pc = char_poly(cmap, phi, a, b)
    return pb * pb - 4.0 * pc


def eig_real_part(cmap: CompressorMap, phi: float, a: float = FLOW_GAIN,
                  b: float = PRESSURE_GAIN) -> float:
    """Real part of the complex eigenvalue pair, i.e. trace/2.

    Requires a negative discriminant (complex pair); its sign decides
    stable versus unstable focus.
    """
    if discriminant(cmap, phi, a, b) >= 0.0:
        raise AnalysisError(
            f"eigenvalues at phi={phi} are real; real-part analysis "
            "assumes a complex pair")
    jac = jacobian_at_equilibrium(cmap, phi, a, b)
    return 0.5 * (jac[0, 0] + jac[1, 1])


def bendixson_indicator(cmap: CompressorMap, phi: float,
                        a: float = FLOW_GAIN,
                        b: float = PRESSURE_GAIN) -> float:
    """Divergence of the vector field on the equilibrium manifold.

    Equals the Jacobian trace (twice the eigenvalue real part).  A region
    where it keeps one sign cannot contain a limit cycle, so its sign
    change marks where surge oscillations become possible.
    """
    _check_phi(cmap, phi)
    psi = map_pressure_rise(cmap, phi)
    if psi <= 0.0:
        raise DomainError(f"map value at phi={phi} is {psi}; need psi_c > 0")
    return a * map_slope(cmap, phi) - b * phi / (2.0 * psi)


def surge_boundary(cmap: CompressorMap = DEFAULT_MAP, a: float = FLOW_GAIN,
                   b: float = PRESSURE_GAIN, lo: float = 0.1,
                   hi: float = 0.79, n_scan: int = 1000) -> float:
    """Largest flow where the eigenvalue real part crosses zero.

    Scans [lo, hi] for the rightmost sign change and bisects it down to
    |real part| <= 1e-10.  Below the returned flow the equilibrium is an
    unstable focus, above it a stable one.
    """
    grid = np.linspace(lo, hi, n_scan)
    vals = np.array([eig_real_part(cmap, p, a, b) for p in grid])
    signs = np.sign(vals)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if len(flips) == 0:
        raise AnalysisError(
            f"eigenvalue real part does not change sign on [{lo}, {hi}]")
    i = flips[-1]
    xlo, xhi = grid[i], grid[i + 1]
    flo = vals[i]
    for _ in range(200):
        mid = 0.5 * (xlo + xhi)
        fm = eig_real_part(cmap, mid, a, b)
        if abs(fm) <= 1e-12 or xhi - xlo < 1e-15:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            xlo, flo = mid, fm
        else:
            xhi = mid
    mid = 0.5 * (xlo + xhi)
    if abs(eig_real_part(cmap, mid, a, b)) > 1e-10:
        raise AnalysisError("surge-boundary bisection failed to converge")
    return mid


def stability_scan(cmap: CompressorMap, phi_lo: float, phi_hi: float, n: int,
                   a: float = FLOW_GAIN, b: float = PRESSURE_GAIN,
                   tol: float = CLASS_TOL) -> list[StabilityRow]:
    """Tabulate the stability quantities on n uniformly spaced flows."""
    if not (cmap.domain_lo < phi_lo < phi_hi < cmap.domain_hi):
        raise DomainError(
            f"need {cmap.domain_lo} < phi_lo < phi_hi < {cmap.domain_hi}, "
            f"got ({phi_lo}, {phi_hi})")
    if n < 2:
        raise DomainError(f"scan needs at least 2 points, got {n}")
    rows = []
    for phi in np.linspace(phi_lo, phi_hi, n):
        delta = discriminant(cmap, phi, a, b)
        real = eig_real_part(cmap, phi, a, b)
        r = bendixson_indicator(cmap, phi, a, b)
        if real < -tol:
            cls = STABLE_FOCUS
        elif real > tol:
            cls = UNSTABLE_FOCUS
        else:
            cls = BOUNDARY
        rows.append(StabilityRow(float(phi), delta, real, r, cls))
    return rows


def _local_maxima(x: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima."""
    if len(x) < 3:
        return np.empty(0, dtype=int)
    interior = (x[1:-1] > x[:-2]) & (x[1:-1] > x[2:])
    return np.nonzero(interior)[0] + 1


def detect_limit_cycle(traj: Trajectory, settle_fraction: float = 0.5,
                       tol: float = 0.01, signal: str = "phi",
                       second_signal: str = "psi",
                       min_amplitude: float = 1e-6) -> LimitCycleReport:
    """Decide from a simulated run whether it settled onto a limit cycle.

    The first ``settle_fraction`` of the run is discarded as transient.
    A cycle is reported when at least four local maxima of the primary
    signal remain and the last three peak-to-peak amplitudes agree to the
    relative tolerance (and exceed ``min_amplitude``, so a converged
    steady state does not pass on numerical ripple).  The period is the
    mean spacing of successive maxima.
    """
    if not 0.0 < settle_fraction < 1.0:
        raise DomainError(
            f"settle_fraction must be in (0, 1), got {settle_fraction}")
    tail = traj.tail(1.0 - settle_fraction)
    x = tail.column(signal)
    t = tail.t
    none = LimitCycleReport(False, 0.0, 0.0, 0.0, 0)
    peaks = _local_maxima(x)
    if len(peaks) < 4:
        return none

    has_second = second_signal in tail.columns
    y = tail.column(second_signal) if has_second else None
    amps_x = []
    amps_y = []
    for p0, p1 in zip(peaks[:-1], peaks[1:]):
        seg = x[p0:p1 + 1]
        amps_x.append(x[p0] - seg.min())
        if has_second:
            seg_y = y[p0:p1 + 1]
            amps_y.append(seg_y.max() - seg_y.min())
    last3 = np.array(amps_x[-3:])
    mean_amp = last3.mean()
    cycles = len(peaks) - 1
    period = float(np.diff(t[peaks]).mean())
    if mean_amp <= min_amplitude:
        return none
    if (last3.max() - last3.min()) / mean_amp > tol:
        return none
    amp_psi = float(np.array(amps_y[-3:]).mean()) if has_second else 0.0
    return LimitCycleReport(True, float(mean_amp), amp_psi, period, cycles)
