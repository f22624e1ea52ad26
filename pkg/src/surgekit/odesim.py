"""Deterministic fixed-step RK4 integration and trajectory handling.

Two entry points: :func:`integrate` drives any :class:`SystemDescriptor`
through a plain Python loop, while :func:`simulate_greitzer` runs the
surge model through the compiled kernel.  Both produce the same
:class:`Trajectory` layout: column 0 is time, sampling is uniform, and a
non-finite value aborts the run instead of being recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .compressor import (CompressorMap, DEFAULT_MAP, GreitzerParams,
                         PlantState, greitzer_rhs)
from .errors import DivergenceError, DomainError, ModelBreakdownError

#: Default step sizes: nondimensional time for plant runs, seconds for loop runs.
PLANT_DT = 1e-2
LOOP_DT = 1e-3


@dataclass
class SystemDescriptor:
    """A first-order ODE system ``d(state)/dt = rhs(t, state)``."""

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    output_names: tuple[str, ...]

    def __post_init__(self):
        if len(self.output_names) != self.dimension:
            raise DomainError("output_names must match the state dimension")


@dataclass
class Trajectory:
    """Uniformly sampled multi-signal record of one run.

    ``samples`` is row-major, one row per step, with ``columns[0] == 't'``.
    """

    dt: float
    columns: list[str] = field(default_factory=list)
    samples: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise DomainError(f"no column named {name!r}; have {self.columns}")
        return self.samples[:, idx]

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def n_rows(self) -> int:
        return self.samples.shape[0]

    def tail(self, fraction: float) -> "Trajectory":
        """The trailing ``fraction`` of the run, as a view."""
        if not 0.0 < fraction <= 1.0:
            raise DomainError(f"fraction must be in (0, 1], got {fraction}")
        start = int(self.n_rows * (1.0 - fraction))
        return Trajectory(self.dt, self.columns, self.samples[start:])


def _n_steps(dt: float, t_end: float) -> int:
    if not (dt > 0.0 and t_end > 0.0):
        raise DomainError(f"need dt > 0 and t_end > 0, got {dt}, {t_end}")
    return int(math.floor(t_end / dt + 1e-9))


def step_rk4(sys: SystemDescriptor, t: float, state: np.ndarray,
             dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    y = np.asarray(state, dtype=float)
    k1 = np.asarray(sys.rhs(t, y), dtype=float)
    k2 = np.asarray(sys.rhs(t + 0.5 * dt, y + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(sys.rhs(t + 0.5 * dt, y + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(sys.rhs(t + dt, y + dt * k3), dtype=float)
    for k in (k1, k2, k3, k4):
        if not np.all(np.isfinite(k)):
            raise DivergenceError(
                f"non-finite derivative at t={t}", time=t, state=y.copy())
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(
            f"non-finite state after step at t={t}", time=t, state=y.copy())
    return out


def integrate(sys: SystemDescriptor, initial_state: Sequence[float],
              dt: float, t_end: float) -> Trajectory:
    """Integrate and record every step, initial row included.

    On divergence (non-finite values, or a model-breakdown raised by the
    rhs) the error carries the partial trajectory recorded so far.
    """
    n = _n_steps(dt, t_end)
    state = np.asarray(initial_state, dtype=float)
    if state.shape != (sys.dimension,):
        raise DomainError(
            f"initial state must have shape ({sys.dimension},), got {state.shape}")
    columns = ["t", *sys.output_names]
    out = np.empty((n + 1, sys.dimension + 1))
    out[0, 0] = 0.0
    out[0, 1:] = state
    for i in range(1, n + 1):
        t = (i - 1) * dt
        try:
            state = step_rk4(sys, t, state, dt)
        except (DivergenceError, ModelBreakdownError) as err:
            partial = Trajectory(dt, columns, out[:i].copy())
            raise DivergenceError(
                f"run aborted at t={t}: {err}", time=t,
                state=out[i - 1, 1:].copy(), partial=partial) from err
        out[i, 0] = i * dt
        out[i, 1:] = state
    return Trajectory(dt, columns, out)


def greitzer_system(params: GreitzerParams,
                    cmap: CompressorMap = DEFAULT_MAP) -> SystemDescriptor:
    """Descriptor wrapping the surge model for the generic integrator."""

    def rhs(_t, state):
        return np.array(greitzer_rhs(PlantState(state[0], state[1]),
                                     params, cmap))

    return SystemDescriptor(dimension=2, rhs=rhs, output_names=("phi", "psi"))


def simulate_greitzer(initial: PlantState, params: GreitzerParams,
                      cmap: CompressorMap = DEFAULT_MAP,
                      dt: float = PLANT_DT, t_end: float = 50.0) -> Trajectory:
    """Kernel-backed open-loop run of the surge model."""
    n = _n_steps(dt, t_end)
    if not (math.isfinite(initial.phi) and math.isfinite(initial.psi)):
        raise DomainError(f"initial state must be finite, got {initial}")
    if initial.psi <= 0.0:
        raise ModelBreakdownError(
            f"plenum pressure must stay positive, got psi={initial.psi}")
    out = np.empty((n + 1, 3))
    out[0] = (0.0, initial.phi, initial.psi)
    c0, c1, c2, c3 = cmap.cubic
    status, row = _kernels.greitzer_loop(
        out, dt, cmap.psi0, cmap.h, cmap.slope, cmap.offset, c0, c1, c2, c3,
        params.a, params.b, params.g)
    columns = ["t", "phi", "psi"]
    if status == _kernels.OK:
        return Trajectory(dt, columns, out)
    partial = Trajectory(dt, columns, out[:row].copy())
    t_fail = (row - 1) * dt
    if status == _kernels.PSI_NONPOSITIVE:
        raise DivergenceError(
            f"plenum pressure reached zero near t={t_fail:.6g} "
            "(surge model breakdown)", time=t_fail,
            state=out[row - 1, 1:].copy(), partial=partial)
    raise DivergenceError(
        f"non-finite state near t={t_fail:.6g}", time=t_fail,
        state=out[row - 1, 1:].copy(), partial=partial)


def steady_state_of(traj: Trajectory, window: float,
                    tol: float) -> Optional[np.ndarray]:
    """Mean of the final ``window`` time units if all signals are flat.

    Returns the per-signal means (time column excluded) when every
    signal's peak-to-peak variation inside the window is at most ``tol``,
    else None.
    """
    if traj.n_rows < 2:
        raise DomainError("trajectory too short")
    n_win = int(round(window / traj.dt))
    if not 1 <= n_win < traj.n_rows:
        raise DomainError(
            f"window of {window} time units does not fit a run of "
            f"{traj.n_rows} samples at dt={traj.dt}")
    tail = traj.samples[-n_win:, 1:]
    spread = tail.max(axis=0) - tail.min(axis=0)
    if np.any(spread > tol):
        return None
    return tail.mean(axis=0)


def vector_field_grid(params: GreitzerParams, phi_range: tuple[float, float],
                      psi_range: tuple[float, float], n: int,
                      cmap: CompressorMap = DEFAULT_MAP):
    """Evaluate the surge-model field on an n-by-n grid.

    Returns (PHI, PSI, DPHI, DPSI) arrays for phase-plane plotting.
    """
    if n < 1:
        raise DomainError(f"grid size must be >= 1, got {n}")
    if psi_range[0] <= 0.0:
        raise DomainError("psi range must stay positive")
    if not (phi_range[0] <= phi_range[1] and psi_range[0] <= psi_range[1]):
        raise DomainError("ranges must be ordered (lo, hi)")
    phis = np.linspace(phi_range[0], phi_range[1], n)
    psis = np.linspace(psi_range[0], psi_range[1], n)
    PHI, PSI = np.meshgrid(phis, psis)
    DPHI = np.empty_like(PHI)
    DPSI = np.empty_like(PSI)
    for i in range(n):
        for j in range(n):
            dphi, dpsi = greitzer_rhs(
                PlantState(PHI[i, j], PSI[i, j]), params, cmap)
            DPHI[i, j] = dphi
            DPSI[i, j] = dpsi
    return PHI, PSI, DPHI, DPSI
