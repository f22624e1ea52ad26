"""Cubic compressor map and the two-state Greitzer surge model.

The map gives the steady-state pressure rise ``psi_c(phi)`` as a cubic in
the shifted flow coordinate ``w = slope*phi + offset``.  The transient
model couples nondimensional mass flow ``phi`` and plenum pressure rise
``psi``:

    d(phi)/dt = a * (psi_c(phi) - psi)
    d(psi)/dt = b * (phi - g * sqrt(psi))

where ``g`` is the throttle parameter.  At an equilibrium both rates
vanish, so ``psi = psi_c(phi)`` and ``phi = g*sqrt(psi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ModelBreakdownError, NoEquilibriumError

#: Flow-equation and pressure-equation gains of the shipped model.
FLOW_GAIN = 0.8
PRESSURE_GAIN = 1.25


@dataclass(frozen=True)
class CompressorMap:
    """Steady-state pressure-rise map ``psi0 + h * P(w)``, ``w = slope*phi + offset``.

    ``P`` is the cubic with ascending coefficients ``cubic``.  The default
    coefficients describe an axial machine whose map peaks at phi = 0.5
    with value 0.712.
    """

    psi0: float = 0.352
    h: float = 0.18
    slope: float = 4.0
    offset: float = -1.0
    cubic: tuple[float, float, float, float] = (1.0, 1.5, 0.0, -0.5)
    domain_lo: float = 0.0
    domain_hi: float = 0.8

    def __post_init__(self):
        if not self.domain_lo < self.domain_hi:
            raise DomainError(
                f"map domain is empty: [{self.domain_lo}, {self.domain_hi}]"
            )
        values = (self.psi0, self.h, self.slope, self.offset,
                  self.domain_lo, self.domain_hi, *self.cubic)
        if len(self.cubic) != 4 or not all(math.isfinite(v) for v in values):
            raise DomainError("map coefficients must be four finite cubic "
                              "coefficients plus finite scalars")


@dataclass(frozen=True)
class PlantState:
    """Compressor state: nondimensional mass flow and plenum pressure rise."""

    phi: float
    psi: float


@dataclass(frozen=True)
class GreitzerParams:
    """Gains of the two state equations plus the throttle parameter g."""

    a: float = FLOW_GAIN
    b: float = PRESSURE_GAIN
    g: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.g > 0):
            raise DomainError(f"a, b, g must all be positive, got "
                              f"({self.a}, {self.b}, {self.g})")


#: The shipped axial-compressor map.
DEFAULT_MAP = CompressorMap()


def map_pressure_rise(cmap: CompressorMap, phi: float) -> float:
    """Evaluate psi_c(phi).  No domain clamping: callers decide."""
    if not math.isfinite(phi):
        raise DomainError(f"phi must be finite, got {phi}")
    c0, c1, c2, c3 = cmap.cubic
    w = cmap.slope * phi + cmap.offset
    return cmap.psi0 + cmap.h * (c0 + w * (c1 + w * (c2 + w * c3)))


def map_slope(cmap: CompressorMap, phi: float) -> float:
    """Analytic derivative d(psi_c)/d(phi) of the cubic map."""
    if not math.isfinite(phi):
        raise DomainError(f"phi must be finite, got {phi}")
    _, c1, c2, c3 = cmap.cubic
    w = cmap.slope * phi + cmap.offset
    return cmap.h * cmap.slope * (c1 + w * (2.0 * c2 + w * 3.0 * c3))


def greitzer_rhs(state: PlantState, params: GreitzerParams,
                 cmap: CompressorMap = DEFAULT_MAP) -> tuple[float, float]:
    """Time derivatives (d phi/dt, d psi/dt) of the surge model.

    Raises ModelBreakdownError for psi <= 0, where sqrt(psi) and with it
    the throttle characteristic are undefined.  That situation signals
    divergence and is never silently clamped.
    """
    if not (math.isfinite(state.phi) and math.isfinite(state.psi)):
        raise DomainError(f"state must be finite, got {state}")
    if state.psi <= 0.0:
        raise ModelBreakdownError(
            f"plenum pressure must stay positive, got psi={state.psi}")
    dphi = params.a * (map_pressure_rise(cmap, state.phi) - state.psi)
    dpsi = params.b * (state.phi - params.g * math.sqrt(state.psi))
    return dphi, dpsi


def throttle_from_flow(cmap: CompressorMap, phi: float) -> float:
    """Throttle parameter g that puts the equilibrium at the given flow."""
    if not math.isfinite(phi) or phi <= 0.0:
        raise DomainError(f"equilibrium flow must be positive, got {phi}")
    psi = map_pressure_rise(cmap, phi)
    if psi <= 0.0:
        raise DomainError(
            f"map value at phi={phi} is {psi}; equilibrium needs psi_c > 0")
    return phi / math.sqrt(psi)


def equilibrium_from_throttle(cmap: CompressorMap, g: float) -> PlantState:
    """Unique equilibrium (phi*, psi_c(phi*)) for a throttle parameter g.

    Solves psi_c(phi) = (phi/g)^2 by bisection on the open map domain
    followed by a few Newton polish steps.  On the shipped map the
    residual of the returned point is far below 1e-10.
    """
    if not math.isfinite(g) or g <= 0.0:
        raise DomainError(f"throttle parameter must be positive, got {g}")

    def f(phi):
        return map_pressure_rise(cmap, phi) - (phi / g) ** 2

    def fprime(phi):
        return map_slope(cmap, phi) - 2.0 * phi / (g * g)

    lo = cmap.domain_lo + 1e-6
    hi = cmap.domain_hi - 1e-6
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        root = lo
    elif fhi == 0.0:
        root = hi
    elif flo * fhi > 0.0:
        raise NoEquilibriumError(
            f"psi_c(phi) - (phi/g)^2 does not change sign on "
            f"({lo:.6g}, {hi:.6g}) for g={g}")
    else:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0 or hi - lo < 1e-12:
                break
            if (fm > 0.0) == (flo > 0.0):
                lo, flo = mid, fm
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        for _ in range(5):
            d = fprime(root)
            if d == 0.0:
                break
            step = f(root) / d
            root -= step

    psi = map_pressure_rise(cmap, root)
    if abs(psi - (root / g) ** 2) > 1e-10:
        raise NoEquilibriumError(
            f"equilibrium refinement stalled at phi={root} (g={g})")
    return PlantState(phi=root, psi=psi)
