"""surgekit: compressor surge stability analysis and anti-surge control.

Library layout:

- ``compressor``: cubic pressure-rise map, two-state surge model,
  equilibrium/throttle algebra.
- ``stability``: Jacobian/eigenvalue analysis on the equilibrium
  manifold, surge boundary, divergence indicator, limit-cycle detection.
- ``odesim``: fixed-step RK4 engine and trajectory records.
- ``loop``: saturating anti-surge valve, fixed PD/PID and gradient
  adaptive controllers, tangent tuning rule, closed-loop simulation.
- ``averaging``: averaged adaptation dynamics and their eigenvalues.
- ``cli``: the ``surgekit`` command-line front end and scenario files.
"""

from .averaging import (AveragedPoint, averaged_eigenvalues,
                        averaged_jacobian, averaged_rhs, grid_points,
                        stability_verdict)
from .compressor import (CompressorMap, DEFAULT_MAP, GreitzerParams,
                         PlantState, equilibrium_from_throttle, greitzer_rhs,
                         map_pressure_rise, map_slope, throttle_from_flow)
from .errors import (AnalysisError, DegenerateResponseError, DivergenceError,
                     DomainError, ModelBreakdownError, NoEquilibriumError,
                     ScenarioError, SurgeKitError)
from .loop import (ControllerConfig, DisturbanceProfile, LoopState,
                   ValveModel, control_signal, extract_LT,
                   resolve_control_signal, simulate_closed_loop, zn_gains)
from .odesim import (SystemDescriptor, Trajectory, integrate,
                     simulate_greitzer, steady_state_of, step_rk4,
                     vector_field_grid)
from .stability import (LimitCycleReport, StabilityRow, bendixson_indicator,
                        char_poly, detect_limit_cycle, discriminant,
                        eig_real_part, jacobian_at_equilibrium,
                        stability_scan, surge_boundary)

__version__ = "0.1.0"

__all__ = [
    "AveragedPoint", "averaged_eigenvalues", "averaged_jacobian",
    "averaged_rhs", "grid_points", "stability_verdict",
    "CompressorMap", "DEFAULT_MAP", "GreitzerParams", "PlantState",
    "equilibrium_from_throttle", "greitzer_rhs", "map_pressure_rise",
    "map_slope", "throttle_from_flow",
    "AnalysisError", "DegenerateResponseError", "DivergenceError",
    "DomainError", "ModelBreakdownError", "NoEquilibriumError",
    "ScenarioError", "SurgeKitError",
    "ControllerConfig", "DisturbanceProfile", "LoopState", "ValveModel",
    "control_signal", "extract_LT", "resolve_control_signal",
    "simulate_closed_loop", "zn_gains",
    "SystemDescriptor", "Trajectory", "integrate", "simulate_greitzer",
    "steady_state_of", "step_rk4", "vector_field_grid",
    "LimitCycleReport", "StabilityRow", "bendixson_indicator", "char_poly",
    "detect_limit_cycle", "discriminant", "eig_real_part",
    "jacobian_at_equilibrium", "stability_scan", "surge_boundary",
    "__version__",
]
