"""Two-type continuous-time branching processes, end to end.

Self-renewing A-cells feed an irreversible stream of committed B-cells.
The package provides the exact joint probability generating functions for
every criticality combination, closed-form expected counts, extinction
limits and approach rates, and two independent verification oracles
(exact stochastic simulation and direct integration of the backward
equations), plus a CLI front end and a cross-validation harness.
"""

from .asymptotics import (
    ExtinctionResult,
    RateClass,
    extinction_curve,
    extinction_fixed_point,
    extinction_limit,
)
from .errors import (
    ConvergenceError,
    DegenerateParameterError,
    DomainError,
    InternalConsistencyError,
    NumericsError,
    SingularTransformError,
    StepUnderflowError,
    TruncationWarning,
    UnsupportedRegimeError,
)
from .model import (
    Criticality,
    CriticalityRegime,
    ModelParams,
    TheoremBranch,
    classify,
    params_from_config,
    progeny_pgf_a,
    progeny_pgf_b,
)
from .moments import MomentPair, expected_counts
from .oracle import (
    EstimateWithCI,
    PmfGrid,
    SimulationCaps,
    StepControl,
    Trajectory,
    estimate_extinction,
    estimate_pgf,
    integrate_backward,
    invert_pgf,
    simulate,
)
from .pgf import (
    PgfResult,
    RegimeConstants,
    TransformState,
    backward_residual,
    pgf_a,
    pgf_b,
    regime_constants,
    transform_state,
    transform_w,
    transform_z,
)
from .specfun import (
    SeriesControl,
    bessel_i,
    gauss_2f1,
    kummer_m,
    tricomi_u,
    whittaker_m,
    whittaker_w,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "Criticality", "CriticalityRegime", "TheoremBranch",
    "classify", "progeny_pgf_a", "progeny_pgf_b", "params_from_config",
    "SeriesControl", "bessel_i", "kummer_m", "tricomi_u", "whittaker_m",
    "whittaker_w", "gauss_2f1",
    "MomentPair", "expected_counts",
    "RegimeConstants", "TransformState", "PgfResult", "transform_w",
    "transform_z", "transform_state", "regime_constants", "pgf_a", "pgf_b",
    "backward_residual",
    "ExtinctionResult", "RateClass", "extinction_limit",
    "extinction_fixed_point", "extinction_curve",
    "Trajectory", "PmfGrid", "EstimateWithCI", "SimulationCaps",
    "StepControl", "integrate_backward", "simulate", "estimate_extinction",
    "estimate_pgf", "invert_pgf",
    "NumericsError", "ConvergenceError", "DomainError",
    "DegenerateParameterError", "SingularTransformError",
    "StepUnderflowError", "UnsupportedRegimeError",
    "InternalConsistencyError", "TruncationWarning",
]
