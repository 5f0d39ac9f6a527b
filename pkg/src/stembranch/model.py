"""Model parameters, criticality classification, and progeny generating functions.

The process has two cell types. Type-A cells self-renew; at division each of
the two progeny independently becomes a B-cell with probability ``alpha``
(A -> AA, AB, BB with probabilities (1-alpha)^2, 2*alpha*(1-alpha), alpha^2).
Type-B cells divide or die; each B progeny survives as a B-cell with
probability ``q = 1 - p`` (B -> BB, B, death with probabilities q^2, 2pq, p^2).
Lifetimes are exponential with rates ``lambda_a`` and ``lambda_b``.

This module is the single source of truth for the p/q convention: the B-cell
progeny generating function is h_B(y) = (p + q*y)^2, i.e. ``p`` is the
per-progeny loss (differentiation-out/death) probability and ``q`` the
per-progeny survival probability.  All other modules, including the
simulator, inherit the convention from here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

__all__ = [
    "BOUNDARY_DELTA",
    "Criticality",
    "TheoremBranch",
    "ModelParams",
    "CriticalityRegime",
    "classify",
    "progeny_pgf_a",
    "progeny_pgf_b",
    "params_from_config",
]

# Parameter corners alpha ~ 0, alpha ~ 1, q ~ 0 where the closed forms
# divide by (1-alpha)^2 or q^2; those are routed to the ODE oracle.
BOUNDARY_DELTA = 1e-6


class Criticality(enum.Enum):
    SUB_CRITICAL = "SubCritical"
    CRITICAL = "Critical"
    SUPER_CRITICAL = "SuperCritical"


class TheoremBranch(enum.Enum):
    """Which closed-form family of the joint PGF applies."""

    BICRITICAL_1A = "BiCritical_1a"       # alpha = 1/2 and p = 1/2 (Bessel)
    NONCRIT_A_CRIT_B_1B = "NonCritA_CritB_1b"  # alpha != 1/2, p = 1/2 (Whittaker)
    NONCRIT_B_1C = "NonCritB_1c"          # p != 1/2 (Gauss hypergeometric)
    ORACLE_ONLY = "OracleOnly"            # degenerate corners, ODE oracle only


@dataclass(frozen=True)
class ModelParams:
    """The five model parameters; ``q`` is always derived as ``1 - p``.

    Invariants: 0 <= alpha <= 1, 0 <= p <= 1, lambda_a > 0, lambda_b > 0.
    """

    alpha: float
    p: float
    lambda_a: float
    lambda_b: float

    def __post_init__(self):
        for name in ("alpha", "p", "lambda_a", "lambda_b"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValueError(f"{name} must be a real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if not self.lambda_a > 0.0:
            raise ValueError(f"lambda_a must be > 0, got {self.lambda_a}")
        if not self.lambda_b > 0.0:
            raise ValueError(f"lambda_b must be > 0, got {self.lambda_b}")

    @property
    def q(self) -> float:
        """Per-progeny survival probability of a B-cell, exactly 1 - p."""
        return 1.0 - self.p


@dataclass(frozen=True)
class CriticalityRegime:
    a_class: Criticality
    b_class: Criticality
    theorem_branch: TheoremBranch


def classify(params: ModelParams) -> CriticalityRegime:
    """Classify each type's criticality and pick the closed-form branch.

    Mean offspring numbers are 2*(1-alpha) for A and 2*q for B, so A is
    critical iff alpha == 1/2 and B is critical iff p == 1/2 (exact
    comparisons: parameters are user inputs, not computed values).
    """
    if params.alpha == 0.5:
        a_class = Criticality.CRITICAL
    elif params.alpha < 0.5:
        a_class = Criticality.SUPER_CRITICAL
    else:
        a_class = Criticality.SUB_CRITICAL

    if params.p == 0.5:
        b_class = Criticality.CRITICAL
    elif params.q > params.p:
        b_class = Criticality.SUPER_CRITICAL
    else:
        b_class = Criticality.SUB_CRITICAL

    if (params.alpha < BOUNDARY_DELTA or params.alpha > 1.0 - BOUNDARY_DELTA
            or params.q < BOUNDARY_DELTA):
        branch = TheoremBranch.ORACLE_ONLY
    elif a_class is Criticality.CRITICAL and b_class is Criticality.CRITICAL:
        branch = TheoremBranch.BICRITICAL_1A
    elif b_class is Criticality.CRITICAL:
        branch = TheoremBranch.NONCRIT_A_CRIT_B_1B
    else:
        branch = TheoremBranch.NONCRIT_B_1C

    return CriticalityRegime(a_class, b_class, branch)


def progeny_pgf_a(x, y, params: ModelParams) -> complex:
    """Progeny PGF of an A-division: h_A(x, y) = ((1-alpha)*x + alpha*y)^2."""
    a = params.alpha
    return ((1.0 - a) * x + a * y) ** 2


def progeny_pgf_b(y, params: ModelParams) -> complex:
    """Progeny PGF of a B-division: h_B(y) = (p + q*y)^2."""
    return (params.p + params.q * y) ** 2


def params_from_config(path, overrides: dict | None = None) -> ModelParams:
    """Read parameters from a plain key=value file.

    Recognized keys: alpha, p, lambda_a, lambda_b.  Blank lines and lines
    starting with '#' are ignored.  ``overrides`` (e.g. CLI flags) take
    precedence over file values.  ``q`` is never an input.
    """
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in ("alpha", "p", "lambda_a", "lambda_b"):
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad number {val.strip()!r}") from None
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in ("alpha", "p", "lambda_a", "lambda_b") if k not in values]
    if missing:
        raise ValueError(f"missing parameter(s): {', '.join(missing)}")
    return ModelParams(**values)
