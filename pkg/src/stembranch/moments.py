"""Closed-form expected cell counts.

The means satisfy the linear system

    dE_A/dt = lambda_a * (1 - 2*alpha) * E_A,            E_A(0) = 1
    dE_B/dt = 2*lambda_a*alpha * E_A + lambda_b*(q^2 - p^2) * E_B,   E_B(0) = 0

(the B influx per A-division is the mean number of new B progeny,
d h_A / dy at (1,1) = 2*alpha).  With r_a = lambda_a*(1-2*alpha) and
r_b = lambda_b*(q^2-p^2) = lambda_b*(q-p):

    E_A(t) = exp(r_a * t)
    E_B(t) = 2*lambda_a*alpha * (exp(r_a*t) - exp(r_b*t)) / (r_a - r_b)

and in the resonance case r_a == r_b (which includes bi-criticality, where
both rates vanish and E_B = lambda_a * t) the L'Hopital limit
E_B(t) = 2*lambda_a*alpha * t * exp(r_a*t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ModelParams

__all__ = ["MomentPair", "expected_counts", "growth_rates"]

# Relative gap below which the two exponentials are treated as resonant.
_RESONANCE_RTOL = 1e-9


@dataclass(frozen=True)
class MomentPair:
    e_a: float
    e_b: float
    t: float


def growth_rates(params: ModelParams) -> tuple[float, float]:
    """Mean growth exponents (r_a, r_b) of the two types."""
    r_a = params.lambda_a * (1.0 - 2.0 * params.alpha)
    r_b = params.lambda_b * (params.q ** 2 - params.p ** 2)
    return r_a, r_b


def expected_counts(params: ModelParams, t: float) -> MomentPair:
    """Expected (A, B) counts at time t >= 0 starting from one A-cell."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    r_a, r_b = growth_rates(params)
    influx = 2.0 * params.lambda_a * params.alpha
    e_a = math.exp(r_a * t)
    if abs(r_a - r_b) < _RESONANCE_RTOL * max(params.lambda_a, params.lambda_b):
        e_b = influx * t * e_a
    else:
        e_b = influx * (e_a - math.exp(r_b * t)) / (r_a - r_b)
    return MomentPair(e_a=e_a, e_b=e_b, t=float(t))
