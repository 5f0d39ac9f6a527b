"""Large-time extinction probability: limits, approach rates, and oracles.

E(t) = F_A(0, 0, t) is the probability that the whole population is gone by
time t.  Its t -> infinity limit is the smallest root of the offspring
fixed-point system s_B = (p + q*s_B)^2, s_A = ((1-alpha)*s_A + alpha*s_B)^2,
solvable in closed quadratic form (:func:`extinction_fixed_point`) -- that
solve is the independent oracle against which the closed-form limits below
are checked.

Covered regimes and rates, written as E(t) ~ limit - coefficient * decay(t):

* bi-critical: limit 1, decay 1/sqrt(t), coefficient 4/sqrt(lambda_b);
* critical B, non-critical A: limit alpha^2/(1-alpha)^2 (super-critical A)
  or 1 (sub-critical A), decay 1/t with coefficients
  8*alpha^2/((1-alpha)(1-2*alpha)*lambda_b) and 8*alpha/((2*alpha-1)*lambda_b);
* super-critical B: limit
  (1 - 2a(1-a)p^2/q^2 - sqrt(q^2-4a(1-a)p^2)/q) / (2(1-a)^2), exponential
  decay.  For -1 < theta1 < 0 the decay exponent is -lambda_b*(p-q)*theta1
  with a prefactor built from the hypergeometric-branch constant C0 at
  (x, y) = (0, 0).  For theta1 < -1 the analytic correction of order
  z0 = p^2*exp(lambda_b*(p-q)*t) dominates instead, so the exponent is
  lambda_b*(p-q) with the prefactor kappa1*p^2/(mu*(1-alpha)^2),
  kappa1 = D+ - (1+theta2)/(2 q^2) - mu*a*(1-a)*(q^2-p^2)/q^4.
  theta1 = -1 exactly is degenerate.

Sub-critical B with any non-critical classification has no closed-form rate
here; :func:`extinction_limit` raises UnsupportedRegimeError for it (and for
the boundary-parameter corners), while the fixed-point oracle and the
exact/ODE/Monte-Carlo curves remain available everywhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import oracle, pgf
from .errors import (
    DegenerateParameterError,
    InternalConsistencyError,
    NumericsError,
    UnsupportedRegimeError,
)
from .model import Criticality, ModelParams, TheoremBranch, classify
from .specfun import DEFAULT_CONTROL

__all__ = [
    "RateClass",
    "ExtinctionResult",
    "extinction_limit",
    "extinction_fixed_point",
    "extinction_curve",
]


class RateClass(enum.Enum):
    INVERSE_SQRT_T = "InverseSqrtT"
    INVERSE_T = "InverseT"
    EXPONENTIAL = "Exponential"


@dataclass(frozen=True)
class ExtinctionResult:
    """limit and the asymptote E(t) ~ limit - rate_coefficient * decay(t).

    decay(t) is 1/sqrt(t), 1/t, or exp(exponent * t) according to
    rate_class; ``exponent`` (negative) is only meaningful for the
    exponential class.
    """

    limit: float
    rate_class: RateClass
    rate_coefficient: float
    exponent: float = 0.0

    def asymptote(self, t: float) -> float:
        if t <= 0:
            return float("nan")
        if self.rate_class is RateClass.INVERSE_SQRT_T:
            decay = 1.0 / math.sqrt(t)
        elif self.rate_class is RateClass.INVERSE_T:
            decay = 1.0 / t
        else:
            decay = math.exp(self.exponent * t)
        return self.limit - self.rate_coefficient * decay


def extinction_fixed_point(params: ModelParams) -> float:
    """Eventual extinction probability from the offspring fixed points.

    s_B is the smallest root of q^2 s^2 - (1-2pq) s + p^2 = 0, i.e.
    min(1, p^2/q^2); with u the smallest root of (1-a) u^2 - u + a*s_B = 0,
    the answer is s_A = u^2 (and s_B^2 exactly at alpha = 1).
    """
    p, q, alpha = params.p, params.q, params.alpha
    s_b = 1.0 if p >= 0.5 else (p / q) ** 2
    if alpha >= 1.0 - 1e-15:
        return s_b * s_b
    disc = 1.0 - 4.0 * alpha * (1.0 - alpha) * s_b
    u = (1.0 - math.sqrt(max(disc, 0.0))) / (2.0 * (1.0 - alpha))
    return u * u


def _real(value: complex, what: str) -> float:
    value = complex(value)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        raise InternalConsistencyError(f"{what}: imaginary part {value.imag:.3g}")
    return value.real


def _exponential_rate(params: ModelParams) -> tuple[float, float]:
    """(rate_coefficient, exponent) for the super-critical-B regime."""
    rc = pgf.regime_constants(params, TheoremBranch.NONCRIT_B_1C)
    alpha, p, q = params.alpha, params.p, params.q
    mu = rc.mu.real
    th1 = _real(rc.theta1, "theta1")
    if abs(th1 + 1.0) < 1e-9:
        raise DegenerateParameterError("exponential rate undefined at theta1 = -1")
    scale = mu * (1.0 - alpha) ** 2
    if th1 > -1.0:
        # E - limit ~ (C0*theta1/(mu(1-a)^2)) * p^(-2 theta1) * exp(-lb(p-q)th1 t)
        zbar0 = p * p
        try:
            big_g, big_p = pgf._hyp_family(rc, params, DEFAULT_CONTROL)
            kappa0 = pgf.kappa_1c(0.0, zbar0, params, rc)
            c0 = (kappa0 * big_g(zbar0, +1) - big_p(zbar0, +1)) / \
                 (big_p(zbar0, -1) - kappa0 * big_g(zbar0, -1))
        except NumericsError as exc:
            raise DegenerateParameterError(
                f"rate prefactor not computable: {exc}") from exc
        k = _real(c0 * th1 * math.exp(-2.0 * th1 * math.log(p)) / scale, "2c prefactor")
        return -k, -params.lambda_b * (p - q) * th1
    # theta1 < -1: the order-z0 analytic correction dominates
    th2, th3 = rc.theta2, rc.theta3
    q2 = q * q
    d_plus = ((1.0 + th1 + th2) ** 2 - th3 ** 2) / (4.0 * q2 * (1.0 + th1))
    kappa1 = d_plus - (1.0 + th2) / (2.0 * q2) \
        - mu * alpha * (1.0 - alpha) * (q2 - p * p) / (q2 * q2)
    coeff = _real(kappa1, "2c order-z0 coefficient") * p * p / scale
    return coeff, params.lambda_b * (p - q)


def extinction_limit(params: ModelParams) -> ExtinctionResult:
    """Closed-form extinction limit and approach rate for the covered regimes."""
    regime = classify(params)
    alpha, p, q, lam_b = params.alpha, params.p, params.q, params.lambda_b
    branch = regime.theorem_branch
    if branch is TheoremBranch.ORACLE_ONLY:
        raise UnsupportedRegimeError(
            "no closed-form extinction result on boundary-parameter corners")
    if branch is TheoremBranch.BICRITICAL_1A:
        return ExtinctionResult(limit=1.0, rate_class=RateClass.INVERSE_SQRT_T,
                                rate_coefficient=4.0 / math.sqrt(lam_b))
    if branch is TheoremBranch.NONCRIT_A_CRIT_B_1B:
        if regime.a_class is Criticality.SUPER_CRITICAL:  # alpha < 1/2
            limit = (alpha / (1.0 - alpha)) ** 2
            coeff = 8.0 * alpha ** 2 / ((1.0 - alpha) * (1.0 - 2.0 * alpha) * lam_b)
        else:  # alpha > 1/2, certain extinction
            limit = 1.0
            coeff = 8.0 * alpha / ((2.0 * alpha - 1.0) * lam_b)
        return ExtinctionResult(limit=limit, rate_class=RateClass.INVERSE_T,
                                rate_coefficient=coeff)
    # non-critical B
    if regime.b_class is not Criticality.SUPER_CRITICAL:
        raise UnsupportedRegimeError(
            "no closed-form extinction rate for sub-critical B with this A "
            "class; use the fixed-point oracle or a numerical curve")
    root = math.sqrt(q * q - 4.0 * alpha * (1.0 - alpha) * p * p)
    limit = (1.0 - 2.0 * alpha * (1.0 - alpha) * p * p / (q * q) - root / q) \
        / (2.0 * (1.0 - alpha) ** 2)
    coeff, exponent = _exponential_rate(params)
    return ExtinctionResult(limit=limit, rate_class=RateClass.EXPONENTIAL,
                            rate_coefficient=coeff, exponent=exponent)


_CURVE_METHODS = ("exact", "asymptotic", "ode", "mc", "fixed-point")


def extinction_curve(params: ModelParams, times, method: str = "exact", *,
                     replicates: int = 10_000, seed: int = 0) -> list[tuple[float, float]]:
    """E(t) over a time grid by the chosen method.

    "exact" evaluates F_A(0,0,t) with the closed form where defined (auto
    fallback to the integrator), "ode" forces the integrator, "mc" estimates
    by simulation, "asymptotic" uses extinction_limit's tail formula, and
    "fixed-point" is the constant eventual limit.
    """
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or times != sorted(times):
        raise ValueError("times must be sorted and non-negative")
    if method not in _CURVE_METHODS:
        raise ValueError(f"method must be one of {_CURVE_METHODS}, got {method!r}")
    if method == "asymptotic":
        res = extinction_limit(params)
        return [(t, res.asymptote(t)) for t in times]
    if method == "fixed-point":
        fp = extinction_fixed_point(params)
        return [(t, fp) for t in times]
    if method == "mc":
        return [(t, oracle.estimate_extinction(params, t, replicates, seed + i).value)
                for i, t in enumerate(times)]
    if method == "ode":
        return [(t, pgf.pgf_a(0.0, 0.0, t, params, method="ode").value) for t in times]
    return [(t, pgf.pgf_a(0.0, 0.0, t, params, method="auto").value) for t in times]
