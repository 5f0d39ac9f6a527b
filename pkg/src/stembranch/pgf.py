"""Exact joint probability generating functions F_A(x, y, t) and F_B(y, t).

F_A is the joint PGF of the (A, B) counts at time t starting from one A-cell,
F_B the PGF starting from one B-cell (independent of x because commitment is
irreversible).  F_B has an elementary closed form.  F_A is assembled from a
ratio of special-function solutions of the linearized backward equation, with
an integration constant C pinned by the initial condition F_A(., ., 0) = x:

* bi-critical (alpha = 1/2, p = 1/2): modified Bessel functions of orders
  +/- theta, theta = sqrt(1 - mu), mu = 4*lambda_a/lambda_b, in the variable
  w = (lambda_b*t*(1-y)/4 + 1)/(1-y);
* critical B only (p = 1/2, alpha != 1/2): Whittaker M and W in theta*w;
* non-critical B (p != 1/2): Gauss hypergeometric functions in
  z/q^2 with z = P*exp(lambda_b*(p-q)*t), P = (p^2 - y*q^2)/(1-y).

All intermediate arithmetic is complex (theta and friends go imaginary on
open parameter regions while F stays real); for real inputs in the unit
square the result is cast back to real under a strict imaginary-part guard.
The constant C is recomputed for each (x, y); values are cheap relative to
the special-function evaluations and nothing is cached.

Branch cuts: every fractional power uses the principal branch.  For the
hypergeometric branch the evaluation point z and the initial-condition point
P lie on the same ray from the origin (z = P*e^{real}), so one consistent
principal branch serves both and the phase factors cancel in the ratio.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import oracle
from .errors import (
    DegenerateParameterError,
    DomainError,
    InternalConsistencyError,
    NumericsError,
    SingularTransformError,
)
from .model import ModelParams, TheoremBranch, classify
from .specfun import DEFAULT_CONTROL, SeriesControl, bessel_i, gauss_2f1, whittaker_m, whittaker_w

__all__ = [
    "RegimeConstants",
    "TransformState",
    "PgfResult",
    "transform_w",
    "transform_z",
    "transform_state",
    "regime_constants",
    "pgf_b",
    "pgf_a",
    "backward_residual",
]

# |1 - y| below which the w/z transforms are declared singular.
Y_SINGULAR_EPS = 1e-8

# Imaginary contamination allowed before a "real" result is rejected.
_IMAG_GUARD = 1e-8

# Largest special-function argument allowed at the t=0 constant-determination
# point.  Beyond this the two basis solutions agree to within double-precision
# rounding (their second component is ~e^{-2z} relative), the integration
# constant cannot be resolved, and the oracle takes over.  Large arguments at
# the *evaluation* point are fine; sensitivity to C decays there.
_BASIS_ARG_LIMIT = 20.0

_METHODS = ("closed", "ode", "auto")


@dataclass(frozen=True)
class RegimeConstants:
    """Branch constants; c_const/kappa are filled per (x, y) evaluation."""

    branch: TheoremBranch
    mu: complex
    theta: complex = 0j
    theta1: complex = 0j
    theta2: complex = 0j
    theta3: complex = 0j
    c_const: complex | None = None
    kappa: complex | None = None


@dataclass(frozen=True)
class TransformState:
    w: complex | None
    z: complex | None
    p_big: complex | None


@dataclass(frozen=True)
class PgfResult:
    value: float | complex
    method: str                      # "closed" or "ode" (what actually ran)
    branch: TheoremBranch
    fallback_reason: str | None = None


def transform_w(y, t, params: ModelParams) -> complex:
    """w = (lambda_b*t*(1-y)/4 + 1)/(1-y); singular as y -> 1."""
    y = complex(y)
    one_m_y = 1.0 - y
    if abs(one_m_y) <= Y_SINGULAR_EPS:
        raise SingularTransformError(f"|1 - y| = {abs(one_m_y):.3g} too small")
    return (params.lambda_b * t * one_m_y / 4.0 + 1.0) / one_m_y


def transform_z(y, t, params: ModelParams) -> complex:
    """z = ((p^2 - y*q^2)/(1-y)) * exp(lambda_b*(p-q)*t); singular as y -> 1."""
    y = complex(y)
    one_m_y = 1.0 - y
    if abs(one_m_y) <= Y_SINGULAR_EPS:
        raise SingularTransformError(f"|1 - y| = {abs(one_m_y):.3g} too small")
    p, q = params.p, params.q
    expo = params.lambda_b * (p - q) * t
    if expo > 700.0:
        raise DomainError(f"transform_z: exp({expo:.3g}) overflows")
    return (p * p - y * q * q) / one_m_y * math.exp(expo)


def transform_state(y, t, params: ModelParams) -> TransformState:
    """Both transform variables at (y, t); fields are None where singular."""
    w = z = p_big = None
    try:
        w = transform_w(y, t, params)
        p_big = transform_z(y, 0.0, params)
        z = transform_z(y, t, params)
    except NumericsError:
        pass
    return TransformState(w=w, z=z, p_big=p_big)


def regime_constants(params: ModelParams, branch: TheoremBranch | None = None) -> RegimeConstants:
    """Constants of the applicable closed-form branch (no initial condition yet)."""
    if branch is None:
        branch = classify(params).theorem_branch
    alpha, p, q = params.alpha, params.p, params.q
    if branch is TheoremBranch.BICRITICAL_1A:
        mu = 4.0 * params.lambda_a / params.lambda_b
        theta = cmath.sqrt(complex(1.0 - mu))
        return RegimeConstants(branch=branch, mu=complex(mu), theta=theta)
    if branch is TheoremBranch.NONCRIT_A_CRIT_B_1B:
        mu = 4.0 * params.lambda_a / params.lambda_b
        gap = abs(1.0 - 2.0 * alpha)
        theta = gap * mu
        theta1 = -mu * alpha * (1.0 - alpha) / gap
        theta2 = cmath.sqrt(complex(1.0 - 4.0 * mu * alpha * (1.0 - alpha))) / 2.0
        return RegimeConstants(branch=branch, mu=complex(mu), theta=complex(theta),
                               theta1=complex(theta1), theta2=theta2)
    if branch is TheoremBranch.NONCRIT_B_1C:
        mu = params.lambda_a / (params.lambda_b * (p - q))  # negative for super-critical B
        theta1 = mu * cmath.sqrt(complex(q * q - 4.0 * alpha * (1.0 - alpha) * p * p)) / q
        theta2 = cmath.sqrt(complex(q * q - 4.0 * alpha * (1.0 - alpha) * mu * (p - q))) / q
        theta3 = mu * abs(1.0 - 2.0 * alpha)
        return RegimeConstants(branch=branch, mu=complex(mu), theta1=theta1,
                               theta2=theta2, theta3=complex(theta3))
    raise DegenerateParameterError(f"no closed-form constants for branch {branch.value}")


def pgf_b(y, t, params: ModelParams) -> float | complex:
    """F_B(y, t), the PGF starting from a single B-cell; F_B(y, 0) = y."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    yc = complex(y)
    if abs(yc) > 1.0 + 1e-12:
        raise DomainError(f"pgf_b: |y| = {abs(yc):.6g} outside the closed unit disk")
    real_in = yc.imag == 0.0 and 0.0 <= yc.real <= 1.0
    one_m_y = 1.0 - yc
    if abs(one_m_y) <= Y_SINGULAR_EPS:
        raise SingularTransformError("pgf_b: y too close to 1")
    p, q = params.p, params.q
    if p == 0.5:
        denom = params.lambda_b * t * one_m_y / 4.0 + 1.0
        val = 1.0 - one_m_y / denom
    else:
        expo = params.lambda_b * (p - q) * t
        p2, q2 = p * p, q * q
        big_p = (p2 - yc * q2) / one_m_y
        if expo > 700.0:
            val = complex(p2 / q2) if big_p == 0 else complex(1.0)
        elif expo < -700.0:
            val = complex(p2 / q2)
        else:
            z = big_p * math.exp(expo)
            if abs(z - q2) < 1e-300:
                raise SingularTransformError("pgf_b: transform hit the q^2 pole")
            val = (z - p2) / (z - q2)
    return _cast_real(val, real_in, "pgf_b")


def _cast_real(val: complex, real_inputs: bool, what: str) -> float | complex:
    val = complex(val)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise DegenerateParameterError(f"{what}: non-finite value")
    if not real_inputs:
        return val
    if abs(val.imag) > _IMAG_GUARD * max(1.0, abs(val.real)):
        raise InternalConsistencyError(
            f"{what}: imaginary part {val.imag:.3g} too large for a real result")
    return val.real


def _checked_div(num: complex, den: complex, what: str) -> complex:
    if den == 0 or not cmath.isfinite(den) or not cmath.isfinite(num):
        raise DegenerateParameterError(f"{what}: degenerate ratio")
    out = num / den
    if not cmath.isfinite(out):
        raise DegenerateParameterError(f"{what}: non-finite ratio")
    return out


def _cpow(z: complex, s: complex) -> complex:
    if z == 0:
        raise DegenerateParameterError("zero base in fractional power")
    return cmath.exp(s * cmath.log(z))


def _closed_1a(x: complex, y: complex, t: float, params: ModelParams,
               ctl: SeriesControl) -> complex:
    rc = regime_constants(params, TheoremBranch.BICRITICAL_1A)
    mu, theta = rc.mu, rc.theta
    if abs(theta) < 1e-6:
        raise DegenerateParameterError("bi-critical branch needs mu != 1 (theta = 0)")
    w = transform_w(y, t, params)
    wbar = 1.0 / (1.0 - y)
    if abs(mu) * math.sqrt(abs(wbar)) > _BASIS_ARG_LIMIT:
        raise DomainError("bessel basis unresolvable at the initial-condition point")
    sy = cmath.sqrt(1.0 - y)
    kappa = (2.0 - y - x) / (2.0 * sy) - sy / mu

    def ring(wv):
        sw = cmath.sqrt(wv)
        zw = mu * sw
        return sw, (bessel_i(-theta, zw, ctl), bessel_i(theta, zw, ctl),
                    bessel_i(1.0 - theta, zw, ctl), bessel_i(1.0 + theta, zw, ctl))

    swb, (i0m_b, i0p_b, i1m_b, i1p_b) = ring(wbar)
    c_const = _checked_div(
        kappa * i0m_b - (-(theta / (mu * swb)) * i0m_b + i1m_b),
        ((theta / (mu * swb)) * i0p_b + i1p_b) - kappa * i0p_b,
        "bessel-branch constant",
    )
    sw, (i0m, i0p, i1m, i1p) = ring(w)
    zw = mu * sw
    s_ratio = _checked_div(
        (-(theta / zw)) * i0m + i1m + c_const * ((theta / zw) * i0p + i1p),
        i0m + c_const * i0p,
        "bessel-branch ratio",
    )
    return (-4.0 / mu) * ((mu / (2.0 * sw)) * s_ratio + 1.0 / (2.0 * w)
                          - mu * (1.0 + w) / (4.0 * w))


def _closed_1b(x: complex, y: complex, t: float, params: ModelParams,
               ctl: SeriesControl) -> complex:
    rc = regime_constants(params, TheoremBranch.NONCRIT_A_CRIT_B_1B)
    mu, theta, th1, th2 = rc.mu, rc.theta, rc.theta1, rc.theta2
    alpha = params.alpha
    w = transform_w(y, t, params)
    wbar = 1.0 / (1.0 - y)
    if abs(theta * wbar) > _BASIS_ARG_LIMIT:
        raise DomainError("whittaker basis unresolvable at the initial-condition point")
    kappa = (1.0 / (1.0 - y)) * (
        -mu * (1.0 - alpha) ** 2 * x
        + mu * (1.0 - 2.0 * alpha * (1.0 - alpha) * y) / 2.0
        - theta / 2.0
        + th1 * (1.0 - y)
    )
    coeff = 0.5 + th1 + th2

    def pair(wv):
        z = theta * wv
        return (whittaker_m(th1, th2, z, ctl), whittaker_m(th1 + 1.0, th2, z, ctl),
                whittaker_w(th1, th2, z, ctl), whittaker_w(th1 + 1.0, th2, z, ctl))

    m0b, m1b, w0b, w1b = pair(wbar)
    c_const = _checked_div(coeff * m1b - kappa * m0b, kappa * w0b + w1b,
                           "whittaker-branch constant")
    m0, m1, w0, w1 = pair(w)
    ratio = _checked_div(coeff * m1 - c_const * w1, m0 + c_const * w0,
                         "whittaker-branch ratio")
    return (-1.0 / (mu * (1.0 - alpha) ** 2)) * (
        theta / 2.0 - th1 / w + ratio / w
        - mu * (w + 2.0 * alpha * (1.0 - alpha) * (1.0 - w)) / (2.0 * w)
    )


def _hyp_family(rc: RegimeConstants, params: ModelParams, ctl: SeriesControl):
    """The four 2F1 evaluators and derivative coefficients of the 1c branch."""
    th1, th2, th3 = rc.theta1, rc.theta2, rc.theta3
    q2 = params.q ** 2
    for c_param in (1.0 + th1, 1.0 - th1):
        if abs(c_param.imag) < 1e-9 and abs(c_param.real - round(c_param.real)) < 1e-9 \
                and round(c_param.real) <= 1:
            # c or c-1 a non-positive integer poisons F0/F1 or the D coefficients
            raise DegenerateParameterError(f"hypergeometric c-parameter {c_param} degenerate")
    d_plus = ((1.0 + th1 + th2) ** 2 - th3 ** 2) / (4.0 * q2 * (1.0 + th1))
    d_minus = ((1.0 - th1 + th2) ** 2 - th3 ** 2) / (4.0 * q2 * (1.0 - th1))

    def f0p(z):
        return gauss_2f1((1 + th1 + th2 + th3) / 2, (1 + th1 + th2 - th3) / 2, 1 + th1, z / q2, ctl)

    def f0m(z):
        return gauss_2f1((1 - th1 + th2 + th3) / 2, (1 - th1 + th2 - th3) / 2, 1 - th1, z / q2, ctl)

    def f1p(z):
        return gauss_2f1(1 + (1 + th1 + th2 + th3) / 2, 1 + (1 + th1 + th2 - th3) / 2,
                         2 + th1, z / q2, ctl)

    def f1m(z):
        return gauss_2f1(1 + (1 - th1 + th2 + th3) / 2, 1 + (1 - th1 + th2 - th3) / 2,
                         2 - th1, z / q2, ctl)

    def big_g(z, sign):
        f = f0p(z) if sign > 0 else f0m(z)
        return _cpow(z, (1.0 + sign * th1) / 2.0) * f

    def big_p(z, sign):
        th = sign * th1
        d = d_plus if sign > 0 else d_minus
        f0 = f0p(z) if sign > 0 else f0m(z)
        f1 = f1p(z) if sign > 0 else f1m(z)
        return ((1.0 + th) / 2.0 * _cpow(z, -(1.0 - th) / 2.0) * f0
                + d * _cpow(z, (1.0 + th) / 2.0) * f1)

    return big_g, big_p


def kappa_1c(x: complex, zbar: complex, params: ModelParams,
             rc: RegimeConstants) -> complex:
    """Initial-condition constant kappa of the hypergeometric branch.

    This is the value the solution-ratio must take at z = P (the t = 0
    transform point) so that F_A(z=P) = x; valid for every alpha.
    """
    mu, th2 = rc.mu, rc.theta2
    alpha, p, q = params.alpha, params.p, params.q
    p2, q2 = p * p, q * q
    if abs(zbar) < 1e-12 or abs(zbar - q2) < 1e-12:
        raise DegenerateParameterError("kappa_1c: initial transform point degenerate")
    return (-x * mu * (1.0 - alpha) ** 2 / zbar
            - (1.0 + th2) / (2.0 * (zbar - q2))
            + 1.0 / (2.0 * zbar)
            - (mu / (2.0 * zbar)) * (2.0 * alpha * (1.0 - alpha) * (zbar - p2) / (zbar - q2) - 1.0))


def _closed_1c(x: complex, y: complex, t: float, params: ModelParams,
               ctl: SeriesControl) -> complex:
    rc = regime_constants(params, TheoremBranch.NONCRIT_B_1C)
    mu, th1, th2 = rc.mu, rc.theta1, rc.theta2
    alpha, p, q = params.alpha, params.p, params.q
    p2, q2 = p * p, q * q
    if abs(th1) < 1e-8:
        raise DegenerateParameterError("hypergeometric branch: theta1 ~ 0, coincident exponents")
    zbar = transform_z(y, 0.0, params)
    z = transform_z(y, t, params)
    if abs(z - q2) < 1e-12:
        raise DegenerateParameterError("hypergeometric branch: z at the q^2 pole")
    big_g, big_p = _hyp_family(rc, params, ctl)
    kap = kappa_1c(x, zbar, params, rc)
    c_const = _checked_div(
        kap * big_g(zbar, +1) - big_p(zbar, +1),
        big_p(zbar, -1) - kap * big_g(zbar, -1),
        "hypergeometric-branch constant",
    )
    ratio = _checked_div(
        big_p(z, +1) + c_const * big_p(z, -1),
        big_g(z, +1) + c_const * big_g(z, -1),
        "hypergeometric-branch ratio",
    )
    return (-z / (mu * (1.0 - alpha) ** 2)) * (
        ratio
        + (1.0 + th2) / (2.0 * (z - q2))
        - 0.5 * (1.0 / z - (mu / z) * (2.0 * alpha * (1.0 - alpha) * (z - p2) / (z - q2) - 1.0))
    )


_CLOSED = {
    TheoremBranch.BICRITICAL_1A: _closed_1a,
    TheoremBranch.NONCRIT_A_CRIT_B_1B: _closed_1b,
    TheoremBranch.NONCRIT_B_1C: _closed_1c,
}


def pgf_a(x, y, t, params: ModelParams, method: str = "auto",
          ctl: SeriesControl = DEFAULT_CONTROL) -> PgfResult:
    """Joint PGF F_A(x, y, t) for the process started from one A-cell.

    ``method`` is one of "closed", "ode", "auto".  "auto" uses the
    closed form whenever its branch is defined at (x, y, t) and silently
    falls back to the backward-equation integrator otherwise, recording why
    in ``fallback_reason``.  For real x, y in the unit square the value is a
    float; complex inputs return complex and are served by the ODE path
    under "auto" (closed-form branch cuts are only validated on the real
    square).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")
    xc, yc = complex(x), complex(y)
    if abs(xc) > 1.0 + 1e-12 or abs(yc) > 1.0 + 1e-12:
        raise DomainError("pgf_a: x, y must lie in the closed unit disk")
    real_in = (xc.imag == 0.0 and yc.imag == 0.0
               and 0.0 <= xc.real <= 1.0 and 0.0 <= yc.real <= 1.0)
    branch = classify(params).theorem_branch

    def run_ode(reason=None):
        f_a, _ = oracle.integrate_backward(xc, yc, t, params)
        return PgfResult(value=_cast_real(complex(f_a), real_in, "pgf_a"),
                         method="ode", branch=branch, fallback_reason=reason)

    if method == "ode":
        return run_ode()

    def run_closed():
        if branch is TheoremBranch.ORACLE_ONLY:
            raise DegenerateParameterError("no closed form on boundary-parameter corners")
        val = _CLOSED[branch](xc, yc, t, params, ctl)
        return PgfResult(value=_cast_real(val, real_in, "pgf_a"),
                         method="closed", branch=branch, fallback_reason=None)

    if method == "closed":
        return run_closed()
    # auto
    if not real_in:
        return run_ode("closed form validated on the real unit square only")
    try:
        return run_closed()
    except NumericsError as exc:
        return run_ode(f"{type(exc).__name__}: {exc}")


def backward_residual(x, y, t, params: ModelParams, method: str = "auto",
                      step: float = 1e-5) -> float:
    """|dF_A/dt - (-lambda_a F_A + lambda_a h_A(F_A, F_B))| by central difference.

    A self-check that the evaluated PGF actually satisfies its backward
    equation at (x, y, t); used by the CLI as a per-value diagnostic column.
    """
    from .model import progeny_pgf_a

    h = step if t >= step else t / 2.0
    f = pgf_a(x, y, t, params, method).value
    if h == 0.0:  # t == 0: one-sided difference
        f_p = pgf_a(x, y, step, params, method).value
        dfdt = (complex(f_p) - complex(f)) / step
    else:
        f_p = pgf_a(x, y, t + h, params, method).value
        f_m = pgf_a(x, y, t - h, params, method).value
        dfdt = (complex(f_p) - complex(f_m)) / (2.0 * h)
    fb = pgf_b(y, t, params) if abs(1.0 - complex(y)) > Y_SINGULAR_EPS else \
        oracle.integrate_backward(x, y, t, params)[1]
    rhs = -params.lambda_a * complex(f) + params.lambda_a * progeny_pgf_a(complex(f), complex(fb), params)
    return abs(dfdt - rhs)
