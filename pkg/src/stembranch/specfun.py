"""Complex-parameter special functions evaluated by adaptive power series.

Provides the modified Bessel function I(a, z), Kummer's confluent
hypergeometric M = 1F1, the Tricomi function U, the Whittaker functions
M(a, b, z) and W(a, b, z), and the Gauss hypergeometric 2F1 -- all with
complex parameters and complex argument, which is what the closed-form
generating functions require (orders and parameters go imaginary on open
parameter regions while the final values stay real).

Conventions, fixed package-wide:

* all non-integer complex powers use the principal branch,
  ``z**s = exp(s*log z)`` with ``log`` on the principal branch;
* Whittaker functions use the standard parameterization
  ``M(a,b,z) = exp(-z/2) * z**(b+1/2) * 1F1(b-a+1/2, 1+2b, z)`` and the same
  prefactor with U for W; this is the parameterization under which the
  derivative recurrences used by the Whittaker closed-form branch hold;
* gamma is scipy's complex-capable implementation; its reciprocal gives the
  pole-skipping behaviour the Bessel series needs (terms whose denominator
  gamma sits at a pole contribute exactly zero, so I(-n, z) = I(n, z) falls
  out of the series).

Series are truncated adaptively: summation stops once three consecutive
terms are below ``rel_tol`` times the running sum.  This is accurate and
overflow-free for |z| up to roughly 600, which covers every argument the
generating-function formulas produce at the time scales of interest; the
Tricomi function switches to its large-argument expansion beyond Re z >= 30
where the two-term connection formula cancels catastrophically in doubles.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from scipy.special import gamma as _cgamma, rgamma as _crgamma

from .errors import ConvergenceError, DegenerateParameterError, DomainError

__all__ = [
    "ComplexValue",
    "SeriesControl",
    "DEFAULT_CONTROL",
    "bessel_i",
    "kummer_m",
    "tricomi_u",
    "whittaker_m",
    "whittaker_w",
    "gauss_2f1",
]

# Scalar complex values are plain python ``complex``; the alias documents intent.
ComplexValue = complex

# |z| beyond which 2F1's defining series is not trusted (unit circle minus margin).
GAUSS_2F1_MARGIN = 1e-3

# Re(z) at which tricomi_u switches from the connection formula to the
# large-argument expansion (connection-formula cancellation ~ e^z * eps).
_U_ASYMPTOTIC_CUTOFF = 30.0

_OVERFLOW = 1e280


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for the power series."""

    rel_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be > 0")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


def _as_complex(v) -> complex:
    z = complex(v)
    if not (cmath.isfinite(z)):
        raise DomainError(f"non-finite argument {v!r}")
    return z


def _is_nonpositive_integer(c: complex, tol: float = 1e-12) -> bool:
    return abs(c.imag) <= tol and c.real <= tol and abs(c.real - round(c.real)) <= tol


def _is_integer(c: complex, tol: float = 1e-9) -> bool:
    return abs(c.imag) <= tol and abs(c.real - round(c.real)) <= tol


def _cpow(z: complex, s: complex) -> complex:
    """Principal-branch complex power with exact special cases for z == 0."""
    if z == 0:
        if s == 0:
            return 1.0 + 0.0j
        if s.real > 0:
            return 0.0 + 0.0j
        raise DomainError("0 raised to a power with non-positive real part")
    return cmath.exp(s * cmath.log(z))


def _sum_series(first_term: complex, ratio, ctl: SeriesControl, what: str) -> complex:
    """Sum t_0 + t_1 + ... with t_{k+1} = t_k * ratio(k), three-small-terms stop."""
    term = first_term
    total = term
    small = 0
    for k in range(ctl.max_terms):
        term = term * ratio(k)
        total += term
        if abs(total) > _OVERFLOW or not cmath.isfinite(total):
            raise ConvergenceError(f"{what}: series overflow")
        if abs(term) <= ctl.rel_tol * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError(f"{what}: no convergence in {ctl.max_terms} terms")


def bessel_i(a, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Modified Bessel function I(a, z), complex order and argument.

    Power series (z/2)^a * sum_k (z/2)^{2k} / (k! * Gamma(a+k+1)).  Real
    negative-integer orders reflect to I(|a|, z); other gamma poles in the
    denominators contribute zero terms via the reciprocal gamma.
    """
    a = _as_complex(a)
    z = _as_complex(z)
    if a.imag == 0.0 and a.real < 0 and a.real == round(a.real):
        a = -a  # I(-n, z) = I(n, z) for integer n
    if z == 0:
        if a == 0:
            return 1.0 + 0.0j
        if a.real > 0 or (a.imag == 0.0 and a.real == round(a.real)):
            return 0.0 + 0.0j
        raise DomainError("bessel_i: I(a, 0) diverges for Re(a) < 0 non-integer")
    half = z / 2.0
    h2 = half * half
    first = complex(_crgamma(a + 1.0))
    body = _sum_series(first, lambda k: h2 / ((k + 1.0) * (a + k + 1.0)), ctl, "bessel_i")
    return _cpow(half, a) * body


def kummer_m(a, b, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Confluent hypergeometric function 1F1(a; b; z) by its defining series."""
    a = _as_complex(a)
    b = _as_complex(b)
    z = _as_complex(z)
    if _is_nonpositive_integer(b):
        raise DomainError(f"kummer_m: b = {b} is a non-positive integer")
    return _sum_series(
        1.0 + 0.0j,
        lambda k: (a + k) / (b + k) * z / (k + 1.0),
        ctl,
        "kummer_m",
    )


def _tricomi_u_asymptotic(a: complex, b: complex, z: complex) -> complex:
    # Divergent large-z expansion z^-a * sum_k (a)_k (a-b+1)_k / k! (-z)^-k,
    # truncated at the smallest term; error is of the order of that term.
    term = 1.0 + 0.0j
    total = term
    best = abs(term)
    for k in range(60):
        term = term * (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * (-z))
        if abs(term) >= best:
            break  # optimal truncation point
        total += term
        best = abs(term)
    return _cpow(z, -a) * total


def tricomi_u(a, b, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Tricomi's confluent hypergeometric function U(a, b, z), Re(z) > 0.

    Moderate arguments use the two-term 1F1 connection formula; the gamma
    factors blow up for integer b (logarithmic case), which is declared
    degenerate so callers can fall back to the ODE oracle.  Large arguments
    use the optimally truncated large-z expansion, since the connection
    formula loses all significant digits to cancellation beyond Re z ~ 30.
    """
    a = _as_complex(a)
    b = _as_complex(b)
    z = _as_complex(z)
    if z.real <= 0.0:
        raise DomainError("tricomi_u: requires Re(z) > 0")
    if a == 0:
        return 1.0 + 0.0j
    if abs(a - b + 1.0) < 1e-12:
        return _cpow(z, -a)  # U(a, a+1, z) = z^-a exactly
    if z.real >= _U_ASYMPTOTIC_CUTOFF:
        return _tricomi_u_asymptotic(a, b, z)
    if _is_integer(b):
        raise DegenerateParameterError(f"tricomi_u: integer b = {b} (logarithmic case)")
    # U = G(1-b)/G(a-b+1) 1F1(a;b;z) + G(b-1)/G(a) z^{1-b} 1F1(a-b+1;2-b;z)
    t1 = complex(_cgamma(1.0 - b)) * complex(_crgamma(a - b + 1.0)) * kummer_m(a, b, z, ctl)
    t2 = (
        complex(_cgamma(b - 1.0))
        * complex(_crgamma(a))
        * _cpow(z, 1.0 - b)
        * kummer_m(a - b + 1.0, 2.0 - b, z, ctl)
    )
    out = t1 + t2
    if not cmath.isfinite(out):
        raise DegenerateParameterError(f"tricomi_u: non-finite connection formula at b={b}")
    return out


def whittaker_m(a, b, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Whittaker function of the first kind, standard parameterization."""
    a = _as_complex(a)
    b = _as_complex(b)
    z = _as_complex(z)
    return cmath.exp(-z / 2.0) * _cpow(z, b + 0.5) * kummer_m(b - a + 0.5, 1.0 + 2.0 * b, z, ctl)


def whittaker_w(a, b, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Whittaker function of the second kind, standard parameterization."""
    a = _as_complex(a)
    b = _as_complex(b)
    z = _as_complex(z)
    return cmath.exp(-z / 2.0) * _cpow(z, b + 0.5) * tricomi_u(b - a + 0.5, 1.0 + 2.0 * b, z, ctl)


def gauss_2f1(a, b, c, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Gauss hypergeometric 2F1(a, b; c; z) inside the unit circle.

    The defining series only converges for |z| < 1; arguments within
    ``GAUSS_2F1_MARGIN`` of the circle are rejected so callers can fall back
    to the ODE oracle rather than trust a barely-convergent tail.
    """
    a = _as_complex(a)
    b = _as_complex(b)
    c = _as_complex(c)
    z = _as_complex(z)
    if abs(z) >= 1.0 - GAUSS_2F1_MARGIN:
        raise DomainError(f"gauss_2f1: |z| = {abs(z):.6g} too close to the unit circle")
    if _is_nonpositive_integer(c):
        raise DegenerateParameterError(f"gauss_2f1: c = {c} is a non-positive integer")
    return _sum_series(
        1.0 + 0.0j,
        lambda k: (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z,
        ctl,
        "gauss_2f1",
    )
