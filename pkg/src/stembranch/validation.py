"""Cross-validation harness and special-function selftest.

``cross_validate`` pits the closed-form generating functions against the
backward-equation integrator (and, on the full suite, against Monte Carlo
confidence intervals and the fixed-point extinction oracle) and returns a
structured report.  A case Fails iff |closed - ode| > 1e-6 or the MC
interval excludes the ode value; it is Skipped where the closed form is
undefined in that regime (singular transform, series domain, degeneracy).

``selftest_specfun`` exercises the special-function identities (recurrence,
derivative formulas against central finite differences, large-argument
behaviour, conjugate symmetry) and reports one row per identity.
"""

from __future__ import annotations

import cmath
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .errors import NumericsError
from .model import ModelParams
from .pgf import pgf_a
from .asymptotics import extinction_fixed_point, extinction_limit
from .specfun import bessel_i, gauss_2f1, kummer_m, tricomi_u, whittaker_m, whittaker_w

__all__ = ["ValidationCase", "ValidationReport", "cross_validate", "selftest_specfun"]

AGREEMENT_TOL = 1e-6

# one parameter set per closed-form family, plus variants that flip the
# constants real/imaginary
REGIMES = {
    "bicritical": ModelParams(0.5, 0.5, 1.0, 1.0),
    "bicritical-small-mu": ModelParams(0.5, 0.5, 0.2, 1.0),
    "critB-superA": ModelParams(0.25, 0.5, 1.0, 1.0),
    "critB-subA": ModelParams(0.75, 0.5, 1.0, 1.0),
    "superB": ModelParams(0.5, 0.3, 1.0, 1.0),
}

QUICK_REGIMES = ("bicritical", "critB-superA", "superB")
QUICK_POINTS = ((0.0, 0.0, 1.0), (0.3, 0.7, 0.5), (0.7, 0.3, 2.0), (1.0, 0.3, 3.0))

FULL_GRID_XY = (0.0, 0.3, 0.7, 1.0)
FULL_GRID_T = (0.1, 1.0, 5.0, 20.0)

MC_CASES = (  # (regime, t, x, y)
    ("bicritical", 5.0, 0.0, 0.0),
    ("critB-superA", 3.0, 0.5, 0.5),
    ("superB", 3.0, 0.0, 0.0),
)


@dataclass(frozen=True)
class ValidationCase:
    label: str
    params: ModelParams
    t: float
    x: float
    y: float
    closed_value: float | None
    ode_value: float
    mc_value: float | None
    mc_half_width: float | None
    abs_discrepancy: float | None
    status: str  # Pass | Fail | Skipped

    def row(self) -> dict:
        return {
            "label": self.label,
            "alpha": self.params.alpha,
            "p": self.params.p,
            "lambda_a": self.params.lambda_a,
            "lambda_b": self.params.lambda_b,
            "t": self.t,
            "x": self.x,
            "y": self.y,
            "closed": self.closed_value,
            "ode": self.ode_value,
            "mc": self.mc_value,
            "mc_half_width_99": self.mc_half_width,
            "abs_discrepancy": self.abs_discrepancy,
            "status": self.status,
        }


@dataclass(frozen=True)
class ValidationReport:
    cases: list[ValidationCase]
    summary: dict[str, int]
    runtime_s: float

    @property
    def failed(self) -> bool:
        return self.summary.get("Fail", 0) > 0

    def to_json(self) -> str:
        return json.dumps(
            {"cases": [c.row() for c in self.cases],
             "summary": self.summary,
             "runtime_s": self.runtime_s},
            indent=2,
        )


def _compare_case(label: str, params: ModelParams, x: float, y: float, t: float,
                  mc_replicates: int = 0, seed: int = 0) -> ValidationCase:
    ode_value = pgf_a(x, y, t, params, method="ode").value
    closed_value = None
    disc = None
    try:
        closed_value = pgf_a(x, y, t, params, method="closed").value
        disc = abs(closed_value - ode_value)
        status = "Pass" if disc <= AGREEMENT_TOL else "Fail"
    except NumericsError:
        status = "Skipped"
    mc_value = mc_half = None
    if mc_replicates:
        est = oracle.estimate_pgf(params, x, y, t, mc_replicates, seed)
        mc_value, mc_half = est.value, est.half_width_99
        if status != "Fail" and abs(mc_value - ode_value) > mc_half:
            status = "Fail"
    return ValidationCase(label, params, t, x, y, closed_value, ode_value,
                          mc_value, mc_half, disc, status)


def _limit_case(label: str, params: ModelParams) -> ValidationCase:
    fp = extinction_fixed_point(params)
    try:
        lim = extinction_limit(params).limit
        disc = abs(lim - fp)
        status = "Pass" if disc <= 1e-10 else "Fail"
    except NumericsError:
        lim, disc, status = None, None, "Skipped"
    return ValidationCase(label, params, math.inf, 0.0, 0.0, lim, fp,
                          None, None, disc, status)


def cross_validate(suite: str = "quick", seed: int = 20240601) -> ValidationReport:
    """Run the closed-vs-oracle agreement suite ("quick" or "full")."""
    if suite not in ("quick", "full"):
        raise ValueError(f"suite must be 'quick' or 'full', got {suite!r}")
    start = time.perf_counter()
    cases: list[ValidationCase] = []
    if suite == "quick":
        for name in QUICK_REGIMES:
            params = REGIMES[name]
            for x, y, t in QUICK_POINTS:
                cases.append(_compare_case(f"pgf/{name}", params, x, y, t))
            cases.append(_limit_case(f"extinction-limit/{name}", params))
    else:
        for name, params in REGIMES.items():
            for x in FULL_GRID_XY:
                for y in FULL_GRID_XY:
                    for t in FULL_GRID_T:
                        cases.append(_compare_case(f"pgf/{name}", params, x, y, t))
            cases.append(_limit_case(f"extinction-limit/{name}", params))
        for i, (name, t, x, y) in enumerate(MC_CASES):
            cases.append(_compare_case(f"mc/{name}", REGIMES[name], x, y, t,
                                       mc_replicates=20_000, seed=seed + i))
    summary: dict[str, int] = {"Pass": 0, "Fail": 0, "Skipped": 0}
    for c in cases:
        summary[c.status] += 1
    return ValidationReport(cases=cases, summary=summary,
                            runtime_s=time.perf_counter() - start)


# --- special-function identity table -------------------------------------

def _fd(fun, z: complex, step: float = 1e-5) -> complex:
    return (fun(z + step) - fun(z - step)) / (2.0 * step)


def _rel(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


def selftest_specfun() -> list[dict]:
    """Identity table: one row per check with the worst relative error seen."""
    rng = np.random.default_rng(1234)
    rows: list[dict] = []

    def add(function: str, identity: str, err: float, tol: float):
        rows.append({
            "function": function,
            "identity": identity,
            "max_rel_err": err,
            "tolerance": tol,
            "status": "PASS" if err <= tol else "FAIL",
        })

    # recurrence I(a-1,z) - I(a+1,z) = (2a/z) I(a,z), random complex orders
    worst = 0.0
    for _ in range(40):
        kind = rng.integers(0, 3)
        if kind == 0:
            a = complex(rng.uniform(-5, 5), 0.0)
        elif kind == 1:
            a = complex(0.0, rng.uniform(-5, 5))
        else:
            a = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        z = complex(rng.uniform(0.1, 20.0), 0.0)
        lhs = bessel_i(a - 1, z) - bessel_i(a + 1, z)
        rhs = (2.0 * a / z) * bessel_i(a, z)
        worst = max(worst, _rel(lhs, rhs))
    add("bessel_i", "recurrence", worst, 1e-10)

    # derivative (I(a-1,z)+I(a+1,z))/2 vs central difference
    worst = 0.0
    for a, z in ((0.3, 1.7), (1.5, 5.0), (0.5 + 0.5j, 2.0), (-0.4, 3.0)):
        formula = 0.5 * (bessel_i(a - 1, z) + bessel_i(a + 1, z))
        worst = max(worst, _rel(formula, _fd(lambda zz: bessel_i(a, zz), z)))
    add("bessel_i", "derivative", worst, 1e-6)

    # large-argument behaviour I(a,z) ~ e^z / sqrt(2 pi z)
    for z, tol in ((50.0, 0.10), (100.0, 0.05), (200.0, 0.025)):
        val = bessel_i(0.3, z) * math.sqrt(2.0 * math.pi * z) * math.exp(-z)
        add("bessel_i", f"asymptotic@z={z:g}", abs(val - 1.0), tol)

    add("kummer_m", "1F1(1,1,1)=e", _rel(kummer_m(1, 1, 1), cmath.exp(1)), 1e-12)
    asym = math.gamma(3.0) / math.gamma(2.0) * math.exp(50.0) / 50.0
    add("kummer_m", "asymptotic@z=50", abs(kummer_m(2, 3, 50).real / asym - 1.0), 0.05)

    add("tricomi_u", "U(1,2,1)=1/z", _rel(tricomi_u(1, 2, 1), 1.0), 1e-10)
    for z, tol in ((50.0, 0.02), (100.0, 0.02), (200.0, 0.02)):
        val = tricomi_u(0.5, 1.5, z) * math.sqrt(z)
        add("tricomi_u", f"asymptotic@z={z:g}", abs(val - 1.0), tol)

    # Whittaker derivative identities
    a, b, z = 0.3, 0.7, 0.5
    m_formula = (0.5 - a / z) * whittaker_m(a, b, z) \
        + (0.5 + a + b) / z * whittaker_m(a + 1, b, z)
    add("whittaker_m", "derivative", _rel(m_formula, _fd(lambda zz: whittaker_m(a, b, zz), z)), 1e-6)
    w_formula = (0.5 - a / z) * whittaker_w(a, b, z) - whittaker_w(a + 1, b, z) / z
    add("whittaker_w", "derivative", _rel(w_formula, _fd(lambda zz: whittaker_w(a, b, zz), z)), 1e-6)

    add("gauss_2f1", "2F1(1,1,2,z)=-log(1-z)/z",
        _rel(gauss_2f1(1, 1, 2, 0.5), 2.0 * math.log(2.0)), 1e-12)
    a, b, c, z = 0.5, 0.5, 1.5, 0.25
    g_formula = (a * b / c) * gauss_2f1(a + 1, b + 1, c + 1, z)
    add("gauss_2f1", "derivative", _rel(g_formula, _fd(lambda zz: gauss_2f1(a, b, c, zz), z)), 1e-6)

    # conjugate symmetry f(conj(parms), real z) = conj(f(parms, real z))
    worst = 0.0
    for _ in range(20):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = complex(rng.uniform(0.5, 3), rng.uniform(-2, 2))
        z = rng.uniform(0.1, 10.0)
        worst = max(worst, _rel(bessel_i(a.conjugate(), z), bessel_i(a, z).conjugate()))
        worst = max(worst, _rel(kummer_m(a.conjugate(), b.conjugate(), z),
                                kummer_m(a, b, z).conjugate()))
        zz = rng.uniform(0.05, 0.9)
        worst = max(worst, _rel(gauss_2f1(a.conjugate(), b.conjugate(), (b + 1).conjugate(), zz),
                                gauss_2f1(a, b, b + 1, zz).conjugate()))
    add("all", "conjugate-symmetry", worst, 1e-10)
    return rows
