"""Acceptance suite: one test (or pair) per acceptance criterion.

Each test prints a `criterion N` line with the measured numbers, so running
``pytest tests/test_acceptance.py -v -s`` gives a one-line-per-criterion
pass/fail table.

Two sub-assertions are implemented exactly as specified and are expected to
fail, because the specified target contradicts the measurable behaviour of
the exact extinction curve itself; they are marked ``xfail(strict=True)``
so a change in behaviour cannot slip through unnoticed:

* criterion 3, distance window: at t = 1e3 the distance to the 1/9 limit is
  pinned by the criterion's own rate clause to ~ (4/3)/t = 1.33e-3, which is
  already larger than the demanded 1e-3 window.
* criterion 4, decay slope: at (alpha, p) = (0.5, 0.3) the exponent ratio
  theta1 = -2.2588 lies below -1, where the order-z0 analytic correction
  (coefficient 0.0287, decay rate lambda_b*(q-p) = 0.4) dominates the
  z0^(-theta1) term whose rate 0.9035 the criterion expects; the measured
  affine slope of log|limit - E(t)| over t in [5, 20] is ~ -0.39.
  (Verified independently with a 30-digit integrator before the build.)
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from conftest import fit_affine_slope

from stembranch import (
    ModelParams,
    NumericsError,
    estimate_extinction,
    expected_counts,
    extinction_fixed_point,
    extinction_limit,
    integrate_backward,
    invert_pgf,
    pgf_a,
    pgf_b,
)
from stembranch.oracle import DEFAULT_CAPS, _batch_states
from stembranch.validation import selftest_specfun

BRANCH_CASES = {
    "bessel-real-order": ModelParams(0.5, 0.5, 0.2, 1.0),   # mu < 1
    "bessel-imag-order": ModelParams(0.5, 0.5, 1.0, 1.0),   # mu = 4
    "whittaker-superA": ModelParams(0.25, 0.5, 1.0, 1.0),
    "whittaker-subA": ModelParams(0.75, 0.5, 1.0, 1.0),
    "hypergeom-superB": ModelParams(0.5, 0.3, 1.0, 1.0),
}

MC_CASES = [  # (params, t)
    (ModelParams(0.5, 0.5, 1.0, 1.0), 25.0),
    (ModelParams(0.25, 0.5, 1.0, 1.0), 10.0),
    (ModelParams(0.5, 0.3, 1.0, 1.0), 10.0),
]

MOMENT_REGIMES = [
    ModelParams(0.5, 0.5, 1.0, 1.0),
    ModelParams(0.25, 0.5, 1.0, 1.0),
    ModelParams(0.5, 0.3, 1.0, 1.0),
]


def test_criterion_1_closed_vs_ode_grid():
    """Closed forms agree with the RK4 oracle to 1e-6 across every branch."""
    grid = (0.0, 0.3, 0.7, 1.0)
    ts = (0.1, 1.0, 5.0, 20.0)
    start = time.perf_counter()
    worst = 0.0
    report = {}
    for name, pp in BRANCH_CASES.items():
        compared = skipped = 0
        xs = np.array(grid)[:, None] + 0j
        ys = np.array(grid)[None, :] + 0j
        for t in ts:
            fa_ode, _ = integrate_backward(xs, ys, t, pp)
            for i, x in enumerate(grid):
                for j, y in enumerate(grid):
                    try:
                        closed = pgf_a(x, y, t, pp, method="closed").value
                    except NumericsError:
                        skipped += 1
                        continue
                    compared += 1
                    worst = max(worst, abs(closed - fa_ode[i, j].real))
        report[name] = (compared, skipped)
        assert compared >= len(grid) ** 2 * len(ts) // 2, \
            f"{name}: closed form defined on too little of the grid"
    elapsed = time.perf_counter() - start
    print(f"criterion 1: max|closed-ode| = {worst:.3g} over "
          f"{ {k: v[0] for k, v in report.items()} } points "
          f"(skipped { {k: v[1] for k, v in report.items()} }), {elapsed:.1f}s")
    assert worst < 1e-6
    assert elapsed < 60.0


def test_criterion_2_sqrt_rate_bicritical():
    """(1-E(t))*sqrt(t) -> 4/sqrt(lambda_b) with monotone deviations."""
    pp = ModelParams(0.5, 0.5, 1.0, 1.0)
    start = time.perf_counter()
    target = 4.0
    devs = []
    for t in (1e2, 1e3, 1e4):
        e = pgf_a(0.0, 0.0, t, pp, method="closed").value
        devs.append(abs((1.0 - e) * math.sqrt(t) - target) / target)
    elapsed = time.perf_counter() - start
    print(f"criterion 2: deviations {[f'{d:.4f}' for d in devs]} at t=1e2,1e3,1e4, "
          f"{elapsed:.1f}s")
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.05
    assert elapsed < 30.0


def _e_exact(pp, t):
    return pgf_a(0.0, 0.0, t, pp, method="auto").value


def test_criterion_3_inverse_t_rate():
    """(1/9 - E(t)) * t matches 8 a^2/((1-a)(1-2a) lam_b) within 10% at t=1e3."""
    pp = ModelParams(0.25, 0.5, 1.0, 1.0)
    coeff = 8 * 0.25 ** 2 / (0.75 * 0.5 * 1.0)
    e = _e_exact(pp, 1e3)
    measured = (1.0 / 9.0 - e) * 1e3
    print(f"criterion 3 (rate): (1/9 - E(1e3))*1e3 = {measured:.6f}, "
          f"coefficient {coeff:.6f}, rel dev {abs(measured - coeff) / coeff:.3%}")
    assert measured == pytest.approx(coeff, rel=0.10)


@pytest.mark.xfail(
    strict=True,
    reason="distance to the limit at t=1e3 is (4/3)/t + o(1/t) ~ 1.32e-3 by the "
           "rate clause of this same criterion, so the 1e-3 window cannot hold; "
           "measured |E(1e3) - 1/9| = 1.3227e-3",
)
def test_criterion_3_limit_window():
    """|E(1e3) - 1/9| < 1e-3 as specified (unattainable; see module docstring)."""
    pp = ModelParams(0.25, 0.5, 1.0, 1.0)
    e = _e_exact(pp, 1e3)
    dist = abs(e - 1.0 / 9.0)
    print(f"criterion 3 (limit window): |E(1e3) - 1/9| = {dist:.6g}")
    assert dist < 1e-3


def test_criterion_4_limit_convergence():
    """E(20) is within 1e-5 of the eventual limit for (0.5, 0.3, 1, 1)."""
    pp = ModelParams(0.5, 0.3, 1.0, 1.0)
    limit = extinction_fixed_point(pp)
    e = _e_exact(pp, 20.0)
    dist = abs(e - limit)
    print(f"criterion 4 (limit): E(20) = {e:.9f}, limit = {limit:.9f}, "
          f"distance {dist:.3g}")
    assert limit == pytest.approx(0.009310724801742, abs=1e-12)
    assert dist < 1e-5


@pytest.mark.xfail(
    strict=True,
    reason="theta1 = -2.2588 < -1 here: the exact curve decays at rate "
           "lambda_b*(q-p) = 0.4 (dominant order-z0 term, prefactor 0.0287), "
           "not at -lambda_b*(p-q)*theta1 = 0.9035; measured affine slope over "
           "t in [5,20] is ~ -0.39",
)
def test_criterion_4_decay_slope():
    """log-distance-to-limit affine in t with slope -lam_b(p-q)theta1 (unattainable)."""
    pp = ModelParams(0.5, 0.3, 1.0, 1.0)
    limit = extinction_fixed_point(pp)
    mu = 1.0 / (0.3 - 0.7)
    theta1 = mu * math.sqrt(0.49 - 0.09) / 0.7
    target = -1.0 * (0.3 - 0.7) * theta1
    ts = np.linspace(5.0, 20.0, 7)
    logs = [math.log(abs(limit - _e_exact(pp, t))) for t in ts]
    slope = fit_affine_slope(ts, logs)
    print(f"criterion 4 (slope): fitted {slope:.5f}, specified {target:.5f}")
    assert slope == pytest.approx(target, rel=0.05)


def test_criterion_5_limit_equals_fixed_point():
    """Closed-form limits match the fixed-point oracle to 1e-10, 50 draws/regime."""
    rng = np.random.default_rng(55_2024)
    worst = 0.0
    # bi-critical: limit is 1 for any rates
    for _ in range(50):
        pp = ModelParams(0.5, 0.5, rng.uniform(0.2, 3), rng.uniform(0.2, 3))
        worst = max(worst, abs(extinction_limit(pp).limit - extinction_fixed_point(pp)))
    # critical B, non-critical A
    n = 0
    while n < 50:
        alpha = rng.uniform(0.05, 0.95)
        if abs(alpha - 0.5) < 1e-3:
            continue
        pp = ModelParams(alpha, 0.5, rng.uniform(0.2, 3), rng.uniform(0.2, 3))
        worst = max(worst, abs(extinction_limit(pp).limit - extinction_fixed_point(pp)))
        n += 1
    # super-critical B (skip the measure-zero theta1 = -1 degeneracy)
    n = 0
    while n < 50:
        pp = ModelParams(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.45),
                         rng.uniform(0.2, 3), rng.uniform(0.2, 3))
        try:
            lim = extinction_limit(pp).limit
        except NumericsError:
            continue
        worst = max(worst, abs(lim - extinction_fixed_point(pp)))
        n += 1
    # alpha -> 1 continuity of the super-critical-B formula
    cont = abs(extinction_limit(ModelParams(0.999, 0.3, 1, 1)).limit - (0.3 / 0.7) ** 4)
    print(f"criterion 5: max|limit - fixed point| = {worst:.3g}, "
          f"alpha->1 continuity gap {cont:.3g}")
    assert worst < 1e-10
    assert cont < 1e-2


def test_criterion_6_monte_carlo_concordance():
    """99% CIs from 1e5 replicates cover the exact extinction curve."""
    start = time.perf_counter()
    lines = []
    for i, (pp, t) in enumerate(MC_CASES):
        exact = _e_exact(pp, t)
        est = estimate_extinction(pp, t, 100_000, seed=6000 + i)
        gap = abs(est.value - exact)
        lines.append(f"(a={pp.alpha},p={pp.p},t={t:g}): "
                     f"mc={est.value:.5f}+/-{est.half_width_99:.5f} exact={exact:.5f}")
        assert gap <= est.half_width_99, lines[-1]
    elapsed = time.perf_counter() - start
    print(f"criterion 6: {'; '.join(lines)}, {elapsed:.1f}s")
    assert elapsed < 60.0


def test_criterion_7_moments():
    """Simulated means within 3 SE of the closed forms; PGF-derivative moments
    within 1e-4 relative."""
    details = []
    for k, pp in enumerate(MOMENT_REGIMES):
        t = 1.0
        m = expected_counts(pp, t)
        za, zb, _ = _batch_states(pp, t, 100_000, 7000 + k, DEFAULT_CAPS)
        for sample, target, name in ((za, m.e_a, "A"), (zb, m.e_b, "B")):
            se = sample.std(ddof=1) / math.sqrt(len(sample))
            pull = abs(sample.mean() - target) / se
            details.append(f"{name}@(a={pp.alpha},p={pp.p}): {pull:.2f}se")
            assert pull < 3.0, details[-1]
        # Richardson-extrapolated one-sided differences of the PGF at (1, 1)
        h = 1e-3
        f11 = pgf_a(1.0, 1.0, t, pp).value

        def richardson(fun):
            d1 = (f11 - fun(h)) / h
            d2 = (f11 - fun(h / 2)) / (h / 2)
            return 2 * d2 - d1

        ea = richardson(lambda hh: pgf_a(1.0 - hh, 1.0, t, pp).value)
        eb = richardson(lambda hh: pgf_a(1.0, 1.0 - hh, t, pp).value)
        assert ea == pytest.approx(m.e_a, rel=1e-4)
        assert eb == pytest.approx(m.e_b, rel=1e-4)
    print(f"criterion 7: simulated-mean pulls {details}; PGF-derivative moments "
          f"within 1e-4 relative on all three regimes")


def test_criterion_8_special_function_identities():
    """Recurrence, derivative, and asymptotic identity suite all green."""
    rows = selftest_specfun()
    failed = [r for r in rows if r["status"] != "PASS"]
    worst = max(r["max_rel_err"] / r["tolerance"] for r in rows)
    print(f"criterion 8: {len(rows)} identities, worst err/tol = {worst:.3g}, "
          f"failures: {[r['identity'] for r in failed]}")
    assert not failed


def test_criterion_9_branching_composition():
    """F_A(x,y,s+t) = F_A(F_A(x,y,s), F_B(y,s), t) to 1e-6, 100 random draws."""
    rng = np.random.default_rng(9_2024)
    base = list(BRANCH_CASES.values())
    worst = 0.0
    for _ in range(100):
        pick = base[rng.integers(0, len(base))]
        scale = rng.uniform(0.5, 2.0)
        pp = ModelParams(pick.alpha, pick.p, pick.lambda_a * scale,
                         pick.lambda_b * scale)
        x, y = rng.uniform(0.0, 0.95, size=2)
        s, t = rng.uniform(0.05, 2.5, size=2)
        lhs = pgf_a(x, y, s + t, pp).value
        rhs = pgf_a(pgf_a(x, y, s, pp).value, pgf_b(y, s, pp), t, pp).value
        worst = max(worst, abs(lhs - rhs))
    print(f"criterion 9: max composition defect {worst:.3g} over 100 draws")
    assert worst < 1e-6


def test_criterion_10_inversion_consistency():
    """16x16 pmf grid: mass accounting, extinction entry, and multinomial GOF."""
    pp = ModelParams(0.5, 0.5, 1.0, 1.0)
    grid = invert_pgf(pp, 1.0, 15, 15)
    mass_defect = abs(grid.probs.sum() + grid.truncation_mass - 1.0)
    e1 = pgf_a(0.0, 0.0, 1.0, pp).value
    origin_gap = abs(grid.probs[0, 0] - e1)
    n = 100_000
    za, zb, _ = _batch_states(pp, 1.0, n, 1010, DEFAULT_CAPS)
    inside = (za <= 15) & (zb <= 15)
    counts = np.zeros((16, 16))
    np.add.at(counts, (za[inside], zb[inside]), 1)
    expected = grid.probs * n
    keep = expected >= 5
    f_obs = np.append(counts[keep], n - counts[keep].sum())
    f_exp = np.append(expected[keep], n - expected[keep].sum())
    _, pvalue = stats.chisquare(f_obs, f_exp)
    print(f"criterion 10: truncation {grid.truncation_mass:.3g}, mass defect "
          f"{mass_defect:.3g}, |P(0,0) - E(1)| = {origin_gap:.3g}, GOF p = {pvalue:.3f}")
    assert grid.truncation_mass < 1e-3
    assert mass_defect < 1e-8
    assert origin_gap < 1e-6
    assert pvalue > 0.01
