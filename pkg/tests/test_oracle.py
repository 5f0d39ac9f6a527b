import math
import warnings

import numpy as np
import pytest
from scipy import stats

from stembranch import (
    EstimateWithCI,
    ModelParams,
    SimulationCaps,
    TruncationWarning,
    estimate_extinction,
    estimate_pgf,
    expected_counts,
    integrate_backward,
    invert_pgf,
    pgf_a,
    simulate,
)

# every event changes the state by one of these
ALLOWED_DELTAS = {(1, 0), (0, 1), (-1, 2), (0, -1)}


class TestIntegrateBackward:
    def test_identity_at_t0(self):
        pp = ModelParams(0.5, 0.5, 1, 1)
        fa, fb = integrate_backward(0.37, 0.21, 0.0, pp)
        assert fa == 0.37 + 0j and fb == 0.21 + 0j

    def test_fixed_point_at_one(self):
        pp = ModelParams(0.3, 0.7, 1.2, 0.8)
        fa, fb = integrate_backward(1.0, 1.0, 4.0, pp)
        assert fa == 1.0 + 0j and fb == 1.0 + 0j

    def test_matches_closed_form(self, bicritical):
        fa, _ = integrate_backward(0.0, 0.0, 5.0, bicritical)
        closed = pgf_a(0.0, 0.0, 5.0, bicritical, method="closed").value
        assert abs(complex(fa).real - closed) < 1e-6

    def test_array_broadcasting(self, bicritical):
        xs = np.linspace(0, 1, 4)[:, None]
        ys = np.linspace(0, 1, 3)[None, :]
        fa, fb = integrate_backward(xs + 0j, ys + 0j, 1.0, bicritical)
        assert fa.shape == (4, 3) and fb.shape == (4, 3)
        for i, x in enumerate(xs.ravel()):
            for j, y in enumerate(ys.ravel()):
                sa, sb = integrate_backward(complex(x), complex(y), 1.0, bicritical)
                assert abs(fa[i, j] - sa) < 1e-12
                assert abs(fb[i, j] - sb) < 1e-12

    def test_modulus_preserved_on_polydisk(self, super_b):
        rng = np.random.default_rng(21)
        r = rng.uniform(0, 1, size=16)
        phi = rng.uniform(0, 2 * np.pi, size=16)
        x = r * np.exp(1j * phi)
        y = rng.uniform(0, 1, size=16) * np.exp(1j * rng.uniform(0, 2 * np.pi, 16))
        fa, fb = integrate_backward(x, y, 3.0, super_b)
        assert np.all(np.abs(fa) <= 1 + 1e-9)
        assert np.all(np.abs(fb) <= 1 + 1e-9)

    def test_rejects_outside_disk(self, bicritical):
        from stembranch import DomainError
        with pytest.raises(DomainError):
            integrate_backward(1.5, 0.0, 1.0, bicritical)


class TestSimulate:
    def test_zero_time(self):
        traj = simulate(ModelParams(0.5, 0.5, 1, 1), 0.0, seed=42)
        assert traj.events == [(0.0, 1, 0)]
        assert not traj.truncated

    def test_deterministic_given_seed(self, bicritical):
        a = simulate(bicritical, 8.0, seed=123)
        b = simulate(bicritical, 8.0, seed=123)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.z_a, b.z_a)
        assert np.array_equal(a.z_b, b.z_b)
        c = simulate(bicritical, 8.0, seed=124)
        assert not (np.array_equal(a.times, c.times) and np.array_equal(a.z_a, c.z_a))

    def test_event_deltas_and_time_order(self, bicritical):
        for seed in (1, 7, 2024):
            traj = simulate(bicritical, 6.0, seed=seed)
            assert np.all(np.diff(traj.times) > 0)
            deltas = set(zip(np.diff(traj.z_a).tolist(), np.diff(traj.z_b).tolist()))
            assert deltas <= ALLOWED_DELTAS
            assert np.all(traj.z_a + traj.z_b >= 0)

    def test_deterministic_absorption(self):
        # alpha=1, p=1: the A splits to BB, each B dies on first division
        traj = simulate(ModelParams(1.0, 1.0, 1.0, 1.0), 50.0, seed=5)
        assert traj.final_state() == (0, 0)
        assert traj.z_a[1] == 0 and traj.z_b[1] == 2  # first event is A -> BB

    def test_caps_set_truncated_flag(self):
        pp = ModelParams(0.2, 0.5, 3.0, 1.0)  # strongly supercritical A
        traj = simulate(pp, 30.0, seed=11, caps=SimulationCaps(max_cells=50, max_events=10**6))
        assert traj.truncated
        assert traj.z_a[-1] + traj.z_b[-1] >= 50


class TestEstimates:
    def test_extinction_zero_time(self, bicritical):
        est = estimate_extinction(bicritical, 0.0, 200, seed=1)
        assert est.value == 0.0
        assert est.replicates == 200

    def test_extinction_needs_replicates(self, bicritical):
        with pytest.raises(ValueError):
            estimate_extinction(bicritical, 1.0, 50, seed=1)

    def test_certain_absorption(self):
        est = estimate_extinction(ModelParams(1.0, 1.0, 1, 1), 10.0, 500, seed=3)
        assert est.value >= 0.99

    def test_extinction_ci_covers_exact(self, bicritical):
        exact = pgf_a(0.0, 0.0, 5.0, bicritical).value
        est = estimate_extinction(bicritical, 5.0, 20_000, seed=42)
        assert abs(est.value - exact) <= est.half_width_99

    def test_pgf_at_one_is_exact(self, bicritical):
        est = estimate_pgf(bicritical, 1.0, 1.0, 3.0, 200, seed=9)
        assert est.value == 1.0 and est.half_width_99 == 0.0

    def test_pgf_at_origin_equals_extinction(self, bicritical):
        ext = estimate_extinction(bicritical, 4.0, 2_000, seed=17)
        pgf0 = estimate_pgf(bicritical, 0.0, 0.0, 4.0, 2_000, seed=17)
        assert pgf0.value == pytest.approx(ext.value, abs=1e-12)

    def test_pgf_ci_covers_closed_form(self, bicritical):
        exact = pgf_a(0.5, 0.5, 2.0, bicritical).value
        est = estimate_pgf(bicritical, 0.5, 0.5, 2.0, 20_000, seed=8)
        assert abs(est.value - exact) <= est.half_width_99

    def test_simulated_mean_matches_moments(self, crit_b_super_a):
        from stembranch.oracle import _batch_states, DEFAULT_CAPS
        za, zb, _ = _batch_states(crit_b_super_a, 1.0, 20_000, 77, DEFAULT_CAPS)
        m = expected_counts(crit_b_super_a, 1.0)
        for sample, target in ((za, m.e_a), (zb, m.e_b)):
            se = sample.std(ddof=1) / math.sqrt(len(sample))
            assert abs(sample.mean() - target) < 3 * se

    def test_truncation_warning_and_conservatism(self):
        pp = ModelParams(0.2, 0.5, 3.0, 1.0)
        caps = SimulationCaps(max_cells=20, max_events=10**6)
        with pytest.warns(TruncationWarning):
            est = estimate_extinction(pp, 20.0, 200, seed=2, caps=caps)
        assert est.truncated_replicates > 0
        # capped replicates end with cells alive, so they count as non-extinct
        assert est.value < 1.0

    def test_order_independence(self, bicritical):
        # batch aggregation equals per-replicate single runs in any order
        from stembranch.oracle import _batch_states, DEFAULT_CAPS
        za, zb, _ = _batch_states(bicritical, 3.0, 50, 31415, DEFAULT_CAPS)
        from stembranch import _kernels
        singles = []
        for r in reversed(range(50)):
            state = np.uint64(_kernels._stream_state(np.uint64(31415), r))
            out = _kernels._endpoint(0.5, 0.5, 1.0, 1.0, 3.0, state, 10**7, 10**8)
            singles.append((r, out[0], out[1]))
        for r, a, b in singles:
            assert za[r] == a and zb[r] == b


def _simulate_nonthinned(pp: ModelParams, t_max: float, rng) -> tuple[int, int]:
    """Reference simulator that keeps B -> B no-op events at full rate lambda_b."""
    alpha, p, q = pp.alpha, pp.p, pp.q
    za, zb, t = 1, 0, 0.0
    while True:
        rate = pp.lambda_a * za + pp.lambda_b * zb
        if rate == 0.0:
            return za, zb
        t += rng.exponential(1.0 / rate)
        if t >= t_max:
            return za, zb
        if rng.uniform() * rate < pp.lambda_a * za:
            u = rng.uniform()
            if u < (1 - alpha) ** 2:
                za += 1
            elif u < (1 - alpha) ** 2 + 2 * alpha * (1 - alpha):
                zb += 1
            else:
                za -= 1
                zb += 2
        else:
            u = rng.uniform()
            if u < q * q:
                zb += 1
            elif u < q * q + 2 * p * q:
                pass  # B -> B leaves the counts unchanged
            else:
                zb -= 1


class TestThinningExactness:
    def test_distributional_equality(self):
        # p = 0.45 makes ~half of all B events no-ops, a strong thinning test
        pp = ModelParams(0.4, 0.45, 1.0, 1.0)
        n = 10_000
        t = 1.5
        from stembranch.oracle import _batch_states, DEFAULT_CAPS
        za_thin, zb_thin, _ = _batch_states(pp, t, n, 2718, DEFAULT_CAPS)
        rng = np.random.default_rng(314159)
        ref = np.array([_simulate_nonthinned(pp, t, rng) for _ in range(n)])
        for thin, full in ((za_thin, ref[:, 0]), (zb_thin, ref[:, 1])):
            top = int(max(thin.max(), full.max()))
            bins = np.arange(0, top + 2)
            c1, _ = np.histogram(thin, bins=bins)
            c2, _ = np.histogram(full, bins=bins)
            keep = (c1 + c2) >= 10  # pool sparse tail cells
            table = np.array([np.append(c1[keep], c1[~keep].sum()),
                              np.append(c2[keep], c2[~keep].sum())])
            table = table[:, table.sum(axis=0) > 0]
            _, pvalue, _, _ = stats.chi2_contingency(table)
            assert pvalue > 0.01


class TestInvertPgf:
    def test_point_mass_at_t0(self, bicritical):
        grid = invert_pgf(bicritical, 0.0, 3, 3)
        expect = np.zeros((4, 4))
        expect[1, 0] = 1.0
        np.testing.assert_allclose(grid.probs, expect, atol=1e-12)
        assert abs(grid.truncation_mass) < 1e-12

    def test_origin_matches_extinction(self, bicritical):
        grid = invert_pgf(bicritical, 1.0, 15, 15)
        exact = pgf_a(0.0, 0.0, 1.0, bicritical).value
        assert grid.probs[0, 0] == pytest.approx(exact, abs=1e-6)

    def test_mass_accounting(self, bicritical):
        grid = invert_pgf(bicritical, 1.0, 15, 15)
        assert grid.probs.sum() + grid.truncation_mass == pytest.approx(1.0, abs=1e-8)
        assert np.all(grid.probs >= 0.0)

    def test_marginal_matches_1d_inversion(self, bicritical):
        grid = invert_pgf(bicritical, 1.0, 15, 15)
        m = 32
        wx = np.exp(2j * np.pi * np.arange(m) / m)
        fa, _ = integrate_backward(wx, np.ones(m, dtype=complex), 1.0, bicritical)
        marginal_1d = np.fft.fft(fa).real / m
        np.testing.assert_allclose(grid.probs.sum(axis=1), marginal_1d[:16], atol=1e-7)

    def test_matches_simulation_frequencies(self, bicritical):
        from stembranch.oracle import _batch_states, DEFAULT_CAPS
        grid = invert_pgf(bicritical, 1.0, 15, 15)
        n = 20_000
        za, zb, _ = _batch_states(bicritical, 1.0, n, 161803, DEFAULT_CAPS)
        inside = (za <= 15) & (zb <= 15)
        counts = np.zeros((16, 16))
        np.add.at(counts, (za[inside], zb[inside]), 1)
        expected = grid.probs * n
        keep = expected >= 5
        f_obs = np.append(counts[keep], n - counts[keep].sum())
        f_exp = np.append(expected[keep], n - expected[keep].sum())
        _, pvalue = stats.chisquare(f_obs, f_exp)
        assert pvalue > 0.01
