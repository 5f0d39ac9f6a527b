"""Independent verification engines.

Three ways to get at the same distributions without the closed forms:

* :func:`integrate_backward` -- classical RK4 on the backward equations
  dF_A/dt = -lambda_a F_A + lambda_a h_A(F_A, F_B),
  dF_B/dt = -lambda_b F_B + lambda_b h_B(F_B), valid for complex initial
  values on the closed unit polydisk (one Richardson halving check per run,
  refinement only on failure);
* :func:`simulate` / :func:`estimate_extinction` / :func:`estimate_pgf` --
  exact event-by-event realizations of the Markov chain (see _kernels for
  the RNG and thinning contract);
* :func:`invert_pgf` -- joint probability mass on a finite grid by evaluating
  F_A at roots of unity with the integrator and applying a 2-D FFT
  (P(j,k) = (1/MN) sum_{a,b} F_A(w_M^a, w_N^b, t) w_M^{-aj} w_N^{-bk}).
  The integrator, not the closed forms, feeds the inversion: closed-form
  branch choices off the real interval are unvalidated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, InternalConsistencyError, StepUnderflowError, TruncationWarning
from .model import ModelParams

__all__ = [
    "StepControl",
    "SimulationCaps",
    "Trajectory",
    "EstimateWithCI",
    "PmfGrid",
    "integrate_backward",
    "simulate",
    "estimate_extinction",
    "estimate_pgf",
    "invert_pgf",
    "Z_99",
]

# two-sided 99% normal quantile (norm.ppf(0.995))
Z_99 = 2.5758293035489004

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class StepControl:
    h_max: float = 1e-3
    error_per_unit_time: float = 1e-9
    min_step: float = 1e-12


DEFAULT_STEPS = StepControl()


@dataclass(frozen=True)
class SimulationCaps:
    max_cells: int = 10_000_000
    max_events: int = 100_000_000


DEFAULT_CAPS = SimulationCaps()


@dataclass(frozen=True)
class Trajectory:
    """One realization: event-stamped (Z_A, Z_B) path, initial state included."""

    times: np.ndarray
    z_a: np.ndarray
    z_b: np.ndarray
    seed: int
    truncated: bool

    @property
    def events(self):
        return list(zip(self.times.tolist(), self.z_a.tolist(), self.z_b.tolist()))

    def final_state(self) -> tuple[int, int]:
        return int(self.z_a[-1]), int(self.z_b[-1])


@dataclass(frozen=True)
class EstimateWithCI:
    value: float
    half_width_99: float
    replicates: int
    truncated_replicates: int = 0


@dataclass(frozen=True)
class PmfGrid:
    """Joint P(Z_A=j, Z_B=k) on [0..j_max] x [0..k_max] plus unassigned mass."""

    probs: np.ndarray
    t: float
    truncation_mass: float


def _rk4_run(x, y, t: float, params: ModelParams, n_steps: int):
    # Works unchanged for python complex scalars and numpy complex arrays.
    lam_a, lam_b = params.lambda_a, params.lambda_b
    alpha, p, q = params.alpha, params.p, params.q
    one_m_a = 1.0 - alpha
    h = t / n_steps
    fa, fb = x, y

    def rhs(fa, fb):
        ha = (one_m_a * fa + alpha * fb)
        ha = ha * ha
        hb = (p + q * fb)
        hb = hb * hb
        return lam_a * (ha - fa), lam_b * (hb - fb)

    for _ in range(n_steps):
        k1a, k1b = rhs(fa, fb)
        k2a, k2b = rhs(fa + 0.5 * h * k1a, fb + 0.5 * h * k1b)
        k3a, k3b = rhs(fa + 0.5 * h * k2a, fb + 0.5 * h * k2b)
        k4a, k4b = rhs(fa + h * k3a, fb + h * k3b)
        fa = fa + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        fb = fb + (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return fa, fb


def integrate_backward(x, y, t: float, params: ModelParams,
                       control: StepControl = DEFAULT_STEPS):
    """Numerical (F_A, F_B) at time t from PGF arguments (x, y).

    Accepts scalars or broadcastable numpy arrays of complex initial values
    with modulus <= 1.  Fixed-step RK4 at h = min(h_max, t/100), verified by
    one Richardson halving; the step is refined (x4) only if the check
    fails, down to ``min_step``.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    scalar = np.isscalar(x) and np.isscalar(y)
    if scalar:
        xv, yv = complex(x), complex(y)
        if abs(xv) > 1.0 + 1e-9 or abs(yv) > 1.0 + 1e-9:
            raise DomainError("integrate_backward: |x|, |y| must be <= 1")
        if t == 0:
            return xv, yv
    else:
        xv = np.asarray(x, dtype=np.complex128)
        yv = np.asarray(y, dtype=np.complex128)
        xv, yv = np.broadcast_arrays(xv, yv)
        if np.any(np.abs(xv) > 1.0 + 1e-9) or np.any(np.abs(yv) > 1.0 + 1e-9):
            raise DomainError("integrate_backward: |x|, |y| must be <= 1")
        if t == 0:
            return xv.copy(), yv.copy()

    h = min(control.h_max, t / 100.0)
    tol = control.error_per_unit_time * max(t, 1.0)
    while True:
        n = max(1, int(math.ceil(t / h)))
        fa1, fb1 = _rk4_run(xv, yv, t, params, n)
        fa2, fb2 = _rk4_run(xv, yv, t, params, 2 * n)
        err = float(np.max(np.abs(np.asarray(fa1) - np.asarray(fa2))))
        err = max(err, float(np.max(np.abs(np.asarray(fb1) - np.asarray(fb2)))))
        if err <= tol:
            return fa2, fb2
        h /= 4.0
        if h < control.min_step:
            raise StepUnderflowError(
                f"integrate_backward: step {h:.3g} below floor with error {err:.3g}")


def _norm_seed(seed: int) -> np.uint64:
    return np.uint64(int(seed) & _SEED_MASK)


def simulate(params: ModelParams, t_max: float, seed: int,
             caps: SimulationCaps = DEFAULT_CAPS) -> Trajectory:
    """One exact realization up to t_max (replicate stream 0 of ``seed``)."""
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    if caps.max_cells <= 0 or caps.max_events <= 0:
        raise ValueError("caps must be positive")
    capacity = 4096
    while True:
        times = np.empty(capacity, dtype=np.float64)
        zas = np.empty(capacity, dtype=np.int64)
        zbs = np.empty(capacity, dtype=np.int64)
        n, truncated, overflow = _kernels._trajectory(
            params.alpha, params.p, params.lambda_a, params.lambda_b,
            float(t_max), _norm_seed(seed), 0, caps.max_cells, caps.max_events,
            times, zas, zbs)
        if not overflow:
            break
        capacity = min(2 * capacity, caps.max_events + 1)
    full_t = np.concatenate(([0.0], times[:n]))
    full_a = np.concatenate(([1], zas[:n]))
    full_b = np.concatenate(([0], zbs[:n]))
    return Trajectory(times=full_t, z_a=full_a, z_b=full_b,
                      seed=int(seed), truncated=bool(truncated))


def _batch_states(params: ModelParams, t: float, replicates: int, seed: int,
                  caps: SimulationCaps):
    za = np.empty(replicates, dtype=np.int64)
    zb = np.empty(replicates, dtype=np.int64)
    trunc = np.zeros(replicates, dtype=np.bool_)
    _kernels._batch_endpoint(
        params.alpha, params.p, params.lambda_a, params.lambda_b, float(t),
        _norm_seed(seed), replicates, caps.max_cells, caps.max_events,
        za, zb, trunc)
    n_trunc = int(trunc.sum())
    if n_trunc:
        warnings.warn(
            f"{n_trunc} of {replicates} replicates hit the simulation caps "
            "and are counted as non-extinct", TruncationWarning, stacklevel=3)
    return za, zb, n_trunc


def estimate_extinction(params: ModelParams, t: float, replicates: int, seed: int,
                        caps: SimulationCaps = DEFAULT_CAPS) -> EstimateWithCI:
    """Monte Carlo extinction probability by time t with a 99% normal CI."""
    if replicates < 100:
        raise ValueError("estimate_extinction needs at least 100 replicates")
    za, zb, n_trunc = _batch_states(params, t, replicates, seed, caps)
    # capped replicates carry za+zb > 0 and therefore count as non-extinct
    p_hat = float(np.mean((za == 0) & (zb == 0)))
    half = Z_99 * math.sqrt(p_hat * (1.0 - p_hat) / replicates)
    return EstimateWithCI(value=p_hat, half_width_99=half,
                          replicates=replicates, truncated_replicates=n_trunc)


def estimate_pgf(params: ModelParams, x: float, y: float, t: float,
                 replicates: int, seed: int,
                 caps: SimulationCaps = DEFAULT_CAPS) -> EstimateWithCI:
    """Monte Carlo estimate of F_A(x, y, t) = E[x^Z_A y^Z_B], x, y in [0, 1]."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError("estimate_pgf: x, y must be real in [0, 1]")
    if replicates < 100:
        raise ValueError("estimate_pgf needs at least 100 replicates")
    za, zb, n_trunc = _batch_states(params, t, replicates, seed, caps)
    with np.errstate(over="ignore", under="ignore"):
        vals = np.power(float(x), za.astype(np.float64)) * \
            np.power(float(y), zb.astype(np.float64))
    mean = float(vals.mean())
    sd = float(vals.std(ddof=1)) if replicates > 1 else 0.0
    half = Z_99 * sd / math.sqrt(replicates)
    return EstimateWithCI(value=mean, half_width_99=half,
                          replicates=replicates, truncated_replicates=n_trunc)


def _next_pow2(n: int) -> int:
    m = 1
    while m < n:
        m *= 2
    return m


def invert_pgf(params: ModelParams, t: float, j_max: int, k_max: int,
               control: StepControl = DEFAULT_STEPS) -> PmfGrid:
    """Joint pmf on [0..j_max] x [0..k_max] by lattice inversion of F_A.

    F_A is evaluated at M x N roots of unity (M, N the next powers of two
    >= 2*(max+1)) with the backward integrator, then inverted with a 2-D
    FFT.  Entries carry aliasing error bounded by the tail mass beyond the
    (M, N) window; that tail is reported inside ``truncation_mass``.
    """
    if j_max < 0 or k_max < 0:
        raise ValueError("j_max, k_max must be >= 0")
    m = _next_pow2(2 * (j_max + 1))
    n = _next_pow2(2 * (k_max + 1))
    wx = np.exp(2j * np.pi * np.arange(m) / m)
    wy = np.exp(2j * np.pi * np.arange(n) / n)
    fa, _ = integrate_backward(wx[:, None], wy[None, :], t, params, control)
    pm = np.fft.fft2(fa).real / (m * n)
    window = pm[: j_max + 1, : k_max + 1]
    if window.min() < -1e-9:
        raise InternalConsistencyError(
            f"invert_pgf: pmf entry {window.min():.3g} below numerical floor")
    truncation = 1.0 - float(window.sum())
    return PmfGrid(probs=np.clip(window, 0.0, None), t=float(t),
                   truncation_mass=truncation)
