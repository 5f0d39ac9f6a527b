"""numba kernels for the exact event-by-event simulation.

RNG: each replicate r gets an independent splitmix64 stream whose initial
state is mix64(seed XOR mix64(r + 1)); the stream advances by the golden
ratio increment and emits uniforms as (u64 >> 11) * 2^-53.  This is stable
across runs and platforms, and replicates can be generated in any order.

B -> B events change nothing a count-level observer can see, so they are
thinned out exactly: B-cells generate events at rate lambda_b*(p^2 + q^2)
with outcomes BB (prob q^2/(p^2+q^2)) and death (prob p^2/(p^2+q^2)).
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_TO_UNIT = 1.1102230246251565e-16  # 2^-53


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True)
def _stream_state(seed, replicate):
    return _mix64(seed ^ _mix64(U64(replicate) + U64(1)))


@njit(cache=True)
def _uniform(state):
    state = state + _GOLDEN
    return state, float(_mix64(state) >> U64(11)) * _TO_UNIT


@njit(cache=True)
def _endpoint(alpha, p, lam_a, lam_b, t_max, state, max_cells, max_events):
    """One replicate to time t_max; returns (z_a, z_b, truncated, events)."""
    q = 1.0 - p
    p_aa = (1.0 - alpha) * (1.0 - alpha)
    p_aa_ab = p_aa + 2.0 * alpha * (1.0 - alpha)
    b_rate = lam_b * (p * p + q * q)
    p_bb = q * q / (p * p + q * q)
    za = 1
    zb = 0
    t = 0.0
    events = 0
    truncated = False
    while True:
        rate_a = lam_a * za
        rate = rate_a + b_rate * zb
        if rate == 0.0:
            break  # absorbed at (0, 0)
        state, u = _uniform(state)
        dt = -np.log(1.0 - u) / rate
        if t + dt >= t_max:
            break
        t += dt
        state, u_kind = _uniform(state)
        state, u_out = _uniform(state)
        if u_kind * rate < rate_a:
            if u_out < p_aa:
                za += 1
            elif u_out < p_aa_ab:
                zb += 1
            else:
                za -= 1
                zb += 2
        else:
            if u_out < p_bb:
                zb += 1
            else:
                zb -= 1
        events += 1
        if za + zb > max_cells or events >= max_events:
            truncated = True
            break
    return za, zb, truncated, events


@njit(cache=True)
def _batch_endpoint(alpha, p, lam_a, lam_b, t_max, seed, n_reps,
                    max_cells, max_events, za_out, zb_out, trunc_out):
    for r in range(n_reps):
        state = _stream_state(seed, r)
        za, zb, truncated, _ = _endpoint(
            alpha, p, lam_a, lam_b, t_max, state, max_cells, max_events)
        za_out[r] = za
        zb_out[r] = zb
        trunc_out[r] = truncated


@njit(cache=True)
def _trajectory(alpha, p, lam_a, lam_b, t_max, seed, replicate, max_cells,
                max_events, times, zas, zbs):
    """Like _endpoint but records every event; returns (n, truncated, overflow)."""
    state = _stream_state(seed, replicate)
    q = 1.0 - p
    p_aa = (1.0 - alpha) * (1.0 - alpha)
    p_aa_ab = p_aa + 2.0 * alpha * (1.0 - alpha)
    b_rate = lam_b * (p * p + q * q)
    p_bb = q * q / (p * p + q * q)
    capacity = times.shape[0]
    za = 1
    zb = 0
    t = 0.0
    n = 0
    events = 0
    truncated = False
    while True:
        rate_a = lam_a * za
        rate = rate_a + b_rate * zb
        if rate == 0.0:
            break
        state, u = _uniform(state)
        dt = -np.log(1.0 - u) / rate
        if t + dt >= t_max:
            break
        t += dt
        state, u_kind = _uniform(state)
        state, u_out = _uniform(state)
        if u_kind * rate < rate_a:
            if u_out < p_aa:
                za += 1
            elif u_out < p_aa_ab:
                zb += 1
            else:
                za -= 1
                zb += 2
        else:
            if u_out < p_bb:
                zb += 1
            else:
                zb -= 1
        events += 1
        if n >= capacity:
            return n, truncated, True  # caller regrows the buffers and reruns
        times[n] = t
        zas[n] = za
        zbs[n] = zb
        n += 1
        if za + zb > max_cells or events >= max_events:
            truncated = True
            break
    return n, truncated, False
