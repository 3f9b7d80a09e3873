"""Slow, loop-based reference implementations used only by the tests.

They follow the defining sums term by term and share no code with the
package beyond the profile data structures.
"""

import numpy as np


def profile_value(transient, steady, tau, lag):
    if lag < 0:
        return np.zeros(6)
    if lag < tau:
        return np.asarray(transient[lag], dtype=float)
    return np.asarray(steady, dtype=float)


def naive_reconstruction(S, profiles, horizon):
    """profiles: list of (transient, steady, tau). One event at a time."""
    S = np.asarray(S)
    out = np.zeros((horizon, 6))
    for t_ev in range(S.shape[0]):
        for i in range(S.shape[1]):
            s = S[t_ev, i]
            if s == 0:
                continue
            transient, steady, tau = profiles[i]
            for t in range(horizon):
                if s == 1:
                    out[t] += profile_value(transient, steady, tau, t - t_ev)
                elif t > t_ev:
                    out[t] -= np.asarray(steady, dtype=float)
    return out


def naive_interval_error(P, P_S, a, b, alpha, beta, dt=1.0):
    P, P_S = np.asarray(P, dtype=float), np.asarray(P_S, dtype=float)
    value = 0.0
    for t in range(a, b):
        for d in range(P.shape[1]):
            value += (P_S[t, d] - P[t, d]) ** 2
    slope = 0.0
    for t in range(a, b - 1):
        for d in range(P.shape[1]):
            dps = (P_S[t + 1, d] - P_S[t, d]) / dt
            dp = (P[t + 1, d] - P[t, d]) / dt
            slope += (dps - dp) ** 2
    return alpha * value + beta * slope


def brute_force_single_event(target, lag_table, steady):
    """Best error over all single-event placements in a 1-device frame.

    Returns (best_error, best_row, best_sign, zero_error) for alpha=0.9, beta=0.1.
    """
    L = target.shape[0]
    zero = naive_interval_error(target, np.zeros_like(target), 0, L, 0.9, 0.1)
    best = (zero, None, 0)
    for k in range(L):
        for sign in (1, -1):
            rec = np.zeros_like(target)
            for t in range(k, L):
                if sign == 1:
                    rec[t] = lag_table[t - k]
                elif t > k:
                    rec[t] = -steady
            err = naive_interval_error(target, rec, 0, L, 0.9, 0.1)
            if err < best[0]:
                best = (err, k, sign)
    return best + (zero,)
