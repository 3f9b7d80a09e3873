"""Interval error between measured and reconstructed power.

The error combines a squared deviation of the values with a squared deviation
of the forward differences, so sharp rises that are missed cost extra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError, PowerSeries


@dataclass(frozen=True)
class ObjectiveWeights:
    alpha: float = 0.9
    beta: float = 0.1

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ConfigurationError("alpha and beta must lie in [0, 1]")
        if abs(self.alpha + self.beta - 1.0) > 1e-12:
            raise ConfigurationError(f"alpha + beta must be 1, got {self.alpha + self.beta}")


def _samples(P):
    return P.samples if isinstance(P, PowerSeries) else np.asarray(P, dtype=float)


def derivative(P, t: int, granularity: int = None) -> np.ndarray:
    """Forward difference of ``P`` at row ``t``, divided by the timestep."""
    X = _samples(P)
    if granularity is None:
        granularity = P.granularity if isinstance(P, PowerSeries) else 1
    if not 0 <= t <= X.shape[0] - 2:
        raise IndexError(f"derivative undefined at t={t} for length {X.shape[0]}")
    return (X[t + 1] - X[t]) / granularity


def error_on_interval(P, P_S, a: int, b: int, w: ObjectiveWeights = ObjectiveWeights(),
                      granularity: int = None) -> float:
    X, Y = _samples(P), _samples(P_S)
    if not 0 <= a < b or b > X.shape[0] or b > Y.shape[0]:
        raise ConfigurationError(
            f"invalid interval [{a}, {b}) for lengths {X.shape[0]}, {Y.shape[0]}")
    if granularity is None:
        granularity = P.granularity if isinstance(P, PowerSeries) else 1
    return float(window_errors((Y[a:b] - X[a:b])[None], w.alpha, w.beta, granularity)[0])


def window_errors(diff: np.ndarray, alpha: float, beta: float, granularity: int = 1) -> np.ndarray:
    """Errors for a batch of differences ``P_S - P`` of shape (N, L, 6).

    The derivative term needs no access to either series separately:
    dP_S - dP is the forward difference of ``diff``.
    """
    value = np.einsum("nlf,nlf->n", diff, diff)
    d = np.diff(diff, axis=1) / granularity
    slope = np.einsum("nlf,nlf->n", d, d)
    return alpha * value + beta * slope
