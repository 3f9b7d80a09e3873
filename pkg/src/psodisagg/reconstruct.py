"""Power implied by a state-change matrix, and residual signals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    N_FEATURES,
    ConfigurationError,
    DeviceLibrary,
    PowerSeries,
    check_state_array,
)


@dataclass(frozen=True)
class ReconstructionContext:
    library: DeviceLibrary
    horizon: int
    baseline: np.ndarray = None
    granularity: int = 1

    def __post_init__(self):
        if int(self.horizon) < 1:
            raise ConfigurationError("horizon must be >= 1")
        base = np.zeros(N_FEATURES) if self.baseline is None else \
            np.array(self.baseline, dtype=float).reshape(-1)
        if base.shape != (N_FEATURES,) or not np.all(np.isfinite(base)):
            raise ConfigurationError("baseline must be 6 finite values")
        base.setflags(write=False)
        object.__setattr__(self, "baseline", base)
        object.__setattr__(self, "horizon", int(self.horizon))


def reconstruct_array(S, library: DeviceLibrary, horizon: int) -> np.ndarray:
    """Reconstructed power as a (horizon, 6) array.

    An ON-event of device ``i`` at row ``k`` adds ``profile_at(i, t - k)`` for
    every ``t >= k``. An OFF-event at row ``k`` subtracts the steady-state power
    for every ``t > k``. Rows of ``S`` past its end are treated as zero.
    """
    S = check_state_array(S, len(library))
    if S.shape[0] > horizon:
        raise ConfigurationError(
            f"state matrix has {S.shape[0]} rows, horizon is {horizon}")
    out = np.zeros((horizon, N_FEATURES))
    steps = np.zeros((len(library), horizon + 1))
    for i, profile in enumerate(library):
        col = S[:, i]
        ons = np.flatnonzero(col == 1)
        offs = np.flatnonzero(col == -1)
        for k in ons:
            n = min(profile.tau, horizon - k)
            out[k:k + n] += profile.transient[:n]
        # steady state starts tau rows after the ON, one row after the OFF
        np.add.at(steps[i], np.minimum(ons + profile.tau, horizon), 1.0)
        np.add.at(steps[i], np.minimum(offs + 1, horizon), -1.0)
    levels = np.cumsum(steps[:, :horizon], axis=1)
    out += levels.T @ library.steady_states
    return out


def reconstruct_power(S, ctx: ReconstructionContext) -> PowerSeries:
    """Reconstructed power P_S over ``ctx.horizon`` rows (baseline not added)."""
    return PowerSeries(reconstruct_array(S, ctx.library, ctx.horizon),
                       granularity=ctx.granularity)


def residual(P0: PowerSeries, P_S: PowerSeries) -> PowerSeries:
    if len(P0) != len(P_S):
        raise ConfigurationError(f"length mismatch: {len(P0)} vs {len(P_S)}")
    if P0.granularity != P_S.granularity:
        raise ConfigurationError("granularity mismatch")
    return P0.with_samples(P0.samples - P_S.samples)
