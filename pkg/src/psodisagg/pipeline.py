"""Whole-day disaggregation: day splitting, framing and result assembly."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .metrics import MetricsReport, compute_metrics, total_active
from .model import SECONDS_PER_DAY, DeviceLibrary, PowerSeries
from .pso import PsoConfig, frame_bounds, optimize_frame
from .reconstruct import ReconstructionContext, reconstruct_array

logger = logging.getLogger(__name__)


@dataclass
class DayResult:
    state_changes: np.ndarray
    reconstructed: PowerSeries
    baseline: np.ndarray
    per_frame_errors: List[float] = field(default_factory=list)
    frames_early_stopped: List[bool] = field(default_factory=list)
    frame_epochs: List[int] = field(default_factory=list)
    frame_length: int = 60
    measured: Optional[PowerSeries] = None
    metrics: Optional[MetricsReport] = None

    def frames(self) -> List[dict]:
        T = self.state_changes.shape[0]
        rows = []
        for f, (err, early, epochs) in enumerate(zip(
                self.per_frame_errors, self.frames_early_stopped, self.frame_epochs)):
            start, stop = frame_bounds(f, self.frame_length, T)
            rows.append({"frame": f, "start": start, "stop": stop, "error": err,
                         "early_stopped": early, "epochs": epochs})
        return rows


def split_days(P: PowerSeries) -> List[PowerSeries]:
    """Split ``P`` at midnight. Partial first/last days become shorter series."""
    n = len(P)
    seconds = P.start_time + P.granularity * np.arange(n, dtype=np.int64)
    day_index = seconds // SECONDS_PER_DAY
    cuts = np.flatnonzero(np.diff(day_index)) + 1
    out = []
    for lo, hi in zip(np.r_[0, cuts], np.r_[cuts, n]):
        lo, hi = int(lo), int(hi)
        epoch = None if P.epoch_start is None else P.epoch_start + lo * P.granularity
        out.append(PowerSeries(P.samples[lo:hi], int(seconds[lo] % SECONDS_PER_DAY),
                               P.granularity, epoch))
    return out


def always_on_component(X: np.ndarray, cfg: PsoConfig) -> np.ndarray:
    if cfg.baseline_mode == "first":
        return X[0].copy()
    return X[:cfg.baseline_window].min(axis=0)


def disaggregate_day(day: PowerSeries, library: DeviceLibrary, cfg: PsoConfig = PsoConfig(),
                     rng=None, on_frame: Optional[Callable] = None) -> DayResult:
    """Disaggregate one day frame by frame.

    Each frame is optimised against the residual left after subtracting the
    always-on component and the power of every event fixed in earlier frames,
    including transients that reach into this frame and beyond.

    ``on_frame(f, start, stop, residual, state_changes)`` is called before each
    frame is optimised, with read-only views of the day-level state.
    """
    if not isinstance(day, PowerSeries):
        day = PowerSeries(day)
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    X = day.samples
    T = len(day)
    baseline = always_on_component(X, cfg)
    ctx = ReconstructionContext(library, T, baseline, day.granularity)
    resid = X - baseline
    S = np.zeros((T, len(library)), dtype=np.int8)
    n_frames = -(-T // cfg.frame_length)
    result = DayResult(S, None, baseline, frame_length=cfg.frame_length, measured=day)
    for f in range(n_frames):
        start, stop = frame_bounds(f, cfg.frame_length, T)
        if on_frame is not None:
            on_frame(f, start, stop, _readonly(resid), _readonly(S))
        fr = optimize_frame(resid, ctx, S[:start], f, cfg, rng)
        S[start:stop] = fr.best
        if fr.best.any():
            resid[start:] -= reconstruct_array(fr.best, library, T - start)
        result.per_frame_errors.append(fr.best_error)
        result.frames_early_stopped.append(fr.early_stopped)
        result.frame_epochs.append(fr.epochs)
        logger.debug("frame %d/%d error=%.6g epochs=%d", f + 1, n_frames,
                     fr.best_error, fr.epochs)
    result.reconstructed = day.with_samples(reconstruct_array(S, library, T) + baseline)
    result.metrics = compute_metrics(total_active(day), total_active(result.reconstructed))
    return result


def _readonly(a):
    v = a.view()
    v.setflags(write=False)
    return v
