"""Power-domain error measures and ON-event histograms."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import ConfigurationError, PowerSeries


@dataclass(frozen=True)
class MetricsReport:
    """Errors between measured and reconstructed total active power.

    ``mape`` skips samples where the measured power is zero; how many were
    skipped is in ``mape_skipped`` (``mape`` is NaN if all were).
    ``energy_e_signed`` is (sum measured - sum reconstructed) / sum measured,
    so a reconstruction that overestimates consumption is negative;
    ``energy_e`` is its absolute value.
    """

    rmse: float
    mae: float
    mape: float
    mape_skipped: int
    energy_e: float
    energy_e_signed: float
    rmse_over_mean_power: float
    n_samples: int

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and not np.isfinite(v) else v)
                for k, v in asdict(self).items()}


def total_active(P) -> np.ndarray:
    """Per-sample sum of the three active-power columns."""
    X = P.samples if isinstance(P, PowerSeries) else np.asarray(P, dtype=float)
    if X.ndim != 2 or X.shape[1] < 3:
        raise ConfigurationError(f"expected (T, 6) power, got {X.shape}")
    return X[:, 0] + X[:, 1] + X[:, 2]


def compute_metrics(P_meas, P_S) -> MetricsReport:
    y = np.asarray(P_meas, dtype=float).reshape(-1)
    y_hat = np.asarray(P_S, dtype=float).reshape(-1)
    if y.shape != y_hat.shape:
        raise ConfigurationError(f"length mismatch: {y.shape[0]} vs {y_hat.shape[0]}")
    if y.size < 1:
        raise ConfigurationError("metrics need at least one sample")
    err = y - y_hat
    abs_err = np.abs(err)
    rmse = float(np.sqrt(np.mean(err ** 2)))
    mae = float(np.mean(abs_err))

    nonzero = y != 0
    skipped = int(y.size - nonzero.sum())
    mape = float(np.mean(abs_err[nonzero] / np.abs(y[nonzero]))) if nonzero.any() else float("nan")

    total = float(np.sum(y))
    if total != 0:
        signed = float((total - float(np.sum(y_hat))) / total)
    else:
        signed = float("nan")
    mean_power = total / y.size
    return MetricsReport(
        rmse=rmse, mae=mae, mape=mape, mape_skipped=skipped,
        energy_e=abs(signed), energy_e_signed=signed,
        rmse_over_mean_power=rmse / mean_power if mean_power != 0 else float("nan"),
        n_samples=int(y.size))


@dataclass(frozen=True)
class OnEventHistogram:
    device_id: int
    window_minutes: int
    counts: np.ndarray
    normalized: np.ndarray
    window_starts: np.ndarray  # seconds from the start of the state matrix

    def rows(self):
        for start, c, v in zip(self.window_starts, self.counts, self.normalized):
            yield int(start), int(c), float(v)


def on_event_histogram(S, device: int, window_minutes: int = 30,
                       granularity: int = 1) -> OnEventHistogram:
    """Count ON-events of one device per time window, scaled by the busiest window.

    A trailing partial window is kept as its own bin.
    """
    S = np.asarray(S)
    if not 0 <= device < S.shape[1]:
        raise ConfigurationError(f"device {device} outside 0..{S.shape[1] - 1}")
    if window_minutes < 1:
        raise ConfigurationError("window_minutes must be positive")
    window = window_minutes * 60
    seconds = granularity * np.arange(S.shape[0])
    n_windows = max(1, -(-S.shape[0] * granularity // window))
    on_times = seconds[S[:, device] == 1]
    counts = np.bincount(on_times // window, minlength=n_windows).astype(np.int64)
    peak = counts.max()
    normalized = counts / peak if peak > 0 else np.zeros(n_windows)
    return OnEventHistogram(device, window_minutes, counts, normalized,
                            window * np.arange(n_windows))
