"""Domain types shared across the disaggregation pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

N_FEATURES = 6
SECONDS_PER_DAY = 86400


class ConfigurationError(ValueError):
    """Raised on dimension mismatches and invalid parameters."""


class DataError(ValueError):
    """Raised when input data violates its documented format."""


def check_power_array(X, name="X") -> np.ndarray:
    """Return ``X`` as a finite float array of shape (T, 6).

    A 1-D input of length 6 is promoted to a single row.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1 and arr.shape[0] == N_FEATURES:
        arr = arr.reshape(1, N_FEATURES)
    if arr.ndim != 2 or arr.shape[1] != N_FEATURES:
        raise ConfigurationError(
            f"{name} must have shape (T, {N_FEATURES}), got {arr.shape}")
    if arr.shape[0] < 1:
        raise ConfigurationError(f"{name} must have at least one row")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains NaN or infinite values")
    return arr


def check_state_array(S, n_devices: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(S)
    if arr.ndim != 2:
        raise ConfigurationError(f"state matrix must be 2-D, got {arr.shape}")
    if n_devices is not None and arr.shape[1] != n_devices:
        raise ConfigurationError(
            f"state matrix has {arr.shape[1]} columns, library has {n_devices} devices")
    if not np.all(np.isin(arr, (-1, 0, 1))):
        raise ConfigurationError("state matrix entries must be in {-1, 0, +1}")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class PowerSeries:
    """Dense T x 6 power signal (P0..P2 active in W, P3..P5 reactive in var).

    ``start_time`` is the offset of row 0 in seconds since midnight. When the
    series came from a file with absolute timestamps, ``epoch_start`` holds the
    absolute time of row 0 so it can be written back unchanged.
    """

    samples: np.ndarray
    start_time: int = 0
    granularity: int = 1
    epoch_start: Optional[int] = None

    def __post_init__(self):
        arr = check_power_array(self.samples, "samples").copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if int(self.granularity) < 1:
            raise ConfigurationError("granularity must be a positive integer")
        object.__setattr__(self, "granularity", int(self.granularity))
        object.__setattr__(self, "start_time", int(self.start_time))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def timestamps(self) -> np.ndarray:
        origin = self.start_time if self.epoch_start is None else self.epoch_start
        return origin + self.granularity * np.arange(len(self), dtype=np.int64)

    def with_samples(self, samples) -> "PowerSeries":
        """Same time axis, new payload."""
        return PowerSeries(samples, self.start_time, self.granularity, self.epoch_start)


@dataclass(frozen=True)
class DeviceProfile:
    """Power trace of one device type: ``tau`` transient rows, then ``steady_state``."""

    id: int
    transient: np.ndarray
    steady_state: np.ndarray
    tau: int

    def __post_init__(self):
        tau = int(self.tau)
        if tau < 0:
            raise ConfigurationError("tau must be nonnegative")
        transient = np.array(self.transient, dtype=float).reshape(-1, N_FEATURES)
        if transient.shape[0] != tau:
            raise ConfigurationError(
                f"device {self.id}: transient has {transient.shape[0]} rows, tau is {tau}")
        steady = np.array(self.steady_state, dtype=float).reshape(-1)
        if steady.shape != (N_FEATURES,):
            raise ConfigurationError(f"device {self.id}: steady_state needs {N_FEATURES} values")
        if not (np.all(np.isfinite(transient)) and np.all(np.isfinite(steady))):
            raise ConfigurationError(f"device {self.id}: non-finite profile values")
        transient.setflags(write=False)
        steady.setflags(write=False)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "transient", transient)
        object.__setattr__(self, "steady_state", steady)

    def lag_table(self, length: int) -> np.ndarray:
        """Rows ``profile_at(self, k)`` for k = 0 .. length-1."""
        table = np.empty((length, N_FEATURES))
        n = min(self.tau, length)
        table[:n] = self.transient[:n]
        table[n:] = self.steady_state
        return table


def profile_at(profile: DeviceProfile, t: int) -> np.ndarray:
    """Power of ``profile`` ``t`` samples after switch-on (zero before it)."""
    if t < 0:
        return np.zeros(N_FEATURES)
    if t < profile.tau:
        return profile.transient[t].copy()
    return profile.steady_state.copy()


@dataclass(frozen=True)
class DeviceLibrary:
    profiles: tuple

    def __post_init__(self):
        profiles = tuple(self.profiles)
        if not profiles:
            raise ConfigurationError("device library must contain at least one profile")
        for i, p in enumerate(profiles):
            if p.id != i:
                raise ConfigurationError(f"profile at position {i} has id {p.id}")
        object.__setattr__(self, "profiles", profiles)

    @classmethod
    def from_arrays(cls, transients: Sequence, steady_states: Sequence) -> "DeviceLibrary":
        profiles = []
        for i, (tr, ss) in enumerate(zip(transients, steady_states)):
            tr = np.asarray(tr, dtype=float).reshape(-1, N_FEATURES)
            profiles.append(DeviceProfile(i, tr, ss, tr.shape[0]))
        return cls(tuple(profiles))

    def __len__(self):
        return len(self.profiles)

    def __getitem__(self, i):
        return self.profiles[i]

    def __iter__(self):
        return iter(self.profiles)

    @property
    def steady_states(self) -> np.ndarray:
        return np.stack([p.steady_state for p in self.profiles])

    @property
    def max_tau(self) -> int:
        return max(p.tau for p in self.profiles)

    def to_dict(self) -> dict:
        return {"devices": [
            {"tau": p.tau,
             "steady_state": [float(v) for v in p.steady_state],
             "transient": [[float(v) for v in row] for row in p.transient]}
            for p in self.profiles]}

    @classmethod
    def from_dict(cls, doc: dict) -> "DeviceLibrary":
        try:
            entries = doc["devices"]
            return cls(tuple(
                DeviceProfile(i, e["transient"], e["steady_state"], e["tau"])
                for i, e in enumerate(entries)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"malformed device library: {exc!r}") from exc


@dataclass
class StateCheckReport:
    """Outcome of :func:`validate_state_matrix`.

    ``violations`` lists (row, column) indices of entries outside {-1, 0, +1}
    and makes the matrix invalid. ``unbalanced_devices`` is a diagnostic only:
    columns whose running event sum drops below zero at some time.
    """

    violations: List[tuple] = field(default_factory=list)
    unbalanced_devices: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_state_matrix(S) -> StateCheckReport:
    arr = np.asarray(S)
    if arr.ndim != 2:
        raise ConfigurationError(f"state matrix must be 2-D, got {arr.shape}")
    bad = ~np.isin(arr, (-1, 0, 1))
    report = StateCheckReport(violations=[tuple(int(v) for v in ix) for ix in np.argwhere(bad)])
    clean = np.where(bad, 0, arr).astype(np.int64)
    running = np.cumsum(clean, axis=0)
    report.unbalanced_devices = [int(i) for i in np.flatnonzero((running < 0).any(axis=0))]
    return report


def events_of(S) -> List[tuple]:
    """Nonzero entries of a state matrix as sorted (t, device, event) triples."""
    arr = np.asarray(S)
    return [(int(t), int(i), int(arr[t, i])) for t, i in np.argwhere(arr != 0)]
