"""Synthetic scenarios with known ground truth."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Dict, NamedTuple, Tuple

import numpy as np

from .model import N_FEATURES, ConfigurationError, DeviceLibrary, DeviceProfile, PowerSeries
from .reconstruct import reconstruct_array

TRANSIENT_SHAPES = ("step", "exponential", "ramp")
_SHAPE_ALIASES = {"exponential-decay-to-steady": "exponential"}


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of a synthetic scenario.

    ``events_per_device`` is an inclusive range for the number of ON/OFF
    cycles of each device; every cycle contributes one ON and one later OFF.
    ``steady_power_range`` bounds the total active steady-state power of a
    device in watts; it is split randomly over the three phases and reactive
    power follows from a random power factor.
    """

    num_devices: int = 3
    day_length: int = 600
    events_per_device: Tuple[int, int] = (2, 2)
    transient_shape: str = "exponential"
    tau_range: Tuple[int, int] = (0, 20)
    steady_power_range: Tuple[float, float] = (300.0, 3000.0)
    noise_std: float = 0.0
    baseline: Tuple[float, ...] = (800.0, 700.0, 900.0, 150.0, 120.0, 180.0)
    rng_seed: int = 0

    def __post_init__(self):
        shape = _SHAPE_ALIASES.get(self.transient_shape, self.transient_shape)
        if shape not in TRANSIENT_SHAPES:
            raise ConfigurationError(f"unknown transient shape {self.transient_shape!r}")
        object.__setattr__(self, "transient_shape", shape)
        for name in ("events_per_device", "tau_range", "steady_power_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigurationError(f"{name} is empty: {lo} > {hi}")
            object.__setattr__(self, name, (lo, hi))
        if self.num_devices < 1 or self.day_length < 1:
            raise ConfigurationError("num_devices and day_length must be >= 1")
        if self.events_per_device[0] < 0 or self.tau_range[0] < 0:
            raise ConfigurationError("event counts and tau must be nonnegative")
        if self.noise_std < 0:
            raise ConfigurationError("noise_std must be nonnegative")
        if len(self.baseline) != N_FEATURES:
            raise ConfigurationError("baseline needs 6 values")
        object.__setattr__(self, "baseline", tuple(float(v) for v in self.baseline))

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v
                for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()})


class Scenario(NamedTuple):
    library: DeviceLibrary
    state_changes: np.ndarray
    power: PowerSeries


def _random_profile(i, spec: ScenarioSpec, rng) -> DeviceProfile:
    total = rng.uniform(*spec.steady_power_range)
    split = rng.uniform(0.1, 1.0, 3)
    active = total * split / split.sum()
    reactive = active * rng.uniform(0.1, 0.6)
    steady = np.concatenate([active, reactive])
    tau = int(rng.integers(spec.tau_range[0], spec.tau_range[1] + 1))
    t = np.arange(tau)[:, None]
    if spec.transient_shape == "step":
        transient = np.repeat(steady[None], tau, axis=0)
    elif spec.transient_shape == "exponential":
        peak = rng.uniform(1.5, 3.0)
        transient = steady * (1.0 + (peak - 1.0) * np.exp(-3.0 * t / max(tau, 1)))
    else:
        transient = steady * (t + 1) / (tau + 1)
    return DeviceProfile(i, transient.reshape(tau, N_FEATURES), steady, tau)


def generate_scenario(spec: ScenarioSpec) -> Scenario:
    """Draw a device library, paired ON/OFF ground truth and the aggregate power.

    Events never land on row 0, so the first sample is the always-on level.
    """
    rng = np.random.default_rng(spec.rng_seed)
    T, M = spec.day_length, spec.num_devices
    library = DeviceLibrary(tuple(_random_profile(i, spec, rng) for i in range(M)))
    S = np.zeros((T, M), dtype=np.int8)
    for i in range(M):
        cycles = int(rng.integers(spec.events_per_device[0], spec.events_per_device[1] + 1))
        if 2 * cycles > T - 1:
            raise ConfigurationError(
                f"{cycles} ON/OFF cycles do not fit into {T - 1} usable rows")
        times = np.sort(rng.choice(np.arange(1, T), size=2 * cycles, replace=False))
        S[times[0::2], i] = 1
        S[times[1::2], i] = -1
    clean = np.asarray(spec.baseline) + reconstruct_array(S, library, T)
    noise = rng.normal(0.0, spec.noise_std, clean.shape) if spec.noise_std > 0 else 0.0
    return Scenario(library, S, PowerSeries(clean + noise))


@dataclass(frozen=True)
class PolarityScore:
    precision: float
    recall: float
    matched: int
    n_true: int
    n_found: int
    no_predictions: bool


def _match_count(true_t, found_t, tol):
    pairs = sorted((abs(int(a) - int(b)), int(a), int(b))
                   for a in true_t for b in found_t if abs(int(a) - int(b)) <= tol)
    used_true, used_found = set(), set()
    for _, a, b in pairs:
        if a not in used_true and b not in used_found:
            used_true.add(a)
            used_found.add(b)
    return len(used_true)


def state_accuracy(S_true, S_found, tolerance_samples: int = 3) -> Dict[str, PolarityScore]:
    """Event-level precision/recall for ON (+1) and OFF (-1) events.

    Events match one-to-one within the same device and polarity if at most
    ``tolerance_samples`` apart, closest pairs first. With no predicted events
    precision is reported as 1 and ``no_predictions`` is set; with no true
    events recall is 1.
    """
    S_true, S_found = np.asarray(S_true), np.asarray(S_found)
    if S_true.shape != S_found.shape:
        raise ConfigurationError(f"shape mismatch: {S_true.shape} vs {S_found.shape}")
    out = {}
    for name, sign in (("on", 1), ("off", -1)):
        matched = n_true = n_found = 0
        for i in range(S_true.shape[1]):
            tt = np.flatnonzero(S_true[:, i] == sign)
            ff = np.flatnonzero(S_found[:, i] == sign)
            n_true += tt.size
            n_found += ff.size
            matched += _match_count(tt, ff, tolerance_samples)
        out[name] = PolarityScore(
            precision=matched / n_found if n_found else 1.0,
            recall=matched / n_true if n_true else 1.0,
            matched=matched, n_true=n_true, n_found=n_found,
            no_predictions=n_found == 0)
    return out
