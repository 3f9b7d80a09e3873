import numpy as np
import pytest

from psodisagg.model import DeviceLibrary, PowerSeries
from psodisagg.pipeline import always_on_component, disaggregate_day, split_days
from psodisagg.pso import PsoConfig
from psodisagg.reconstruct import reconstruct_array
from psodisagg.synth import ScenarioSpec, generate_scenario


def _series(n, start_time=0, epoch=None):
    return PowerSeries(np.arange(n * 6, dtype=float).reshape(n, 6), start_time, 1, epoch)


def test_split_two_full_days():
    days = split_days(_series(2 * 86400, epoch=1_700_006_400 - 1_700_006_400 % 86400))
    assert [len(d) for d in days] == [86400, 86400]
    assert days[1].start_time == 0
    assert days[1].epoch_start - days[0].epoch_start == 86400
    np.testing.assert_array_equal(days[1].samples[0], np.arange(6) + 86400 * 6)


def test_split_starting_before_midnight():
    days = split_days(_series(100, start_time=86400 - 30))
    assert [len(d) for d in days] == [30, 70]
    assert days[0].start_time == 86370 and days[1].start_time == 0


def test_split_single_row():
    days = split_days(_series(1, start_time=500))
    assert len(days) == 1 and len(days[0]) == 1


def test_split_respects_granularity():
    P = PowerSeries(np.zeros((10, 6)), start_time=86400 - 60, granularity=15)
    assert [len(d) for d in split_days(P)] == [4, 6]


def test_constant_day(simple_library):
    day = PowerSeries(np.tile([5.0, 6, 7, 1, 1, 1], (130, 1)))
    res = disaggregate_day(day, simple_library, PsoConfig(), np.random.default_rng(0))
    assert not res.state_changes.any()
    np.testing.assert_array_equal(res.reconstructed.samples, day.samples)
    assert res.per_frame_errors == [0.0, 0.0, 0.0]
    assert len(res.frames()) == 3 and res.frames()[-1]["stop"] == 130


def test_reconstruction_invariant_and_concatenation():
    lib, _, P = generate_scenario(ScenarioSpec(day_length=300, rng_seed=5))
    res = disaggregate_day(P, lib, PsoConfig(max_epochs=8), np.random.default_rng(1))
    S, T = res.state_changes, len(P)
    np.testing.assert_allclose(res.reconstructed.samples,
                               reconstruct_array(S, lib, T) + res.baseline, atol=1e-9)
    incremental = np.zeros((T, 6))
    for fr in res.frames():
        part = np.zeros_like(S)
        part[fr["start"]:fr["stop"]] = S[fr["start"]:fr["stop"]]
        incremental += reconstruct_array(part, lib, T)
    np.testing.assert_allclose(incremental, res.reconstructed.samples - res.baseline,
                               atol=1e-8)


def test_frames_are_fixed_once_optimized():
    lib, _, P = generate_scenario(ScenarioSpec(day_length=240, rng_seed=2))
    snapshots = []

    def hook(f, start, stop, resid, S):
        snapshots.append((start, S.copy()))
        with pytest.raises(ValueError):
            S[0, 0] = 1

    res = disaggregate_day(P, lib, PsoConfig(max_epochs=8), np.random.default_rng(3),
                           on_frame=hook)
    for start, S in snapshots:
        np.testing.assert_array_equal(S[:start], res.state_changes[:start])
        assert not S[start:].any()


def test_baseline_modes():
    X = np.array([[5.0] * 6, [3.0] * 6, [4.0] * 6])
    assert always_on_component(X, PsoConfig())[0] == 5.0
    assert always_on_component(X, PsoConfig(baseline_mode="min", baseline_window=3))[0] == 3.0


def test_synthetic_day_energy_error_is_small():
    lib, _, P = generate_scenario(ScenarioSpec(rng_seed=0))
    res = disaggregate_day(P, lib, PsoConfig(), np.random.default_rng(0))
    assert res.metrics.energy_e < 0.05


def test_accepts_plain_arrays(simple_library):
    res = disaggregate_day(np.zeros((10, 6)), simple_library)
    assert res.state_changes.shape == (10, 1)
