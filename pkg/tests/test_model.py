import json

import numpy as np
import pytest

from psodisagg.model import (
    ConfigurationError,
    DeviceLibrary,
    DeviceProfile,
    PowerSeries,
    check_state_array,
    profile_at,
    validate_state_matrix,
)


def test_profile_at_before_switch_on_is_zero(simple_profile):
    np.testing.assert_array_equal(profile_at(simple_profile, -1), np.zeros(6))


def test_profile_at_transient_lookup(simple_profile):
    np.testing.assert_array_equal(profile_at(simple_profile, 1), [3, 0, 0, 0, 0, 0])


def test_profile_at_steady_state(simple_profile):
    np.testing.assert_array_equal(profile_at(simple_profile, 100), [2, 0, 0, 0, 0, 0])


def test_profile_at_is_constant_from_tau_on(simple_profile):
    for t in range(simple_profile.tau, simple_profile.tau + 50):
        np.testing.assert_array_equal(profile_at(simple_profile, t), simple_profile.steady_state)


def test_zero_tau_jumps_to_steady_state():
    p = DeviceProfile(0, np.zeros((0, 6)), [7, 1, 1, 0, 0, 0], 0)
    np.testing.assert_array_equal(profile_at(p, 0), [7, 1, 1, 0, 0, 0])
    np.testing.assert_array_equal(profile_at(p, -3), np.zeros(6))


def test_lag_table_matches_profile_at(simple_profile):
    table = simple_profile.lag_table(5)
    for k in range(5):
        np.testing.assert_array_equal(table[k], profile_at(simple_profile, k))


@pytest.mark.parametrize("kwargs", [
    dict(transient=np.zeros((3, 6)), steady_state=np.zeros(6), tau=2),
    dict(transient=np.zeros((0, 6)), steady_state=np.zeros(5), tau=0),
    dict(transient=np.zeros((0, 6)), steady_state=[np.nan] * 6, tau=0),
    dict(transient=np.zeros((0, 6)), steady_state=np.zeros(6), tau=-1),
])
def test_profile_validation(kwargs):
    with pytest.raises(ConfigurationError):
        DeviceProfile(0, **kwargs)


def test_library_ids_must_be_ordered(simple_profile):
    with pytest.raises(ConfigurationError):
        DeviceLibrary((DeviceProfile(1, np.zeros((0, 6)), np.zeros(6), 0),))
    with pytest.raises(ConfigurationError):
        DeviceLibrary(())


def test_library_dict_round_trip(simple_library):
    doc = json.loads(json.dumps(simple_library.to_dict()))
    back = DeviceLibrary.from_dict(doc)
    np.testing.assert_array_equal(back[0].transient, simple_library[0].transient)
    np.testing.assert_array_equal(back[0].steady_state, simple_library[0].steady_state)
    assert back[0].tau == 2


def test_library_from_dict_rejects_missing_keys():
    with pytest.raises(ConfigurationError):
        DeviceLibrary.from_dict({"devices": [{"tau": 0}]})


def test_power_series_invariants():
    with pytest.raises(ConfigurationError):
        PowerSeries(np.zeros((3, 5)))
    with pytest.raises(ConfigurationError):
        PowerSeries(np.zeros((0, 6)))
    with pytest.raises(ConfigurationError):
        PowerSeries(np.full((2, 6), np.inf))
    P = PowerSeries(np.ones((3, 6)), start_time=10, granularity=2)
    np.testing.assert_array_equal(P.timestamps, [10, 12, 14])
    assert not P.samples.flags.writeable


def test_validate_all_zero_is_ok():
    report = validate_state_matrix(np.zeros((10, 3)))
    assert report.ok and report.unbalanced_devices == []


def test_validate_reports_out_of_range_entry():
    S = np.zeros((10, 3), dtype=int)
    S[4, 2] = 2
    report = validate_state_matrix(S)
    assert not report.ok
    assert report.violations == [(4, 2)]


def test_validate_flags_unbalanced_column_without_failing():
    S = np.zeros((10, 1), dtype=int)
    S[0, 0], S[5, 0], S[8, 0] = 1, -1, -1
    report = validate_state_matrix(S)
    assert report.ok
    assert report.unbalanced_devices == [0]


def test_state_array_round_trips_through_text():
    rng = np.random.default_rng(3)
    S = rng.integers(-1, 2, size=(40, 4)).astype(np.int8)
    back = np.array(json.loads(json.dumps(S.tolist())), dtype=np.int8)
    np.testing.assert_array_equal(check_state_array(back), S)
