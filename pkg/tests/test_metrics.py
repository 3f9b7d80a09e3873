import numpy as np
import pytest

from psodisagg.metrics import compute_metrics, on_event_histogram, total_active
from psodisagg.model import ConfigurationError, PowerSeries


def test_total_active():
    assert total_active(np.array([[1, 2, 3, 9, 9, 9]]))[0] == 6
    assert not total_active(np.zeros((4, 6))).any()
    rng = np.random.default_rng(0)
    A, B = rng.normal(size=(5, 6)), rng.normal(size=(5, 6))
    np.testing.assert_allclose(total_active(A + 2 * B), total_active(A) + 2 * total_active(B))
    assert total_active(PowerSeries(np.ones((2, 6))))[1] == 3


def test_perfect_reconstruction():
    y = np.array([3.0, 5.0, 7.0])
    m = compute_metrics(y, y)
    assert (m.rmse, m.mae, m.mape, m.energy_e, m.energy_e_signed) == (0, 0, 0, 0, 0)


def test_worked_example():
    m = compute_metrics([10.0, 10.0], [8.0, 12.0])
    assert (m.rmse, m.mae, m.mape, m.energy_e) == (2.0, 2.0, 0.2, 0.0)
    assert m.rmse_over_mean_power == 0.2


def test_constant_offset():
    rng = np.random.default_rng(1)
    y = rng.uniform(100, 200, 50)
    m = compute_metrics(y, y + 7.5)
    assert m.mae == pytest.approx(7.5)
    assert m.energy_e == pytest.approx(7.5 / y.mean())
    assert m.energy_e_signed == pytest.approx(-7.5 / y.mean())


def test_mape_skips_zero_denominators():
    m = compute_metrics([0.0, 10.0, 0.0], [1.0, 12.0, 0.0])
    assert m.mape_skipped == 2
    assert m.mape == pytest.approx(0.2)
    m = compute_metrics([0.0], [1.0])
    assert np.isnan(m.mape) and m.to_dict()["mape"] is None


def test_length_mismatch():
    with pytest.raises(ConfigurationError):
        compute_metrics([1.0, 2.0], [1.0])


def test_metrics_are_symmetric_under_joint_shuffle():
    rng = np.random.default_rng(2)
    y, y_hat = rng.uniform(50, 100, 200), rng.uniform(50, 100, 200)
    perm = rng.permutation(200)
    a, b = compute_metrics(y, y_hat), compute_metrics(y[perm], y_hat[perm])
    for field in ("rmse", "mae", "mape", "energy_e"):
        assert getattr(a, field) == pytest.approx(getattr(b, field), rel=1e-12)


def test_histogram_empty():
    h = on_event_histogram(np.zeros((86400, 2)), 0)
    assert len(h.counts) == 48
    assert not h.counts.any() and not h.normalized.any()


def test_histogram_single_event():
    S = np.zeros((86400, 1))
    S[1800, 0] = 1
    h = on_event_histogram(S, 0)
    assert h.counts[1] == 1 and h.normalized[1] == 1.0
    assert h.counts.sum() == 1


def test_histogram_divides_by_busiest_window():
    S = np.zeros((86400, 2))
    S[3 * 1800 + 5, 1] = S[3 * 1800 + 99, 1] = 1
    S[7 * 1800, 1] = 1
    S[7 * 1800 + 1, 1] = -1
    S[100, 0] = 1
    h = on_event_histogram(S, 1)
    assert h.normalized[3] == 1.0 and h.normalized[7] == 0.5
    assert h.normalized.sum() == 1.5
    assert h.window_starts[7] == 7 * 1800


def test_histogram_partial_trailing_window():
    S = np.zeros((4000, 1))
    S[3999, 0] = 1
    h = on_event_histogram(S, 0, window_minutes=30)
    assert len(h.counts) == 3 and h.counts[2] == 1
