"""scikit-learn compatible front end for the swarm disaggregator."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .metrics import compute_metrics, total_active
from .model import ConfigurationError, DeviceLibrary, PowerSeries, check_power_array
from .pipeline import disaggregate_day
from .pso import PsoConfig


class PSODisaggregator(TransformerMixin, BaseEstimator):
    """Disaggregate a (T, 6) power signal into device state changes.

    ``fit`` disaggregates ``X`` (one day, or any contiguous stretch treated as
    one) and keeps the result. ``transform`` returns the (T, M) state-change
    matrix and ``predict`` the reconstructed power, re-running the optimizer
    only when called with data other than what was fitted.

    Parameters mirror :class:`~psodisagg.pso.PsoConfig`; ``random_state`` is
    an int, ``None`` or a ``numpy.random.Generator``.
    """

    def __init__(self, library=None, num_particles=10, max_epochs=50,
                 iterations_per_epoch=30, e_min=5, e_nc=3, event_init_fraction=0.02,
                 threshold=0.6, a_t=0.0, a_k_start=1.0, a_k_end=0.1, a_s_start=0.0002,
                 a_s_end=0.02, social_schedule="corrected", alpha=0.9, beta=0.1,
                 frame_length=60, baseline_mode="first", baseline_window=1,
                 granularity=1, random_state=None):
        self.library = library
        self.num_particles = num_particles
        self.max_epochs = max_epochs
        self.iterations_per_epoch = iterations_per_epoch
        self.e_min = e_min
        self.e_nc = e_nc
        self.event_init_fraction = event_init_fraction
        self.threshold = threshold
        self.a_t = a_t
        self.a_k_start = a_k_start
        self.a_k_end = a_k_end
        self.a_s_start = a_s_start
        self.a_s_end = a_s_end
        self.social_schedule = social_schedule
        self.alpha = alpha
        self.beta = beta
        self.frame_length = frame_length
        self.baseline_mode = baseline_mode
        self.baseline_window = baseline_window
        self.granularity = granularity
        self.random_state = random_state

    def _config(self) -> PsoConfig:
        seed = self.random_state if isinstance(self.random_state, (int, np.integer)) else None
        return PsoConfig(
            num_particles=self.num_particles, max_epochs=self.max_epochs,
            iterations_per_epoch=self.iterations_per_epoch, e_min=self.e_min,
            e_nc=self.e_nc, event_init_fraction=self.event_init_fraction,
            threshold=self.threshold, a_t=self.a_t, a_k_start=self.a_k_start,
            a_k_end=self.a_k_end, a_s_start=self.a_s_start, a_s_end=self.a_s_end,
            social_schedule=self.social_schedule, alpha=self.alpha, beta=self.beta,
            frame_length=self.frame_length, rng_seed=seed,
            baseline_mode=self.baseline_mode, baseline_window=self.baseline_window)

    def _run(self, X):
        if not isinstance(self.library, DeviceLibrary):
            raise ConfigurationError("library must be a DeviceLibrary")
        day = PowerSeries(X, granularity=self.granularity)
        rng = np.random.default_rng(self.random_state)
        return disaggregate_day(day, self.library, self._config(), rng)

    def fit(self, X, y=None):
        X = check_power_array(X)
        result = self._run(X)
        self.result_ = result
        self.X_fit_ = X
        self.n_features_in_ = X.shape[1]
        self.n_devices_ = len(self.library)
        self.baseline_ = result.baseline
        self.state_changes_ = result.state_changes
        self.reconstructed_ = result.reconstructed.samples
        self.frame_errors_ = np.asarray(result.per_frame_errors)
        return self

    def _result_for(self, X):
        check_is_fitted(self, "result_")
        X = check_power_array(X)
        if X.shape == self.X_fit_.shape and np.array_equal(X, self.X_fit_):
            return self.result_
        return self._run(X)

    def fit_transform(self, X, y=None):
        return self.fit(X).state_changes_

    def transform(self, X):
        return self._result_for(X).state_changes

    def predict(self, X):
        return self._result_for(X).reconstructed.samples

    def score(self, X, y=None):
        """Negative RMSE (W) of the total active power reconstruction."""
        X = check_power_array(X)
        return -compute_metrics(total_active(X), total_active(self.predict(X))).rmse
