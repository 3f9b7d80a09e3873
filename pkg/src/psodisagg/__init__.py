"""Energy disaggregation with an adapted particle swarm optimizer."""

__version__ = "0.1.0"

from .estimator import PSODisaggregator
from .metrics import MetricsReport, compute_metrics, on_event_histogram, total_active
from .model import (
    ConfigurationError,
    DataError,
    DeviceLibrary,
    DeviceProfile,
    PowerSeries,
    profile_at,
    validate_state_matrix,
)
from .objective import ObjectiveWeights, derivative, error_on_interval
from .pipeline import DayResult, disaggregate_day, split_days
from .pso import PsoConfig, constants_at, discretize, optimize_frame
from .reconstruct import ReconstructionContext, reconstruct_power, residual
from .synth import ScenarioSpec, generate_scenario, state_accuracy

__all__ = [
    "PSODisaggregator", "MetricsReport", "compute_metrics", "on_event_histogram",
    "total_active", "ConfigurationError", "DataError", "DeviceLibrary", "DeviceProfile",
    "PowerSeries", "profile_at", "validate_state_matrix", "ObjectiveWeights", "derivative",
    "error_on_interval", "DayResult", "disaggregate_day", "split_days", "PsoConfig",
    "constants_at", "discretize", "optimize_frame", "ReconstructionContext",
    "reconstruct_power", "residual", "ScenarioSpec", "generate_scenario", "state_accuracy",
]
