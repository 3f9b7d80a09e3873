"""Particle swarm optimizer over real-valued state-change positions.

Positions are continuous (frame_length x M) matrices. A particle's fitness is
only defined after thresholding its position into a {-1, 0, +1} state-change
matrix, so small moves below the threshold leave the fitness unchanged.

Within a frame the optimizer runs several *epochs*. Each epoch re-seeds every
particle at the current global best with a few random events added
("shaking"), then runs a fixed number of iterations with linearly varying
cognitive/social constants. A frame stops early once the global best error
has stalled for ``e_nc`` epochs after at least ``e_min`` epochs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .model import N_FEATURES, ConfigurationError, DeviceLibrary, PowerSeries
from .objective import ObjectiveWeights, window_errors
from .reconstruct import ReconstructionContext, reconstruct_array

# Above this many entries the dense lag operator is skipped in favour of
# direct per-particle reconstruction.
_MAX_OPERATOR_ENTRIES = 20_000_000


@dataclass(frozen=True)
class PsoConfig:
    num_particles: int = 10
    max_epochs: int = 50
    iterations_per_epoch: int = 30
    e_min: int = 5
    e_nc: int = 3
    event_init_fraction: float = 0.02
    threshold: float = 0.6
    a_t: float = 0.0
    a_k_start: float = 1.0
    a_k_end: float = 0.1
    a_s_start: float = 0.0002
    a_s_end: float = 0.02
    # "corrected": a_s rises from a_s_start to a_s_end.
    # "printed": a_s(i) = a_s_start - (a_s_end - a_s_start) * i / I, which falls below zero.
    social_schedule: str = "corrected"
    alpha: float = 0.9
    beta: float = 0.1
    frame_length: int = 60
    rng_seed: Optional[int] = 0
    # Always-on component: "first" uses row 0 of the day, "min" the
    # per-feature minimum over the first ``baseline_window`` rows.
    baseline_mode: str = "first"
    baseline_window: int = 1

    def __post_init__(self):
        for name in ("num_particles", "max_epochs", "iterations_per_epoch",
                     "e_min", "e_nc", "frame_length", "baseline_window"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be a positive integer")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigurationError("threshold must lie in (0, 1)")
        if not 0.0 < self.event_init_fraction < 1.0:
            raise ConfigurationError("event_init_fraction must lie in (0, 1)")
        if self.social_schedule not in ("corrected", "printed"):
            raise ConfigurationError("social_schedule must be 'corrected' or 'printed'")
        if self.baseline_mode not in ("first", "min"):
            raise ConfigurationError("baseline_mode must be 'first' or 'min'")
        values = (self.a_t, self.a_k_start, self.a_k_end, self.a_s_start, self.a_s_end)
        if not all(np.isfinite(values)):
            raise ConfigurationError("movement constants must be finite")
        ObjectiveWeights(self.alpha, self.beta)

    @property
    def weights(self) -> ObjectiveWeights:
        return ObjectiveWeights(self.alpha, self.beta)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "PsoConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_error: float


@dataclass
class SwarmState:
    """All particles of a swarm, stacked along a leading particle axis."""

    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_error: np.ndarray
    global_best_position: np.ndarray
    global_best_error: float
    iteration: int = 0
    epoch: int = 0

    @property
    def particles(self) -> List[ParticleState]:
        return [ParticleState(self.position[n], self.velocity[n],
                              self.personal_best_position[n],
                              float(self.personal_best_error[n]))
                for n in range(self.position.shape[0])]


@dataclass
class FrameResult:
    best: np.ndarray
    best_error: float
    epochs: int
    early_stopped: bool
    # global best error after initialisation and after every iteration
    history: List[float] = field(default_factory=list)
    # global best error before epoch 1 (index 0) and after each epoch
    epoch_errors: List[float] = field(default_factory=list)

    def __iter__(self):
        # allows ``best, err = optimize_frame(...)``
        return iter((self.best, self.best_error))


def constants_at(i: int, total: int, cfg: PsoConfig = PsoConfig()):
    """Cognitive and social constants for iteration ``i`` of ``total``."""
    if total < 1 or not 0 <= i <= total:
        raise ConfigurationError(f"iteration {i} outside [0, {total}]")
    u = i / total
    a_k = (1.0 - u) * cfg.a_k_start + u * cfg.a_k_end
    if cfg.social_schedule == "corrected":
        a_s = (1.0 - u) * cfg.a_s_start + u * cfg.a_s_end
    else:
        a_s = (1.0 + u) * cfg.a_s_start - u * cfg.a_s_end
    return a_k, a_s


def velocity_update(p, g_best, a_k, a_s, a_t, rng=None, r1=None, r2=None) -> np.ndarray:
    """New velocity for a particle or a whole swarm.

    ``p`` is anything with ``position``, ``velocity`` and
    ``personal_best_position`` arrays. ``r1``/``r2`` default to fresh uniform
    draws, one per entry.
    """
    x = p.position
    if r1 is None:
        r1 = rng.random(x.shape)
    if r2 is None:
        r2 = rng.random(x.shape)
    return a_t * p.velocity + a_k * r1 * (p.personal_best_position - x) + a_s * r2 * (g_best - x)


def position_update(p) -> np.ndarray:
    return p.position + p.velocity


def discretize(position, r_u: float = 0.6) -> np.ndarray:
    position = np.asarray(position)
    out = np.zeros(position.shape, dtype=np.int8)
    out[position > r_u] = 1
    out[position < -r_u] = -1
    return out


def init_event_count(n_entries: int, fraction: float) -> int:
    return max(1, int(np.floor(n_entries * fraction + 0.5)))


def initialize_swarm(seed_position, cfg: PsoConfig, rng, fitness: Callable,
                     global_best=None, previous: Optional[SwarmState] = None) -> SwarmState:
    """Place every particle at ``seed_position`` plus random +-1 events.

    ``fitness`` maps a stack of discrete matrices (N, L, M) to N errors.
    ``global_best`` is a (position, error) pair carried over from earlier
    epochs; by default the seed itself is scored and used. With ``previous``
    (the swarm of the last epoch) each particle keeps its old personal best
    unless its new start scores strictly better.
    """
    seed = np.asarray(seed_position, dtype=float)
    n = cfg.num_particles
    k = init_event_count(seed.size, cfg.event_init_fraction)
    position = np.repeat(seed.reshape(1, -1), n, axis=0)
    for row in position:
        idx = rng.choice(seed.size, size=k, replace=False)
        row[idx] = rng.integers(0, 2, size=k) * 2.0 - 1.0
    position = position.reshape((n,) + seed.shape)

    errors = np.asarray(fitness(discretize(position, cfg.threshold)), dtype=float)
    if global_best is None:
        global_best = (seed.copy(), float(fitness(discretize(seed, cfg.threshold)[None])[0]))
    g_pos, g_err = global_best
    j = int(np.argmin(errors))
    if errors[j] < g_err:
        g_pos, g_err = position[j].copy(), float(errors[j])
    pbest_pos, pbest_err = position.copy(), errors.copy()
    if previous is not None:
        keep = previous.personal_best_error <= errors
        pbest_pos[keep] = previous.personal_best_position[keep]
        pbest_err[keep] = previous.personal_best_error[keep]
    return SwarmState(position=position, velocity=np.zeros_like(position),
                      personal_best_position=pbest_pos, personal_best_error=pbest_err,
                      global_best_position=np.array(g_pos), global_best_error=float(g_err))


def run_swarm(fitness: Callable, shape, cfg: PsoConfig, rng) -> FrameResult:
    """Minimise ``fitness`` over discrete matrices of ``shape``, starting from zero."""
    I = cfg.iterations_per_epoch
    zero = np.zeros(shape)
    g_pos, g_err = zero, float(fitness(discretize(zero, cfg.threshold)[None])[0])
    history = [g_err]
    epoch_errors = [g_err]
    early = False
    epoch = 0
    swarm = None
    for epoch in range(1, cfg.max_epochs + 1):
        swarm = initialize_swarm(g_pos, cfg, rng, fitness, (g_pos, g_err), previous=swarm)
        swarm.epoch = epoch
        history.append(swarm.global_best_error)
        for i in range(1, I + 1):
            a_k, a_s = constants_at(i, I, cfg)
            swarm.velocity = velocity_update(swarm, swarm.global_best_position,
                                             a_k, a_s, cfg.a_t, rng)
            swarm.position = position_update(swarm)
            errors = np.asarray(fitness(discretize(swarm.position, cfg.threshold)), dtype=float)
            better = errors < swarm.personal_best_error
            swarm.personal_best_position[better] = swarm.position[better]
            swarm.personal_best_error[better] = errors[better]
            j = int(np.argmin(errors))
            if errors[j] < swarm.global_best_error:
                swarm.global_best_position = swarm.position[j].copy()
                swarm.global_best_error = float(errors[j])
            swarm.iteration = i
            history.append(swarm.global_best_error)
        g_pos, g_err = swarm.global_best_position, swarm.global_best_error
        epoch_errors.append(g_err)
        if epoch > cfg.e_min and epoch >= cfg.e_nc and \
                epoch_errors[epoch] == epoch_errors[epoch - cfg.e_nc]:
            early = True
            break
    return FrameResult(best=discretize(g_pos, cfg.threshold), best_error=g_err,
                       epochs=epoch, early_stopped=early, history=history,
                       epoch_errors=epoch_errors)


class FrameEvaluator:
    """Scores candidate state matrices for one frame window.

    Events placed inside the window only affect rows at or after their own
    row, so the window's part of the reconstruction depends on the frame's
    events alone. It is computed as a linear map of the ON/OFF indicators.
    """

    def __init__(self, library: DeviceLibrary, target, weights: ObjectiveWeights,
                 granularity: int = 1):
        self.library = library
        self.target = np.asarray(target, dtype=float)
        self.weights = weights
        self.granularity = granularity
        L, M = self.target.shape[0], len(library)
        self.shape = (L, M)
        self.on_op = self.off_op = None
        if (L * M) * (L * N_FEATURES) <= _MAX_OPERATOR_ENTRIES:
            lags = np.stack([p.lag_table(L) for p in library])
            on = np.zeros((L, M, L, N_FEATURES))
            off = np.zeros((L, M, L, N_FEATURES))
            for k in range(L):
                on[k, :, k:, :] = lags[:, :L - k, :]
                off[k, :, k + 1:, :] = -library.steady_states[:, None, :]
            self.on_op = on.reshape(L * M, L * N_FEATURES)
            self.off_op = off.reshape(L * M, L * N_FEATURES)

    def reconstruct(self, S) -> np.ndarray:
        """Window reconstruction for a stack (N, L, M) of state matrices."""
        S = np.asarray(S)
        n = S.shape[0]
        L = self.shape[0]
        if self.on_op is None:
            return np.stack([reconstruct_array(s, self.library, L) for s in S])
        flat = S.reshape(n, -1)
        out = (flat == 1).astype(float) @ self.on_op + (flat == -1).astype(float) @ self.off_op
        return out.reshape(n, L, N_FEATURES)

    def __call__(self, S) -> np.ndarray:
        diff = self.reconstruct(S) - self.target[None]
        return window_errors(diff, self.weights.alpha, self.weights.beta, self.granularity)


def frame_bounds(frame_index: int, frame_length: int, horizon: int):
    start = frame_index * frame_length
    if not 0 <= start < horizon:
        raise ConfigurationError(f"frame {frame_index} starts outside [0, {horizon})")
    return start, min(start + frame_length, horizon)


def optimize_frame(frame_target, ctx: ReconstructionContext, fixed_prefix, frame_index: int,
                   cfg: PsoConfig, rng, fitness: Optional[Callable] = None) -> FrameResult:
    """Optimise the state changes of one frame.

    ``frame_target`` is the residual of the whole day after removing the
    always-on component and the power of all earlier frames' events
    (``fixed_prefix``). Only the rows of frame ``frame_index`` are searched
    and the error is measured on that window only. ``fitness`` replaces the
    default window objective, mainly for testing the search loop itself.
    """
    target = frame_target.samples if isinstance(frame_target, PowerSeries) \
        else np.asarray(frame_target, dtype=float)
    if target.ndim != 2 or target.shape[1] != N_FEATURES:
        raise ConfigurationError(f"frame target must be (T, 6), got {target.shape}")
    if target.shape[0] != ctx.horizon:
        raise ConfigurationError(
            f"frame target has {target.shape[0]} rows, horizon is {ctx.horizon}")
    start, stop = frame_bounds(frame_index, cfg.frame_length, ctx.horizon)
    M = len(ctx.library)
    if fixed_prefix is not None:
        prefix = np.asarray(fixed_prefix)
        if prefix.ndim != 2 or prefix.shape[1] != M or prefix.shape[0] > start:
            raise ConfigurationError(
                f"fixed prefix of shape {prefix.shape} does not precede frame at row {start}")
    if fitness is None:
        fitness = FrameEvaluator(ctx.library, target[start:stop], cfg.weights, ctx.granularity)
    return run_swarm(fitness, (stop - start, M), cfg, rng)
