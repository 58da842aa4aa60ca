"""Empirical verification of stochastic phase-cohesiveness.

Three instruments:

* :func:`simulate` records a full trajectory together with the per-edge
  geodesic distances, drift-function values and set membership used in
  the recurrence arguments.
* :func:`recurrence_experiment` runs many trials from sampled initial
  states and collects first-return times to the cohesive set, maximal
  excursions and escape counts. Finite-horizon return fractions are the
  checkable surrogate for almost-sure recurrence and are always reported
  as fractions, never asserted as probability one.
* :func:`drift_estimate` / :func:`drift_sweep` probe the one-step
  conditional drift ``E[V(theta(k+1)) | theta(k)] - V(theta(k))`` by
  re-drawing noise for a fixed state, exactly matching the conditional
  expectation because stepping is pure.

Trials, probes and their noise all use distinct stream coordinates, so
results are independent of evaluation order and of how work is split
across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    NetworkModel,
    PhaseState,
    drift_function_V,
    drift_values,
    edge_geodesics,
    step_theta,
    validate_gamma,
    wrap_angle,
)
from .errors import TreeKuramotoError
from .graph import TreeGraph
from .noise import RandomStream, sample_noise_block

#: States whose largest edge distance reaches pi/2 - ESCAPE_TOLERANCE are
#: flagged as escaped: beyond that the cohesiveness analysis regime no
#: longer applies.
ESCAPE_TOLERANCE = 1e-9

_MAX_BLOCK_WORDS = 1 << 21


class InvalidInitSampler(TreeKuramotoError):
    """Initial-state sampler produced a state outside the admissible set."""


@dataclass
class TrajectoryRecord:
    """Complete record of one simulated trajectory.

    Row ``k`` holds the state at step ``k``; ``realized_frequency[k]``
    is ``omega + n(k)``, the disturbed frequency vector that drives the
    transition from step ``k`` to ``k + 1`` (the final row carries the
    next, unused draw so the table stays rectangular).
    """

    steps: np.ndarray
    theta: np.ndarray
    edge_distances: np.ndarray
    max_edge_distance: np.ndarray
    drift_v: np.ndarray
    in_set: np.ndarray
    realized_frequency: np.ndarray
    model: NetworkModel
    gamma: float
    stream: RandomStream

    @property
    def horizon(self) -> int:
        return len(self.steps) - 1


@dataclass
class RecurrenceStats:
    """Aggregate first-return statistics over many trials.

    ``return_time[t]`` is the first step ``k >= 1`` at which trial ``t``
    is inside the cohesive set (for trials starting outside) or back
    inside after an exit (for trials starting inside; 1 when the trial
    never exits). Unreturned trials carry ``-1`` there and are exactly
    the complement of ``return_fraction``.
    """

    trials: int
    gamma: float
    horizon: int
    started_in_set: np.ndarray
    returned: np.ndarray
    return_time: np.ndarray
    max_excursion: np.ndarray
    escaped: np.ndarray
    escape_time: np.ndarray

    @property
    def return_fraction(self) -> float:
        return float(np.mean(self.returned))

    @property
    def escaped_fraction(self) -> float:
        return float(np.mean(self.escaped))

    @property
    def return_times(self) -> np.ndarray:
        """Finite first-return times, one entry per returned trial."""
        return self.return_time[self.returned]


@dataclass(frozen=True)
class DriftEstimate:
    """Monte Carlo estimate of the one-step drift at a probed state."""

    theta: np.ndarray
    gamma: float
    estimate: float
    stderr: float
    samples: int


def fixed_initial(theta0):
    """Initial-state sampler that always returns ``theta0`` (wrapped)."""
    frozen = wrap_angle(np.asarray(theta0, dtype=float))

    def sample(graph: TreeGraph, stream: RandomStream) -> np.ndarray:
        if frozen.shape != (graph.n,):
            raise InvalidInitSampler(
                f"initial phases have shape {frozen.shape}, graph has {graph.n} nodes"
            )
        return frozen.copy()

    return sample


def edge_box_sampler(low: float = 0.0, high: float = 0.5 * math.pi):
    """Sampler drawing each edge difference uniformly from the annulus
    ``low <= |difference| < high`` with a random sign, then integrating
    the differences along the tree with node 0 pinned at phase zero.

    On a tree the edge differences are free coordinates, so ``low = 0``
    covers the admissible set (every edge distance at most pi/2)
    uniformly and ``low = gamma`` covers the drift-test annulus.
    """
    if not (0.0 <= low < high <= 0.5 * math.pi):
        raise ValueError(
            f"need 0 <= low < high <= pi/2, got low={low}, high={high}"
        )

    def sample(graph: TreeGraph, stream: RandomStream) -> np.ndarray:
        u = stream.uniforms(0, graph.m)
        signed = 2.0 * u - 1.0
        diffs = np.where(signed >= 0.0, 1.0, -1.0) * (
            low + np.abs(signed) * (high - low)
        )
        theta = np.full(graph.n, np.nan)
        theta[0] = 0.0
        known = 1
        while known < graph.n:
            progressed = False
            for e, (tail, head) in enumerate(graph.edges):
                if np.isnan(theta[head]) and not np.isnan(theta[tail]):
                    theta[head] = theta[tail] - diffs[e]
                    known += 1
                    progressed = True
                elif np.isnan(theta[tail]) and not np.isnan(theta[head]):
                    theta[tail] = theta[head] + diffs[e]
                    known += 1
                    progressed = True
            if not progressed:
                raise InvalidInitSampler("graph is not connected")
        return wrap_angle(theta)

    return sample


def _as_theta(state) -> np.ndarray:
    return state.theta if isinstance(state, PhaseState) else np.asarray(state, float)


def _noise_chunk_steps(n: int) -> int:
    words = max(4, 4 * -(-n // 4))
    return max(1, _MAX_BLOCK_WORDS // words)


def simulate(
    model: NetworkModel,
    theta0,
    horizon: int,
    gamma: float,
    stream: RandomStream,
) -> TrajectoryRecord:
    """Iterate the dynamics for ``horizon`` steps, recording everything.

    Noise for step ``k`` is drawn at stream index ``k`` under purpose
    ``"noise"``; two calls with equal inputs produce bit-identical
    records.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    gamma = validate_gamma(gamma)
    n = model.graph.n
    theta0 = _as_theta(theta0)
    if theta0.shape != (n,):
        raise ValueError(f"theta0 shape {theta0.shape} != ({n},)")

    noise_stream = stream.child(purpose="noise")
    theta = np.empty((horizon + 1, n))
    theta[0] = wrap_angle(theta0)
    realized = np.empty((horizon + 1, n))

    chunk = _noise_chunk_steps(n)
    for k0 in range(0, horizon + 1, chunk):
        count = min(chunk, horizon + 1 - k0)
        noise = sample_noise_block(model.noise, noise_stream, k0, count)
        realized[k0 : k0 + count] = model.omega + noise
        for j in range(count):
            k = k0 + j
            if k < horizon:
                theta[k + 1] = step_theta(model, theta[k], noise[j])

    distances = edge_geodesics(model.graph, theta)
    max_distance = distances.max(axis=-1)
    return TrajectoryRecord(
        steps=np.arange(horizon + 1),
        theta=theta,
        edge_distances=distances,
        max_edge_distance=max_distance,
        drift_v=drift_values(model.graph, theta, gamma),
        in_set=max_distance <= gamma,
        realized_frequency=realized,
        model=model,
        gamma=gamma,
        stream=stream,
    )


def recurrence_experiment(
    model: NetworkModel,
    init_sampler,
    gamma: float,
    trials: int,
    horizon: int,
    stream: RandomStream,
) -> RecurrenceStats:
    """First-return statistics for ``trials`` independent trajectories.

    Each trial draws its initial state from ``init_sampler`` (a callable
    ``(graph, stream) -> phases`` whose output must lie in the
    admissible set: every edge distance at most pi/2) and its own noise
    stream, then runs for ``horizon`` steps. Trials are stepped together
    as one batch; per-trial stream coordinates make the result identical
    to running them one at a time.

    Raises:
        InvalidInitSampler: a sampled state has an edge distance beyond
            pi/2.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    gamma = validate_gamma(gamma)
    graph = model.graph
    n = graph.n
    escape_level = 0.5 * math.pi - ESCAPE_TOLERANCE

    theta = np.empty((trials, n))
    for t in range(trials):
        candidate = np.asarray(
            init_sampler(graph, stream.child(trial=t, purpose="init")), float
        )
        if candidate.shape != (n,):
            raise InvalidInitSampler(
                f"sampler returned shape {candidate.shape}, expected ({n},)"
            )
        if np.max(edge_geodesics(graph, candidate)) > 0.5 * math.pi + 1e-12:
            raise InvalidInitSampler(
                f"trial {t} starts outside the admissible set"
            )
        theta[t] = wrap_angle(candidate)

    max_edge = edge_geodesics(graph, theta).max(axis=-1)
    started_in_set = max_edge <= gamma
    max_excursion = max_edge.copy()
    returned = np.zeros(trials, dtype=bool)
    return_time = np.full(trials, -1, dtype=np.int64)
    exited = np.zeros(trials, dtype=bool)
    escaped = max_edge >= escape_level
    escape_time = np.where(escaped, 0, -1).astype(np.int64)

    noise_streams = [stream.child(trial=t, purpose="noise") for t in range(trials)]
    chunk = max(1, _noise_chunk_steps(n) // max(1, trials))
    for k0 in range(0, horizon, chunk):
        count = min(chunk, horizon - k0)
        noise = np.stack(
            [sample_noise_block(model.noise, s, k0, count) for s in noise_streams]
        )
        for j in range(count):
            k = k0 + j + 1
            theta = step_theta(model, theta, noise[:, j, :])
            max_edge = edge_geodesics(graph, theta).max(axis=-1)
            np.maximum(max_excursion, max_edge, out=max_excursion)
            inside = max_edge <= gamma
            fresh_return = ~returned & inside & (~started_in_set | exited)
            return_time[fresh_return] = k
            returned |= fresh_return
            exited |= started_in_set & ~inside
            fresh_escape = ~escaped & (max_edge >= escape_level)
            escape_time[fresh_escape] = k
            escaped |= fresh_escape

    never_exited = started_in_set & ~exited
    return_time[never_exited] = 1
    returned |= never_exited

    return RecurrenceStats(
        trials=trials,
        gamma=gamma,
        horizon=horizon,
        started_in_set=started_in_set,
        returned=returned,
        return_time=return_time,
        max_excursion=max_excursion,
        escaped=escaped,
        escape_time=escape_time,
    )


def drift_estimate(
    model: NetworkModel,
    state,
    gamma: float,
    noise_samples: int,
    stream: RandomStream,
) -> DriftEstimate:
    """Monte Carlo one-step drift of the drift function at ``state``.

    Averages ``V(step(state, noise)) - V(state)`` over fresh noise draws
    conditioned on the fixed state, with the standard error of the mean.
    """
    if noise_samples < 2:
        raise ValueError(f"need at least 2 noise samples, got {noise_samples}")
    gamma = validate_gamma(gamma)
    theta = wrap_angle(_as_theta(state))
    if model.noise.is_deterministic:
        # one evaluation is exact; averaging identical values would only
        # add rounding noise to the zero standard error
        v_next = drift_values(model.graph, step_theta(model, theta, 0.0), gamma)
        v_now = drift_function_V(model.graph, theta, gamma)
        return DriftEstimate(
            theta=theta,
            gamma=gamma,
            estimate=float(v_next - v_now),
            stderr=0.0,
            samples=noise_samples,
        )
    noise = sample_noise_block(
        model.noise, stream.child(purpose="drift"), 0, noise_samples
    )
    v_next = drift_values(model.graph, step_theta(model, theta, noise), gamma)
    v_now = drift_function_V(model.graph, theta, gamma)
    return DriftEstimate(
        theta=theta,
        gamma=gamma,
        estimate=float(np.mean(v_next) - v_now),
        stderr=float(np.std(v_next, ddof=1) / math.sqrt(noise_samples)),
        samples=noise_samples,
    )


def drift_sweep(
    model: NetworkModel,
    gamma: float,
    n_states: int,
    noise_samples: int,
    stream: RandomStream,
) -> list[DriftEstimate]:
    """Drift estimates at ``n_states`` states sampled uniformly from the
    annulus where every edge distance lies in ``[gamma, pi/2)``.

    This is the region where the recurrence argument requires a strictly
    negative drift; probing it systematically turns that requirement
    into a testable statement.
    """
    if n_states < 0:
        raise ValueError(f"n_states must be nonnegative, got {n_states}")
    gamma = validate_gamma(gamma)
    sampler = edge_box_sampler(low=gamma, high=0.5 * math.pi)
    estimates = []
    for i in range(n_states):
        theta = sampler(model.graph, stream.child(trial=i, purpose="probe"))
        estimates.append(
            drift_estimate(
                model, theta, gamma, noise_samples, stream.child(trial=i)
            )
        )
    return estimates
