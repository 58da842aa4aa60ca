"""Discrete-time stochastic Kuramoto dynamics on trees.

Two coupling variants share one integrator:

``frequency_dependent``
    theta_i(k+1) = theta_i(k)
                   + tau * (omega_i + n_i(k)) * (1 - kappa * S_i(k))

``undirected``
    theta_i(k+1) = theta_i(k) + tau * (omega_i + n_i(k))
                   - kappa * tau * S_i(k)

with ``S_i(k) = sum over neighbors j of sin(theta_i(k) - theta_j(k))``.
In the first variant every link is effectively weighted by the noisy
frequency of its head node; in the second all links share the constant
weight ``kappa``.

Phases live on the circle and are stored wrapped to ``(-pi, pi]``;
relative phases are wrapped signed differences and set membership uses
geodesic distance throughout. The neighbor sum is computed as
``B sin(B^T theta)``, which makes it independent of edge orientation.

Stepping is a pure function of ``(model, state, noise draw)``: the
caller supplies the disturbance vector, so conditional expectations can
re-draw noise for a fixed state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import TreeGraph
from .noise import NoiseSpec

VARIANTS = ("frequency_dependent", "undirected")

TWO_PI = 2.0 * math.pi


def wrap_angle(x):
    """Wrap angles to the half-open interval ``(-pi, pi]``.

    Exact identity for inputs already in range (round-to-even maps the
    half-integer quotient at +pi to zero turns), so wrapping is
    idempotent bit for bit and zero-increment steps are exact fixed
    points.
    """
    x = np.asarray(x, dtype=float)
    wrapped = x - TWO_PI * np.round(x / TWO_PI)
    wrapped = np.where(wrapped > np.pi, wrapped - TWO_PI, wrapped)
    return np.where(wrapped <= -np.pi, wrapped + TWO_PI, wrapped)


def geodesic_distance(a, b):
    """Shortest arc length between two angles, in ``[0, pi]``."""
    delta = np.mod(np.abs(np.asarray(a, dtype=float) - b), TWO_PI)
    return np.minimum(delta, TWO_PI - delta)


def validate_gamma(gamma: float) -> float:
    """Cohesion half-width: strictly inside ``(0, pi/2)``."""
    gamma = float(gamma)
    if not 0.0 < gamma < 0.5 * math.pi:
        raise ValueError(f"gamma must lie strictly in (0, pi/2), got {gamma}")
    return gamma


@dataclass(frozen=True)
class NetworkModel:
    """Tree network with frequencies, noise, coupling and sampling period."""

    graph: TreeGraph
    omega: np.ndarray
    noise: NoiseSpec
    kappa: float
    tau: float
    variant: str = "frequency_dependent"

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        if omega.shape != (self.graph.n,):
            raise ValueError(
                f"omega shape {omega.shape} != node count {self.graph.n}"
            )
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        if self.noise.n != self.graph.n:
            raise ValueError(
                f"noise spec covers {self.noise.n} nodes, graph has {self.graph.n}"
            )
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.variant not in VARIANTS:
            raise ValueError(
                f"unknown variant {self.variant!r}, expected one of {VARIANTS}"
            )


@dataclass(frozen=True)
class PhaseState:
    """Phases of all oscillators at one step, wrapped to ``(-pi, pi]``."""

    theta: np.ndarray
    k: int = 0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 1:
            raise ValueError(f"theta must be 1-d, got shape {theta.shape}")
        if np.any(theta <= -np.pi) or np.any(theta > np.pi):
            raise ValueError("phases must already be wrapped to (-pi, pi]")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def wrapped(cls, theta, k: int = 0) -> "PhaseState":
        """Construct from arbitrary angles, wrapping them once."""
        return cls(wrap_angle(theta), k)


def step_theta(model: NetworkModel, theta: np.ndarray, noise_draw) -> np.ndarray:
    """Advance raw phase arrays one step; broadcasts over leading axes.

    ``theta`` and ``noise_draw`` have shape ``(..., n)``; the result is
    wrapped to ``(-pi, pi]``. This is the only integrator in the
    package; everything else layers bookkeeping on top of it.
    """
    graph = model.graph
    rel = theta[..., graph.tails] - theta[..., graph.heads]
    coupling = np.sin(rel) @ graph.incidence_matrix.T
    realized = model.omega + noise_draw
    if model.variant == "frequency_dependent":
        nxt = theta + model.tau * realized * (1.0 - model.kappa * coupling)
    else:
        nxt = theta + model.tau * realized - model.kappa * model.tau * coupling
    return wrap_angle(nxt)


def step(model: NetworkModel, state: PhaseState, noise_draw) -> PhaseState:
    """One update of the network; pure in all of its inputs."""
    noise_draw = np.asarray(noise_draw, dtype=float)
    if noise_draw.shape != state.theta.shape:
        raise ValueError(
            f"noise draw shape {noise_draw.shape} != state shape {state.theta.shape}"
        )
    return PhaseState(step_theta(model, state.theta, noise_draw), state.k + 1)


def relative_phases(graph: TreeGraph, state: PhaseState | np.ndarray) -> np.ndarray:
    """Signed wrapped phase difference ``theta_tail - theta_head`` per edge."""
    theta = state.theta if isinstance(state, PhaseState) else np.asarray(state)
    return wrap_angle(theta[..., graph.tails] - theta[..., graph.heads])


def edge_geodesics(graph: TreeGraph, theta: np.ndarray) -> np.ndarray:
    """Geodesic distance across every edge; shape ``(..., m)``."""
    theta = np.asarray(theta, dtype=float)
    return geodesic_distance(theta[..., graph.tails], theta[..., graph.heads])


def max_relative_geodesic(graph: TreeGraph, state: PhaseState | np.ndarray) -> float:
    """Largest edge-wise geodesic distance of the state."""
    theta = state.theta if isinstance(state, PhaseState) else np.asarray(state)
    return float(np.max(edge_geodesics(graph, theta)))


def in_cohesion_set(
    graph: TreeGraph, state: PhaseState | np.ndarray, gamma: float
) -> bool:
    """Whether every edge-wise geodesic distance is at most ``gamma``."""
    gamma = validate_gamma(gamma)
    return bool(max_relative_geodesic(graph, state) <= gamma)


def drift_values(graph: TreeGraph, theta: np.ndarray, gamma: float) -> np.ndarray:
    """Drift function on raw phase arrays; broadcasts over leading axes."""
    return math.sin(gamma) * np.sum(edge_geodesics(graph, theta), axis=-1)


def drift_function_V(
    graph: TreeGraph, state: PhaseState | np.ndarray, gamma: float
) -> float:
    """Radially unbounded drift function ``sin(gamma) * sum of edge
    geodesic distances``; zero exactly on phase-locked states and
    invariant under global phase shifts."""
    gamma = validate_gamma(gamma)
    theta = state.theta if isinstance(state, PhaseState) else np.asarray(state)
    return float(drift_values(graph, theta, gamma))
