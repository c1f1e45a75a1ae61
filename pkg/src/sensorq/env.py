"""Sensor-placement episode dynamics.

States are 0/1 occupancy vectors over all candidate channels; an action claims
one free channel. Transitions are deterministic. All stochasticity lives in
the per-episode context: a fresh parameter sample and excitation record drawn
at reset, from which one gain matrix prices every action of the episode.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .building import SensorType
from .errors import InvalidActionError, InvalidChannelError, TerminalStateError
from .ground_motion import generate
from .info import GainMatrix, gain_matrix, reward_of_action
from .problem import PlacementProblem


@dataclass(frozen=True)
class SensorConfigState:
    """Occupancy vector plus placement progress for one episode."""

    occupancy: np.ndarray  # 0/1 per channel
    step_count: int
    budget: int

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=np.int8)
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)
        if int(occ.sum()) != self.step_count:
            raise InvalidActionError("occupancy ones-count must equal step_count")
        if not 0 <= self.step_count <= self.budget:
            raise InvalidActionError("step_count must lie in [0, budget]")

    @property
    def done(self) -> bool:
        return self.step_count >= self.budget


@dataclass(frozen=True)
class EpisodeContext:
    """Frozen randomness of one episode: sample, record, and gain matrix."""

    theta_sample: np.ndarray
    excitation: np.ndarray
    gain: GainMatrix


@dataclass(frozen=True)
class Transition:
    """Experience tuple (s, a, s', r, done)."""

    state: SensorConfigState
    action: int
    next_state: SensorConfigState
    reward: float
    done: bool


def initial_state(problem: PlacementProblem) -> SensorConfigState:
    return SensorConfigState(
        occupancy=np.zeros(problem.n_channels, dtype=np.int8),
        step_count=0,
        budget=problem.budget,
    )


def sample_inputs(problem: PlacementProblem, rng_seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw one episode's uncertain inputs: parameter vector, then excitation.

    Every consumer of per-episode randomness goes through here, so equal seeds
    give identical samples everywhere (common random numbers for paired
    comparisons).
    """
    rng = np.random.default_rng(rng_seed)
    theta = problem.prior.sample(rng)
    excitation = generate(problem.excitation, rng)
    return theta, excitation


def reset(problem: PlacementProblem, rng_seed) -> tuple[SensorConfigState, EpisodeContext]:
    """Start an episode: empty configuration plus freshly sampled context.

    The same seed always reproduces the same context. The gain matrix is
    computed eagerly because every reward of the episode reads from it.
    """
    theta, excitation = sample_inputs(problem, rng_seed)
    gain = gain_matrix(problem, theta, excitation)
    return initial_state(problem), EpisodeContext(
        theta_sample=theta, excitation=excitation, gain=gain
    )


def valid_actions(state: SensorConfigState) -> tuple[int, ...]:
    """Indices of unoccupied channels, ascending."""
    if state.done:
        raise TerminalStateError("no actions remain after the last placement")
    return tuple(int(i) for i in np.flatnonzero(state.occupancy == 0))


def step(state: SensorConfigState, ctx: EpisodeContext, action: int) -> Transition:
    """Place one sensor: set the action's bit and price it from the gain matrix."""
    if state.done:
        raise TerminalStateError("episode already placed its full budget")
    action = int(action)
    if not 0 <= action < state.occupancy.shape[0]:
        raise InvalidActionError(f"action {action} out of range")
    if state.occupancy[action]:
        raise InvalidActionError(f"channel {action} already holds a sensor")
    occ = np.array(state.occupancy)
    occ[action] = 1
    next_state = SensorConfigState(
        occupancy=occ, step_count=state.step_count + 1, budget=state.budget
    )
    return Transition(
        state=state,
        action=action,
        next_state=next_state,
        reward=reward_of_action(ctx.gain, action),
        done=next_state.done,
    )


def channel_index(sensor_type, story: int, n_story: int) -> int:
    """Canonical flat index of (type, story) in the full three-type catalog."""
    try:
        t = SensorType(sensor_type)
    except ValueError as exc:
        raise InvalidChannelError(f"unknown sensor type {sensor_type!r}") from exc
    if not 1 <= story <= n_story:
        raise InvalidChannelError(f"story {story} outside [1, {n_story}]")
    return int(t) * n_story + (story - 1)
