"""Double Q-network agent built directly on numpy.

Two identically shaped fully connected networks (rectifier hidden layer,
linear output) drive learning: the frequently updated local network picks
actions and the greedy action for bootstrapping, while the periodically
synchronized target network values that action. Experience replay decorrelates
the minibatches; plain stochastic gradient descent keeps every update
bit-reproducible for a fixed seed.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .env import Transition, reset, step, valid_actions
from .errors import InvalidParameterError, TerminalStateError, TrainingDivergedError
from .problem import PlacementProblem


@dataclass
class QNetwork:
    """Three-layer value network: rectifier after layer 1, identity after layer 2.

    Weight rows follow the usual convention q = W2 relu(W1 s + b1) + b2, so
    w1 has shape (hidden, n_in) and w2 (n_out, hidden).
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @classmethod
    def initialize(cls, layer_sizes, rng: np.random.Generator) -> "QNetwork":
        """Scaled uniform init, +-sqrt(6 / (fan_in + fan_out)), zero biases."""
        n_in, hidden, n_out = layer_sizes
        lim1 = np.sqrt(6.0 / (n_in + hidden))
        lim2 = np.sqrt(6.0 / (hidden + n_out))
        return cls(
            w1=rng.uniform(-lim1, lim1, size=(hidden, n_in)),
            b1=np.zeros(hidden),
            w2=rng.uniform(-lim2, lim2, size=(n_out, hidden)),
            b2=np.zeros(n_out),
        )

    @property
    def layer_sizes(self) -> list[int]:
        return [self.w1.shape[1], self.w1.shape[0], self.w2.shape[0]]

    def copy(self) -> "QNetwork":
        return QNetwork(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())


@dataclass
class TrainConfig:
    """Hyperparameters of one training run; defaults match the reference setup."""

    episodes: int = 5500
    gamma: float = 0.95
    epsilon_start: float = 1.0
    epsilon_decay: float = 0.999
    epsilon_floor: float = 0.01
    batch_size: int = 32
    learning_rate: float = 1e-3
    target_sync_every: int = 50
    replay_capacity: int = 2000
    hidden_size: int = 6
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidParameterError("gamma must lie in [0, 1]")
        for name in ("epsilon_start", "epsilon_decay", "epsilon_floor"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1]")
        if self.batch_size < 1 or self.batch_size > self.replay_capacity:
            raise InvalidParameterError("batch_size must lie in [1, replay_capacity]")
        if self.episodes < 0 or self.target_sync_every < 1 or self.hidden_size < 1:
            raise InvalidParameterError("episodes, target_sync_every, hidden_size out of range")
        if self.learning_rate <= 0.0:
            raise InvalidParameterError("learning_rate must be > 0")


class ReplayBuffer:
    """Fixed-capacity ring buffer of transitions; oldest entries evicted first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise InvalidParameterError("capacity must be >= 1")
        self.capacity = capacity
        self._data: list[Transition] = []
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._data)

    def push(self, transition: Transition) -> None:
        if len(self._data) < self.capacity:
            self._data.append(transition)
        else:
            self._data[self._cursor] = transition
        self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        idx = rng.choice(len(self._data), size=batch_size, replace=False)
        return [self._data[i] for i in idx]


@dataclass
class EpisodeStats:
    """One reward-history row."""

    episode: int
    total_reward: float
    epsilon: float
    loss_mean: float


def forward(net: QNetwork, state) -> np.ndarray:
    """Q-values for one state vector or a stacked (batch, n_in) array."""
    s = np.asarray(state, dtype=float)
    if s.shape[-1] != net.w1.shape[1]:
        raise InvalidParameterError(
            f"state length {s.shape[-1]} != input size {net.w1.shape[1]}"
        )
    hidden = np.maximum(s @ net.w1.T + net.b1, 0.0)
    return hidden @ net.w2.T + net.b2


def act(net_local: QNetwork, state, valid, epsilon: float, rng: np.random.Generator | None = None) -> int:
    """Epsilon-greedy action restricted to the valid set.

    Greedy ties break toward the lowest channel index. A generator is only
    needed when epsilon > 0.
    """
    valid = sorted(int(v) for v in valid)
    if not valid:
        raise TerminalStateError("cannot act: no valid actions")
    if epsilon > 0.0:
        if rng is None:
            raise InvalidParameterError("epsilon > 0 requires an rng")
        if rng.random() < epsilon:
            return valid[rng.integers(len(valid))]
    q = forward(net_local, state)
    return valid[int(np.argmax(q[valid]))]


def td_target(net_target: QNetwork, net_local: QNetwork, tr: Transition, gamma: float) -> float:
    """Double-Q bootstrap target for one transition.

    The local network chooses the follow-up action among the channels still
    free in the next state; the target network values it.
    """
    if tr.done:
        return float(tr.reward)
    occ = tr.next_state.occupancy
    free = np.flatnonzero(occ == 0)
    q_local = forward(net_local, occ)
    best = free[int(np.argmax(q_local[free]))]
    q_target = forward(net_target, occ)
    return float(tr.reward + gamma * q_target[best])


def _batch_targets(net_target: QNetwork, net_local: QNetwork, batch, gamma: float) -> np.ndarray:
    """Vectorized td_target over a batch (same math, one matmul per net)."""
    next_states = np.stack([tr.next_state.occupancy for tr in batch]).astype(float)
    rewards = np.array([tr.reward for tr in batch])
    live = np.array([not tr.done for tr in batch], dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):  # divergence checked by callers
        q_local = forward(net_local, next_states)
        q_local = np.where(next_states == 0, q_local, -np.inf)
        best = np.argmax(q_local, axis=1)
        q_target = forward(net_target, next_states)
        boot = q_target[np.arange(len(batch)), best]
        return rewards + gamma * live * boot


def loss_and_gradients(net: QNetwork, states: np.ndarray, actions: np.ndarray, targets: np.ndarray):
    """Mean-squared TD error and its backpropagated parameter gradients.

    Only the output component of each taken action carries error signal; the
    targets are treated as constants.
    """
    states = np.asarray(states, dtype=float)
    n = states.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):  # divergence checked by callers
        z1 = states @ net.w1.T + net.b1
        hidden = np.maximum(z1, 0.0)
        q = hidden @ net.w2.T + net.b2
        pred = q[np.arange(n), actions]
        err = pred - targets
        loss = float(np.mean(err * err))

        dq = np.zeros_like(q)
        dq[np.arange(n), actions] = 2.0 * err / n
        grad_w2 = dq.T @ hidden
        grad_b2 = dq.sum(axis=0)
        dh = (dq @ net.w2) * (z1 > 0.0)
        grad_w1 = dh.T @ states
        grad_b1 = dh.sum(axis=0)
    return loss, (grad_w1, grad_b1, grad_w2, grad_b2)


def train_step(net_local: QNetwork, net_target: QNetwork, batch, config: TrainConfig) -> float:
    """One SGD update of the local network on a replay minibatch."""
    if not batch:
        raise InvalidParameterError("batch must be non-empty")
    states = np.stack([tr.state.occupancy for tr in batch]).astype(float)
    actions = np.array([tr.action for tr in batch])
    targets = _batch_targets(net_target, net_local, batch, config.gamma)
    loss, (g_w1, g_b1, g_w2, g_b2) = loss_and_gradients(net_local, states, actions, targets)
    if not np.isfinite(loss):
        raise TrainingDivergedError(f"non-finite training loss {loss!r}")
    lr = config.learning_rate
    net_local.w1 -= lr * g_w1
    net_local.b1 -= lr * g_b1
    net_local.w2 -= lr * g_w2
    net_local.b2 -= lr * g_b2
    return loss


def sync_target(net_local: QNetwork, net_target: QNetwork) -> QNetwork:
    """Hard-copy local weights into the target network."""
    if net_local.layer_sizes != net_target.layer_sizes:
        raise InvalidParameterError(
            f"architecture mismatch {net_local.layer_sizes} vs {net_target.layer_sizes}"
        )
    net_target.w1[...] = net_local.w1
    net_target.b1[...] = net_local.b1
    net_target.w2[...] = net_local.w2
    net_target.b2[...] = net_local.b2
    return net_target


def episode_seeds(rng_seed: int, episodes: int) -> list[np.random.SeedSequence]:
    """Independent, reproducible per-episode seeds derived from one master seed."""
    return np.random.SeedSequence(rng_seed).spawn(episodes)


def _iter_contexts(problem: PlacementProblem, seeds, threads: int):
    """Yield (state, context) pairs in episode order, optionally prefetched.

    Contexts depend only on (problem, seed), so worker-pool evaluation cannot
    change results, only wall time.
    """
    if threads <= 1:
        for seed in seeds:
            yield reset(problem, seed)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        seed_iter = iter(seeds)
        for seed in itertools.islice(seed_iter, 2 * threads):
            pending.append(pool.submit(reset, problem, seed))
        while pending:
            ready = pending.popleft()
            nxt = next(seed_iter, None)
            if nxt is not None:
                pending.append(pool.submit(reset, problem, nxt))
            yield ready.result()


def train(
    problem: PlacementProblem,
    config: TrainConfig,
    threads: int = 1,
    step_callback=None,
):
    """Run the full double-Q training loop.

    Each episode draws a fresh context, steps the placement budget with
    epsilon-greedy actions, stores every transition, and performs one gradient
    step per environment step once the replay buffer can fill a batch. Epsilon
    decays per episode; the target network hard-syncs on a fixed cadence.

    Returns (trained local network, per-episode EpisodeStats list). On
    divergence the partial history rides on the raised error.
    """
    rng = np.random.default_rng(config.rng_seed)
    sizes = [problem.n_channels, config.hidden_size, problem.n_channels]
    net_local = QNetwork.initialize(sizes, rng)
    net_target = net_local.copy()
    buffer = ReplayBuffer(config.replay_capacity)
    history: list[EpisodeStats] = []
    epsilon = config.epsilon_start

    contexts = _iter_contexts(problem, episode_seeds(config.rng_seed, config.episodes), threads)
    try:
        for episode, (state, ctx) in enumerate(contexts):
            total = 0.0
            losses = []
            while not state.done:
                action = act(net_local, state.occupancy, valid_actions(state), epsilon, rng)
                tr = step(state, ctx, action)
                buffer.push(tr)
                if len(buffer) >= config.batch_size:
                    losses.append(train_step(net_local, net_target, buffer.sample(config.batch_size, rng), config))
                if step_callback is not None:
                    step_callback(episode, tr)
                total += tr.reward
                state = tr.next_state
            history.append(
                EpisodeStats(
                    episode=episode,
                    total_reward=total,
                    epsilon=epsilon,
                    loss_mean=float(np.mean(losses)) if losses else float("nan"),
                )
            )
            epsilon = max(config.epsilon_floor, epsilon * config.epsilon_decay)
            if (episode + 1) % config.target_sync_every == 0:
                sync_target(net_local, net_target)
    except TrainingDivergedError as exc:
        raise TrainingDivergedError(str(exc), history=history) from None
    return net_local, history


def greedy_policy(net: QNetwork, problem: PlacementProblem) -> list[int]:
    """Channels chosen by one masked, fully greedy rollout (epsilon = 0)."""
    occupancy = np.zeros(problem.n_channels, dtype=np.int8)
    chosen = []
    for _ in range(problem.budget):
        free = [int(i) for i in np.flatnonzero(occupancy == 0)]
        action = act(net, occupancy, free, 0.0)
        occupancy[action] = 1
        chosen.append(action)
    return chosen


def save_checkpoint(net: QNetwork, config: TrainConfig, path) -> None:
    """Write the network and its training configuration as stable JSON."""
    payload = {
        "layer_sizes": net.layer_sizes,
        "weights": [net.w1.ravel().tolist(), net.w2.ravel().tolist()],
        "biases": [net.b1.tolist(), net.b2.tolist()],
        "train_config": asdict(config),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_checkpoint(path) -> tuple[QNetwork, TrainConfig]:
    payload = json.loads(Path(path).read_text())
    n_in, hidden, n_out = payload["layer_sizes"]
    net = QNetwork(
        w1=np.array(payload["weights"][0]).reshape(hidden, n_in),
        b1=np.array(payload["biases"][0]),
        w2=np.array(payload["weights"][1]).reshape(n_out, hidden),
        b2=np.array(payload["biases"][1]),
    )
    return net, TrainConfig(**payload["train_config"])
