"""Independent baselines for verifying a learned placement policy.

Everything here is Monte Carlo over freshly sampled episode contexts with
common random numbers: the same seeds produce the same parameter samples and
excitation records across channels, configurations, and alternative scoring
rules, so comparisons are paired.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .env import sample_inputs
from .errors import InvalidParameterError
from .info import fisher_matrix, gain_matrix, info_gain, sensitivities
from .problem import PlacementProblem

DEFAULT_ORACLE_SAMPLES = 500


@dataclass(frozen=True)
class ChannelScoreTable:
    """Per-channel Monte Carlo estimate of the expected one-step reward."""

    mean: np.ndarray
    stderr: np.ndarray
    n_samples: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        stderr = np.asarray(self.stderr, dtype=float)
        if mean.shape != stderr.shape or mean.ndim != 1:
            raise InvalidParameterError("mean and stderr must be matching vectors")
        if np.any(stderr < 0.0):
            raise InvalidParameterError("standard errors must be nonnegative")
        mean.setflags(write=False)
        stderr.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "stderr", stderr)


def sample_seeds(rng_seed, n_samples: int) -> list[np.random.SeedSequence]:
    """Shared context seeds so different estimators pair their samples."""
    return np.random.SeedSequence(rng_seed).spawn(n_samples)


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def reward_rows(problem: PlacementProblem, n_samples: int, rng_seed, threads: int = 1) -> np.ndarray:
    """Row sums of the normalized gain matrix per sampled context.

    Shape (n_samples, n_channels); row i is the reward each channel would earn
    in the episode seeded by sample i.
    """
    if n_samples < 1:
        raise InvalidParameterError("n_samples must be >= 1")

    def one(seed):
        theta, excitation = sample_inputs(problem, seed)
        return gain_matrix(problem, theta, excitation).g.sum(axis=1)

    rows = _map_ordered(one, sample_seeds(rng_seed, n_samples), threads)
    return np.stack(rows)


def expected_rewards(problem: PlacementProblem, n_samples: int, rng_seed, threads: int = 1) -> ChannelScoreTable:
    """Monte Carlo mean and standard error of each channel's reward."""
    rows = reward_rows(problem, n_samples, rng_seed, threads)
    mean = rows.mean(axis=0)
    if n_samples > 1:
        stderr = rows.std(axis=0, ddof=1) / np.sqrt(n_samples)
    else:
        stderr = np.zeros_like(mean)
    return ChannelScoreTable(mean=mean, stderr=stderr, n_samples=n_samples)


def top_m_configuration(table: ChannelScoreTable, m: int) -> list[int]:
    """The m channels with the highest mean reward, ties to the lowest index.

    Under a configuration-independent reward this is exactly the
    return-maximizing configuration. Returned sorted by channel index.
    """
    n = table.mean.shape[0]
    if not 0 <= m <= n:
        raise InvalidParameterError(f"m must lie in [0, {n}]")
    order = sorted(range(n), key=lambda c: (-table.mean[c], c))
    return sorted(order[:m])


def configuration_value(rows: np.ndarray, channels) -> float:
    """Expected total episode reward of a configuration under shared samples."""
    channels = list(channels)
    return float(rows[:, channels].sum(axis=1).mean()) if channels else 0.0


def exhaustive_best_configuration(rows: np.ndarray, m: int) -> tuple[list[int], float]:
    """Enumerate all size-m configurations and return the best with its value."""
    from itertools import combinations

    n = rows.shape[1]
    best, best_value = None, -np.inf
    for combo in combinations(range(n), m):
        value = configuration_value(rows, combo)
        if value > best_value:
            best, best_value = list(combo), value
    return best, best_value


def greedy_full_fisher(
    problem: PlacementProblem,
    m: int,
    n_samples: int,
    rng_seed,
    threads: int = 1,
    return_marginal_gains: bool = False,
):
    """Greedy channel selection on expected full-matrix information gain.

    At each round the channel maximizing the mean marginal gain
    E[dH(config + c) - dH(config)] joins the configuration, where dH uses the
    complete n_theta x n_theta Fisher matrix and the full prior covariance.
    All rounds share one set of sampled contexts.
    """
    if not 0 <= m <= problem.n_channels:
        raise InvalidParameterError(f"m must lie in [0, {problem.n_channels}]")
    noise = problem.noise_variances
    prior_var = problem.prior.variances

    def channel_fishers(seed):
        theta, excitation = sample_inputs(problem, seed)
        sens = sensitivities(problem, theta, excitation)
        return np.stack(
            [fisher_matrix(sens, [c], noise) for c in range(problem.n_channels)]
        )

    per_channel = _map_ordered(channel_fishers, sample_seeds(rng_seed, n_samples), threads)

    n_theta = problem.n_theta
    running = [np.zeros((n_theta, n_theta)) for _ in range(n_samples)]
    base = np.zeros(n_samples)
    selected: list[int] = []
    marginal_gains: list[float] = []
    for _ in range(m):
        best_channel, best_gain = None, -np.inf
        for c in range(problem.n_channels):
            if c in selected:
                continue
            gain = np.mean(
                [
                    info_gain(running[s] + per_channel[s][c], prior_var) - base[s]
                    for s in range(n_samples)
                ]
            )
            if gain > best_gain:
                best_channel, best_gain = c, float(gain)
        selected.append(best_channel)
        marginal_gains.append(best_gain)
        for s in range(n_samples):
            running[s] = running[s] + per_channel[s][best_channel]
            base[s] = info_gain(running[s], prior_var)
    if return_marginal_gains:
        return selected, marginal_gains
    return selected
