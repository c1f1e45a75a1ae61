"""Fisher information and entropy-based information gain for channel outputs.

The chain is: finite-difference output sensitivities at a parameter sample,
Fisher information from the time-summed sensitivity outer products weighted by
inverse noise covariance, and information gain as the log-determinant entropy
change against the Gaussian prior. The per-channel-per-parameter gain matrix
(normalized by its max entry) is what the placement environment turns into
rewards: the reward of a channel is its row sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .building import assemble_matrices
from .errors import (
    InvalidActionError,
    InvalidChannelError,
    InvalidFisherError,
    InvalidParameterError,
)

FD_RELATIVE_STEP = 1e-3  # central-difference step, relative to each parameter

_PSD_TOL = 1e-10


@dataclass(frozen=True)
class ParameterPrior:
    """Independent Gaussian prior over the physical parameters.

    cov is a coefficient of variation, either one value shared by all
    parameters or one per parameter; the implied covariance is
    P0 = diag((cov * mean)^2).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim == 0:
            cov = np.full(mean.shape, float(cov))
        if cov.shape != mean.shape:
            raise InvalidParameterError("cov must be scalar or match mean in length")
        if np.any(mean <= 0.0) or np.any(cov <= 0.0):
            raise InvalidParameterError("prior mean and cov must be strictly positive")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_params(self) -> int:
        return self.mean.shape[0]

    @property
    def variances(self) -> np.ndarray:
        """Diagonal of P0."""
        return (self.cov * self.mean) ** 2

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one parameter vector, redrawing any non-positive entries."""
        std = self.cov * self.mean
        theta = rng.normal(self.mean, std)
        while np.any(theta <= 0.0):
            bad = theta <= 0.0
            theta[bad] = rng.normal(self.mean[bad], std[bad])
        return theta


@dataclass(frozen=True)
class SensitivityTensor:
    """Output derivatives dy/dtheta on the simulation grid.

    dy has shape (k+1 samples, n_channels, n_params), evaluated at one
    parameter point under one excitation record.
    """

    dy: np.ndarray

    def __post_init__(self):
        dy = np.asarray(self.dy, dtype=float)
        if dy.ndim != 3:
            raise InvalidParameterError("sensitivity tensor must be 3-D")
        if not np.all(np.isfinite(dy)):
            raise InvalidParameterError("sensitivity tensor must be finite")
        dy.setflags(write=False)
        object.__setattr__(self, "dy", dy)

    @property
    def n_channels(self) -> int:
        return self.dy.shape[1]

    @property
    def n_params(self) -> int:
        return self.dy.shape[2]


@dataclass(frozen=True)
class GainMatrix:
    """Per-channel, per-parameter information gain (n_channels x n_params)."""

    g: np.ndarray
    normalized: bool

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        if g.ndim != 2 or np.any(g < 0.0):
            raise InvalidParameterError("gain matrix must be 2-D and nonnegative")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def n_channels(self) -> int:
        return self.g.shape[0]


def sensitivities(problem, theta_hat, excitation, h_rel: float = FD_RELATIVE_STEP) -> SensitivityTensor:
    """Central-difference output sensitivities at theta_hat.

    Each parameter column costs two full simulations sharing the same
    excitation record; all 2*n_params perturbed models run as one batch. If a
    perturbation would push a parameter non-positive, the step shrinks once
    (x0.1) before giving up.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    n_params = theta_hat.shape[0]
    deltas = np.empty(n_params)
    plus, minus = [], []
    for j in range(n_params):
        delta = h_rel * abs(theta_hat[j])
        if theta_hat[j] - delta <= 0.0:
            delta *= 0.1
        if delta <= 0.0 or theta_hat[j] - delta <= 0.0:
            raise InvalidParameterError(
                f"cannot perturb parameter {j} around {theta_hat[j]!r}"
            )
        deltas[j] = delta
        for sign, bucket in ((1.0, plus), (-1.0, minus)):
            theta = theta_hat.copy()
            theta[j] += sign * delta
            bucket.append(problem.params_for(theta))
    models = [assemble_matrices(p) for p in plus + minus]
    outputs = problem.simulate_models(models, excitation)
    y_plus = outputs[:, :n_params, :]  # (k+1, n_params, n_channels)
    y_minus = outputs[:, n_params:, :]
    dy = (y_plus - y_minus) / (2.0 * deltas[None, :, None])
    return SensitivityTensor(dy=dy.transpose(0, 2, 1))


def fisher_scalar(dy_col, noise_variance: float) -> float:
    """Single-channel, single-parameter Fisher information."""
    if noise_variance <= 0.0:
        raise InvalidParameterError("noise_variance must be > 0")
    dy_col = np.asarray(dy_col, dtype=float)
    return float(np.sum(dy_col * dy_col) / noise_variance)


def fisher_matrix(sens: SensitivityTensor, channels, noise_variances) -> np.ndarray:
    """Full Fisher matrix for a channel subset.

    noise_variances holds the diagonal of R for the complete channel set;
    the subset indexes into it. Contributions accumulate channel by channel
    in ascending index order, which makes the additivity over disjoint
    subsets explicit.
    """
    channels = sorted({int(c) for c in channels})
    if not channels:
        raise InvalidParameterError("channel subset must be non-empty")
    noise_variances = np.asarray(noise_variances, dtype=float)
    n_params = sens.n_params
    fisher = np.zeros((n_params, n_params))
    for c in channels:
        if not 0 <= c < sens.n_channels:
            raise InvalidChannelError(f"channel {c} out of range")
        dy_c = sens.dy[:, c, :]  # (k+1, n_params)
        fisher += (dy_c.T @ dy_c) / noise_variances[c]
    return fisher


def info_gain(fisher, prior_cov) -> float:
    """Entropy reduction 0.5*[ln det(F + P0^-1) - ln det(P0^-1)] in nats.

    fisher may be a scalar or an n x n PSD matrix; prior_cov may be a scalar
    variance, a vector of variances (diagonal P0), or a full covariance
    matrix. Computed in the whitened form 0.5*ln det(I + P0^{1/2} F P0^{1/2})
    to keep determinants well scaled.
    """
    fisher = np.asarray(fisher, dtype=float)
    prior_cov = np.asarray(prior_cov, dtype=float)
    if fisher.ndim == 0:
        f = float(fisher)
        if f < -_PSD_TOL * max(1.0, abs(f)):
            raise InvalidFisherError(f"negative scalar Fisher information {f!r}")
        p0 = float(prior_cov)
        return max(0.0, 0.5 * float(np.log1p(max(f, 0.0) * p0)))

    fisher = 0.5 * (fisher + fisher.T)
    min_eig = float(np.linalg.eigvalsh(fisher)[0])
    scale = max(1.0, float(np.linalg.norm(fisher)))
    if min_eig < -_PSD_TOL * scale:
        raise InvalidFisherError(f"Fisher matrix indefinite (min eigenvalue {min_eig!r})")
    n = fisher.shape[0]
    if prior_cov.ndim < 2:
        sqrt_p0 = np.sqrt(np.broadcast_to(prior_cov, (n,)))
        whitened = sqrt_p0[:, None] * fisher * sqrt_p0[None, :]
    else:
        chol = np.linalg.cholesky(prior_cov)
        whitened = chol.T @ fisher @ chol
    sign, logdet = np.linalg.slogdet(np.eye(n) + whitened)
    if sign <= 0.0:
        raise InvalidFisherError("log-determinant of I + P0^(1/2) F P0^(1/2) not positive")
    return max(0.0, 0.5 * float(logdet))


def gain_matrix_from_sensitivities(sens: SensitivityTensor, noise_variances, prior: ParameterPrior) -> GainMatrix:
    """Entrywise gain matrix: entry (j, k) treats channel j alone as informative
    about parameter k alone, then the whole matrix is normalized by its max."""
    noise_variances = np.asarray(noise_variances, dtype=float)
    fisher = np.einsum("tck,tck->ck", sens.dy, sens.dy) / noise_variances[:, None]
    gains = 0.5 * np.log1p(fisher * prior.variances[None, :])
    peak = float(gains.max()) if gains.size else 0.0
    if peak > 0.0:
        gains = gains / peak
    return GainMatrix(g=gains, normalized=True)


def gain_matrix(problem, theta_sample, excitation) -> GainMatrix:
    """Episode gain matrix at one parameter sample under one excitation."""
    sens = sensitivities(problem, theta_sample, excitation)
    return gain_matrix_from_sensitivities(sens, problem.noise_variances, problem.prior)


def reward_of_action(gain: GainMatrix, action: int) -> float:
    """Row sum of the normalized gain matrix for one channel; in [0, n_params]."""
    if not gain.normalized:
        raise InvalidFisherError("reward requires a normalized gain matrix")
    if not 0 <= int(action) < gain.n_channels:
        raise InvalidActionError(
            f"action {action} outside [0, {gain.n_channels})"
        )
    return float(np.sum(gain.g[int(action)]))
