"""Shear-building state-space model, modal analysis, and response simulation.

The structure is the classic lumped-mass shear building: story masses chained
by lateral story stiffnesses and viscous dampers, excited by rigid-base ground
acceleration. States are stacked as [relative displacements; relative
velocities], so for n stories the model has 2n states:

    x_dot = A x + B ug_dd,   A = [[0, I], [-M^-1 K, -M^-1 C]],  B = [0; -1]

Measurement channels are rows of an observation matrix over that state vector;
absolute floor acceleration is expressed in relative coordinates
(x_abs_dd = -M^-1 (K x + C x_dot)), so no channel has input feedthrough.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.linalg import eigh

from .errors import InvalidChannelError, InvalidParameterError, SimulationDivergedError
from .linsys import propagate_many, zoh_discretize


class SensorType(IntEnum):
    """Heterogeneous sensor families, in canonical channel-block order."""

    ACCEL = 0
    DRIFT_VELOCITY = 1
    DRIFT = 2

    @property
    def tag(self) -> str:
        return _TYPE_TAGS[self]


_TYPE_TAGS = {
    SensorType.ACCEL: "accel",
    SensorType.DRIFT_VELOCITY: "drift-velocity",
    SensorType.DRIFT: "drift",
}


@dataclass(frozen=True)
class BuildingParams:
    """Story-wise physical parameters of the shear building (SI units).

    stiffness and damping are the uncertain parameters; masses are fixed,
    calibrated constants.
    """

    stiffness: np.ndarray  # N/m, per story
    damping: np.ndarray  # N*s/m, per story
    mass: np.ndarray  # kg, per story

    def __post_init__(self):
        for name in ("stiffness", "damping", "mass"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.stiffness.shape[0]
        if n < 1 or self.damping.shape[0] != n or self.mass.shape[0] != n:
            raise InvalidParameterError(
                "stiffness, damping, and mass must share one length >= 1"
            )
        for name in ("stiffness", "damping", "mass"):
            vals = getattr(self, name)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
                raise InvalidParameterError(f"{name} entries must be strictly positive")

    @property
    def n_story(self) -> int:
        return self.stiffness.shape[0]


@dataclass(frozen=True)
class StateSpaceModel:
    """Continuous-time model x_dot = A x + B ug_dd with 2*n_story states."""

    a: np.ndarray
    b: np.ndarray
    n_story: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class ChannelSpec:
    """One candidate measurement channel: sensor family, story, noise level."""

    sensor_type: SensorType
    location: int  # story index, 1-based
    noise_variance: float  # m^2/s^4, m^2/s^2 or m^2 depending on the family

    def __post_init__(self):
        if self.noise_variance <= 0.0:
            raise InvalidChannelError("noise_variance must be > 0")
        if self.location < 1:
            raise InvalidChannelError("story location is 1-based")

    @property
    def label(self) -> str:
        return f"{self.sensor_type.tag}:story{self.location}"


@dataclass(frozen=True)
class ResponseRecord:
    """Noise-free channel outputs on the simulation time grid."""

    y: np.ndarray  # (k+1 samples, n_channels)
    dt: float


def _chain_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Tridiagonal story-chain matrix shared by K and C assembly."""
    n = coeffs.shape[0]
    mat = np.zeros((n, n))
    for i in range(n):
        mat[i, i] = coeffs[i] + (coeffs[i + 1] if i + 1 < n else 0.0)
        if i + 1 < n:
            mat[i, i + 1] = -coeffs[i + 1]
            mat[i + 1, i] = -coeffs[i + 1]
    return mat


def stiffness_matrix(stiffness) -> np.ndarray:
    """Assemble the tridiagonal story stiffness matrix K."""
    stiffness = np.atleast_1d(np.asarray(stiffness, dtype=float))
    if np.any(stiffness <= 0.0):
        raise InvalidParameterError("stiffness entries must be strictly positive")
    return _chain_matrix(stiffness)


def assemble_matrices(params: BuildingParams) -> StateSpaceModel:
    """Build the continuous state-space model from physical parameters.

    K and C are symmetric tridiagonal chain matrices; the input column applies
    unit ground acceleration to every story (B = [0; -1]).
    """
    n = params.n_story
    k_mat = _chain_matrix(params.stiffness)
    c_mat = _chain_matrix(params.damping)
    m_inv = 1.0 / params.mass

    a = np.zeros((2 * n, 2 * n))
    a[:n, n:] = np.eye(n)
    a[n:, :n] = -m_inv[:, None] * k_mat
    a[n:, n:] = -m_inv[:, None] * c_mat

    b = np.zeros(2 * n)
    b[n:] = -1.0
    return StateSpaceModel(a=a, b=b, n_story=n)


def calibrate_uniform_mass(stiffness, target_period: float) -> float:
    """Uniform story mass that sets the fundamental period to target_period.

    With M = m*I the undamped eigenproblem gives w1^2 = lambda_1(K)/m, so
    m = lambda_1(K) * (target_period / 2 pi)^2.
    """
    if target_period <= 0.0:
        raise InvalidParameterError("target_period must be > 0")
    k_mat = stiffness_matrix(stiffness)
    lam_min = eigh(k_mat, eigvals_only=True)[0]
    omega1 = 2.0 * np.pi / target_period
    return float(lam_min / omega1**2)


def modal_properties(model: StateSpaceModel) -> list[tuple[float, float]]:
    """(natural frequency rad/s, damping ratio) per mode, ascending in frequency.

    Complex conjugate eigenvalue pairs collapse to one oscillatory mode;
    non-oscillatory (real) eigenvalues are reported with ratio 1.
    """
    eigs = np.linalg.eigvals(model.a)
    modes = []
    tol = 1e-9 * max(1.0, float(np.max(np.abs(eigs))))
    for lam in eigs:
        if lam.imag < -tol:
            continue  # conjugate partner already counted
        freq = float(abs(lam))
        if lam.imag <= tol:
            modes.append((freq, 1.0))
        else:
            ratio = -float(lam.real) / freq if freq > 0.0 else 1.0
            modes.append((freq, ratio))
    modes.sort(key=lambda m: m[0])
    return modes


def observation_matrix(model: StateSpaceModel, channels) -> np.ndarray:
    """Stack channel rows into the observation matrix C (len(channels) x 2n)."""
    n = model.n_story
    rows = np.zeros((len(channels), 2 * n))
    for idx, ch in enumerate(channels):
        if not 1 <= ch.location <= n:
            raise InvalidChannelError(
                f"story {ch.location} outside [1, {n}] for {ch.sensor_type.name}"
            )
        story = ch.location - 1
        if ch.sensor_type is SensorType.ACCEL:
            rows[idx] = model.a[n + story]
        elif ch.sensor_type is SensorType.DRIFT_VELOCITY:
            rows[idx, n + story] = 1.0
            if story > 0:
                rows[idx, n + story - 1] = -1.0
        elif ch.sensor_type is SensorType.DRIFT:
            rows[idx, story] = 1.0
            if story > 0:
                rows[idx, story - 1] = -1.0
        else:
            raise InvalidChannelError(f"unknown sensor type {ch.sensor_type!r}")
    return rows


def channel_row(params: BuildingParams, ch: ChannelSpec) -> np.ndarray:
    """Observation row of a single channel for the given building."""
    return observation_matrix(assemble_matrices(params), [ch])[0]


def simulate(model: StateSpaceModel, excitation, dt: float, channels) -> ResponseRecord:
    """Simulate noise-free channel outputs under ground acceleration.

    Zero initial state; the state is advanced by the exact zero-order-hold
    discretization of the model, and every sample of the excitation grid maps
    to one output row.
    """
    y = simulate_ensemble([model], excitation, dt, [channels])[:, 0, :]
    return ResponseRecord(y=y, dt=float(dt))


def simulate_ensemble(models, excitation, dt: float, channels_per_model) -> np.ndarray:
    """Simulate several models under one shared excitation record.

    All models must have the same state dimension and channel count. Returns
    outputs with shape (k+1, len(models), n_channels). This is the workhorse
    behind finite-difference sensitivity passes, where a whole perturbation
    stack shares a single input time history.
    """
    if dt <= 0.0:
        raise InvalidParameterError("dt must be > 0")
    u = np.asarray(excitation, dtype=float)
    if u.ndim != 1 or u.shape[0] < 1:
        raise InvalidParameterError("excitation must be a non-empty 1-D record")
    if not np.all(np.isfinite(u)):
        raise InvalidParameterError("excitation must be finite")

    discretized = [zoh_discretize(m.a, m.b, dt) for m in models]
    a_d = np.stack([pair[0] for pair in discretized])
    b_d = np.stack([pair[1] for pair in discretized])
    c_stack = np.stack(
        [observation_matrix(m, chans) for m, chans in zip(models, channels_per_model)]
    )

    states = propagate_many(a_d, b_d, u)  # (k+1, q, 2n)
    if not np.all(np.isfinite(states[-1])):
        raise SimulationDivergedError("state recursion produced non-finite values")
    return np.einsum("tqn,qcn->tqc", states, c_stack)
