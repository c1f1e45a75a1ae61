"""Stochastic ground-acceleration synthesis through a Kanai-Tajimi filter.

Gaussian white noise drives the second-order shaping filter

    F(s) = (2 zg wg s + wg^2) / (s^2 + 2 zg wg s + wg^2)

realized in controllable canonical form and discretized with the same
zero-order hold as the structural simulator. Each record is rescaled so its
peak absolute value hits the target PGA exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailedError, InvalidParameterError
from .linsys import propagate, zoh_discretize


@dataclass(frozen=True)
class KanaiTajimiParams:
    """Shaping-filter and record parameters for one excitation model."""

    omega_g: float  # rad/s, filter resonance
    zeta_g: float  # filter damping ratio
    duration: float  # s
    dt: float  # s
    target_pga: float  # m/s^2
    noise_std: float = 1.0  # driving-noise std; amplitude is irrelevant after PGA scaling

    def __post_init__(self):
        if self.omega_g <= 0.0:
            raise InvalidParameterError("omega_g must be > 0")
        if not 0.0 < self.zeta_g < 1.0:
            raise InvalidParameterError("zeta_g must be in (0, 1)")
        if self.dt <= 0.0:
            raise InvalidParameterError("dt must be > 0")
        if self.duration < self.dt:
            raise InvalidParameterError("duration must be >= dt")
        if self.target_pga <= 0.0:
            raise InvalidParameterError("target_pga must be > 0")
        if self.noise_std <= 0.0:
            raise InvalidParameterError("noise_std must be > 0")

    @property
    def n_steps(self) -> int:
        """Number of time steps k; records have k+1 samples."""
        return int(round(self.duration / self.dt))


def _state_space(params: KanaiTajimiParams):
    wg, zg = params.omega_g, params.zeta_g
    a = np.array([[0.0, 1.0], [-wg**2, -2.0 * zg * wg]])
    b = np.array([0.0, 1.0])
    c = np.array([wg**2, 2.0 * zg * wg])
    return a, b, c


def filter_frequency_response(params: KanaiTajimiParams, omega):
    """Evaluate F(j*omega) of the shaping filter; accepts scalars or arrays."""
    s = 1j * np.asarray(omega, dtype=float)
    wg, zg = params.omega_g, params.zeta_g
    num = 2.0 * zg * wg * s + wg**2
    den = s**2 + 2.0 * zg * wg * s + wg**2
    return num / den


def filter_time_history(params: KanaiTajimiParams, noise) -> np.ndarray:
    """Pass a given driving-noise sequence through the discretized filter.

    noise holds one sample per time step (k values); the output has k+1
    samples starting from rest, so the record is a linear function of the
    noise sequence. No PGA scaling is applied here.
    """
    noise = np.asarray(noise, dtype=float)
    if noise.ndim != 1 or noise.shape[0] != params.n_steps:
        raise InvalidParameterError(
            f"noise must hold {params.n_steps} samples, got shape {noise.shape}"
        )
    a, b, c = _state_space(params)
    a_d, b_d = zoh_discretize(a, b, params.dt)
    # propagate applies input sample i over step i; pad so the last step is driven
    states = propagate(a_d, b_d, np.append(noise, 0.0))
    return states @ c


def scale_to_pga(record, target_pga: float) -> np.ndarray:
    """Rescale a record so its peak absolute value equals target_pga exactly.

    Dividing by the peak first makes the extreme sample exactly +-1, so the
    scaled maximum hits target_pga bit-exactly.
    """
    record = np.asarray(record, dtype=float)
    peak = float(np.max(np.abs(record))) if record.size else 0.0
    if peak == 0.0:
        raise GenerationFailedError("pre-scaled record is identically zero")
    return (record / peak) * target_pga


def generate(params: KanaiTajimiParams, rng_seed) -> np.ndarray:
    """Draw one ground-acceleration record, scaled to the target PGA.

    Deterministic for a fixed seed. rng_seed may be anything accepted by
    numpy.random.default_rng, including an existing Generator.
    """
    rng = np.random.default_rng(rng_seed)
    noise = rng.standard_normal(params.n_steps) * params.noise_std
    return scale_to_pga(filter_time_history(params, noise), params.target_pga)
