"""Immutable definition of one sensor-placement problem instance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .building import BuildingParams, ChannelSpec, SensorType, simulate_ensemble
from .errors import InvalidChannelError, InvalidParameterError
from .ground_motion import KanaiTajimiParams
from .info import ParameterPrior


@dataclass(frozen=True)
class PlacementProblem:
    """Everything a placement episode needs, fixed for the whole run.

    building carries the mean parameters and the fixed, calibrated masses.
    The uncertain parameter vector is theta = [stiffness..., damping...]
    (length 2 * n_story). channels are ordered type-major: all stories of the
    lowest-ranked sensor type first, then the next type.
    """

    building: BuildingParams
    channels: tuple[ChannelSpec, ...]
    prior: ParameterPrior
    excitation: KanaiTajimiParams
    budget: int

    def __post_init__(self):
        n = self.building.n_story
        object.__setattr__(self, "channels", tuple(self.channels))
        expected = [
            ChannelSpec(ch.sensor_type, story, ch.noise_variance)
            for ch in self._catalog()
            for story in range(1, n + 1)
        ]
        if list(self.channels) != expected:
            raise InvalidChannelError(
                "channels must enumerate every story of each sensor type in "
                "canonical type-major order; use PlacementProblem.build"
            )
        if self.prior.n_params != 2 * n:
            raise InvalidParameterError(
                f"prior must cover {2 * n} parameters (stiffness + damping)"
            )
        if not 1 <= self.budget <= len(self.channels):
            raise InvalidParameterError(
                f"budget must lie in [1, {len(self.channels)}], got {self.budget}"
            )

    def _catalog(self) -> list[ChannelSpec]:
        n = self.building.n_story
        return [self.channels[i * n] for i in range(len(self.channels) // n)]

    @classmethod
    def build(
        cls,
        building: BuildingParams,
        sensor_catalog,
        cov,
        excitation: KanaiTajimiParams,
        budget: int,
    ) -> "PlacementProblem":
        """Construct from a sensor catalog of (SensorType, noise_variance) pairs.

        The catalog is sorted into canonical type order and expanded to one
        channel per story per type.
        """
        catalog = sorted(
            (SensorType(t), float(v)) for t, v in sensor_catalog
        )
        types = [t for t, _ in catalog]
        if len(set(types)) != len(types):
            raise InvalidChannelError("sensor catalog repeats a sensor type")
        channels = tuple(
            ChannelSpec(sensor_type=t, location=story, noise_variance=v)
            for t, v in catalog
            for story in range(1, building.n_story + 1)
        )
        prior = ParameterPrior(
            mean=np.concatenate([building.stiffness, building.damping]),
            cov=cov,
        )
        return cls(
            building=building,
            channels=channels,
            prior=prior,
            excitation=excitation,
            budget=budget,
        )

    @property
    def n_story(self) -> int:
        return self.building.n_story

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def n_theta(self) -> int:
        return self.prior.n_params

    @property
    def noise_variances(self) -> np.ndarray:
        return np.array([ch.noise_variance for ch in self.channels])

    @property
    def channel_labels(self) -> list[str]:
        return [ch.label for ch in self.channels]

    @property
    def parameter_labels(self) -> list[str]:
        n = self.n_story
        return [f"k{i}" for i in range(1, n + 1)] + [f"c{i}" for i in range(1, n + 1)]

    def params_for(self, theta) -> BuildingParams:
        """Building parameters at a sampled theta, masses held fixed."""
        theta = np.asarray(theta, dtype=float)
        n = self.n_story
        if theta.shape != (2 * n,):
            raise InvalidParameterError(f"theta must have shape ({2 * n},)")
        return BuildingParams(
            stiffness=theta[:n], damping=theta[n:], mass=self.building.mass
        )

    def simulate_models(self, models, excitation) -> np.ndarray:
        """Batch-simulate this problem's channel outputs for several models."""
        return simulate_ensemble(
            models, excitation, self.excitation.dt, [self.channels] * len(models)
        )

    def channel_of(self, sensor_type: SensorType, story: int) -> int:
        """Channel index of (type, story) within this problem's catalog."""
        for idx, ch in enumerate(self.channels):
            if ch.sensor_type is SensorType(sensor_type) and ch.location == story:
                return idx
        raise InvalidChannelError(f"no channel for {SensorType(sensor_type).name} at story {story}")
