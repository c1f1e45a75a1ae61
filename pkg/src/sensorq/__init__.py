"""Heterogeneous sensor placement for linear structural systems.

A double Q-network agent learns which channels (accelerometers, drift
velocity, drift) to instrument on a shear building so that measurements
under uncertain parameters and stochastic ground motion maximize the
expected information gain about the structural parameters. Exhaustive and
greedy Monte Carlo oracles verify the learned policy.
"""

__version__ = "0.1.0"

from .agent import (
    QNetwork,
    ReplayBuffer,
    TrainConfig,
    greedy_policy,
    train,
)
from .building import (
    BuildingParams,
    ChannelSpec,
    SensorType,
    StateSpaceModel,
    assemble_matrices,
    calibrate_uniform_mass,
    modal_properties,
    simulate,
)
from .env import EpisodeContext, SensorConfigState, Transition, reset, step, valid_actions
from .ground_motion import KanaiTajimiParams, filter_frequency_response, generate
from .info import (
    GainMatrix,
    ParameterPrior,
    SensitivityTensor,
    fisher_matrix,
    fisher_scalar,
    gain_matrix,
    info_gain,
    reward_of_action,
    sensitivities,
)
from .oracle import ChannelScoreTable, expected_rewards, greedy_full_fisher, top_m_configuration
from .problem import PlacementProblem

__all__ = [
    "__version__",
    "BuildingParams",
    "ChannelSpec",
    "ChannelScoreTable",
    "EpisodeContext",
    "GainMatrix",
    "KanaiTajimiParams",
    "ParameterPrior",
    "PlacementProblem",
    "QNetwork",
    "ReplayBuffer",
    "SensitivityTensor",
    "SensorConfigState",
    "SensorType",
    "StateSpaceModel",
    "TrainConfig",
    "Transition",
    "assemble_matrices",
    "calibrate_uniform_mass",
    "expected_rewards",
    "filter_frequency_response",
    "fisher_matrix",
    "fisher_scalar",
    "gain_matrix",
    "generate",
    "greedy_full_fisher",
    "greedy_policy",
    "info_gain",
    "modal_properties",
    "reset",
    "reward_of_action",
    "sensitivities",
    "simulate",
    "step",
    "top_m_configuration",
    "train",
    "valid_actions",
]
