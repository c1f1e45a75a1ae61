from pathlib import Path

import numpy as np
import pytest

from sensorq.building import BuildingParams
from sensorq.config import build_problem, load_config
from sensorq.ground_motion import KanaiTajimiParams
from sensorq.problem import PlacementProblem

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(scope="session")
def paper_config():
    return load_config(CONFIG_DIR / "paper_case.yaml")


@pytest.fixture(scope="session")
def paper_problem(paper_config):
    return build_problem(paper_config)


@pytest.fixture(scope="session")
def toy_config():
    return load_config(CONFIG_DIR / "toy_case.yaml")


@pytest.fixture(scope="session")
def toy_problem(toy_config):
    return build_problem(toy_config)


@pytest.fixture(scope="session")
def mini_problem():
    """One story, two channels, short record: cheap contexts for fast tests."""
    building = BuildingParams(stiffness=[2.5e6], damping=[5.0e4], mass=[2.0e4])
    excitation = KanaiTajimiParams(
        omega_g=17.0, zeta_g=0.3, duration=2.0, dt=0.01, target_pga=1.5
    )
    return PlacementProblem.build(
        building=building,
        sensor_catalog=[(0, 1.0e-3), (2, 1.0e-6)],
        cov=0.2,
        excitation=excitation,
        budget=1,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
