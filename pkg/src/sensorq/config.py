"""Run configuration: YAML schema, validation, and problem construction.

Config files use the customary engineering units (MN/m, MN*s/m); conversion
to SI happens exactly once, here. Unknown keys are rejected rather than
ignored so typos cannot silently change a run.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .agent import TrainConfig
from .building import BuildingParams, calibrate_uniform_mass
from .errors import ConfigError, SensorqError
from .ground_motion import KanaiTajimiParams
from .oracle import DEFAULT_ORACLE_SAMPLES
from .problem import PlacementProblem

MN = 1.0e6  # meganewtons to newtons

_SENSOR_TYPE_NAMES = {
    "accel": 0,
    "acceleration": 0,
    "drift_velocity": 1,
    "drift-velocity": 1,
    "drift": 2,
}


@dataclass
class RunConfig:
    """Validated contents of one run configuration file."""

    stiffness_n_per_m: np.ndarray
    damping_ns_per_m: np.ndarray
    masses_kg: np.ndarray | None
    target_period_s: float | None
    prior_cov: float
    sensors: list[tuple[int, float]]  # (type id, noise variance)
    omega_g: float
    zeta_g: float
    duration_s: float
    dt_s: float
    pga_m_s2: float
    budget: int
    rng_seed: int
    output_dir: str
    train_overrides: dict = field(default_factory=dict)
    oracle_samples: int = DEFAULT_ORACLE_SAMPLES


def _require_mapping(node, where: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(node).__name__}")
    return node


def _reject_unknown(node: dict, allowed, where: str) -> None:
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        raise ConfigError(
            f"{where}: unknown key(s) {', '.join(map(repr, unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def _positive_list(node, where: str) -> np.ndarray:
    try:
        arr = np.asarray([float(v) for v in node], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a list of numbers") from exc
    if arr.size == 0 or np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{where}: entries must be finite and > 0")
    return arr


def _positive_scalar(node, where: str) -> float:
    try:
        val = float(node)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a number") from exc
    if not np.isfinite(val) or val <= 0.0:
        raise ConfigError(f"{where}: must be finite and > 0")
    return val


def load_config(path) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc

    raw = _require_mapping(raw, str(path))
    _reject_unknown(
        raw,
        {"building", "prior", "sensors", "excitation", "budget", "rng_seed",
         "output_dir", "train", "oracle"},
        str(path),
    )
    for key in ("building", "prior", "sensors", "excitation", "budget"):
        if key not in raw:
            raise ConfigError(f"{path}: missing required section '{key}'")

    bld = _require_mapping(raw["building"], "building")
    _reject_unknown(
        bld,
        {"stiffness_mn_per_m", "damping_mns_per_m", "masses_kg", "target_period_s"},
        "building",
    )
    stiffness = _positive_list(bld.get("stiffness_mn_per_m"), "building.stiffness_mn_per_m") * MN
    damping = _positive_list(bld.get("damping_mns_per_m"), "building.damping_mns_per_m") * MN
    if stiffness.shape != damping.shape:
        raise ConfigError("building: stiffness and damping lists must match in length")
    masses = None
    target_period = None
    if ("masses_kg" in bld) == ("target_period_s" in bld):
        raise ConfigError("building: provide exactly one of masses_kg, target_period_s")
    if "masses_kg" in bld:
        masses = _positive_list(bld["masses_kg"], "building.masses_kg")
        if masses.shape != stiffness.shape:
            raise ConfigError("building.masses_kg: length must match stiffness")
    else:
        target_period = _positive_scalar(bld["target_period_s"], "building.target_period_s")

    prior = _require_mapping(raw["prior"], "prior")
    _reject_unknown(prior, {"cov"}, "prior")
    prior_cov = _positive_scalar(prior.get("cov"), "prior.cov")

    if not isinstance(raw["sensors"], list) or not raw["sensors"]:
        raise ConfigError("sensors: expected a non-empty list")
    sensors = []
    seen_types = set()
    for i, entry in enumerate(raw["sensors"]):
        entry = _require_mapping(entry, f"sensors[{i}]")
        _reject_unknown(entry, {"type", "noise_variance"}, f"sensors[{i}]")
        type_name = str(entry.get("type", "")).lower()
        if type_name not in _SENSOR_TYPE_NAMES:
            raise ConfigError(
                f"sensors[{i}].type: unknown type {entry.get('type')!r}; "
                f"use accel, drift_velocity, or drift"
            )
        type_id = _SENSOR_TYPE_NAMES[type_name]
        if type_id in seen_types:
            raise ConfigError(f"sensors[{i}]: sensor type {type_name!r} listed twice")
        seen_types.add(type_id)
        noise = _positive_scalar(entry.get("noise_variance"), f"sensors[{i}].noise_variance")
        sensors.append((type_id, noise))

    exc_node = _require_mapping(raw["excitation"], "excitation")
    _reject_unknown(
        exc_node,
        {"omega_g_rad_s", "zeta_g", "duration_s", "dt_s", "pga_m_s2"},
        "excitation",
    )
    omega_g = _positive_scalar(exc_node.get("omega_g_rad_s"), "excitation.omega_g_rad_s")
    zeta_g = _positive_scalar(exc_node.get("zeta_g"), "excitation.zeta_g")
    if zeta_g >= 1.0:
        raise ConfigError("excitation.zeta_g: must be < 1")
    duration = _positive_scalar(exc_node.get("duration_s"), "excitation.duration_s")
    dt = _positive_scalar(exc_node.get("dt_s"), "excitation.dt_s")
    pga = _positive_scalar(exc_node.get("pga_m_s2"), "excitation.pga_m_s2")

    try:
        budget = int(raw["budget"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("budget: expected an integer") from exc
    n_channels = len(sensors) * stiffness.shape[0]
    if not 1 <= budget <= n_channels:
        raise ConfigError(
            f"budget: must lie in [1, {n_channels}] "
            f"({len(sensors)} sensor types x {stiffness.shape[0]} stories)"
        )

    train_overrides = {}
    if "train" in raw:
        train_node = _require_mapping(raw["train"], "train")
        allowed = {f.name for f in fields(TrainConfig)} - {"rng_seed"}
        _reject_unknown(train_node, allowed, "train")
        train_overrides = dict(train_node)

    oracle_samples = DEFAULT_ORACLE_SAMPLES
    if "oracle" in raw:
        oracle_node = _require_mapping(raw["oracle"], "oracle")
        _reject_unknown(oracle_node, {"n_samples"}, "oracle")
        oracle_samples = int(_positive_scalar(oracle_node.get("n_samples"), "oracle.n_samples"))

    rng_seed = raw.get("rng_seed", 0)
    if not isinstance(rng_seed, int) or rng_seed < 0:
        raise ConfigError("rng_seed: expected a nonnegative integer")

    return RunConfig(
        stiffness_n_per_m=stiffness,
        damping_ns_per_m=damping,
        masses_kg=masses,
        target_period_s=target_period,
        prior_cov=prior_cov,
        sensors=sensors,
        omega_g=omega_g,
        zeta_g=zeta_g,
        duration_s=duration,
        dt_s=dt,
        pga_m_s2=pga,
        budget=budget,
        rng_seed=rng_seed,
        output_dir=str(raw.get("output_dir", "runs/latest")),
        train_overrides=train_overrides,
        oracle_samples=oracle_samples,
    )


def build_problem(cfg: RunConfig) -> PlacementProblem:
    """Turn a validated configuration into an immutable problem definition."""
    if cfg.masses_kg is not None:
        masses = cfg.masses_kg
    else:
        m = calibrate_uniform_mass(cfg.stiffness_n_per_m, cfg.target_period_s)
        masses = np.full(cfg.stiffness_n_per_m.shape, m)
    try:
        building = BuildingParams(
            stiffness=cfg.stiffness_n_per_m, damping=cfg.damping_ns_per_m, mass=masses
        )
        excitation = KanaiTajimiParams(
            omega_g=cfg.omega_g,
            zeta_g=cfg.zeta_g,
            duration=cfg.duration_s,
            dt=cfg.dt_s,
            target_pga=cfg.pga_m_s2,
        )
        return PlacementProblem.build(
            building=building,
            sensor_catalog=cfg.sensors,
            cov=cfg.prior_cov,
            excitation=excitation,
            budget=cfg.budget,
        )
    except SensorqError as exc:
        raise ConfigError(f"configuration is not physically valid: {exc}") from exc


def build_train_config(cfg: RunConfig, episodes=None, rng_seed=None) -> TrainConfig:
    """Resolve the training hyperparameters, applying CLI overrides last."""
    kwargs = dict(cfg.train_overrides)
    kwargs["rng_seed"] = cfg.rng_seed if rng_seed is None else rng_seed
    if episodes is not None:
        kwargs["episodes"] = episodes
    try:
        return TrainConfig(**kwargs)
    except (TypeError, SensorqError) as exc:
        raise ConfigError(f"train: {exc}") from exc
