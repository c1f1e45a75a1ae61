"""Command-line frontend: config-driven training, oracle runs, and exports.

Exit codes: 0 on success, 2 for configuration problems, 3 for runtime
failures such as training divergence. Every command writes its artifacts
(CSV + PNG pairs, reports, metadata) under the --out directory.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__, report
from .agent import greedy_policy, save_checkpoint, train
from .config import build_problem, build_train_config, load_config
from .env import sample_inputs
from .errors import ConfigError, SensorqError, TrainingDivergedError
from .ground_motion import generate
from .info import gain_matrix
from .oracle import expected_rewards, greedy_full_fisher, top_m_configuration


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensorq",
        description="Sensor placement for linear structural systems via double Q-learning",
    )
    parser.add_argument("--version", action="version", version=f"sensorq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", required=True, help="run configuration YAML")
        p.add_argument("--seed", type=int, default=None, help="override the config rng_seed")
        if out:
            p.add_argument("--out", default=None, help="output directory (default: config output_dir)")

    p_train = sub.add_parser("train", help="train the placement agent and report its policy")
    common(p_train)
    p_train.add_argument("--episodes", type=int, default=None, help="override training episode count")
    p_train.add_argument("--threads", type=int, default=1, help="episode-context worker threads")
    p_train.add_argument("--trace", action="store_true", help="also write a per-step episode trace")

    p_oracle = sub.add_parser("oracle", help="Monte Carlo channel scores and baseline selections")
    common(p_oracle)
    p_oracle.add_argument("--samples", type=int, default=None, help="override oracle sample count")
    p_oracle.add_argument("--threads", type=int, default=1, help="sample-evaluation worker threads")

    p_gm = sub.add_parser("gm-sample", help="export one ground-motion record")
    common(p_gm)

    p_gain = sub.add_parser("gain-matrix", help="export one sampled information-gain matrix")
    common(p_gain)

    p_val = sub.add_parser("validate-config", help="check a configuration file and exit")
    common(p_val, out=False)
    return parser


def _out_dir(args, cfg) -> Path:
    out = Path(args.out) if args.out is not None else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(args, cfg) -> int:
    return cfg.rng_seed if args.seed is None else args.seed


def _write_metadata(path, cfg, problem, extra) -> None:
    meta = {
        "version": __version__,
        "problem": {
            "n_story": problem.n_story,
            "n_channels": problem.n_channels,
            "n_theta": problem.n_theta,
            "budget": problem.budget,
            "channel_labels": problem.channel_labels,
            "stiffness_n_per_m": problem.building.stiffness.tolist(),
            "damping_ns_per_m": problem.building.damping.tolist(),
            "mass_kg": problem.building.mass.tolist(),
            "prior_cov": problem.prior.cov.tolist(),
            "noise_variances": problem.noise_variances.tolist(),
            "excitation": asdict(problem.excitation),
        },
        "oracle_samples": cfg.oracle_samples,
    }
    meta.update(extra)
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _policy_report_text(problem, chosen, table) -> str:
    order = sorted(range(problem.n_channels), key=lambda c: (-table.mean[c], c))
    rank = {c: i + 1 for i, c in enumerate(order)}
    lines = [
        "sensorq policy report",
        "=====================",
        f"budget: {problem.budget} sensors over {problem.n_channels} candidate channels",
        "",
        "learned greedy policy (selection order):",
    ]
    for i, c in enumerate(chosen, start=1):
        lines.append(
            f"  {i}. {problem.channel_labels[c]:<22} "
            f"oracle rank {rank[c]}/{problem.n_channels}, "
            f"mean reward {table.mean[c]:.4f} +- {table.stderr[c]:.4f}"
        )
    top = top_m_configuration(table, problem.budget)
    lines.append("")
    lines.append(
        "oracle top-%d by expected reward: %s"
        % (problem.budget, ", ".join(problem.channel_labels[c] for c in top))
    )
    shared = len(set(chosen) & set(top))
    lines.append(f"agreement with oracle top-{problem.budget}: {shared}/{problem.budget} channels")
    lines.append("")
    return "\n".join(lines)


def _cmd_train(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    train_cfg = build_train_config(cfg, episodes=args.episodes, rng_seed=_seed(args, cfg))
    out = _out_dir(args, cfg)

    trace_rows = []

    def on_step(episode, tr):
        trace_rows.append(
            (episode, tr.next_state.step_count, problem.channel_labels[tr.action], tr.reward)
        )

    try:
        net, history = train(
            problem, train_cfg, threads=args.threads,
            step_callback=on_step if args.trace else None,
        )
    except TrainingDivergedError as exc:
        report.write_reward_history(out / "reward_history.csv", exc.history)
        print(f"error: training diverged: {exc}", file=sys.stderr)
        print(f"partial reward history retained in {out}", file=sys.stderr)
        return 3

    report.write_reward_history(out / "reward_history.csv", history)
    report.plot_reward_history(out / "reward_history.png", history)
    save_checkpoint(net, train_cfg, out / "checkpoint.json")
    if args.trace:
        report.write_episode_trace(out / "episode_trace.csv", trace_rows)

    chosen = greedy_policy(net, problem)
    table = expected_rewards(problem, cfg.oracle_samples, train_cfg.rng_seed, threads=args.threads)
    (out / "policy_report.txt").write_text(_policy_report_text(problem, chosen, table))
    _write_metadata(
        out / "run_metadata.json",
        cfg,
        problem,
        {
            "command": "train",
            "train_config": asdict(train_cfg),
            "threads": args.threads,
            "selected_channels": [problem.channel_labels[c] for c in chosen],
        },
    )
    print(f"trained {train_cfg.episodes} episodes; artifacts in {out}")
    print("policy: " + ", ".join(problem.channel_labels[c] for c in chosen))
    return 0


def _cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    n_samples = cfg.oracle_samples if args.samples is None else args.samples
    if n_samples < 1:
        raise ConfigError("--samples must be >= 1")

    table = expected_rewards(problem, n_samples, seed, threads=args.threads)
    report.write_score_table(out / "oracle_scores.csv", problem.channel_labels, table)
    report.plot_score_table(out / "oracle_scores.png", problem.channel_labels, table)

    top = top_m_configuration(table, problem.budget)
    greedy = greedy_full_fisher(problem, problem.budget, n_samples, seed, threads=args.threads)
    lines = [
        "sensorq oracle report",
        "=====================",
        f"samples: {n_samples}, budget: {problem.budget}",
        "",
        "top-%d channels by expected reward: %s"
        % (problem.budget, ", ".join(problem.channel_labels[c] for c in top)),
        "greedy full-Fisher selection (order): %s"
        % ", ".join(problem.channel_labels[c] for c in greedy),
        "",
    ]
    (out / "oracle_policy.txt").write_text("\n".join(lines))
    _write_metadata(
        out / "run_metadata.json",
        cfg,
        problem,
        {"command": "oracle", "samples": n_samples, "rng_seed": seed, "threads": args.threads},
    )
    print(f"oracle scores for {problem.n_channels} channels in {out}")
    return 0


def _cmd_gm_sample(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    record = generate(problem.excitation, seed)
    report.write_gm_record(out / "gm_record.csv", problem.excitation.dt, record)
    report.plot_gm_record(out / "gm_record.png", problem.excitation.dt, record)
    print(f"{record.shape[0]} samples, peak {np.max(np.abs(record))} m/s^2, in {out}")
    return 0


def _cmd_gain_matrix(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    out = _out_dir(args, cfg)
    seed = _seed(args, cfg)
    theta, excitation = sample_inputs(problem, seed)
    gain = gain_matrix(problem, theta, excitation)
    report.write_gain_matrix(
        out / "gain_matrix.csv", problem.channel_labels, problem.parameter_labels, gain
    )
    report.plot_gain_matrix(
        out / "gain_matrix.png", problem.channel_labels, problem.parameter_labels, gain
    )
    print(f"gain matrix for seed {seed} in {out}")
    return 0


def _cmd_validate_config(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    build_train_config(cfg)
    print(
        f"{args.config}: OK "
        f"({problem.n_story} stories, {problem.n_channels} channels, budget {problem.budget})"
    )
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "oracle": _cmd_oracle,
    "gm-sample": _cmd_gm_sample,
    "gain-matrix": _cmd_gain_matrix,
    "validate-config": _cmd_validate_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SensorqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())
