"""Artifact writers: delimited files plus the matching rendered figures.

Every table that a run produces is written as a plain CSV ('.' decimal, comma
separator, one header row) and, right next to it, as a PNG so results can be
eyeballed without loading anything. CSV cells are written with Python's
shortest round-trip float formatting, which keeps identical runs byte
identical.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([str(v) for v in row])
    return path


def write_reward_history(path, history) -> Path:
    return _write_csv(
        path,
        ["episode", "total_reward", "epsilon", "loss_mean"],
        ((s.episode, s.total_reward, s.epsilon, s.loss_mean) for s in history),
    )


def plot_reward_history(path, history, window: int = 100) -> Path | None:
    if not history:
        return None
    rewards = np.array([s.total_reward for s in history])
    episodes = np.arange(len(rewards))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(episodes, rewards, lw=0.4, alpha=0.4, color="tab:gray", label="episode reward")
    if len(rewards) >= window:
        kernel = np.ones(window) / window
        smooth = np.convolve(rewards, kernel, mode="valid")
        ax.plot(episodes[window - 1 :], smooth, lw=1.8, color="tab:blue",
                label=f"{window}-episode average")
    ax.set_xlabel("episode")
    ax.set_ylabel("total episode reward")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def write_score_table(path, labels, table) -> Path:
    return _write_csv(
        path,
        ["channel_label", "mean", "stderr"],
        zip(labels, table.mean, table.stderr),
    )


def plot_score_table(path, labels, table) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    x = np.arange(len(labels))
    ax.bar(x, table.mean, yerr=table.stderr, color="tab:blue", capsize=3)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("mean one-step reward")
    ax.set_title(f"expected channel rewards ({table.n_samples} samples)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def write_gm_record(path, dt: float, accel) -> Path:
    times = np.arange(len(accel)) * dt
    return _write_csv(path, ["time_s", "accel_mps2"], zip(times, accel))


def plot_gm_record(path, dt: float, accel) -> Path:
    times = np.arange(len(accel)) * dt
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(times, accel, lw=0.7, color="tab:red")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("ground acceleration (m/s$^2$)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def write_gain_matrix(path, channel_labels, parameter_labels, gain) -> Path:
    rows = (
        [label] + list(gain.g[i]) for i, label in enumerate(channel_labels)
    )
    return _write_csv(path, ["channel"] + list(parameter_labels), rows)


def plot_gain_matrix(path, channel_labels, parameter_labels, gain) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(gain.g, aspect="auto", cmap="viridis", vmin=0.0)
    ax.set_xticks(np.arange(len(parameter_labels)))
    ax.set_xticklabels(parameter_labels)
    ax.set_yticks(np.arange(len(channel_labels)))
    ax.set_yticklabels(channel_labels, fontsize=8)
    fig.colorbar(im, ax=ax, label="normalized information gain")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def write_episode_trace(path, rows) -> Path:
    """rows: iterables of (episode, step, action_label, reward)."""
    return _write_csv(path, ["episode", "step", "action_label", "reward"], rows)
