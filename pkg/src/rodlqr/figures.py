"""Matplotlib renderings written next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path: Path) -> Path:
    path = Path(path).with_suffix(".png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_trajectory(traj, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(traj.times, np.maximum(traj.linf, 1e-300), lw=1.5)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$L^\infty$ norm of the state")
    ax.set_title(title or f"verdict: {traj.verdict}")
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def render_basin(results, path: Path, critical=None, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 2.8))
    colors = {"Converged": "tab:green", "Diverged": "tab:red", "Undetermined": "tab:orange"}
    seen = set()
    for level, verdict in results:
        label = verdict if verdict not in seen else None
        seen.add(verdict)
        ax.scatter([level], [0.0], c=colors.get(verdict, "gray"), s=60, label=label)
    if critical is not None:
        ax.axvspan(critical[0], critical[1], color="gray", alpha=0.3, label="critical bracket")
    ax.set_xlabel("initial level")
    ax.set_yticks([])
    ax.set_title(title or "basin sweep")
    ax.legend(loc="upper right", fontsize=8)
    return _finish(fig, path)


def render_spectrum(nus, lams, rhos, mus, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    n = np.arange(len(nus))
    ax.plot(n, -np.asarray(lams), "o-", label="open loop  $-\\lambda_n$")
    if rhos is not None:
        ax.plot(n[: len(rhos)], -np.asarray(mus), "s--", label="closed loop  $-\\mu_n$")
    ax.set_yscale("log")
    ax.set_xlabel("mode index")
    ax.set_ylabel("decay rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def render_matrix(mat, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(np.asarray(mat), cmap="RdBu_r")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(title)
    return _finish(fig, path)


def render_gain_curve(xs, values, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(xs, values, lw=1.5)
    ax.set_xlabel("x")
    ax.set_ylabel("K(x)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)
