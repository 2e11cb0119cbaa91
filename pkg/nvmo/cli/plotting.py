"""Static SVG line plots of a run (non-interactive backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import polars as pl  # noqa: E402


def plot_energies(frame: pl.DataFrame, path: str | Path) -> Path:
    """``U_p`` and ``U_R`` with their bound lines (dash-dot) and the 1-level lines (dotted)."""
    t = frame["t"].to_numpy()
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for ax, (u, bound, rho) in zip(
        axes, [("U_p", "eps_bound_p", "rho_p"), ("U_R", "eps_bound_R", "rho_R")]
    ):
        ax.plot(t, frame[u].to_numpy(), label=u)
        ax.plot(t, frame[bound].to_numpy(), "-.", label=f"bound on {u}")
        ax.plot(t, frame[rho].to_numpy(), ":", label=rho)
        ax.set_ylabel(u)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_orientation(frame: pl.DataFrame, path: str | Path) -> Path:
    """``e_R`` of every estimate (thin) and of the average (thick, dashed), per axis."""
    t = frame["t"].to_numpy()
    cams = sorted({c.rsplit("_", 1)[0] for c in frame.columns if c.startswith("cam_")})
    fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
    for ax, axis in zip(axes, "xyz"):
        for cam in cams:
            ax.plot(t, frame[f"{cam}_{axis}"].to_numpy(), linewidth=0.8, label=cam)
        ax.plot(t, frame[f"star_{axis}"].to_numpy(), "k--", linewidth=1.6, label="average")
        ax.set_ylabel(f"e_R {axis}")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right", fontsize="small")
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
