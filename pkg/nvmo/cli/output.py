"""
Tabular outputs of a simulation run.

``metrics.csv`` and ``orientation.csv`` are written with polars; the summary is
computed from the metrics table alone so it can be regenerated from the CSV.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import polars as pl

from ..analysis.bounds import entry_time
from ..schemas.reports import MetricsRecord

METRICS_FILE = "metrics.csv"
ORIENTATION_FILE = "orientation.csv"
SUMMARY_FILE = "summary.txt"


def metrics_frame(records: Sequence[MetricsRecord]) -> pl.DataFrame:
    if not records:
        raise ValueError("no metrics records to tabulate")
    n = len(records[0].err_cam)
    data: dict[str, list] = {
        "t": [r.t for r in records],
        "U_p": [r.U_p for r in records],
        "U_R": [r.U_R for r in records],
        "rho_p": [r.rho_p for r in records],
        "rho_R": [r.rho_R for r in records],
        "eps_bound_p": [r.eps_bound_p for r in records],
        "eps_bound_R": [r.eps_bound_R for r in records],
        "min_eig_S": [r.min_eig_S for r in records],
        "phi_max_est": [r.phi_max_est for r in records],
    }
    for i in range(n):
        data[f"err_cam_{i + 1}"] = [r.err_cam[i] for r in records]
    data["gamma"] = [r.gamma for r in records]
    data["omega_star_sq"] = [r.omega_star_sq for r in records]
    data["omega_bound_sq"] = [r.omega_bound_sq for r in records]
    data["status"] = [r.status.value for r in records]
    data["moving"] = [r.moving for r in records]
    return pl.DataFrame(data)


def orientation_frame(records: Sequence[MetricsRecord]) -> pl.DataFrame:
    """World-frame ``e_R`` of the average and of every estimate."""
    n = len(records[0].cam_eR)
    data: dict[str, list] = {"t": [r.t for r in records]}
    for k, axis in enumerate("xyz"):
        data[f"star_{axis}"] = [r.star_eR[k] for r in records]
    for i in range(n):
        for k, axis in enumerate("xyz"):
            data[f"cam_{i + 1}_{axis}"] = [r.cam_eR[i][k] for r in records]
    return pl.DataFrame(data)


def _level(bound: float, rho: float) -> float:
    if math.isnan(bound) or rho <= 0.0:
        return math.nan
    return bound / rho


def _omega_line(
    name: str, frame: pl.DataFrame, u: str, bound: str, rho: str, moving: bool
) -> list[str]:
    times = frame["t"].to_list()
    values = frame[u].to_list()
    bounds = frame[bound].to_list()
    last_rho = frame[rho].max() if moving else frame[rho][-1]
    level = _level(bounds[-1], last_rho)
    prefix = f"{name}'" if moving else name
    lines = []
    if math.isnan(level):
        lines.append(f"{prefix}: bound not defined")
    else:
        t_in = entry_time(times, values, bounds)
        verdict = "satisfied" if values[-1] <= bounds[-1] else "NOT satisfied"
        when = f"entered at t={t_in:.3f}s" if t_in is not None else "not entered"
        lines.append(f"{prefix}({level:.4g}): {when}, final bound {verdict}")
    if not moving:
        t_one = entry_time(times, values, frame[rho].to_list())
        when = f"entered at t={t_one:.3f}s" if t_one is not None else "not entered"
        lines.append(f"{name}(1): {when}")
    return lines


def _omega_star_verdict(frame: pl.DataFrame) -> str:
    defined = frame.filter(pl.col("omega_bound_sq").is_not_nan())
    if defined.height == 0:
        return "not defined"
    violated = defined.filter(pl.col("omega_star_sq") > pl.col("omega_bound_sq")).height
    if violated == 0:
        return "holds at every step"
    return f"VIOLATED at {violated} of {defined.height} steps"


def summarize_metrics(frame: pl.DataFrame) -> str:
    """Final values, bound verdicts and ultimate entry times into the scaled sets."""
    last = frame.row(-1, named=True)
    moving = bool(frame["moving"].any())
    err_cols = [c for c in frame.columns if c.startswith("err_cam_")]

    lines = [
        f"steps: {frame.height - 1}",
        f"final t: {last['t']:.4f} s",
        f"targets: {'moving' if moving else 'static'}",
        f"final U_p: {last['U_p']:.6g}",
        f"final U_R: {last['U_R']:.6g}",
        f"final rho_p: {last['rho_p']:.6g}",
        f"final rho_R: {last['rho_R']:.6g}",
        f"min min_eig_S: {frame['min_eig_S'].min():.6g}",
    ]
    for c in err_cols:
        lines.append(f"final {c}: {last[c]:.6g}")
    lines += _omega_line("Omega_p", frame, "U_p", "eps_bound_p", "rho_p", moving)
    lines += _omega_line("Omega_R", frame, "U_R", "eps_bound_R", "rho_R", moving)
    if moving:
        lines.append(f"max gamma: {frame['gamma'].max():.6g}")
        lines.append(f"average angular velocity bound: {_omega_star_verdict(frame)}")
    statuses = sorted(set(frame["status"].to_list()))
    lines.append(f"assumption status seen: {', '.join(statuses)}")
    return "\n".join(lines) + "\n"


def write_outputs(records: Sequence[MetricsRecord], out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frame = metrics_frame(records)
    paths = {
        "metrics": out / METRICS_FILE,
        "orientation": out / ORIENTATION_FILE,
        "summary": out / SUMMARY_FILE,
    }
    frame.write_csv(paths["metrics"])
    orientation_frame(records).write_csv(paths["orientation"])
    paths["summary"].write_text(summarize_metrics(frame), encoding="utf-8")
    return paths
