"""
Simulation loop coupling targets, cameras, the networked observer and the bounds.

One :class:`MetricsRecord` is produced per step, including ``t = 0``. For static
targets the recorded bounds are the averaging levels times the baseline
spreads; for moving targets they are the tracking levels times the supremum
spreads, filled in after the run once the supremum quantities are known.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ..analysis.bounds import (
    average_motion_step,
    beta_value,
    energy_UR,
    energy_Up,
    mu_value,
    omega_bound_sq,
    phi_max,
    rho_values,
    theorem1_bounds,
    theorem2_bounds,
)
from ..config import NvmoSettings, get_settings
from ..errors import (
    AssumptionViolationError,
    BoundsDomainError,
    EnumerationLimitError,
    NvmoError,
    SimulationError,
)
from ..estimation.observer import NetworkedObserver, ObserverState, true_error
from ..geometry.camera import Measurement, project
from ..geometry.liegroup import Pose, Twist, e_R, pose_average, se3_exp
from ..network.graph import compute_W, validate_assumption1
from ..schemas.reports import AveragingReport, MetricsRecord, TrackingReport
from ..utils.log_common import build_logger
from ..utils.timing import measure_time
from .assumptions import AssumptionContext, AssumptionMonitor, min_relative_eig
from .scenario import Scenario

logger = build_logger()


class TargetStatistics(NamedTuple):
    rho_p_sup: float
    rho_R_sup: float
    gamma: float
    w_bar_p: float
    w_bar_R: float


def world_step(g: Pose, vel: Twist, dt: float) -> Pose:
    """Body-velocity motion over one step, ``g exp(dt V)``."""
    return g @ se3_exp(vel, dt)


def _step_count(sc: Scenario, s: NvmoSettings) -> tuple[float, int]:
    dt = sc.dt(s)
    return dt, int(round(sc.horizon(s) / dt))


def target_statistics(sc: Scenario, settings: NvmoSettings | None = None) -> TargetStatistics:
    """
    Supremum spreads, ``gamma`` and velocity bounds of the target motion alone.

    The targets are propagated over the scenario horizon without any observer.
    """
    s = settings or get_settings()
    dt, steps = _step_count(sc, s)
    targets = sc.target_poses()
    profiles = [tg.velocity for tg in sc.targets]
    norms = np.array([p.sup_norms() for p in profiles])

    rho_p_sup = rho_R_sup = gamma = 0.0
    for k in range(steps + 1 if not sc.is_static else 1):
        t = k * dt
        twists = [p.at(t) for p in profiles]
        star = pose_average(targets)
        rho_p, rho_R = rho_values(targets, star)
        motion = average_motion_step(targets, twists, dt)
        rho_p_sup = max(rho_p_sup, rho_p)
        rho_R_sup = max(rho_R_sup, rho_R)
        gamma = max(gamma, motion.gamma)
        targets = [world_step(g, tw, dt) for g, tw in zip(targets, twists)]

    return TargetStatistics(
        rho_p_sup=rho_p_sup,
        rho_R_sup=rho_R_sup,
        gamma=gamma,
        w_bar_p=float(norms[:, 0].max()),
        w_bar_R=float(norms[:, 1].max()),
    )


def averaging_report(
    sc: Scenario,
    settings: NvmoSettings | None = None,
    epsilon: float | None = None,
    c: float | None = None,
) -> AveragingReport:
    """Averaging levels for the scenario's initial target configuration."""
    s = settings or get_settings()
    epsilon = s.theorem_slack_epsilon if epsilon is None else epsilon
    c = s.lemma_slack_c if c is None else c
    targets = sc.target_poses()
    star = pose_average(targets)
    rho_p, rho_R = rho_values(targets, star)
    rots = [g.rot for g in targets]
    beta = beta_value(rots, star.rot, c)
    w = compute_W(sc.digraph(), s.enumeration_limit).w
    eps_p, eps_R = theorem1_bounds(sc.gains.k_e, sc.gains.k_s, w, beta, epsilon)
    return AveragingReport(
        rho_p=rho_p,
        rho_R=rho_R,
        beta=beta,
        phi_m=phi_max(rots),
        k=sc.gains.k_e / sc.gains.k_s,
        w_const=w,
        eps_p=eps_p,
        eps_R=eps_R,
        epsilon=epsilon,
        c=c,
    )


def tracking_report(
    sc: Scenario,
    settings: NvmoSettings | None = None,
    stats: TargetStatistics | None = None,
) -> TrackingReport:
    """Tracking levels from the target statistics over the scenario horizon."""
    stats = stats or target_statistics(sc, settings)
    mu = mu_value(stats.gamma)
    bounds = theorem2_bounds(
        sc.gains.k_e, mu, stats.w_bar_p, stats.w_bar_R, stats.rho_p_sup, stats.rho_R_sup
    )
    return TrackingReport(
        k_e=sc.gains.k_e,
        rho_p_sup=stats.rho_p_sup,
        rho_R_sup=stats.rho_R_sup,
        w_bar_p=stats.w_bar_p,
        w_bar_R=stats.w_bar_R,
        gamma=stats.gamma,
        mu=mu,
        eps_p_track=bounds.eps_p_track,
        eps_R_track=bounds.eps_R_track,
    )


def _static_levels(sc: Scenario, s: NvmoSettings) -> tuple[float, float]:
    if sc.gains.k_s <= 0.0:
        return math.nan, math.nan
    try:
        report = averaging_report(sc, s)
    except (BoundsDomainError, EnumerationLimitError) as e:
        logger.warning(f"averaging bounds unavailable: {e}")
        return math.nan, math.nan
    return report.eps_p, report.eps_R


def _fill_tracking_bounds(
    sc: Scenario, records: list[MetricsRecord], w_bar: tuple[float, float]
) -> None:
    rho_p_sup = max(r.rho_p for r in records)
    rho_R_sup = max(r.rho_R for r in records)
    gamma = max(r.gamma for r in records)
    try:
        eps_p, eps_R = theorem2_bounds(
            sc.gains.k_e, mu_value(gamma), w_bar[0], w_bar[1], rho_p_sup, rho_R_sup
        )
    except BoundsDomainError as e:
        logger.warning(f"tracking bounds unavailable: {e}")
        return
    for r in records:
        r.eps_bound_p = eps_p * rho_p_sup
        r.eps_bound_R = eps_R * rho_R_sup


def _measure(
    truths: Sequence[Pose],
    models,
    cams,
    z_min: float,
    rng: np.random.Generator,
    std: float,
) -> list[Measurement]:
    out = []
    for g, model, cam in zip(truths, models, cams):
        f = project(g, model, cam, z_min=z_min).f
        if std > 0.0:
            f = f + rng.normal(0.0, std, size=f.shape)
        out.append(Measurement(f))
    return out


def _run(sc: Scenario, s: NvmoSettings, monitor: AssumptionMonitor) -> list[MetricsRecord]:
    n = sc.n
    graph = sc.digraph()
    flags = validate_assumption1(graph)
    if not flags.ok:
        raise AssumptionViolationError(
            f"communication graph must be balanced and strongly connected, got {flags._asdict()}"
        )

    dt, steps = _step_count(sc, s)
    models = sc.feature_models(s)
    cams = sc.intrinsics()
    cam_poses = sc.camera_poses()
    targets = sc.target_poses()
    target_profiles = [tg.velocity for tg in sc.targets]
    camera_profiles = [c.velocity for c in sc.cameras]
    static = sc.is_static
    observer = NetworkedObserver(
        graph,
        cam_poses,
        models,
        cams,
        jacobian_step=s.jacobian_step,
        z_min=s.z_min,
        condition_limit=s.condition_limit,
        reorthonormalize_tol=s.reorthonormalize_tol,
    )
    states = [ObserverState(g, sc.gains.k_e, sc.gains.k_s) for g in sc.initial_poses(s)]
    rng = np.random.default_rng(sc.noise.seed)

    eps_p, eps_R = _static_levels(sc, s) if static else (math.nan, math.nan)
    w_bar = tuple(np.max([p.sup_norms() for p in target_profiles], axis=0))
    star = pose_average(targets) if static else None
    logger.info(
        f"running '{sc.name}': n={n}, k_e={sc.gains.k_e}, k_s={sc.gains.k_s}, "
        f"dt={dt}, steps={steps}, {'static' if static else 'moving'} targets"
    )

    records: list[MetricsRecord] = []
    for k in range(steps + 1):
        t = k * dt
        try:
            target_twists = [p.at(t) for p in target_profiles]
            camera_twists = [p.at(t) for p in camera_profiles]
            if not static:
                star = pose_average(targets)
            est_world = [c @ st.g_bar for c, st in zip(cam_poses, states)]
            truths = [c.inverse() @ g for c, g in zip(cam_poses, targets)]
            rho_p, rho_R = rho_values(targets, star)
            est_rots = np.stack([g.rot.matrix for g in est_world])

            gamma = omega_sq = omega_bound = 0.0
            if not static:
                motion = average_motion_step(targets, target_twists, dt)
                gamma = motion.gamma
                omega_sq = float(np.dot(motion.omega_star, motion.omega_star))
                try:
                    omega_bound = omega_bound_sq(gamma, target_twists)
                except BoundsDomainError:
                    omega_bound = math.nan

            report = monitor.run_checks(
                AssumptionContext.build(t, targets, est_world, flags, star.rot)
            )
            records.append(
                MetricsRecord(
                    t=t,
                    U_p=energy_Up([g.pos for g in est_world], star.pos),
                    U_R=energy_UR([g.rot for g in est_world], star.rot),
                    rho_p=rho_p,
                    rho_R=rho_R,
                    eps_bound_p=eps_p * rho_p,
                    eps_bound_R=eps_R * rho_R,
                    min_eig_S=min_relative_eig(star.rot.matrix[None], est_rots),
                    phi_max_est=float(np.max(3.0 - np.einsum("ij,kij->k", star.rot.matrix, est_rots))),
                    err_cam=[true_error(g, st.g_bar).norm() for g, st in zip(truths, states)],
                    gamma=gamma,
                    omega_star_sq=omega_sq,
                    omega_bound_sq=omega_bound,
                    status=report.status,
                    moving=not static,
                    star_eR=e_R(star.rot).tolist(),
                    cam_eR=[e_R(g.rot).tolist() for g in est_world],
                )
            )
            if k == steps:
                break

            measurements = _measure(truths, models, cams, s.z_min, rng, sc.noise.std)
            states = observer.round(states, measurements, dt, camera_twists)
            targets = [world_step(g, tw, dt) for g, tw in zip(targets, target_twists)]
            cam_poses = [world_step(g, tw, dt) for g, tw in zip(cam_poses, camera_twists)]
        except (NvmoError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
            raise SimulationError(k, t, e) from e

        if k and k % s.progress_every == 0:
            last = records[-1]
            logger.debug(f"step {k}/{steps} t={t:.3f}s U_p={last.U_p:.4g} U_R={last.U_R:.4g}")

    if not static:
        _fill_tracking_bounds(sc, records, w_bar)
    return records


def run(
    sc: Scenario,
    settings: NvmoSettings | None = None,
    monitor: Optional[AssumptionMonitor] = None,
) -> list[MetricsRecord]:
    """
    Simulate the scenario and return one record per step.

    Raises:
        AssumptionViolationError: the communication graph fails Assumption 1.
        SimulationError: any failure inside the loop, with the step index.

    """
    s = settings or get_settings()
    timed = measure_time(_run, tag="sim", level="info", threshold_warning=s.slow_run_warning)
    return timed(sc, s, monitor or AssumptionMonitor())
