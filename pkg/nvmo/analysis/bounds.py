"""
Closed-form performance quantities of the networked observer.

Averaging (static targets): the energies ``U_p``, ``U_R`` are compared with the
baseline spreads ``rho_p``, ``rho_R``; an estimate set has ``eps``-level
performance once ``U <= eps * rho`` holds for good. Tracking (moving targets)
uses the supremum spreads ``rho'`` and the velocity bounds instead.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from ..errors import BoundsDomainError, TrackingThresholdError
from ..geometry.liegroup import (
    Pose,
    Rotation,
    Twist,
    min_sym_eig,
    phi,
    proj_so3,
    rotation_matrix_mean,
    se3_exp,
    sk,
    vee,
)

SQRT2 = math.sqrt(2.0)


class Theorem1Bounds(NamedTuple):
    eps_p: float
    eps_R: float


class Theorem2Bounds(NamedTuple):
    eps_p_track: float
    eps_R_track: float


class AverageMotion(NamedTuple):
    v_b_star: np.ndarray
    p_star_dot: np.ndarray
    E_star_next: Rotation
    omega_star: np.ndarray
    gamma: float


def energy_Up(p_bars: Sequence[np.ndarray], p_star: np.ndarray) -> float:
    """``1/2 sum_i ||p* - p_bar_i||^2``."""
    d = np.asarray(p_bars, dtype=float) - np.asarray(p_star, dtype=float)
    return float(0.5 * np.sum(d * d))


def energy_UR(r_bars: Sequence[Rotation], r_star: Rotation) -> float:
    """``sum_i phi(E*^T R_bar_i)``."""
    mats = np.stack([r.matrix for r in r_bars])
    # tr(E*^T R) = sum(E* * R)
    return float(np.sum(3.0 - np.einsum("ij,kij->k", r_star.matrix, mats)))


def rho_values(
    targets: Sequence[Pose], g_star: Pose | Sequence[Pose]
) -> tuple[float, float]:
    """
    Baseline spreads ``(rho_p, rho_R)`` of the targets around the average.

    ``g_star`` is either the world-frame average or, for targets given in camera
    frames, the average expressed in each matching camera frame.
    """
    stars = [g_star] * len(targets) if isinstance(g_star, Pose) else list(g_star)
    if len(stars) != len(targets):
        raise ValueError(f"got {len(targets)} targets but {len(stars)} averages")
    rho_p = 0.5 * sum(float(np.sum((g.pos - s.pos) ** 2)) for g, s in zip(targets, stars))
    rho_R = sum(phi(s.rot.T @ g.rot) for g, s in zip(targets, stars))
    return rho_p, float(rho_R)


def phi_max(r_targets: Sequence[Rotation]) -> float:
    """``max_{i,j} phi(R_i^T R_j)``."""
    if len(r_targets) == 0:
        raise ValueError("phi_max of an empty list")
    mats = np.stack([r.matrix for r in r_targets])
    traces = np.einsum("aij,bij->ab", mats, mats)
    return float(np.max(3.0 - traces))


def beta_value(r_targets: Sequence[Rotation], r_star: Rotation, c: float) -> float:
    """``1 - sqrt(2 (phi(E*^T E_h) + c))`` with ``h`` the target farthest from the average."""
    if c < 0.0:
        raise BoundsDomainError(f"slack c must be non-negative, got {c}")
    phi_h = max(0.0, max(phi(r_star.T @ r) for r in r_targets))
    return float(1.0 - math.sqrt(2.0 * (phi_h + c)))


def theorem1_bounds(
    k_e: float, k_s: float, w_const: int, beta: float, epsilon: float
) -> Theorem1Bounds:
    """
    Averaging levels for the gain ratio ``k = k_e / k_s``.

    ``eps_p = 1 - (1 - eps)(1 - sqrt(k W))^2`` when ``k W <= 1`` and
    ``eps_R = 1 - (1 - eps)(sqrt(beta) - sqrt(k W))^2`` when ``beta > 0`` and
    ``k W <= beta``; otherwise the level is 1.
    """
    if not (k_e > 0.0 and k_s > 0.0):
        raise BoundsDomainError(f"gains must be positive, got k_e={k_e}, k_s={k_s}")
    if not 0.0 < epsilon < 1.0:
        raise BoundsDomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if w_const < 0:
        raise BoundsDomainError(f"W must be non-negative, got {w_const}")

    kw = (k_e / k_s) * w_const
    root_kw = math.sqrt(kw)
    eps_p = 1.0 - (1.0 - epsilon) * (1.0 - root_kw) ** 2 if kw <= 1.0 else 1.0
    if beta > 0.0 and kw <= beta:
        eps_R = 1.0 - (1.0 - epsilon) * (math.sqrt(beta) - root_kw) ** 2
    else:
        eps_R = 1.0
    return Theorem1Bounds(eps_p, eps_R)


def mu_value(gamma: float) -> float:
    """``sqrt(2) / (sqrt(2) - gamma)``, defined for ``0 <= gamma < sqrt(2)``."""
    if not 0.0 <= gamma < SQRT2:
        raise BoundsDomainError(f"gamma must lie in [0, sqrt(2)), got {gamma}")
    return SQRT2 / (SQRT2 - gamma)


def theorem2_bounds(
    k_e: float,
    mu: float,
    w_bar_p: float,
    w_bar_R: float,
    rho_p_sup: float,
    rho_R_sup: float,
) -> Theorem2Bounds:
    """
    Tracking levels ``eps'_p``, ``eps'_R``.

    Raises:
        TrackingThresholdError: ``k_e <= max(1, mu^2)``.
        BoundsDomainError: a supremum spread is not positive.

    """
    mu2 = mu * mu
    if k_e <= max(1.0, mu2):
        raise TrackingThresholdError(
            f"gain below tracking threshold: k_e={k_e} must exceed max(1, mu^2)={max(1.0, mu2):.4g}"
        )
    if not (rho_p_sup > 0.0 and rho_R_sup > 0.0):
        raise BoundsDomainError(
            f"supremum spreads must be positive, got rho'_p={rho_p_sup}, rho'_R={rho_R_sup}"
        )
    eps_p = 1.0 + 1.0 / (k_e - 1.0) + w_bar_p**2 / (rho_p_sup * (k_e - 1.0))
    eps_R = 1.0 + mu2 / (k_e - mu2) + w_bar_R**2 / (rho_R_sup * (k_e - mu2))
    return Theorem2Bounds(eps_p, eps_R)


def average_motion_step(
    targets: Sequence[Pose], twists: Sequence[Twist], dt: float
) -> AverageMotion:
    """
    Velocity of the average pose over one step of the target motion.

    ``v_b* = E*^T mean_i(E_i v_i)``, ``p*' = E* v_b*``, the angular velocity
    ``w*`` by finite differencing of ``E*`` and ``gamma = ||E* - S||_F``.
    """
    if len(targets) != len(twists):
        raise ValueError(f"got {len(targets)} targets but {len(twists)} twists")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    s = rotation_matrix_mean(g.rot for g in targets)
    e_star = proj_so3(s)
    world_v = np.mean([g.rot.matrix @ tw.v for g, tw in zip(targets, twists)], axis=0)
    v_b_star = e_star.matrix.T @ world_v
    p_star_dot = e_star.matrix @ v_b_star

    moved = [g @ se3_exp(tw, dt) for g, tw in zip(targets, twists)]
    e_next = proj_so3(rotation_matrix_mean(g.rot for g in moved))
    omega = vee(sk(e_star.matrix.T @ (e_next.matrix - e_star.matrix))) / dt
    gamma = float(np.linalg.norm(e_star.matrix - s))
    return AverageMotion(v_b_star, p_star_dot, e_next, omega, gamma)


def omega_bound_sq(gamma: float, twists: Sequence[Twist]) -> float:
    """``mu(gamma)^2 / n * ||w_R||^2``, the bound on ``||w*||^2``."""
    w_r_sq = sum(float(np.dot(tw.w, tw.w)) for tw in twists)
    return mu_value(gamma) ** 2 / len(twists) * w_r_sq


def in_omega(u: float, eps: float, rho: float) -> bool:
    """Membership ``U <= eps * rho`` in the scaled set."""
    return bool(u <= eps * rho)


def entry_time(
    times: Sequence[float], values: Sequence[float], bounds: Sequence[float] | float
) -> float | None:
    """
    First time after which ``values <= bounds`` holds for every remaining sample.

    Returns ``None`` when the last sample is outside (or the bound is NaN).
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    b = np.broadcast_to(np.asarray(bounds, dtype=float), v.shape)
    inside = v <= b
    if t.size == 0 or not inside[-1]:
        return None
    outside = np.flatnonzero(~inside)
    return float(t[0] if outside.size == 0 else t[outside[-1] + 1])


def trace_inequality_gap(r1: Rotation, r2: Rotation, r3: Rotation) -> float:
    """
    Slack of the trace inequality behind the energy descent.

    ``1/2 tr(R1^T R2 - R1^T R3 R2^T R3) - [phi(R1^T R3) - phi(R1^T R2)
    + lambda_min(sym(R1^T R3)) phi(R3^T R2)]``, non-negative for all rotations.
    """
    a, b, c = r1.matrix, r2.matrix, r3.matrix
    lhs = 0.5 * np.trace(a.T @ b - a.T @ c @ b.T @ c)
    rhs = (
        phi(Rotation(a.T @ c))
        - phi(Rotation(a.T @ b))
        + min_sym_eig(a.T @ c) * phi(Rotation(c.T @ b))
    )
    return float(lhs - rhs)
