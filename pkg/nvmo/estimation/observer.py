"""
Visual motion observer and its networked variant, integrated on SE(3).

Each camera ``i`` keeps an estimate ``g_bar`` of its relative pose to its
target. The input combines the reconstructed visual error with a mutual term
that pulls the estimate towards the neighbor estimates expressed in camera
``i``'s frame through the known relative camera poses ``g_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..errors import AssumptionViolationError
from ..geometry.camera import (
    CONDITION_LIMIT,
    JACOBIAN_STEP,
    Z_MIN,
    CameraIntrinsics,
    FeatureModel,
    Measurement,
    reconstruct_error,
)
from ..geometry.liegroup import (
    ORTHO_TOL,
    ErrorVector,
    Pose,
    Twist,
    big_E_R,
    reorthonormalize,
    se3_exp,
)
from ..network.graph import Digraph, neighbors, validate_assumption1
from ..utils.log_common import build_logger

logger = build_logger()


@dataclass(frozen=True, slots=True, eq=False)
class ObserverState:
    """Estimate ``g_bar`` of the camera-to-target pose and the observer gains."""

    g_bar: Pose
    gain_e: float
    gain_s: float = 0.0

    def __post_init__(self):
        if not self.gain_e > 0.0:
            raise ValueError(f"k_e must be positive, got {self.gain_e}")
        if not self.gain_s >= 0.0:
            raise ValueError(f"k_s must be non-negative, got {self.gain_s}")


@dataclass(frozen=True, slots=True, eq=False)
class NeighborEstimate:
    """Estimate of neighbor ``j`` expressed in the receiver frame, ``g_ij @ g_bar_j``."""

    j: int
    g_ioj: Pose


def vmo_input(e: ErrorVector, k_e: float) -> Twist:
    return Twist(k_e * e.ep, k_e * e.er)


def networked_input(
    e: ErrorVector,
    g_bar: Pose,
    nbrs: Sequence[NeighborEstimate],
    k_e: float,
    k_s: float,
) -> Twist:
    """``k_e e + k_s sum_j E_R(g_bar^-1 g_ioj)``; reduces to :func:`vmo_input` without neighbors."""
    u = vmo_input(e, k_e)
    if not nbrs or k_s == 0.0:
        return u
    g_inv = g_bar.inverse()
    acc = ErrorVector.zero()
    for nb in nbrs:
        acc = acc + big_E_R(g_inv @ nb.g_ioj)
    return Twist(u.v + k_s * acc.ep, u.w + k_s * acc.er)


def observer_step(
    st: ObserverState,
    u: Twist,
    v_cam: Twist | None,
    dt: float,
    tol: float = ORTHO_TOL,
) -> ObserverState:
    """
    Geometric Euler step ``g_bar <- exp(-v_cam dt) g_bar exp(u dt)``.

    The rotation is projected back onto SO(3) when its drift exceeds ``tol``.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    g = st.g_bar @ se3_exp(u, dt)
    if v_cam is not None and not v_cam.is_zero():
        g = se3_exp(-v_cam, dt) @ g
    rot = reorthonormalize(g.rot, tol)
    if rot is not g.rot:
        logger.trace(f"re-orthonormalized estimate, drift {g.rot.drift():.2e}")
        g = Pose(rot, g.pos)
    return replace(st, g_bar=g)


class NetworkedObserver:
    """
    Synchronous update of all cameras of a static camera network.

    Every round reads neighbor estimates from the previous states only, so the
    result does not depend on the order in which cameras are visited.

    Example:
        ```python
        obs = NetworkedObserver(graph, camera_poses, models, cams)
        states = obs.round(states, measurements, dt=1e-3)
        ```
    """

    def __init__(
        self,
        graph: Digraph,
        poses_cam: Sequence[Pose],
        models: Sequence[FeatureModel],
        cams: Sequence[CameraIntrinsics],
        *,
        jacobian_step: float = JACOBIAN_STEP,
        z_min: float = Z_MIN,
        condition_limit: float = CONDITION_LIMIT,
        reorthonormalize_tol: float = ORTHO_TOL,
    ):
        n = graph.n
        if not (len(poses_cam) == len(models) == len(cams) == n):
            raise ValueError(
                f"expected {n} camera poses, models and intrinsics, got "
                f"{len(poses_cam)}, {len(models)}, {len(cams)}"
            )
        flags = validate_assumption1(graph)
        if not flags.ok:
            raise AssumptionViolationError(
                f"communication graph must be balanced and strongly connected, got {flags._asdict()}"
            )
        self.graph = graph
        self.models = list(models)
        self.cams = list(cams)
        self.jacobian_step = jacobian_step
        self.z_min = z_min
        self.condition_limit = condition_limit
        self.reorthonormalize_tol = reorthonormalize_tol
        self.neighbor_sets = [sorted(neighbors(graph, i)) for i in graph.nodes()]
        # g_ij = g_wi^-1 g_wj, fixed because the cameras are static
        self.relative = {
            (i, j): poses_cam[i - 1].inverse() @ poses_cam[j - 1]
            for i in graph.nodes()
            for j in self.neighbor_sets[i - 1]
        }
        self.last_errors: list[ErrorVector] = []

    @property
    def n(self) -> int:
        return self.graph.n

    def reconstruct(self, i: int, f: Measurement, g_bar: Pose) -> ErrorVector:
        return reconstruct_error(
            f,
            g_bar,
            self.models[i - 1],
            self.cams[i - 1],
            step=self.jacobian_step,
            z_min=self.z_min,
            condition_limit=self.condition_limit,
        )

    def neighbor_estimates(self, i: int, states: Sequence[ObserverState]) -> list[NeighborEstimate]:
        return [
            NeighborEstimate(j, self.relative[(i, j)] @ states[j - 1].g_bar)
            for j in self.neighbor_sets[i - 1]
        ]

    def round(
        self,
        states: Sequence[ObserverState],
        measurements: Sequence[Measurement],
        dt: float,
        v_cams: Sequence[Twist] | None = None,
    ) -> list[ObserverState]:
        if len(states) != self.n or len(measurements) != self.n:
            raise ValueError(
                f"expected {self.n} states and measurements, got {len(states)} and {len(measurements)}"
            )
        if v_cams is not None and self.n > 1 and any(not v.is_zero() for v in v_cams):
            raise AssumptionViolationError("moving cameras are only supported with a single camera")

        errors = []
        inputs = []
        for i in self.graph.nodes():
            st = states[i - 1]
            e = self.reconstruct(i, measurements[i - 1], st.g_bar)
            nbrs = self.neighbor_estimates(i, states) if st.gain_s > 0.0 else []
            errors.append(e)
            inputs.append(networked_input(e, st.g_bar, nbrs, st.gain_e, st.gain_s))

        self.last_errors = errors
        return [
            observer_step(
                st,
                u,
                v_cams[k] if v_cams is not None else None,
                dt,
                self.reorthonormalize_tol,
            )
            for k, (st, u) in enumerate(zip(states, inputs))
        ]


def network_round(
    states: Sequence[ObserverState],
    poses_cam: Sequence[Pose],
    measurements: Sequence[Measurement],
    graph: Digraph,
    dt: float,
    *,
    models: Sequence[FeatureModel],
    cams: Sequence[CameraIntrinsics],
) -> list[ObserverState]:
    """One synchronous round; builds a :class:`NetworkedObserver` for the call."""
    return NetworkedObserver(graph, poses_cam, models, cams).round(states, measurements, dt)


def true_error(g_true: Pose, g_bar: Pose) -> ErrorVector:
    """``E_R(g_bar^-1 g_true)``, the quantity the reconstruction approximates."""
    return big_E_R(g_bar.inverse() @ g_true)


def error_norms(truths: Sequence[Pose], states: Sequence[ObserverState]) -> np.ndarray:
    return np.array([true_error(g, st.g_bar).norm() for g, st in zip(truths, states)])
