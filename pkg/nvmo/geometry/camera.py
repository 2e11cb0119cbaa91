"""
Pinhole measurement model and image-Jacobian error reconstruction.

A measurement stacks the image-plane coordinates ``(lambda/z) [x, y]`` of the
``m`` feature points as ``[x_1, y_1, ..., x_m, y_m]``. The image Jacobian is
taken with respect to error-vector coordinates ``(dp, dr)`` through the lift
``(dp, dr) -> (dp, exp(hat(dr)))`` applied on the right of the estimate, so
``f(g_bar @ g_e) - f(g_bar) ~= J(g_bar) @ E_R(g_e)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation as ScipyRotation

from ..errors import DegenerateFeatureError, FeatureAtCameraPlaneError
from .liegroup import ErrorVector, Pose

Z_MIN = 1e-6
JACOBIAN_STEP = 1e-6
CONDITION_LIMIT = 1e8


@dataclass(frozen=True, slots=True, eq=False)
class FeatureModel:
    """Feature points of a target, in the object frame (meters)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"feature points must be an (m, 3) array, got {pts.shape}")
        if pts.shape[0] < 4:
            raise ValueError(
                f"at least 4 feature points are needed for a full-rank image Jacobian, got {pts.shape[0]}"
            )
        diffs = pts[:, None, :] - pts[None, :, :]
        dist = np.linalg.norm(diffs, axis=-1) + np.eye(len(pts))
        if np.min(dist) <= 1e-12:
            raise ValueError("feature points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def square(cls, side: float = 0.25) -> FeatureModel:
        """Corners ``(+-side/2, +-side/2, 0)`` of a square in the object x-y plane."""
        h = 0.5 * side
        return cls(
            np.array(
                [
                    [h, h, 0.0],
                    [-h, h, 0.0],
                    [-h, -h, 0.0],
                    [h, -h, 0.0],
                ]
            )
        )

    @property
    def m(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True, slots=True)
class CameraIntrinsics:
    """Focal length (meters) of a pinhole camera."""

    focal_length: float

    def __post_init__(self):
        if not np.isfinite(self.focal_length) or self.focal_length <= 0.0:
            raise ValueError(f"focal length must be positive, got {self.focal_length}")


@dataclass(frozen=True, slots=True, eq=False)
class Measurement:
    """Stacked image-plane coordinates, length ``2m``."""

    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float).reshape(-1)
        if f.size % 2 != 0:
            raise ValueError(f"measurement length must be even, got {f.size}")
        if not np.all(np.isfinite(f)):
            raise ValueError("measurement has non-finite entries")
        object.__setattr__(self, "f", f)

    def __sub__(self, other: Measurement) -> np.ndarray:
        return self.f - other.f


def _project_points(p: np.ndarray, focal_length: float, z_min: float) -> np.ndarray:
    """Project points of shape (..., m, 3) to stacked coordinates of shape (..., 2m)."""
    z = p[..., 2]
    if np.any(np.abs(z) <= z_min):
        raise FeatureAtCameraPlaneError(
            f"feature at camera plane: min |z| = {np.min(np.abs(z)):.3e} m (z_min = {z_min:.1e})"
        )
    xy = focal_length * p[..., :2] / z[..., None]
    return xy.reshape(*xy.shape[:-2], -1)


def project(
    g_io: Pose, model: FeatureModel, cam: CameraIntrinsics, z_min: float = Z_MIN
) -> Measurement:
    """Perspective projection of the feature points seen from the camera at relative pose ``g_io``."""
    return Measurement(_project_points(g_io.apply(model.points), cam.focal_length, z_min))


def image_jacobian(
    g_bar: Pose,
    model: FeatureModel,
    cam: CameraIntrinsics,
    step: float = JACOBIAN_STEP,
    z_min: float = Z_MIN,
) -> np.ndarray:
    """
    Central-difference Jacobian (2m x 6) of the measurement map in error-vector coordinates.

    The twelve perturbed poses ``g_bar @ lift(+-step * e_k)`` are projected in one batch.
    """
    deltas = np.vstack([np.eye(6), -np.eye(6)]) * step
    r_delta = ScipyRotation.from_rotvec(deltas[:, 3:]).as_matrix()
    local = np.einsum("kij,mj->kmi", r_delta, model.points) + deltas[:, None, :3]
    cam_pts = local @ g_bar.rot.matrix.T + g_bar.pos
    f = _project_points(cam_pts, cam.focal_length, z_min)
    return ((f[:6] - f[6:]) / (2.0 * step)).T


def reconstruct_error(
    f: Measurement,
    g_bar: Pose,
    model: FeatureModel,
    cam: CameraIntrinsics,
    step: float = JACOBIAN_STEP,
    z_min: float = Z_MIN,
    condition_limit: float = CONDITION_LIMIT,
) -> ErrorVector:
    """
    Estimation error vector ``J^+(g_bar) (f - f_bar)``.

    Raises:
        DegenerateFeatureError: the Jacobian is rank deficient or its condition
            number exceeds ``condition_limit``.

    """
    jac = image_jacobian(g_bar, model, cam, step=step, z_min=z_min)
    f_err = f.f - project(g_bar, model, cam, z_min=z_min).f
    u, s, vt = np.linalg.svd(jac, full_matrices=False)
    cond = s[0] / s[-1] if s[-1] > 0.0 else np.inf
    if not np.isfinite(cond) or cond > condition_limit:
        raise DegenerateFeatureError(float(cond), condition_limit)
    e = vt.T @ ((u.T @ f_err) / s)
    return ErrorVector(e[:3], e[3:])


def condition_number(
    g_bar: Pose, model: FeatureModel, cam: CameraIntrinsics, step: float = JACOBIAN_STEP
) -> float:
    return float(np.linalg.cond(image_jacobian(g_bar, model, cam, step=step)))
