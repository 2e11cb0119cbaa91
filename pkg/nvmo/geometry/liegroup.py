"""
SO(3)/SE(3) algebra used by the observer and the bounds.

Conventions:
    - A pose ``g_ab = (p_ab, R_ab)`` maps coordinates in frame b to frame a,
      ``x_a = R_ab x_b + p_ab``; homogeneous form ``[[R, p], [0, 1]]``.
    - Twists are body velocities ``(v, w)``; ``hat`` gives ``[[w^, v], [0, 0]]``.
    - Rotation vectors ``xi*theta`` carry the axis times the angle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import CutLocusError, ProjectionError

ORTHO_TOL = 1e-9
_SMALL_ANGLE = 1e-6


def _vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {np.shape(x)}")
    return v


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix with ``hat(w) @ b == cross(w, b)``."""
    w0, w1, w2 = _vec3(w)
    return np.array(
        [
            [0.0, -w2, w1],
            [w2, 0.0, -w0],
            [-w1, w0, 0.0],
        ]
    )


def vee(m) -> np.ndarray:
    """Inverse of :func:`hat` (reads the lower/upper off-diagonal entries)."""
    m = np.asarray(m, dtype=float)
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def sk(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m - m.T)


def min_sym_eig(m) -> float:
    """Smallest eigenvalue of the symmetric part (positive definiteness of a non-symmetric matrix)."""
    return float(np.linalg.eigvalsh(sym(np.asarray(m, dtype=float)))[0])


@dataclass(frozen=True, slots=True, eq=False)
class Rotation:
    """Element of SO(3) stored as a 3x3 matrix."""

    matrix: np.ndarray

    @classmethod
    def identity(cls) -> Rotation:
        return cls(np.eye(3))

    @classmethod
    def from_matrix(cls, m, tol: float = ORTHO_TOL) -> Rotation:
        """Build a rotation, checking orthonormality and unit determinant within ``tol``."""
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {m.shape}")
        if np.max(np.abs(m.T @ m - np.eye(3))) > tol:
            raise ValueError("matrix is not orthonormal")
        if abs(np.linalg.det(m) - 1.0) > tol:
            raise ValueError(f"rotation determinant is {np.linalg.det(m):.6f}, expected +1")
        return cls(m.copy())

    @classmethod
    def from_rotvec(cls, xi_theta) -> Rotation:
        return rot_exp(xi_theta)

    @property
    def T(self) -> Rotation:
        return Rotation(self.matrix.T)

    def inverse(self) -> Rotation:
        return self.T

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other, dtype=float)

    def drift(self) -> float:
        """Largest entry of ``R^T R - I``."""
        return float(np.max(np.abs(self.matrix.T @ self.matrix - np.eye(3))))


@dataclass(frozen=True, slots=True, eq=False)
class Pose:
    """Element of SE(3): rotation plus position (meters)."""

    rot: Rotation
    pos: np.ndarray

    @classmethod
    def identity(cls) -> Pose:
        return cls(Rotation.identity(), np.zeros(3))

    @classmethod
    def from_parts(cls, pos=(0.0, 0.0, 0.0), xi_theta=(0.0, 0.0, 0.0)) -> Pose:
        """Pose from a position and a rotation vector, the notation used in scenario files."""
        return cls(rot_exp(xi_theta), _vec3(pos).copy())

    def homogeneous(self) -> np.ndarray:
        h = np.eye(4)
        h[:3, :3] = self.rot.matrix
        h[:3, 3] = self.pos
        return h

    def inverse(self) -> Pose:
        rt = self.rot.matrix.T
        return Pose(Rotation(rt), -rt @ self.pos)

    def __matmul__(self, other: Pose) -> Pose:
        r = self.rot.matrix
        return Pose(Rotation(r @ other.rot.matrix), r @ other.pos + self.pos)

    def apply(self, points) -> np.ndarray:
        """Transform points given as an (m, 3) array (or a single 3-vector)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rot.matrix.T + self.pos


@dataclass(frozen=True, slots=True, eq=False)
class Twist:
    """Body velocity ``(v, w)``: linear part in m/s, angular part in rad/s."""

    v: np.ndarray
    w: np.ndarray

    @classmethod
    def zero(cls) -> Twist:
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, x) -> Twist:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape != (6,):
            raise ValueError(f"twist vector must have 6 entries, got {x.shape}")
        return cls(x[:3].copy(), x[3:].copy())

    def vector(self) -> np.ndarray:
        return np.concatenate([self.v, self.w])

    def hat(self) -> np.ndarray:
        h = np.zeros((4, 4))
        h[:3, :3] = hat(self.w)
        h[:3, 3] = self.v
        return h

    def __add__(self, other: Twist) -> Twist:
        return Twist(self.v + other.v, self.w + other.w)

    def __neg__(self) -> Twist:
        return Twist(-self.v, -self.w)

    def is_zero(self) -> bool:
        return not (np.any(self.v) or np.any(self.w))


@dataclass(frozen=True, slots=True, eq=False)
class ErrorVector:
    """Vector form ``(p_e, sk(R_e)^vee)`` of a pose error."""

    ep: np.ndarray
    er: np.ndarray

    @classmethod
    def zero(cls) -> ErrorVector:
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, x) -> ErrorVector:
        x = np.asarray(x, dtype=float).reshape(-1)
        return cls(x[:3].copy(), x[3:].copy())

    def vector(self) -> np.ndarray:
        return np.concatenate([self.ep, self.er])

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector()))

    def __add__(self, other: ErrorVector) -> ErrorVector:
        return ErrorVector(self.ep + other.ep, self.er + other.er)


def rot_exp(xi_theta) -> Rotation:
    """Rodrigues formula for ``exp(hat(xi_theta))`` with a series branch near zero."""
    w = _vec3(xi_theta)
    theta = float(np.linalg.norm(w))
    k = hat(w)
    if theta < _SMALL_ANGLE:
        return Rotation(np.eye(3) + k + 0.5 * (k @ k))
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / theta**2
    return Rotation(np.eye(3) + a * k + b * (k @ k))


def rot_log(r: Rotation) -> np.ndarray:
    """
    Rotation vector of ``r`` with norm below pi.

    Raises:
        CutLocusError: the angle is pi (``tr(r) == -1``), where the axis is not unique.

    """
    m = r.matrix
    tr = float(np.trace(m))
    if 1.0 + tr <= 1e-10:
        raise CutLocusError("log undefined at cut locus")
    s = vee(sk(m))
    theta = float(np.arctan2(np.linalg.norm(s), 0.5 * (tr - 1.0)))
    if theta < _SMALL_ANGLE:
        return s
    return (theta / np.sin(theta)) * s


def _se3_left_jacobian(w: np.ndarray) -> np.ndarray:
    theta = float(np.linalg.norm(w))
    k = hat(w)
    if theta < _SMALL_ANGLE:
        return np.eye(3) + 0.5 * k + (k @ k) / 6.0
    return (
        np.eye(3)
        + ((1.0 - np.cos(theta)) / theta**2) * k
        + ((theta - np.sin(theta)) / theta**3) * (k @ k)
    )


def se3_exp(t: Twist, dt: float = 1.0) -> Pose:
    """Closed-form ``exp(dt * hat(t))``; pure translation when ``w == 0``."""
    v = np.asarray(t.v, dtype=float) * dt
    w = np.asarray(t.w, dtype=float) * dt
    if not np.any(w):
        return Pose(Rotation.identity(), v.copy())
    return Pose(rot_exp(w), _se3_left_jacobian(w) @ v)


def e_R(r: Rotation) -> np.ndarray:
    """``sk(R)^vee``, equal to ``xi sin(theta)``."""
    return vee(sk(r.matrix))


def big_E_R(g: Pose) -> ErrorVector:
    return ErrorVector(np.asarray(g.pos, dtype=float).copy(), e_R(g.rot))


def phi(r: Rotation) -> float:
    """``0.5 * ||I - R||_F^2 = tr(I - R) = 2 (1 - cos theta)``."""
    return float(3.0 - np.trace(r.matrix))


def psi(g: Pose) -> float:
    return float(0.5 * np.dot(g.pos, g.pos) + phi(g.rot))


def proj_so3(m, rank_tol: float = 1e-12) -> Rotation:
    """
    Orthogonal projection ``U V^T`` of ``m`` onto SO(3).

    Raises:
        ProjectionError: ``m`` is rank deficient or ``det(U V^T) = -1``; no
            reflection fix is applied.

    """
    m = np.asarray(m, dtype=float)
    u, s, vt = np.linalg.svd(m)
    if not np.all(np.isfinite(s)) or s[-1] <= rank_tol * max(s[0], 1.0):
        raise ProjectionError(
            f"projection outside assumption envelope: singular values {s}"
        )
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        raise ProjectionError(
            "projection outside assumption envelope: det(U V^T) = -1"
        )
    return Rotation(r)


def euclidean_mean(rs: Sequence[Rotation]) -> Rotation:
    """Rotation minimizing ``sum_j phi(R^T R_j)``: projection of the arithmetic mean."""
    if len(rs) == 0:
        raise ValueError("euclidean_mean of an empty list")
    return proj_so3(rotation_matrix_mean(rs))


def rotation_matrix_mean(rs: Iterable[Rotation]) -> np.ndarray:
    """Arithmetic mean ``S`` of the rotation matrices (not itself a rotation)."""
    return np.mean([r.matrix for r in rs], axis=0)


def pose_average(gs: Sequence[Pose]) -> Pose:
    """Average pose: arithmetic mean of positions and Euclidean mean of rotations."""
    if len(gs) == 0:
        raise ValueError("pose_average of an empty list")
    pos = np.mean([g.pos for g in gs], axis=0)
    return Pose(euclidean_mean([g.rot for g in gs]), pos)


def reorthonormalize(r: Rotation, tol: float = ORTHO_TOL) -> Rotation:
    """Project back onto SO(3) when numerical drift exceeds ``tol``."""
    if r.drift() > tol:
        return proj_so3(r.matrix)
    return r
