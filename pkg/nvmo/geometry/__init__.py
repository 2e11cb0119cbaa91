from .liegroup import (
    ErrorVector,
    Pose,
    Rotation,
    Twist,
    big_E_R,
    e_R,
    euclidean_mean,
    hat,
    phi,
    pose_average,
    proj_so3,
    psi,
    rot_exp,
    rot_log,
    se3_exp,
    vee,
)

__all__ = [
    "ErrorVector",
    "Pose",
    "Rotation",
    "Twist",
    "big_E_R",
    "e_R",
    "euclidean_mean",
    "hat",
    "phi",
    "pose_average",
    "proj_so3",
    "psi",
    "rot_exp",
    "rot_log",
    "se3_exp",
    "vee",
]
