from .bounds import (
    average_motion_step,
    beta_value,
    energy_UR,
    energy_Up,
    entry_time,
    in_omega,
    mu_value,
    phi_max,
    rho_values,
    theorem1_bounds,
    theorem2_bounds,
)

__all__ = [
    "average_motion_step",
    "beta_value",
    "energy_UR",
    "energy_Up",
    "entry_time",
    "in_omega",
    "mu_value",
    "phi_max",
    "rho_values",
    "theorem1_bounds",
    "theorem2_bounds",
]
