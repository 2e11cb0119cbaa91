import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .assumptions import AssumptionStatus


class AveragingReport(BaseModel):
    """Averaging performance levels guaranteed for static targets."""

    model_config = ConfigDict(use_attribute_docstrings=True)

    rho_p: float = Field(ge=0.0)
    """Baseline position spread ``1/2 sum ||p_i - p*||^2`` (m^2)."""
    rho_R: float = Field(ge=0.0)
    """Baseline orientation spread ``sum phi(E*^T E_i)``."""
    beta: float
    phi_m: float
    k: float = Field(gt=0.0)
    """Gain ratio ``k_e / k_s``."""
    w_const: int = Field(ge=0)
    eps_p: float
    eps_R: float
    epsilon: float
    """Slack used in both bounds."""
    c: float
    """Slack used in ``beta``."""

    @field_validator("eps_p", "eps_R")
    @classmethod
    def _unit_interval(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"averaging level must lie in (0, 1], got {v}")
        return v


class TrackingReport(BaseModel):
    """Tracking performance levels for moving targets."""

    model_config = ConfigDict(use_attribute_docstrings=True)

    k_e: float
    rho_p_sup: float = Field(gt=0.0)
    rho_R_sup: float = Field(gt=0.0)
    w_bar_p: float = Field(ge=0.0)
    """Sup norm of the target linear velocities (m/s)."""
    w_bar_R: float = Field(ge=0.0)
    """Sup norm of the target angular velocities (rad/s)."""
    gamma: float = Field(ge=0.0)
    """Running max of ``||E* - S||_F``."""
    mu: float = Field(ge=1.0)
    eps_p_track: float = Field(gt=1.0)
    eps_R_track: float = Field(gt=1.0)


class MetricsRecord(BaseModel):
    """One simulation step; ``eps_bound_*`` are NaN where no bound applies."""

    t: float
    U_p: float
    U_R: float
    rho_p: float
    rho_R: float
    eps_bound_p: float = math.nan
    eps_bound_R: float = math.nan
    min_eig_S: float
    phi_max_est: float = 0.0
    """Largest ``phi(E*^T R_bar_i)`` over the estimates."""
    err_cam: list[float]
    gamma: float = 0.0
    omega_star_sq: float = 0.0
    omega_bound_sq: float = 0.0
    status: AssumptionStatus = AssumptionStatus.OK
    moving: bool = False
    """Targets or cameras follow a velocity profile."""
    star_eR: list[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    cam_eR: list[list[float]] = Field(default_factory=list)
    """World-frame ``e_R`` of every estimate."""
