"""Exception hierarchy shared by the library and the command line front end."""


class NvmoError(Exception):
    """Base class for every error raised by nvmo."""


class ScenarioError(NvmoError, ValueError):
    """Scenario document failed to parse or validate."""


class CutLocusError(NvmoError, ValueError):
    """Rotation logarithm requested at angle pi."""


class ProjectionError(NvmoError, ValueError):
    """Orthogonal projection onto SO(3) left the assumption envelope."""


class FeatureAtCameraPlaneError(NvmoError, ValueError):
    """A feature point reached the camera plane (|z| <= z_min)."""


class DegenerateFeatureError(NvmoError, ValueError):
    """Image Jacobian is rank deficient or ill-conditioned."""

    def __init__(self, condition_number: float, limit: float):
        self.condition_number = condition_number
        self.limit = limit
        super().__init__(
            f"degenerate feature configuration: condition number {condition_number:.3e} exceeds {limit:.1e}"
        )


class InvalidNodeError(NvmoError, ValueError):
    """Node id outside 1..n."""


class DisconnectedGraphError(NvmoError, ValueError):
    """The undirected version of the communication graph is disconnected."""


class EnumerationLimitError(NvmoError, ValueError):
    """Spanning-tree enumeration refused for too many nodes."""


class BoundsDomainError(NvmoError, ValueError):
    """Parameters outside the domain of a performance bound formula."""


class TrackingThresholdError(BoundsDomainError):
    """Visual feedback gain does not exceed mu^2 (or 1)."""


class AssumptionViolationError(NvmoError, ValueError):
    """A hard precondition of the observer (graph or target configuration) fails."""


class SimulationError(NvmoError, RuntimeError):
    """Failure inside the simulation loop; carries the step index."""

    def __init__(self, step: int, t: float, cause: Exception):
        self.step = step
        self.t = t
        self.cause = cause
        super().__init__(f"step {step} (t={t:.4f}s): {cause}")
