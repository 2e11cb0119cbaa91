"""
Assumption monitor: named checks aggregated into an :class:`AssumptionReport`.

Each check returns ``(status, detail, value)``. Graph and target-configuration
failures are ``VIOLATED``; leaving the invariant set or a degenerate target
configuration (no pair differing in both position and orientation) is
``DEGRADED`` because the run itself stays well defined.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence

import loguru._logger
import numpy as np

from ..geometry.liegroup import Pose, Rotation, proj_so3, rotation_matrix_mean
from ..network.graph import Assumption1Flags
from ..schemas.assumptions import (
    AssumptionCheckComponent,
    AssumptionReport,
    AssumptionStatus,
)
from ..utils.log_common import build_logger

SAME_TOL = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class AssumptionContext:
    t: float
    target_positions: np.ndarray
    target_rots: np.ndarray
    star_rot: np.ndarray
    estimate_rots: Optional[np.ndarray] = None
    graph_flags: Optional[Assumption1Flags] = None

    @classmethod
    def build(
        cls,
        t: float,
        targets: Sequence[Pose],
        estimates: Sequence[Pose] | None = None,
        graph_flags: Assumption1Flags | None = None,
        star: Rotation | None = None,
    ) -> "AssumptionContext":
        """Context from world-frame target and estimate poses."""
        rots = np.stack([g.rot.matrix for g in targets])
        if star is None:
            star = proj_so3(rotation_matrix_mean(g.rot for g in targets))
        return cls(
            t=t,
            target_positions=np.stack([g.pos for g in targets]),
            target_rots=rots,
            star_rot=star.matrix,
            estimate_rots=None if estimates is None else np.stack([g.rot.matrix for g in estimates]),
            graph_flags=graph_flags,
        )


def min_relative_eig(left: np.ndarray, right: np.ndarray) -> float:
    """Smallest eigenvalue of ``sym(L_a^T R_b)`` over all pairs of the two stacks."""
    rel = np.einsum("aji,bjk->abik", left, right)
    sym = 0.5 * (rel + np.swapaxes(rel, -1, -2))
    return float(np.min(np.linalg.eigvalsh(sym)))


class AssumptionCheckBase(ABC):
    """Base class for all assumption checks."""

    name: str

    @abstractmethod
    def check(self, ctx: AssumptionContext) -> tuple[AssumptionStatus, str, Optional[float]]:
        """Return (status, detail, value)."""
        ...


class GraphCheck(AssumptionCheckBase):
    name = "graph"

    def check(self, ctx):
        flags = ctx.graph_flags
        if flags is None:
            return AssumptionStatus.OK, "not evaluated", None
        if flags.ok:
            return AssumptionStatus.OK, "balanced and strongly connected", None
        return AssumptionStatus.VIOLATED, f"balanced={flags.balanced}, strongly_connected={flags.strongly_connected}", None


class TargetPairwiseCheck(AssumptionCheckBase):
    """``sym(E_j^T E_i) > 0`` for every pair of target orientations."""

    name = "targets_pairwise"

    def check(self, ctx):
        lam = min_relative_eig(ctx.target_rots, ctx.target_rots)
        traces = np.einsum("aij,bij->ab", ctx.target_rots, ctx.target_rots)
        phi_m = float(np.max(3.0 - traces))
        detail = f"min eig {lam:.4g}, phi_m {phi_m:.4g}"
        if lam > 0.0:
            return AssumptionStatus.OK, detail, lam
        return AssumptionStatus.VIOLATED, detail, lam


class NonDegenerateCheck(AssumptionCheckBase):
    """Some pair of targets differs in both position and orientation."""

    name = "non_degenerate"

    def check(self, ctx):
        p, r = ctx.target_positions, ctx.target_rots
        dp = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1) > SAME_TOL
        dr = np.max(np.abs(r[:, None] - r[None, :]), axis=(-1, -2)) > SAME_TOL
        if np.any(dp & dr):
            return AssumptionStatus.OK, "targets differ in position and orientation", None
        return AssumptionStatus.DEGRADED, "no target pair differs in both position and orientation", None


class InvariantSetCheck(AssumptionCheckBase):
    """Every estimate rotation is positive definite relative to the average: ``sym(E*^T R_bar_i) > 0``."""

    name = "invariant_set"

    def check(self, ctx):
        if ctx.estimate_rots is None:
            return AssumptionStatus.OK, "no estimates", None
        lam = min_relative_eig(ctx.star_rot[None], ctx.estimate_rots)
        if lam > 0.0:
            return AssumptionStatus.OK, f"min eig {lam:.4g}", lam
        return AssumptionStatus.DEGRADED, f"estimates left the invariant set, min eig {lam:.4g}", lam


DEFAULT_CHECKS: tuple[type[AssumptionCheckBase], ...] = (
    GraphCheck,
    TargetPairwiseCheck,
    NonDegenerateCheck,
    InvariantSetCheck,
)


class AssumptionMonitor:
    """
    Runs the checks on every call and logs status transitions.

    Usage:
        ```python
        monitor = AssumptionMonitor()
        report = monitor.run_checks(AssumptionContext.build(t, targets, estimates))
        ```
    """

    def __init__(
        self,
        checks: Optional[list[AssumptionCheckBase]] = None,
        logger: Optional[loguru._logger.Logger] = None,
    ):
        self.checks = checks if checks is not None else [c() for c in DEFAULT_CHECKS]
        self.logger = logger or build_logger()
        self._last: dict[str, AssumptionStatus] = {}

    def run_checks(self, ctx: AssumptionContext) -> AssumptionReport:
        components: dict[str, AssumptionCheckComponent] = {}
        for checker in self.checks:
            status, detail, value = checker.check(ctx)
            components[checker.name] = AssumptionCheckComponent(
                status=status, detail=detail, value=value
            )
            previous = self._last.get(checker.name, AssumptionStatus.OK)
            if status != previous:
                if status == AssumptionStatus.OK:
                    self.logger.info(f"[{checker.name}] recovered at t={ctx.t:.4f}s: {detail}")
                else:
                    self.logger.warning(f"[{checker.name}] {status.value} at t={ctx.t:.4f}s: {detail}")
            self._last[checker.name] = status

        overall = AssumptionStatus.worst(c.status for c in components.values())
        return AssumptionReport(status=overall, t=ctx.t, components=components)


def check_assumptions(
    t: float,
    targets: Sequence[Pose],
    estimates: Sequence[Pose] | None = None,
    graph_flags: Assumption1Flags | None = None,
) -> AssumptionReport:
    """One-off evaluation of all checks on world-frame poses."""
    ctx = AssumptionContext.build(t, targets, estimates, graph_flags)
    return AssumptionMonitor().run_checks(ctx)
