"""
Scenario documents: cameras, targets, graph, gains, integration and noise.

Scenarios are JSON files validated by pydantic. Angles are rotation vectors
``xi*theta``; positions are in meters. Values left out fall back to
:class:`nvmo.config.NvmoSettings`.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import NvmoSettings, get_settings
from ..errors import ScenarioError
from ..geometry.camera import CameraIntrinsics, FeatureModel
from ..geometry.liegroup import Pose, Twist
from ..network.graph import Digraph

Vec3 = Annotated[list[float], Field(min_length=3, max_length=3)]
Vec6 = Annotated[list[float], Field(min_length=6, max_length=6)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", use_attribute_docstrings=True)


class Breakpoint(_Strict):
    t: float = Field(ge=0.0)
    twist: Vec6
    """Body velocity ``[v_x, v_y, v_z, w_x, w_y, w_z]`` at time ``t``."""


class VelocityProfile(_Strict):
    """
    Body velocity of a target (or a single moving camera) over time.

    ``piecewise`` interpolates linearly between breakpoints and holds the end
    values outside them, so the profile stays continuous and bounded.
    """

    kind: Literal["zero", "constant", "piecewise"] = "zero"
    twist: Optional[Vec6] = None
    breakpoints: list[Breakpoint] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_kind(self) -> VelocityProfile:
        if self.kind == "constant" and self.twist is None:
            raise ValueError("constant velocity profile needs 'twist'")
        if self.kind == "piecewise":
            if not self.breakpoints:
                raise ValueError("piecewise velocity profile needs at least one breakpoint")
            ts = [b.t for b in self.breakpoints]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError(f"breakpoint times must be strictly increasing, got {ts}")
        return self

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "constant":
            return not any(self.twist)
        return not any(any(b.twist) for b in self.breakpoints)

    def vector_at(self, t: float) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros(6)
        if self.kind == "constant":
            return np.asarray(self.twist, dtype=float)
        ts = np.array([b.t for b in self.breakpoints])
        vals = np.array([b.twist for b in self.breakpoints], dtype=float)
        return np.array([np.interp(t, ts, vals[:, k]) for k in range(6)])

    def at(self, t: float) -> Twist:
        return Twist.from_vector(self.vector_at(t))

    def sup_norms(self) -> tuple[float, float]:
        """``(sup ||v||, sup ||w||)``; attained at a breakpoint for piecewise-linear profiles."""
        if self.kind == "zero":
            return 0.0, 0.0
        vals = (
            np.array([self.twist], dtype=float)
            if self.kind == "constant"
            else np.array([b.twist for b in self.breakpoints], dtype=float)
        )
        return (
            float(np.max(np.linalg.norm(vals[:, :3], axis=1))),
            float(np.max(np.linalg.norm(vals[:, 3:], axis=1))),
        )


class CameraSpec(_Strict):
    position: Vec3
    xi_theta: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    focal_length: float = Field(gt=0.0)
    """Focal length lambda (m)."""
    velocity: VelocityProfile = Field(default_factory=VelocityProfile)
    """Camera body velocity; only a single camera may move."""

    def pose(self) -> Pose:
        return Pose.from_parts(self.position, self.xi_theta)


class TargetSpec(_Strict):
    position: Vec3
    xi_theta: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    features: Optional[list[Vec3]] = None
    """Feature points in the object frame; default is a square of ``feature_side``."""
    velocity: VelocityProfile = Field(default_factory=VelocityProfile)

    @model_validator(mode="after")
    def _check_features(self) -> TargetSpec:
        if self.features is not None:
            FeatureModel(np.asarray(self.features, dtype=float))
        return self

    def pose(self) -> Pose:
        return Pose.from_parts(self.position, self.xi_theta)


class EstimateSpec(_Strict):
    position: Vec3
    xi_theta: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])

    def pose(self) -> Pose:
        return Pose.from_parts(self.position, self.xi_theta)


class GraphSpec(_Strict):
    edges: list[tuple[int, int]] = Field(default_factory=list)
    """Directed ``[from, to]`` pairs; ``to`` receives from ``from``."""


class Gains(_Strict):
    k_e: float = Field(gt=0.0)
    k_s: float = Field(ge=0.0)


class Integration(_Strict):
    dt: Optional[float] = Field(None, gt=0.0)
    horizon: Optional[float] = Field(None, gt=0.0)


class Noise(_Strict):
    std: float = Field(0.0, ge=0.0)
    """Standard deviation of additive Gaussian image noise (image-plane meters)."""
    seed: int = Field(0, ge=0)


class Scenario(_Strict):
    name: str = "scenario"
    cameras: list[CameraSpec] = Field(min_length=1)
    targets: list[TargetSpec] = Field(min_length=1)
    graph: GraphSpec = Field(default_factory=GraphSpec)
    gains: Gains
    integration: Integration = Field(default_factory=Integration)
    noise: Noise = Field(default_factory=Noise)
    initial_estimates: Optional[list[EstimateSpec]] = None
    """Initial ``g_bar`` in each camera frame; default is ``initial_position`` with identity rotation."""

    @model_validator(mode="after")
    def _check_counts(self) -> Scenario:
        n = len(self.cameras)
        if len(self.targets) != n:
            raise ValueError(f"got {n} cameras but {len(self.targets)} targets")
        if self.initial_estimates is not None and len(self.initial_estimates) != n:
            raise ValueError(f"got {n} cameras but {len(self.initial_estimates)} initial estimates")
        if n > 1 and any(not c.velocity.is_zero for c in self.cameras):
            raise ValueError("moving cameras are only supported with a single camera")
        for j, i in self.graph.edges:
            if not (1 <= j <= n and 1 <= i <= n) or j == i:
                raise ValueError(f"invalid edge [{j}, {i}] for {n} cameras")
        return self

    @property
    def n(self) -> int:
        return len(self.cameras)

    @property
    def is_static(self) -> bool:
        return all(tg.velocity.is_zero for tg in self.targets) and all(
            c.velocity.is_zero for c in self.cameras
        )

    def digraph(self) -> Digraph:
        return Digraph.from_pairs(self.n, self.graph.edges)

    def camera_poses(self) -> list[Pose]:
        return [c.pose() for c in self.cameras]

    def intrinsics(self) -> list[CameraIntrinsics]:
        return [CameraIntrinsics(c.focal_length) for c in self.cameras]

    def target_poses(self) -> list[Pose]:
        return [tg.pose() for tg in self.targets]

    def feature_models(self, settings: NvmoSettings | None = None) -> list[FeatureModel]:
        side = (settings or get_settings()).feature_side
        return [
            FeatureModel(np.asarray(tg.features, dtype=float))
            if tg.features is not None
            else FeatureModel.square(side)
            for tg in self.targets
        ]

    def initial_poses(self, settings: NvmoSettings | None = None) -> list[Pose]:
        if self.initial_estimates is not None:
            return [e.pose() for e in self.initial_estimates]
        pos = (settings or get_settings()).initial_position
        return [Pose.from_parts(pos) for _ in range(self.n)]

    def dt(self, settings: NvmoSettings | None = None) -> float:
        return self.integration.dt or (settings or get_settings()).dt

    def horizon(self, settings: NvmoSettings | None = None) -> float:
        if self.integration.horizon is not None:
            return self.integration.horizon
        s = settings or get_settings()
        return s.horizon_static if self.is_static else s.horizon_moving

    def with_overrides(
        self,
        dt: float | None = None,
        horizon: float | None = None,
        seed: int | None = None,
    ) -> Scenario:
        integration = self.integration.model_copy(
            update={k: v for k, v in {"dt": dt, "horizon": horizon}.items() if v is not None}
        )
        noise = self.noise if seed is None else self.noise.model_copy(update={"seed": seed})
        return self.model_copy(update={"integration": integration, "noise": noise})


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Validate a scenario document; every failure becomes a :class:`ScenarioError`."""
    if not text.strip():
        raise ScenarioError(f"{source}: empty scenario document")
    try:
        return Scenario.model_validate_json(text)
    except ValidationError as e:
        raise ScenarioError(f"{source}: invalid scenario: {e}") from e


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e
    return parse_scenario(text, str(path))


def scenario_json_schema() -> str:
    return json.dumps(Scenario.model_json_schema(), indent=2, sort_keys=True)
