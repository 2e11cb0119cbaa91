import os
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.transform import Rotation as ScipyRotation

from nvmo.config import NvmoSettings
from nvmo.geometry.liegroup import Pose, Rotation

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

TARGET_POSITIONS = [
    [0.12, 0.55, -2.78],
    [0.22, 0.48, -2.85],
    [0.33, 0.33, -2.97],
    [0.42, 0.23, -3.08],
    [0.56, 0.12, -3.15],
]
TARGET_ROTVECS = [
    [-0.3, -0.3, -0.3],
    [-0.3, -0.4, -0.4],
    [-0.4, -0.3, -0.3],
    [-0.3, -0.4, -0.3],
    [-0.3, -0.3, -0.4],
]


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture
def targets() -> list[Pose]:
    """The five world-frame targets of the shipped scenarios."""
    return [Pose.from_parts(p, r) for p, r in zip(TARGET_POSITIONS, TARGET_ROTVECS)]


@pytest.fixture
def settings(tmp_path, monkeypatch) -> NvmoSettings:
    """Default settings, isolated from any nvmo.yaml or .env in the working directory."""
    monkeypatch.chdir(tmp_path)
    for key in list(os.environ):
        if key.startswith("NVMO_") and key != "NVMO_LOG":
            monkeypatch.delenv(key)
    return NvmoSettings()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


def random_rotations(rng: np.random.Generator, count: int) -> list[Rotation]:
    mats = ScipyRotation.random(count, random_state=rng).as_matrix()
    return [Rotation(m) for m in mats]
