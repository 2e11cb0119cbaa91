import numpy as np
import pytest
from numpy.testing import assert_allclose

from nvmo.errors import DegenerateFeatureError, FeatureAtCameraPlaneError
from nvmo.geometry.camera import (
    CameraIntrinsics,
    FeatureModel,
    Measurement,
    condition_number,
    image_jacobian,
    project,
    reconstruct_error,
)
from nvmo.geometry.liegroup import Pose, big_E_R

CAM = CameraIntrinsics(0.01)
DIRECTION = np.array([0.4, -0.3, 0.5, 0.2, -0.6, 0.3])
DIRECTION = DIRECTION / np.linalg.norm(DIRECTION)


def _small_error_pose(h: float, d: np.ndarray = DIRECTION) -> Pose:
    return Pose.from_parts(h * d[:3], h * d[3:])


def test_project_fronto_parallel_square():
    """A square one meter in front of the camera maps to +-lambda*side/2 / z."""
    model = FeatureModel.square(0.5)
    f = project(Pose.from_parts([0.0, 0.0, -1.0]), model, CAM).f
    assert f.shape == (8,)
    assert_allclose(f[:2], [-0.0025, -0.0025])
    assert_allclose(f[4:6], [0.0025, 0.0025])


def test_project_scale_consistency():
    """Scaling the scene and the translation together leaves the image unchanged."""
    model = FeatureModel.square(0.25)
    g = Pose.from_parts([0.1, -0.2, -2.5], [0.1, 0.2, -0.1])
    scaled_model = FeatureModel(3.0 * model.points)
    scaled_g = Pose(g.rot, 3.0 * g.pos)
    assert_allclose(project(scaled_g, scaled_model, CAM).f, project(g, model, CAM).f, atol=1e-15)


def test_project_rejects_points_at_camera_plane():
    """Features with zero depth cannot be projected."""
    with pytest.raises(FeatureAtCameraPlaneError):
        project(Pose.from_parts([0.0, 0.0, 0.0]), FeatureModel.square(), CAM)


def test_feature_model_validation():
    """Fewer than four points or duplicated points are refused."""
    with pytest.raises(ValueError):
        FeatureModel(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        FeatureModel(np.array([[0.0, 0, 0], [0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0]]))


def test_measurement_validation():
    """Odd lengths and non-finite entries are refused."""
    with pytest.raises(ValueError):
        Measurement(np.zeros(3))
    with pytest.raises(ValueError):
        Measurement(np.array([0.0, np.nan]))


def test_intrinsics_validation():
    with pytest.raises(ValueError):
        CameraIntrinsics(0.0)


def test_jacobian_translation_column_on_axis():
    """For a feature on the optical axis, d f_x / d p_x equals lambda / z."""
    model = FeatureModel(
        np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [0.1, 0.1, 0.05]])
    )
    g_bar = Pose.from_parts([0.0, 0.0, -2.0])
    jac = image_jacobian(g_bar, model, CAM)
    assert jac.shape == (8, 6)
    assert jac[0, 0] == pytest.approx(0.01 / -2.0, rel=1e-6)
    assert jac[1, 1] == pytest.approx(0.01 / -2.0, rel=1e-6)


def test_linearization_residual_is_second_order():
    """f - f_bar agrees with J E_R(g_e) up to one percent for ||E_R|| = 1e-3."""
    model = FeatureModel.square(0.25)
    g_bar = Pose.from_parts([0.05, -0.03, -2.5], [0.1, -0.2, 0.05])
    g_e = _small_error_pose(1e-3)
    f_err = project(g_bar @ g_e, model, CAM).f - project(g_bar, model, CAM).f
    predicted = image_jacobian(g_bar, model, CAM) @ big_E_R(g_e).vector()
    assert np.linalg.norm(f_err - predicted) <= 1e-2 * np.linalg.norm(f_err)


def test_reconstruction_of_small_error():
    """A 1e-4 error of a target one meter away is recovered within 1e-6."""
    model = FeatureModel.square(0.5)
    g_bar = Pose.from_parts([0.0, 0.0, -1.0])
    g_e = _small_error_pose(1e-4)
    f = project(g_bar @ g_e, model, CAM)
    e = reconstruct_error(f, g_bar, model, CAM)
    assert np.linalg.norm(e.vector() - big_E_R(g_e).vector()) <= 1e-6


def test_reconstruction_error_shrinks_quadratically():
    """Ten times smaller errors give roughly a hundred times smaller residuals."""
    model = FeatureModel.square(0.5)
    g_bar = Pose.from_parts([0.0, 0.0, -1.0])

    def residual(h: float) -> float:
        g_e = _small_error_pose(h)
        e = reconstruct_error(project(g_bar @ g_e, model, CAM), g_bar, model, CAM)
        return float(np.linalg.norm(e.vector() - big_E_R(g_e).vector()))

    ratio = residual(1e-2) / residual(1e-3)
    assert 33.0 <= ratio <= 300.0


def test_zero_image_error_gives_zero_estimate():
    """Measuring exactly the estimated image yields a zero error vector."""
    model = FeatureModel.square()
    g_bar = Pose.from_parts([0.1, 0.1, -2.0], [0.0, 0.1, 0.0])
    e = reconstruct_error(project(g_bar, model, CAM), g_bar, model, CAM)
    assert_allclose(e.vector(), np.zeros(6), atol=1e-15)


def test_collinear_features_are_degenerate():
    """Points on one line leave rotation about that line unobservable."""
    model = FeatureModel(np.array([[0.0, 0, 0], [0.1, 0, 0], [0.2, 0, 0], [0.3, 0, 0]]))
    g_bar = Pose.from_parts([0.0, 0.0, -2.0])
    with pytest.raises(DegenerateFeatureError) as info:
        reconstruct_error(project(g_bar, model, CAM), g_bar, model, CAM)
    assert info.value.limit == pytest.approx(1e8)


def test_condition_number_is_moderate_for_square():
    """The default square seen head-on is well conditioned."""
    cond = condition_number(Pose.from_parts([0.0, 0.0, -2.5]), FeatureModel.square(), CAM)
    assert 1.0 <= cond < 1e8


def test_project_direct_formula():
    """Camera-frame points map to lambda/z [x, y], with the sign of z kept."""
    model = FeatureModel(
        np.array([[1.0, 2.0, 2.0], [0.1, 0.2, -2.0], [0.0, 0.0, -2.0], [1.0, 0.0, 1.0]])
    )
    f = project(Pose.identity(), model, CameraIntrinsics(1.0)).f
    assert_allclose(f[:2], [0.5, 1.0])
    assert_allclose(f[2:4], [-0.05, -0.1])
    assert_allclose(f[4:6], [0.0, 0.0])


def test_project_doubles_with_focal_length():
    """Doubling lambda doubles every measurement entry exactly."""
    model = FeatureModel.square(0.25)
    g = Pose.from_parts([0.1, -0.2, -2.5], [0.1, 0.2, -0.1])
    single = project(g, model, CameraIntrinsics(0.01)).f
    double = project(g, model, CameraIntrinsics(0.02)).f
    assert np.array_equal(double, 2.0 * single)


def test_reconstruction_is_quadratic_over_random_poses(rng):
    """Residuals fall by a factor near 100 per decade of h in {1e-2, 1e-3, 1e-4}."""
    model = FeatureModel.square(0.25)
    for _ in range(5):
        g_bar = Pose.from_parts(
            [*rng.uniform(-0.2, 0.2, size=2), rng.uniform(-3.5, -1.5)],
            rng.uniform(-0.3, 0.3, size=3),
        )
        d = rng.normal(size=6)
        d /= np.linalg.norm(d)

        def residual(h: float) -> float:
            g_e = _small_error_pose(h, d)
            e = reconstruct_error(project(g_bar @ g_e, model, CAM), g_bar, model, CAM)
            return float(np.linalg.norm(e.vector() - big_E_R(g_e).vector()))

        r2, r3, r4 = residual(1e-2), residual(1e-3), residual(1e-4)
        assert 33.0 <= r2 / r3 <= 300.0
        assert 33.0 <= r3 / r4 <= 300.0
