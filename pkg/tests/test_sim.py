import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nvmo.analysis.bounds import entry_time
from nvmo.errors import (
    AssumptionViolationError,
    FeatureAtCameraPlaneError,
    ScenarioError,
    SimulationError,
)
from nvmo.geometry.liegroup import Pose, Twist, phi, pose_average, rot_log, se3_exp
from nvmo.network.graph import Digraph, validate_assumption1
from nvmo.schemas.assumptions import AssumptionStatus
from nvmo.sim import (
    averaging_report,
    check_assumptions,
    load_scenario,
    parse_scenario,
    run,
    target_statistics,
    tracking_report,
    world_step,
)
from nvmo.sim.scenario import VelocityProfile, scenario_json_schema

SHIPPED = ["static_ks100", "static_ks01", "moving_ke3", "moving_ke30", "single_camera"]


def _two_camera_doc(**changes) -> dict:
    doc = {
        "name": "two",
        "cameras": [
            {"position": [0.0, 0.0, 0.0], "focal_length": 0.01},
            {"position": [1.0, 0.0, 0.0], "focal_length": 0.01},
        ],
        "targets": [
            {"position": [0.1, 0.2, -2.5], "xi_theta": [-0.2, 0.1, 0.3]},
            {"position": [0.3, 0.1, -2.7], "xi_theta": [-0.3, 0.0, 0.2]},
        ],
        "graph": {"edges": [[1, 2], [2, 1]]},
        "gains": {"k_e": 1.0, "k_s": 10.0},
        "integration": {"dt": 0.001, "horizon": 0.05},
    }
    doc.update(changes)
    return doc


def _parse(doc: dict):
    return parse_scenario(json.dumps(doc))


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_scenarios_load(scenario_dir, name):
    sc = load_scenario(scenario_dir / f"{name}.json")
    assert sc.name == name
    assert validate_assumption1(sc.digraph()).ok


def test_shipped_scenario_kinds(scenario_dir):
    assert load_scenario(scenario_dir / "static_ks100.json").is_static
    moving = load_scenario(scenario_dir / "moving_ke3.json")
    assert not moving.is_static
    assert moving.digraph() == Digraph.star(5)


@pytest.mark.parametrize(
    "doc",
    [
        _two_camera_doc(targets=[{"position": [0.0, 0.0, -2.0]}]),
        _two_camera_doc(graph={"edges": [[1, 3]]}),
        _two_camera_doc(gains={"k_e": 0.0, "k_s": 1.0}),
        _two_camera_doc(unknown_field=1),
        _two_camera_doc(
            cameras=[
                {
                    "position": [0.0, 0.0, 0.0],
                    "focal_length": 0.01,
                    "velocity": {"kind": "constant", "twist": [0.1, 0, 0, 0, 0, 0]},
                },
                {"position": [1.0, 0.0, 0.0], "focal_length": 0.01},
            ]
        ),
    ],
)
def test_invalid_scenarios(doc):
    with pytest.raises(ScenarioError):
        _parse(doc)


def test_empty_and_missing_scenarios(tmp_path):
    with pytest.raises(ScenarioError):
        parse_scenario("   ")
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")


def _object_shapes(root: dict, node: dict, path: tuple = (), out: dict | None = None) -> dict:
    """Property names, required names and closedness of every object, keyed by path."""
    out = {} if out is None else out
    if "$ref" in node:
        node = root["$defs"][node["$ref"].rsplit("/", 1)[-1]]
    for branch in [*node.get("anyOf", []), *node.get("allOf", [])]:
        _object_shapes(root, branch, path, out)
    if "items" in node:
        _object_shapes(root, node["items"], (*path, "[]"), out)
    if "properties" in node:
        out[path] = (
            sorted(node["properties"]),
            sorted(node.get("required", [])),
            node.get("additionalProperties", True),
        )
        for name, child in node["properties"].items():
            _object_shapes(root, child, (*path, name), out)
    return out


def test_shipped_schema_matches_models(scenario_dir):
    """scenario.schema.json describes the same documents as the pydantic models."""
    shipped = json.loads((scenario_dir / "scenario.schema.json").read_text(encoding="utf-8"))
    generated = json.loads(scenario_json_schema())
    shapes = _object_shapes(generated, generated)
    assert _object_shapes(shipped, shipped) == shapes
    assert shapes[()][1] == ["cameras", "gains", "targets"]
    assert shapes[("cameras", "[]", "velocity", "breakpoints", "[]")][1] == ["t", "twist"]


def test_piecewise_profile_interpolates_and_holds():
    profile = VelocityProfile.model_validate(
        {
            "kind": "piecewise",
            "breakpoints": [
                {"t": 0.0, "twist": [0, 0, 0, 0, 0, 0]},
                {"t": 1.0, "twist": [1.0, 0, 0, 0, 0, 2.0]},
            ],
        }
    )
    assert_allclose(profile.vector_at(0.5), [0.5, 0, 0, 0, 0, 1.0])
    assert_allclose(profile.vector_at(5.0), [1.0, 0, 0, 0, 0, 2.0])
    assert profile.sup_norms() == (1.0, 2.0)
    assert not profile.is_zero


def test_piecewise_profile_needs_increasing_times():
    with pytest.raises(ValueError):
        VelocityProfile.model_validate(
            {
                "kind": "piecewise",
                "breakpoints": [
                    {"t": 1.0, "twist": [0, 0, 0, 0, 0, 0]},
                    {"t": 1.0, "twist": [0, 0, 0, 0, 0, 0]},
                ],
            }
        )


def test_with_overrides_keeps_original():
    sc = _parse(_two_camera_doc())
    changed = sc.with_overrides(dt=0.002, horizon=1.0, seed=5)
    assert changed.integration.dt == 0.002
    assert changed.integration.horizon == 1.0
    assert changed.noise.seed == 5
    assert sc.integration.dt == 0.001


def test_world_step():
    g = Pose.from_parts([0.1, 0.2, -2.0], [0.1, 0.0, 0.2])
    assert_allclose(world_step(g, Twist.zero(), 0.1).homogeneous(), g.homogeneous())
    tw = Twist.from_vector([0.2, 0.0, 0.1, 0.0, 0.3, 0.8])
    twice = world_step(world_step(g, tw, 0.05), tw, 0.05)
    assert_allclose(twice.homogeneous(), world_step(g, tw, 0.1).homogeneous(), atol=1e-14)
    assert_allclose(world_step(g, tw, 0.1).homogeneous(), (g @ se3_exp(tw, 0.1)).homogeneous())


def test_check_assumptions_identity_rotations():
    """Equal orientations pass the pairwise check but are degenerate."""
    targets = [Pose.from_parts([float(k), 0.0, -2.0]) for k in range(3)]
    report = check_assumptions(0.0, targets, graph_flags=validate_assumption1(Digraph.star(3)))
    assert report.components["targets_pairwise"].status == AssumptionStatus.OK
    assert report.components["non_degenerate"].status == AssumptionStatus.DEGRADED
    assert report.status == AssumptionStatus.DEGRADED


def test_check_assumptions_half_turn_violates():
    targets = [
        Pose.from_parts([0.0, 0.0, -2.0]),
        Pose.from_parts([0.1, 0.0, -2.0], [0.0, 0.05, 0.0]),
        Pose.from_parts([0.2, 0.0, -2.0], [0.0, 0.0, math.pi]),
    ]
    report = check_assumptions(0.0, targets)
    assert report.components["targets_pairwise"].status == AssumptionStatus.VIOLATED
    assert report.status == AssumptionStatus.VIOLATED


def test_check_assumptions_scenario_targets_pass(targets):
    estimates = [pose_average(targets)] * len(targets)
    report = check_assumptions(0.0, targets, estimates, validate_assumption1(Digraph.star(5)))
    assert report.status == AssumptionStatus.OK


def test_averaging_report_of_static_scenario(scenario_dir, settings):
    report = averaging_report(
        load_scenario(scenario_dir / "static_ks100.json"), settings, epsilon=1e-4, c=0.0
    )
    assert report.w_const == 1
    assert report.k == pytest.approx(0.01)
    assert report.beta == pytest.approx(0.861, abs=0.01)
    assert report.eps_p == pytest.approx(0.19, abs=0.005)
    assert report.eps_R == pytest.approx(0.31, abs=0.005)


def test_target_statistics_of_moving_scenario(scenario_dir, settings):
    sc = load_scenario(scenario_dir / "moving_ke3.json").with_overrides(horizon=0.5)
    stats = target_statistics(sc, settings)
    assert stats.w_bar_p == pytest.approx(0.2)
    assert stats.w_bar_R == pytest.approx(0.8)
    assert stats.rho_p_sup > 0.0 and stats.rho_R_sup > 0.0
    assert 0.0 < stats.gamma < math.sqrt(2.0)
    report = tracking_report(sc, settings, stats)
    assert report.mu >= 1.0
    assert report.eps_p_track > 1.0 and report.eps_R_track > 1.0


def test_run_records_every_step(settings):
    sc = _parse(_two_camera_doc())
    records = run(sc, settings)
    assert len(records) == 51
    assert records[0].t == 0.0
    assert records[-1].t == pytest.approx(0.05)
    assert all(len(r.err_cam) == 2 for r in records)
    assert all(math.isfinite(r.eps_bound_p) for r in records)


def test_run_fixed_point_for_identical_targets(settings):
    """Exact estimates of identical targets keep both energies at zero."""
    cams = [Pose.from_parts([0.0, 0.0, 0.0]), Pose.from_parts([1.0, 0.0, 0.0])]
    target = Pose.from_parts([0.3, 0.2, -2.5], [-0.2, 0.1, 0.3])
    local = [c.inverse() @ target for c in cams]
    doc = _two_camera_doc(
        targets=[{"position": target.pos.tolist(), "xi_theta": [-0.2, 0.1, 0.3]}] * 2,
        initial_estimates=[
            {"position": g.pos.tolist(), "xi_theta": rot_log(g.rot).tolist()} for g in local
        ],
    )
    records = run(_parse(doc), settings)
    assert max(r.U_p for r in records) < 1e-20
    assert max(abs(r.U_R) for r in records) < 1e-12
    assert all(r.status == AssumptionStatus.DEGRADED for r in records)


def test_run_is_deterministic(settings):
    sc = _parse(_two_camera_doc(noise={"std": 1e-6, "seed": 3}))
    first = [r.model_dump() for r in run(sc, settings)]
    second = [r.model_dump() for r in run(sc, settings)]
    assert first == second
    other = [r.model_dump() for r in run(sc.with_overrides(seed=4), settings)]
    assert other[-1]["U_p"] != first[-1]["U_p"]


def test_run_refuses_unbalanced_graph(settings):
    sc = _parse(_two_camera_doc(graph={"edges": [[1, 2]]}))
    with pytest.raises(AssumptionViolationError):
        run(sc, settings)


def test_run_reports_failing_step(settings):
    """A target driven into the camera plane stops the run with the step index."""
    doc = {
        "cameras": [{"position": [0.0, 0.0, 0.0], "focal_length": 0.01}],
        "targets": [
            {
                "position": [0.0, 0.0, -0.5],
                "velocity": {"kind": "constant", "twist": [0.0, 0.0, 10.0, 0.0, 0.0, 0.0]},
            }
        ],
        "gains": {"k_e": 1.0, "k_s": 0.0},
        "integration": {"dt": 0.001, "horizon": 0.2},
    }
    with pytest.raises(SimulationError) as info:
        run(_parse(doc), settings)
    assert 0 < info.value.step <= 50
    assert isinstance(info.value.cause, FeatureAtCameraPlaneError)


def test_moving_run_fills_tracking_bounds(scenario_dir, settings):
    sc = load_scenario(scenario_dir / "moving_ke3.json").with_overrides(horizon=0.05)
    records = run(sc, settings)
    bounds = {r.eps_bound_p for r in records}
    assert len(bounds) == 1 and math.isfinite(bounds.pop())
    assert all(r.omega_star_sq <= r.omega_bound_sq for r in records)
    assert all(r.moving for r in records)


def test_translating_targets_keep_average_orientation(scenario_dir, settings):
    """Pure translation leaves the average orientation fixed, meeting its zero bound."""
    doc = json.loads((scenario_dir / "moving_ke3.json").read_text(encoding="utf-8"))
    for tg in doc["targets"]:
        tg["velocity"] = {"kind": "constant", "twist": [0.2, 0.0, 0.0, 0.0, 0.0, 0.0]}
    doc["integration"] = {"dt": 0.001, "horizon": 0.02}
    records = run(parse_scenario(json.dumps(doc)), settings)
    assert all(r.omega_star_sq == 0.0 and r.omega_bound_sq == 0.0 for r in records)
    assert all(r.gamma > 0.0 for r in records)


@pytest.mark.slow
def test_static_cooperative_run(scenario_dir, settings):
    """Strong coupling brings both energies below the averaging levels and keeps S invariant."""
    sc = load_scenario(scenario_dir / "static_ks100.json")
    records = run(sc, settings)
    t = [r.t for r in records]
    up = np.array([r.U_p for r in records])
    ur = np.array([r.U_R for r in records])
    rho_p, rho_R = records[0].rho_p, records[0].rho_R

    assert entry_time(t, up, 0.19 * rho_p) is not None
    assert entry_time(t, ur, 0.31 * rho_R) is not None
    assert entry_time(t, up, [r.eps_bound_p for r in records]) is not None
    assert entry_time(t, ur, [r.eps_bound_R for r in records]) is not None
    assert min(r.min_eig_S for r in records) > 0.0

    dt = sc.dt(settings)
    outside_p = up[:-1] > rho_p
    outside_R = ur[:-1] > rho_R
    assert np.all(np.diff(up)[outside_p] <= 1e-9 * dt)
    assert np.all(np.diff(ur)[outside_R] <= 1e-9 * dt)

    targets = sc.target_poses()
    star = pose_average(targets)
    phi_h = max(phi(star.rot.T @ g.rot) for g in targets)
    assert records[-1].phi_max_est <= phi_h + 0.01


@pytest.mark.slow
def test_weak_coupling_is_worse(scenario_dir, settings):
    strong = run(load_scenario(scenario_dir / "static_ks100.json"), settings)
    weak = run(load_scenario(scenario_dir / "static_ks01.json"), settings)
    t = [r.t for r in weak]
    rho_p, rho_R = weak[0].rho_p, weak[0].rho_R
    assert entry_time(t, [r.U_p for r in weak], rho_p) is not None
    assert entry_time(t, [r.U_R for r in weak], rho_R) is not None
    assert weak[-1].U_p > strong[-1].U_p
    assert weak[-1].U_R > strong[-1].U_R


@pytest.mark.slow
def test_single_camera_converges(scenario_dir, settings):
    records = run(load_scenario(scenario_dir / "single_camera.json"), settings)
    assert records[-1].t == pytest.approx(20.0)
    assert records[-1].err_cam[0] < 1e-6


@pytest.mark.slow
def test_tracking_runs(scenario_dir, settings):
    """Moving targets stay within the tracking levels; a larger gain tracks tighter."""
    low = run(load_scenario(scenario_dir / "moving_ke3.json"), settings)
    high = run(load_scenario(scenario_dir / "moving_ke30.json"), settings)
    for records in (low, high):
        t = [r.t for r in records]
        assert entry_time(t, [r.U_p for r in records], [r.eps_bound_p for r in records]) is not None
        assert entry_time(t, [r.U_R for r in records], [r.eps_bound_R for r in records]) is not None
        assert all(r.omega_star_sq < r.omega_bound_sq for r in records)
    tail = len(low) // 3
    assert max(r.U_p for r in high[-tail:]) < max(r.U_p for r in low[-tail:])
    assert max(r.U_R for r in high[-tail:]) < max(r.U_R for r in low[-tail:])


@pytest.mark.slow
def test_halving_dt_changes_final_energies_little(scenario_dir, settings):
    sc = load_scenario(scenario_dir / "static_ks100.json").with_overrides(horizon=20.0)
    coarse = run(sc, settings)[-1]
    fine = run(sc.with_overrides(dt=5e-4), settings)[-1]
    assert fine.U_p == pytest.approx(coarse.U_p, rel=0.01)
    assert fine.U_R == pytest.approx(coarse.U_R, rel=0.01)
