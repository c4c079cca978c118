import csv
import io
import json
import warnings

import numpy as np
import pytest

from conftest import one_joint_model, write_harness
from wbretarget.diffik import IKParams
from wbretarget.kinematics import SystemState, forward_kinematics
from wbretarget.liegroup import rot_z
from wbretarget.pipeline import (AmplitudeExceedsLimit, ConfigError, GeneratorSpec, Sinusoid, StreamConfig,
                                 StreamFormatError, StreamOrder, generate_synthetic_stream, load_config, read_frames,
                                 retarget_frames, run_stream, summarize, write_frames)
from wbretarget.pipeline.streamio import frame_from_json, frame_to_json
from wbretarget.retarget import CorrespondenceMap, CorrespondencePair, LinkMeasurement, MotionFrame, calibrate


def test_zero_amplitude_stream_is_constant(icub):
    frames = list(generate_synthetic_stream(GeneratorSpec(icub, {}, duration=0.1)))
    assert len(frames) == 20
    ref = forward_kinematics(icub, SystemState.neutral(icub))
    for f in frames:
        for name, m in f.entries.items():
            np.testing.assert_array_equal(m.orientation, ref[name].rotation)
            np.testing.assert_array_equal(m.angular_velocity, 0.0)


def test_single_joint_sinusoid_closed_form():
    model = one_joint_model()
    spec = GeneratorSpec(model, {"j0": Sinusoid(0.3, 1.0)}, duration=1.0, rate=50, links=["tip"])
    for f in generate_synthetic_stream(spec):
        m = f.entries["tip"]
        np.testing.assert_allclose(m.orientation, rot_z(0.3 * np.sin(2 * np.pi * f.t)), atol=1e-15)
        np.testing.assert_allclose(m.angular_velocity, [0, 0, 0.3 * 2 * np.pi * np.cos(2 * np.pi * f.t)], atol=1e-15)


def test_angular_velocity_matches_finite_difference(human):
    from scipy.spatial.transform import Rotation
    from wbretarget.pipeline.synthetic import default_sinusoids
    spec = GeneratorSpec(human, default_sinusoids(human, 0.4, 0.7), duration=1.0, rate=1000)
    frames = list(generate_synthetic_stream(spec))
    a, b, c = frames[100], frames[101], frames[102]
    for name in ("Head", "RightHand", "LeftToe"):
        fd = Rotation.from_matrix(c.entries[name].orientation @ a.entries[name].orientation.T).as_rotvec() / 0.002
        np.testing.assert_allclose(fd, b.entries[name].angular_velocity, atol=1e-4)


def test_human_stream_scale(human):
    spec = GeneratorSpec(human, {}, duration=60.0, rate=200, links=["Pelvis"])
    count = 0
    last = -1.0
    for f in generate_synthetic_stream(spec):
        assert f.t > last
        last = f.t
        count += 1
    assert count == 12000
    frames = list(generate_synthetic_stream(GeneratorSpec(human, {"Head_rotx": Sinusoid(0.5, 1.0)}, 0.05)))
    assert len(frames) == 10 and len(frames[0].entries) == len(human.links)


def test_amplitude_exceeds_limit():
    model = one_joint_model(pos_min=-0.2, pos_max=0.2)
    with pytest.raises(AmplitudeExceedsLimit):
        list(generate_synthetic_stream(GeneratorSpec(model, {"j0": Sinusoid(0.3, 1.0)})))


def test_stream_json_roundtrip(icub):
    frames = list(generate_synthetic_stream(GeneratorSpec(icub, {"r_elbow": Sinusoid(0.5, 1.0, 0.0, -0.9)}, 0.02)))
    buf = io.StringIO()
    assert write_frames(frames, buf) == 4
    back = list(read_frames(io.StringIO(buf.getvalue())))
    for a, b in zip(frames, back):
        assert a.t == b.t
        for name in a.entries:
            np.testing.assert_allclose(a.entries[name].orientation, b.entries[name].orientation, atol=1e-15)
            np.testing.assert_array_equal(a.entries[name].angular_velocity, b.entries[name].angular_velocity)


def test_stream_errors():
    good = '{"t": 0.0, "links": {"a": {"quat": [1, 0, 0, 0], "omega": [0, 0, 0]}}}'
    with pytest.raises(StreamFormatError):
        frame_from_json('{"t": 0.0, "links": {"a": {"quat": [1, 0, 0, 0.1], "omega": [0, 0, 0]}}}')
    with pytest.raises(StreamFormatError):
        frame_from_json('{"t": 0.0}')
    with pytest.raises(StreamFormatError):
        frame_from_json("not json")
    with pytest.raises(StreamOrder):
        list(read_frames([good, good]))
    assert len(list(read_frames([good, "", good.replace("0.0", "0.5", 1)]))) == 2
    assert json.loads(frame_to_json(frame_from_json(good)))["links"]["a"]["quat"] == [1.0, 0.0, 0.0, 0.0]


def test_retarget_rejects_time_regression(minimal_model):
    cmap = CorrespondenceMap((CorrespondencePair("h", "tip"),))
    m = LinkMeasurement(np.eye(3), np.zeros(3))
    frames = [MotionFrame(0.0, {"h": m}), MotionFrame(0.01, {"h": m}), MotionFrame(0.01, {"h": m})]
    with pytest.raises(StreamOrder):
        list(retarget_frames(minimal_model, cmap, frames, IKParams()))


def test_calibration_pose_fixed_point(icub, human):
    from wbretarget.fixtures import HUMAN_TO_ROBOT
    hs = SystemState.neutral(human, np.random.default_rng(3).uniform(-0.3, 0.3, human.n))
    rs = SystemState.neutral(icub, np.random.default_rng(4).uniform(-0.1, 0.1, icub.n))
    rs.s = np.clip(rs.s, icub.lower, icub.upper)
    H = {k: v.rotation for k, v in forward_kinematics(human, hs).items()}
    R = {k: v.rotation for k, v in forward_kinematics(icub, rs).items()}
    cmap = calibrate(H, R, list(HUMAN_TO_ROBOT.items()))
    frame = MotionFrame(0.0, {k: LinkMeasurement(v, np.zeros(3)) for k, v in H.items()})
    recs = list(retarget_frames(icub, cmap, [frame, MotionFrame(0.005, frame.entries)], IKParams(), state=rs))
    for rec in recs:
        assert max(rec.link_errors.values()) < 1e-9


def test_empty_stream(tmp_path):
    cfg = write_harness(tmp_path, duration=0.0)
    summary = run_stream(load_config(cfg.read_text(), tmp_path))
    assert summary["frames"] == 0
    rows = list(csv.reader(open(tmp_path / "out.csv")))
    assert len(rows) == 1 and rows[0][0] == "t"
    assert json.loads((tmp_path / "summary.json").read_text())["frames"] == 0


def test_run_stream_outputs(tmp_path, icub):
    cfg = write_harness(tmp_path, robot="icub", human="icub", duration=0.5, amplitude=0.2)
    summary = run_stream(load_config(cfg.read_text(), tmp_path))
    assert summary["frames"] == 100
    rows = list(csv.DictReader(open(tmp_path / "out.csv")))
    assert len(rows) == 100
    header = list(rows[0])
    assert header[:1 + icub.n] == ["t", *icub.dof_order]
    assert header[-2:] == ["active_constraints", "solve_time_s"]
    t = [float(r["t"]) for r in rows]
    assert all(b > a for a, b in zip(t, t[1:]))
    assert all(float(r["solve_time_s"]) > 0 for r in rows)
    assert summary["solve_time_p99_s"] >= summary["solve_time_p50_s"] > 0
    assert summary["qp_not_optimal"] == 0


def test_determinism(tmp_path):
    cfg = write_harness(tmp_path, duration=0.5)
    outs = []
    for _ in range(2):
        run_stream(load_config(cfg.read_text(), tmp_path))
        outs.append([row[:-1] for row in csv.reader(open(tmp_path / "out.csv"))])
    assert outs[0] == outs[1]


def test_config_loading(tmp_path):
    cfg = load_config("model: a.urdf\nlambda: 0.01\nfixed-base: true\nrate: 100\ninput: '-'\n", tmp_path)
    assert cfg.model == str(tmp_path / "a.urdf")
    assert cfg.input == "-"
    p = cfg.ik_params()
    assert p.lam == 0.01 and p.fixed_base and p.dt == 0.01
    with pytest.raises(ConfigError):
        load_config("bogus: 1\n")
    with pytest.raises(ConfigError):
        load_config("rate: 0\n")
    with pytest.raises(ConfigError):
        run_stream(StreamConfig())


def test_summary_warmup_and_missing_links():
    from wbretarget.pipeline.runner import JointTrajectoryRecord
    recs = [JointTrajectoryRecord(0.1 * k, np.zeros(1), {"a": float(k)} if k % 2 else {"a": float(k), "b": 1.0},
                                  0, 1e-3) for k in range(10)]
    s = summarize(recs, ["a", "b"], warmup=0.5)
    assert s["frames"] == 10 and s["frames_scored"] == 5
    assert s["per_link_mean_error_rad"]["b"] == 1.0
    assert s["max_error_rad"] == 9.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s = summarize(recs[1:2], ["a", "b"])
    assert np.isnan(s["per_link_mean_error_rad"]["b"])
