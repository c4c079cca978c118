import numpy as np
import pytest

from wbretarget.fixtures import build_model
from wbretarget.model import Joint, KinematicModel, Link, parse_urdf

MINIMAL_URDF = """<?xml version="1.0"?>
<robot name="minimal">
  <link name="base"><visual><geometry><box size="1 1 1"/></geometry></visual></link>
  <link name="tip"><inertial><mass value="1.0"/></inertial></link>
  <joint name="j0" type="revolute">
    <parent link="base"/>
    <child link="tip"/>
    <origin xyz="1 0 0" rpy="0 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-2.0" upper="2.0" velocity="5.0" effort="1"/>
  </joint>
</robot>
"""


def one_joint_model(pos_min=-2.0, pos_max=2.0, offset=(1.0, 0.0, 0.0), vel_max=10.0):
    """Root ``base`` and link ``tip`` on a z-axis revolute joint at ``offset``."""
    return KinematicModel("one", "base", (Link("base"), Link("tip", "j0")),
                          (Joint("j0", "revolute", "base", "tip", (0.0, 0.0, 1.0), offset, (0.0, 0.0, 0.0),
                                 pos_min, pos_max, vel_max),))


def planar_two_link():
    return KinematicModel("planar", "base", (Link("base"), Link("l1", "j1"), Link("l2", "j2")), (
        Joint("j1", "revolute", "base", "l1", (0.0, 0.0, 1.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), -3.0, 3.0),
        Joint("j2", "revolute", "l1", "l2", (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.0, 0.0, 0.0), -3.0, 3.0),
    ))


def random_tree_model(rng, n_joints, fixed_fraction=0.2, name="random"):
    """Random tree: random parents, origins, rpy, axes; mixes revolute, continuous and fixed joints."""
    links = [Link("root")]
    joints = []
    for k in range(n_joints):
        parent = links[rng.integers(len(links))].name
        child = f"link{k}"
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        u = rng.random()
        kind = "fixed" if u < fixed_fraction else ("continuous" if u < fixed_fraction + 0.15 else "revolute")
        lo, hi = (-3.0, 3.0) if kind == "revolute" else (None, None)
        joints.append(Joint(f"j{k}", kind, parent, child, tuple(axis), tuple(rng.uniform(-0.4, 0.4, 3)),
                            tuple(rng.uniform(-np.pi, np.pi, 3)), lo, hi, 10.0))
        links.append(Link(child, f"j{k}"))
    return KinematicModel(name, "root", tuple(links), tuple(joints))


def random_state(rng, model, spread=1.0):
    from scipy.spatial.transform import Rotation
    from wbretarget.kinematics import SystemState
    lo = np.where(np.isfinite(model.lower), model.lower, -np.pi)
    hi = np.where(np.isfinite(model.upper), model.upper, np.pi)
    s = rng.uniform(lo, hi) * spread
    return SystemState(rng.uniform(-1, 1, 3), Rotation.random(random_state=rng.integers(2**31)).as_matrix(), s)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def icub():
    return build_model("icub")


@pytest.fixture(scope="session")
def human():
    return build_model("human")


@pytest.fixture
def minimal_model():
    return parse_urdf(MINIMAL_URDF)


def write_harness(tmp, robot="icub", human="human", links=None, duration=2.0, amplitude=0.3, frequency=0.5,
                  extra=""):
    """Write URDFs, an identity-calibration correspondence and a run config under ``tmp``."""
    from wbretarget.fixtures import HUMAN_TO_ROBOT, humanoid_urdf
    from wbretarget.retarget import CorrespondenceMap, CorrespondencePair, save_correspondence

    (tmp / f"{robot}.urdf").write_text(humanoid_urdf(robot), encoding="utf-8")
    (tmp / f"{human}.urdf").write_text(humanoid_urdf(human), encoding="utf-8")
    robot_model = build_model(robot)
    pairs = [(h, r) for h, r in HUMAN_TO_ROBOT.items() if robot_model.has_link(r)]
    if human == robot:
        pairs = [(r, r) for _, r in pairs]
    if links is not None:
        pairs = [p for p in pairs if p[1] in links]
    cmap = CorrespondenceMap(tuple(CorrespondencePair(h, r) for h, r in pairs))
    (tmp / "map.yaml").write_text(save_correspondence(cmap), encoding="utf-8")
    cfg = (f"model: {robot}.urdf\ncorrespondence: map.yaml\noutput: out.csv\nsummary: summary.json\n"
           f"generator:\n  model: {human}.urdf\n  duration: {duration}\n  rate: 200\n"
           f"  default: {{amplitude: {amplitude}, frequency: {frequency}}}\n" + extra)
    (tmp / "run.yaml").write_text(cfg, encoding="utf-8")
    return tmp / "run.yaml"


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
