"""Generated humanoid-shaped URDF fixtures.

The trees are coarse stand-ins for the robots and the human model used in
retargeting experiments: the joint counts and the limb layout match, the
geometry does not. All link frames are aligned with the world at the zero
configuration, so a shared zero pose is a natural calibration pose.

Run ``python -m wbretarget.fixtures OUTDIR`` to write every fixture to disk.
"""
from __future__ import annotations

import sys
from pathlib import Path

from .model import Joint, KinematicModel, Link, to_urdf

X, Y, Z = (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)


def _arm(side, sign, parent, shoulder, upper, fore, wrist_axes):
    s = side
    segs = [
        (f"{s}_upper_arm", parent, shoulder,
         [(f"{s}_shoulder_pitch", Y, -1.6, 0.5), (f"{s}_shoulder_roll", X, *sorted((0.0, sign * 2.0))),
          (f"{s}_shoulder_yaw", Z, -1.0, 1.0)]),
        (f"{s}_forearm", f"{s}_upper_arm", (0.0, 0.0, -upper), [(f"{s}_elbow", Y, -1.8, 0.0)]),
    ]
    hand = [(f"{s}_{name}", axis, -lo_hi, lo_hi) for name, axis, lo_hi in wrist_axes]
    segs.append((f"{s}_hand", f"{s}_forearm", (0.0, 0.0, -fore), hand))
    return segs


def _leg(side, sign, hip_axes=None):
    s = side
    hip = hip_axes or [(f"{s}_hip_pitch", Y, -1.5, 0.6), (f"{s}_hip_roll", X, -0.5, 0.5),
                       (f"{s}_hip_yaw", Z, -0.8, 0.8)]
    return [
        (f"{s}_thigh", "pelvis", (0.0, sign * 0.08, -0.05), hip),
        (f"{s}_shin", f"{s}_thigh", (0.0, 0.0, -0.24), [(f"{s}_knee", Y, 0.0, 2.0)]),
        (f"{s}_foot", f"{s}_shin", (0.0, 0.0, -0.22),
         [(f"{s}_ankle_pitch", Y, -0.7, 0.7), (f"{s}_ankle_roll", X, -0.4, 0.4)]),
    ]


_WRIST3 = [("wrist_prosup", Z, 1.2), ("wrist_pitch", Y, 1.0), ("wrist_yaw", X, 0.6)]


def _icub():
    segs = [
        ("torso", "pelvis", (0.0, 0.0, 0.1),
         [("torso_pitch", Y, -0.4, 1.2), ("torso_roll", X, -0.5, 0.5), ("torso_yaw", Z, -0.9, 0.9)]),
        ("head", "torso", (0.0, 0.0, 0.3),
         [("neck_pitch", Y, -0.8, 0.5), ("neck_roll", X, -0.6, 0.6), ("neck_yaw", Z, -0.9, 0.9)]),
    ]
    segs += _arm("r", -1, "torso", (0.0, -0.15, 0.25), 0.15, 0.14, _WRIST3)
    segs += _arm("l", 1, "torso", (0.0, 0.15, 0.25), 0.15, 0.14, _WRIST3)
    return segs + _leg("r", -1) + _leg("l", 1)


def _atlas():
    segs = [
        ("torso", "pelvis", (0.0, 0.0, 0.12),
         [("back_bkz", Z, -0.6, 0.6), ("back_bky", Y, -0.2, 0.5), ("back_bkx", X, -0.5, 0.5)]),
        ("head", "torso", (0.0, 0.0, 0.45), [("neck_ry", Y, -0.6, 1.1)]),
    ]
    segs += _arm("r", -1, "torso", (0.0, -0.22, 0.3), 0.3, 0.3, _WRIST3)
    segs += _arm("l", 1, "torso", (0.0, 0.22, 0.3), 0.3, 0.3, _WRIST3)
    return segs + _leg("r", -1) + _leg("l", 1)


def _nao():
    segs = [
        ("torso", "pelvis", (0.0, 0.0, 0.1), []),
        ("head", "torso", (0.0, 0.0, 0.13), [("head_yaw", Z, -2.0, 2.0), ("head_pitch", Y, -0.6, 0.5)]),
    ]
    for side, sign in (("r", -1), ("l", 1)):
        segs += [
            (f"{side}_upper_arm", "torso", (0.0, sign * 0.1, 0.1),
             [(f"{side}_shoulder_pitch", Y, -2.0, 2.0), (f"{side}_shoulder_roll", X, *sorted((0.0, sign * 1.3)))]),
            (f"{side}_forearm", f"{side}_upper_arm", (0.0, 0.0, -0.105),
             [(f"{side}_elbow_yaw", Z, -2.0, 2.0), (f"{side}_elbow_roll", Y, -1.5, 0.0)]),
            (f"{side}_hand", f"{side}_forearm", (0.0, 0.0, -0.11), [(f"{side}_wrist_yaw", Z, -1.8, 1.8)]),
        ]
    for side, sign in (("r", -1), ("l", 1)):
        segs += _leg(side, sign, [(f"{side}_hip_yaw", Z, -0.7, 0.7), (f"{side}_hip_roll", X, -0.4, 0.4),
                                  (f"{side}_hip_pitch", Y, -1.5, 0.5)])
    return segs


def _baxter():
    segs = [
        ("torso", "pelvis", (0.0, 0.0, 0.3), []),
        ("head", "torso", (0.0, 0.0, 0.7), [("head_pan", Z, -1.5, 1.5)]),
    ]
    segs += _arm("r", -1, "torso", (0.0, -0.26, 0.4), 0.37, 0.37, _WRIST3)
    segs += _arm("l", 1, "torso", (0.0, 0.26, 0.4), 0.37, 0.37, _WRIST3)
    return segs


def _human():
    segs = []

    def ball(name, parent, offset, lim=1.0):
        segs.append((name, parent, offset,
                     [(f"{name}_rotx", X, -lim, lim), (f"{name}_roty", Y, -lim, lim),
                      (f"{name}_rotz", Z, -lim, lim)]))

    ball("L5", "Pelvis", (0.0, 0.0, 0.1), 0.5)
    ball("L3", "L5", (0.0, 0.0, 0.1), 0.5)
    ball("T12", "L3", (0.0, 0.0, 0.1), 0.5)
    ball("T8", "T12", (0.0, 0.0, 0.12), 0.5)
    ball("Neck", "T8", (0.0, 0.0, 0.2), 0.8)
    ball("Head", "Neck", (0.0, 0.0, 0.1), 0.8)
    for side, sign in (("Right", -1), ("Left", 1)):
        ball(f"{side}Shoulder", "T8", (0.0, sign * 0.03, 0.15), 0.4)
        ball(f"{side}UpperArm", f"{side}Shoulder", (0.0, sign * 0.15, 0.0), 2.0)
        ball(f"{side}ForeArm", f"{side}UpperArm", (0.0, 0.0, -0.28), 2.0)
        ball(f"{side}Hand", f"{side}ForeArm", (0.0, 0.0, -0.25), 1.0)
    for side, sign in (("Right", -1), ("Left", 1)):
        ball(f"{side}UpperLeg", "Pelvis", (0.0, sign * 0.09, -0.05), 1.5)
        ball(f"{side}LowerLeg", f"{side}UpperLeg", (0.0, 0.0, -0.42), 2.0)
        ball(f"{side}Foot", f"{side}LowerLeg", (0.0, 0.0, -0.42), 0.8)
        ball(f"{side}Toe", f"{side}Foot", (0.1, 0.0, -0.06), 0.5)
    return segs


LAYOUTS = {
    "icub": ("pelvis", _icub),
    "atlas": ("pelvis", _atlas),
    "nao": ("pelvis", _nao),
    "baxter": ("pelvis", _baxter),
    "human": ("Pelvis", _human),
}

# human link -> robot link, for the robot layouts above
HUMAN_TO_ROBOT = {
    "Pelvis": "pelvis",
    "T8": "torso",
    "Head": "head",
    "RightUpperArm": "r_upper_arm",
    "RightForeArm": "r_forearm",
    "RightHand": "r_hand",
    "LeftUpperArm": "l_upper_arm",
    "LeftForeArm": "l_forearm",
    "LeftHand": "l_hand",
    "RightUpperLeg": "r_thigh",
    "RightLowerLeg": "r_shin",
    "RightFoot": "r_foot",
    "LeftUpperLeg": "l_thigh",
    "LeftLowerLeg": "l_shin",
    "LeftFoot": "l_foot",
}


def build_model(kind: str, scale: float = 1.0) -> KinematicModel:
    """Build one of the ``LAYOUTS`` with every offset multiplied by ``scale``."""
    root, layout = LAYOUTS[kind]
    links = [Link(root)]
    joints = []
    for seg, parent, offset, dofs in layout():
        xyz = tuple(scale * v for v in offset)
        if not dofs:
            joints.append(Joint(f"{seg}_fixed", "fixed", parent, seg, origin_xyz=xyz))
            links.append(Link(seg, f"{seg}_fixed"))
            continue
        prev = parent
        for k, (jname, axis, lo, hi) in enumerate(dofs):
            child = seg if k == len(dofs) - 1 else f"{seg}__{k}"
            joints.append(Joint(jname, "revolute", prev, child, axis,
                                xyz if k == 0 else (0.0, 0.0, 0.0), (0.0, 0.0, 0.0),
                                float(lo), float(hi), 10.0))
            links.append(Link(child, jname))
            prev = child
    return KinematicModel(kind, root, tuple(links), tuple(joints))


def humanoid_urdf(kind: str, scale: float = 1.0) -> str:
    return to_urdf(build_model(kind, scale))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0] if argv else ".")
    out.mkdir(parents=True, exist_ok=True)
    for kind in LAYOUTS:
        path = out / f"{kind}.urdf"
        path.write_text(humanoid_urdf(kind), encoding="utf-8")
        print(path)


if __name__ == "__main__":
    main()
