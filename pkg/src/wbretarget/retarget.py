"""Human-to-robot link correspondences and per-frame orientation targets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from .liegroup import is_rotation, normalize_rotation, quat_to_matrix
from .model import Diagnostic, KinematicModel


class CorrespondenceError(ValueError):
    pass


class MissingReferenceLink(CorrespondenceError):
    pass


class MissingHumanLink(CorrespondenceError):
    pass


class UnknownRobotLink(CorrespondenceError):
    pass


@dataclass(frozen=True, eq=False)
class CorrespondencePair:
    human_link: str
    robot_link: str
    calibration: np.ndarray = field(default_factory=lambda: np.eye(3))
    weight: float = 1.0

    def __post_init__(self):
        cal = np.array(self.calibration, dtype=float)
        if not is_rotation(cal):
            raise CorrespondenceError(f"calibration for {self.robot_link!r} is not a rotation")
        cal.setflags(write=False)
        object.__setattr__(self, "calibration", cal)
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise CorrespondenceError(f"weight for {self.robot_link!r} must be positive, got {self.weight!r}")

    def __eq__(self, other):
        if not isinstance(other, CorrespondencePair):
            return NotImplemented
        return (self.human_link == other.human_link and self.robot_link == other.robot_link
                and self.weight == other.weight and np.array_equal(self.calibration, other.calibration))


@dataclass(frozen=True)
class CorrespondenceMap:
    pairs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = set()
        for p in self.pairs:
            if p.robot_link in seen:
                raise CorrespondenceError(f"robot link {p.robot_link!r} is mapped twice")
            seen.add(p.robot_link)

    @property
    def weights(self) -> list:
        return [p.weight for p in self.pairs]

    @property
    def robot_links(self) -> list:
        return [p.robot_link for p in self.pairs]

    def bind(self, model: KinematicModel) -> "CorrespondenceMap":
        """Check that every robot link exists in ``model``; returns ``self``."""
        missing = [p.robot_link for p in self.pairs if not model.has_link(p.robot_link)]
        if missing:
            raise UnknownRobotLink(f"robot links not in model {model.name!r}: {missing}")
        return self

    def subset(self, robot_links) -> "CorrespondenceMap":
        keep = set(robot_links)
        return CorrespondenceMap(tuple(p for p in self.pairs if p.robot_link in keep))


@dataclass(frozen=True)
class LinkMeasurement:
    orientation: np.ndarray
    angular_velocity: np.ndarray


@dataclass
class MotionFrame:
    t: float
    entries: dict


@dataclass(frozen=True)
class LinkTarget:
    orientation: np.ndarray
    angular_velocity: np.ndarray
    weight: float = 1.0


@dataclass
class TargetSet:
    targets: dict
    skipped: list = field(default_factory=list)

    def __len__(self):
        return len(self.targets)


def calibrate(human_ref: dict, robot_ref: dict, pairs) -> CorrespondenceMap:
    """Constant human-to-robot rotations from one shared reference pose.

    ``pairs`` holds ``(human_link, robot_link)`` or ``(human_link, robot_link,
    weight)`` tuples. The result reproduces ``robot_ref`` exactly when fed the
    reference human orientations.
    """
    out = []
    for pair in pairs:
        h, r = pair[0], pair[1]
        w = float(pair[2]) if len(pair) > 2 else 1.0
        if h not in human_ref:
            raise MissingReferenceLink(f"human reference pose lacks link {h!r}")
        if r not in robot_ref:
            raise MissingReferenceLink(f"robot reference pose lacks link {r!r}")
        cal = np.asarray(human_ref[h]).T @ np.asarray(robot_ref[r])
        out.append(CorrespondencePair(h, r, normalize_rotation(cal) if not is_rotation(cal) else cal, w))
    return CorrespondenceMap(tuple(out))


def compute_targets(frame: MotionFrame, cmap: CorrespondenceMap, policy: str = "strict") -> TargetSet:
    """Desired robot link orientations and angular velocities for one frame.

    The angular velocity passes through untouched: right-multiplying the
    human orientation by a constant rotation does not change its world-frame
    angular velocity.
    """
    if policy not in ("strict", "skip"):
        raise ValueError(f"unknown missing-link policy {policy!r}")
    targets = {}
    skipped = []
    for p in cmap.pairs:
        m = frame.entries.get(p.human_link)
        if m is None:
            if policy == "strict":
                raise MissingHumanLink(f"frame t={frame.t!r} has no measurement for {p.human_link!r}")
            skipped.append(Diagnostic("MissingHumanLink", p.human_link,
                                      f"t={frame.t!r}: rows for {p.robot_link!r} dropped", "warning"))
            continue
        targets[p.robot_link] = LinkTarget(m.orientation @ p.calibration, m.angular_velocity, p.weight)
    return TargetSet(targets, skipped)


def format_float(x: float) -> str:
    """17 significant digits, spelled so YAML 1.1 still reads it as a float."""
    x = float(x)
    if math.isnan(x):
        return ".nan"
    if math.isinf(x):
        return ".inf" if x > 0 else "-.inf"
    s = f"{x:.17g}"
    if "e" in s:
        mant, exp = s.split("e")
        if "." not in mant:
            mant += ".0"
        return f"{mant}e{exp}"
    return s if "." in s else s + ".0"


def save_correspondence(cmap: CorrespondenceMap) -> str:
    lines = ["pairs:"] if cmap.pairs else ["pairs: []"]
    for p in cmap.pairs:
        cal = ", ".join(format_float(v) for v in p.calibration.ravel())
        lines += [
            f"- human_link: {_quote(p.human_link)}",
            f"  robot_link: {_quote(p.robot_link)}",
            f"  calibration: [{cal}]",
            f"  weight: {format_float(p.weight)}",
        ]
    return "\n".join(lines) + "\n"


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _calibration_from(raw, where) -> np.ndarray:
    try:
        vals = [float(v) for v in raw]
    except (TypeError, ValueError):
        raise CorrespondenceError(f"{where}: calibration must be a list of numbers") from None
    if len(vals) == 4:
        return quat_to_matrix(vals)
    if len(vals) == 9:
        R = np.array(vals).reshape(3, 3)
        if is_rotation(R):
            return R
        if is_rotation(R, 1e-6):
            return normalize_rotation(R)
        raise CorrespondenceError(f"{where}: calibration matrix is not a rotation")
    raise CorrespondenceError(f"{where}: calibration needs 4 (quaternion) or 9 (matrix) entries, got {len(vals)}")


def load_correspondence(text: str) -> CorrespondenceMap:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CorrespondenceError(f"cannot parse correspondence file: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise CorrespondenceError("correspondence file must be a mapping with a 'pairs' list")
    pairs = []
    for i, item in enumerate(doc.get("pairs") or []):
        where = f"pair {i}"
        try:
            h, r = str(item["human_link"]), str(item["robot_link"])
        except (KeyError, TypeError):
            raise CorrespondenceError(f"{where}: needs human_link and robot_link") from None
        cal = _calibration_from(item["calibration"], where) if "calibration" in item else np.eye(3)
        pairs.append(CorrespondencePair(h, r, cal, float(item.get("weight", 1.0))))
    return CorrespondenceMap(tuple(pairs))
