"""URDF subset parser and the immutable floating-base kinematic tree.

Only ``revolute``, ``continuous`` and ``fixed`` joints are accepted. The
floating base is implicit at the root link; it is never a URDF joint.
"""
from __future__ import annotations

from collections import deque
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .liegroup import rpy_matrix, skew

DEFAULT_VEL_MAX = 10.0
AXIS_NORMALIZE_TOL = 1e-3
MOVABLE_KINDS = ("revolute", "continuous")
JOINT_KINDS = MOVABLE_KINDS + ("fixed",)


class ModelError(ValueError):
    pass


class MalformedXml(ModelError):
    pass


class UnknownJointType(ModelError):
    pass


class MissingLimit(ModelError):
    pass


class CycleDetected(ModelError):
    pass


class DuplicateName(ModelError):
    pass


class ModelInconsistent(ModelError):
    pass


class InvalidAxis(ModelError):
    pass


class UnknownLink(KeyError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    code: str
    element: str
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.severity}: {self.code} [{self.element}] {self.message}"


@dataclass(frozen=True)
class Joint:
    name: str
    kind: str
    parent: str
    child: str
    axis: tuple = (1.0, 0.0, 0.0)
    origin_xyz: tuple = (0.0, 0.0, 0.0)
    origin_rpy: tuple = (0.0, 0.0, 0.0)
    pos_min: Optional[float] = None
    pos_max: Optional[float] = None
    vel_max: float = DEFAULT_VEL_MAX

    @property
    def movable(self) -> bool:
        return self.kind in MOVABLE_KINDS


@dataclass(frozen=True)
class Link:
    name: str
    parent_joint: Optional[str] = None


@dataclass(frozen=True)
class _Topology:
    link_index: dict
    dof_index: dict
    # (parent link idx, child link idx, dof idx or -1, joint) in parent-first order
    chain: tuple
    origin_R: np.ndarray   # (J, 3, 3) joint origin rotations, chain order
    origin_p: np.ndarray   # (J, 3)
    dof_parent: np.ndarray  # (n,) parent link index of each dof
    dof_child: np.ndarray   # (n,) child link index of each dof
    dof_axis_parent: np.ndarray  # (n, 3) axis expressed in the parent link frame
    dof_axis: np.ndarray    # (n, 3) axis in the joint frame
    dof_axis_skew: np.ndarray   # (n, 3, 3)
    dof_axis_outer: np.ndarray  # (n, 3, 3)
    dof_chain_pos: np.ndarray  # (n,) position of each dof inside ``chain``
    support: np.ndarray     # (L, n) 1.0 where a dof lies on the root-to-link path
    lower: np.ndarray
    upper: np.ndarray
    vel_max: np.ndarray


@dataclass(frozen=True)
class KinematicModel:
    """Floating-base tree of links and joints.

    Construction checks the graph structure (unique names, declared links,
    single parent, no cycles). Numeric sanity of limits and axes is reported
    by :func:`validate_model` instead.
    """

    name: str
    root: str
    links: tuple
    joints: tuple
    notes: tuple = field(default=(), compare=False)
    _topo: _Topology = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "notes", tuple(self.notes))
        object.__setattr__(self, "_topo", _build_topology(self))

    @property
    def dof_order(self) -> tuple:
        return tuple(j.name for j in self.joints if j.movable)

    @property
    def n(self) -> int:
        return len(self._topo.dof_index)

    @property
    def nv(self) -> int:
        return 6 + self.n

    @property
    def link_names(self) -> tuple:
        return tuple(link.name for link in self.links)

    @property
    def lower(self) -> np.ndarray:
        return self._topo.lower

    @property
    def upper(self) -> np.ndarray:
        return self._topo.upper

    @property
    def vel_max(self) -> np.ndarray:
        return self._topo.vel_max

    def joint(self, name: str) -> Joint:
        for j in self.joints:
            if j.name == name:
                return j
        raise KeyError(name)

    def link_index(self, name: str) -> int:
        try:
            return self._topo.link_index[name]
        except KeyError:
            raise UnknownLink(name) from None

    def dof_index(self, name: str) -> int:
        return self._topo.dof_index[name]

    def has_link(self, name: str) -> bool:
        return name in self._topo.link_index


def _build_topology(model: KinematicModel) -> _Topology:
    link_index = {}
    for i, link in enumerate(model.links):
        if link.name in link_index:
            raise DuplicateName(f"duplicate link name {link.name!r}")
        link_index[link.name] = i
    seen = set()
    children = {}
    parent_of = {}
    for j in model.joints:
        if j.name in seen:
            raise DuplicateName(f"duplicate joint name {j.name!r}")
        seen.add(j.name)
        if j.kind not in JOINT_KINDS:
            raise UnknownJointType(f"joint {j.name!r} has unsupported type {j.kind!r}")
        for end in (j.parent, j.child):
            if end not in link_index:
                raise ModelInconsistent(f"joint {j.name!r} references undeclared link {end!r}")
        if j.child in parent_of:
            raise ModelInconsistent(f"link {j.child!r} has more than one parent joint")
        parent_of[j.child] = j
        children.setdefault(j.parent, []).append(j)

    roots = [link.name for link in model.links if link.name not in parent_of]
    if not roots:
        raise CycleDetected("every link has a parent joint; the graph contains a cycle")
    if len(roots) > 1:
        raise ModelInconsistent(f"multiple root links: {roots}")
    if model.root != roots[0]:
        raise ModelInconsistent(f"declared root {model.root!r} but the tree root is {roots[0]!r}")

    chain_joints = []
    queue = deque([model.root])
    while queue:
        name = queue.popleft()
        for j in children.get(name, []):
            chain_joints.append(j)
            queue.append(j.child)
    if len(chain_joints) != len(model.joints):
        reached = {model.root} | {j.child for j in chain_joints}
        lost = sorted(set(link_index) - reached)
        raise CycleDetected(f"links not reachable from root (cycle): {lost}")

    dof_names = [j.name for j in model.joints if j.movable]
    dof_index = {name: i for i, name in enumerate(dof_names)}
    n = len(dof_names)
    L = len(model.links)

    chain = []
    origin_R = np.empty((len(chain_joints), 3, 3))
    origin_p = np.empty((len(chain_joints), 3))
    dof_parent = np.zeros(n, dtype=int)
    dof_child = np.zeros(n, dtype=int)
    dof_axis = np.zeros((n, 3))
    dof_axis_parent = np.zeros((n, 3))
    dof_chain_pos = np.zeros(n, dtype=int)
    support = np.zeros((L, n))
    for k, j in enumerate(chain_joints):
        pi, ci = link_index[j.parent], link_index[j.child]
        d = dof_index.get(j.name, -1)
        origin_R[k] = rpy_matrix(j.origin_rpy)
        origin_p[k] = j.origin_xyz
        chain.append((pi, ci, d, j))
        support[ci] = support[pi]
        if d >= 0:
            dof_parent[d], dof_child[d] = pi, ci
            dof_axis[d] = j.axis
            dof_axis_parent[d] = origin_R[k] @ np.asarray(j.axis, dtype=float)
            dof_chain_pos[d] = k
            support[ci, d] = 1.0

    dof_axis_skew = np.array([skew(a) for a in dof_axis]).reshape(n, 3, 3)
    dof_axis_outer = np.einsum("ni,nj->nij", dof_axis, dof_axis)
    movable = [j for j in model.joints if j.movable]
    lower = np.array([-np.inf if j.pos_min is None else j.pos_min for j in movable], dtype=float)
    upper = np.array([np.inf if j.pos_max is None else j.pos_max for j in movable], dtype=float)
    vel = np.array([j.vel_max for j in movable], dtype=float)
    for arr in (origin_R, origin_p, dof_axis, dof_axis_skew, dof_axis_outer, dof_axis_parent,
                support, lower, upper, vel):
        arr.setflags(write=False)
    return _Topology(link_index, dof_index, tuple(chain), origin_R, origin_p,
                     dof_parent, dof_child, dof_axis_parent, dof_axis, dof_axis_skew,
                     dof_axis_outer, dof_chain_pos,
                     support, lower, upper, vel)


def _floats(text: Optional[str], default: tuple, what: str) -> tuple:
    if text is None:
        return default
    try:
        vals = tuple(float(x) for x in text.split())
    except ValueError:
        raise MalformedXml(f"{what}: cannot parse numbers from {text!r}") from None
    if len(vals) != 3:
        raise MalformedXml(f"{what}: expected 3 numbers, got {text!r}")
    return vals


def _float_attr(elem, key, what):
    raw = elem.get(key)
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise MalformedXml(f"{what}: attribute {key}={raw!r} is not a number") from None


def parse_urdf(text: str) -> KinematicModel:
    """Parse a URDF document into a :class:`KinematicModel`.

    ``visual``, ``collision``, ``inertial`` and any other unknown elements are
    ignored. Revolute joints need a ``<limit>``; a missing velocity limit
    falls back to ``DEFAULT_VEL_MAX`` and is recorded in ``model.notes``.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if root.tag != "robot":
        raise MalformedXml(f"root element is <{root.tag}>, expected <robot>")

    notes = []
    link_names = []
    for el in root.findall("link"):
        name = el.get("name")
        if not name:
            raise MalformedXml("<link> without a name")
        link_names.append(name)

    joints = []
    for el in root.findall("joint"):
        name = el.get("name")
        kind = el.get("type")
        if not name or not kind:
            raise MalformedXml("<joint> needs both name and type")
        if kind not in JOINT_KINDS:
            raise UnknownJointType(f"joint {name!r}: type {kind!r} is not supported")
        parent_el, child_el = el.find("parent"), el.find("child")
        if parent_el is None or child_el is None or not parent_el.get("link") or not child_el.get("link"):
            raise MalformedXml(f"joint {name!r} needs <parent link=...> and <child link=...>")

        origin = el.find("origin")
        xyz = _floats(origin.get("xyz") if origin is not None else None, (0.0, 0.0, 0.0), f"joint {name!r} origin")
        rpy = _floats(origin.get("rpy") if origin is not None else None, (0.0, 0.0, 0.0), f"joint {name!r} origin")
        axis_el = el.find("axis")
        axis = _floats(axis_el.get("xyz") if axis_el is not None else None, (1.0, 0.0, 0.0), f"joint {name!r} axis")

        pos_min = pos_max = None
        vel_max = DEFAULT_VEL_MAX
        if kind != "fixed":
            norm = math.sqrt(sum(a * a for a in axis))
            if abs(norm - 1.0) > AXIS_NORMALIZE_TOL:
                raise InvalidAxis(f"joint {name!r}: axis {axis} has norm {norm:.6g}")
            if abs(norm - 1.0) > 1e-12:
                axis = tuple(a / norm for a in axis)
                notes.append(Diagnostic("AxisNormalized", name, f"axis rescaled from norm {norm:.9g}", "warning"))
            limit = el.find("limit")
            if kind == "revolute" and limit is None:
                raise MissingLimit(f"revolute joint {name!r} has no <limit>")
            vel = _float_attr(limit, "velocity", f"joint {name!r} limit") if limit is not None else None
            if vel is None:
                notes.append(Diagnostic("MissingVelocityLimit", name,
                                        f"velocity limit defaulted to {DEFAULT_VEL_MAX:g} rad/s", "warning"))
            else:
                vel_max = vel
            if kind == "revolute":
                lo = _float_attr(limit, "lower", f"joint {name!r} limit")
                hi = _float_attr(limit, "upper", f"joint {name!r} limit")
                # URDF defaults both bounds to zero
                pos_min = 0.0 if lo is None else lo
                pos_max = 0.0 if hi is None else hi

        joints.append(Joint(name, kind, parent_el.get("link"), child_el.get("link"), axis, xyz, rpy,
                            pos_min, pos_max, vel_max))

    child_of = {j.child: j.name for j in joints}
    links = [Link(n, child_of.get(n)) for n in link_names]
    roots = [n for n in link_names if n not in child_of]
    if not link_names:
        raise ModelInconsistent("document declares no links")
    root_name = roots[0] if len(roots) == 1 else (roots[0] if roots else link_names[0])
    return KinematicModel(root.get("name", ""), root_name, tuple(links), tuple(joints), tuple(notes))


def load_urdf(path) -> KinematicModel:
    with open(path, encoding="utf-8") as fh:
        return parse_urdf(fh.read())


def scale_model(model: KinematicModel, factor: float) -> KinematicModel:
    """Copy of ``model`` with every joint origin translation multiplied by ``factor``."""
    joints = tuple(replace(j, origin_xyz=tuple(factor * v for v in j.origin_xyz)) for j in model.joints)
    return KinematicModel(model.name, model.root, model.links, joints, model.notes)


def validate_model(model: KinematicModel) -> list:
    """Numeric invariant checks; an empty list means the model is sound."""
    out = []
    for j in model.joints:
        if not j.movable:
            continue
        axis = np.asarray(j.axis, dtype=float)
        norm = float(np.linalg.norm(axis))
        if not np.all(np.isfinite(axis)) or abs(norm - 1.0) > 1e-9:
            hint = f"; normalize to {tuple(float(a) for a in axis / norm)}" if norm > 0 and np.isfinite(norm) else ""
            out.append(Diagnostic("NonUnitAxis", j.name, f"axis norm is {norm:.9g}{hint}"))
        if j.kind == "revolute":
            if j.pos_min is None or j.pos_max is None:
                out.append(Diagnostic("MissingLimit", j.name, "revolute joint without position bounds"))
            elif not (math.isfinite(j.pos_min) and math.isfinite(j.pos_max)):
                out.append(Diagnostic("NonFiniteLimit", j.name, f"bounds [{j.pos_min}, {j.pos_max}]"))
            elif j.pos_min == j.pos_max:
                out.append(Diagnostic("DegenerateLimit", j.name, f"lower == upper == {j.pos_min!r}"))
            elif j.pos_min > j.pos_max:
                out.append(Diagnostic("InvertedLimit", j.name, f"lower {j.pos_min!r} > upper {j.pos_max!r}"))
        if not (math.isfinite(j.vel_max) and j.vel_max > 0):
            out.append(Diagnostic("NonPositiveVelocityLimit", j.name, f"velocity limit {j.vel_max!r}"))
    for j in model.joints:
        vals = tuple(j.origin_xyz) + tuple(j.origin_rpy)
        if not all(math.isfinite(v) for v in vals):
            out.append(Diagnostic("NonFiniteOrigin", j.name, f"origin {vals}"))
    return out


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def to_urdf(model: KinematicModel) -> str:
    """Canonical, deterministic URDF text (attributes sorted, floats as ``repr``)."""
    robot = ET.Element("robot", {"name": model.name})
    for link in model.links:
        ET.SubElement(robot, "link", {"name": link.name})
    for j in model.joints:
        el = ET.SubElement(robot, "joint", {"name": j.name, "type": j.kind})
        ET.SubElement(el, "parent", {"link": j.parent})
        ET.SubElement(el, "child", {"link": j.child})
        ET.SubElement(el, "origin", {"rpy": _fmt(j.origin_rpy), "xyz": _fmt(j.origin_xyz)})
        ET.SubElement(el, "axis", {"xyz": _fmt(j.axis)})
        if j.movable:
            attrs = {"velocity": repr(float(j.vel_max))}
            if j.kind == "revolute":
                attrs["lower"] = repr(float(j.pos_min))
                attrs["upper"] = repr(float(j.pos_max))
            ET.SubElement(el, "limit", dict(sorted(attrs.items())))
    ET.indent(robot)
    return ET.tostring(robot, encoding="unicode") + "\n"
