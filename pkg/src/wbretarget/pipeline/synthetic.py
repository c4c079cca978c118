"""Synthetic human-motion streams from a kinematic model driven by sinusoids."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kinematics import SystemState, compute_frames
from ..model import KinematicModel
from ..retarget import LinkMeasurement, MotionFrame


class AmplitudeExceedsLimit(ValueError):
    pass


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float
    frequency: float
    phase: float = 0.0
    offset: float = 0.0


@dataclass
class GeneratorSpec:
    model: KinematicModel
    sinusoids: dict = field(default_factory=dict)
    duration: float = 10.0
    rate: float = 200.0
    links: list = None
    base_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    base_orientation: np.ndarray = field(default_factory=lambda: np.eye(3))


def default_sinusoids(model: KinematicModel, amplitude: float, frequency: float, fill: float = 0.9) -> dict:
    """Every joint oscillates about the middle of its range.

    The amplitude is capped at ``fill`` times the half range and the phases
    are spread with the golden ratio so the joints do not move in lockstep.
    A zero amplitude returns no sinusoids, leaving the model in its neutral
    pose rather than parked mid-range.
    """
    out = {}
    if amplitude == 0.0:
        return out
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    for j, name in enumerate(model.dof_order):
        lo, hi = model.lower[j], model.upper[j]
        if np.isfinite(lo) and np.isfinite(hi):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        else:
            mid, half = 0.0, np.inf
        out[name] = Sinusoid(min(amplitude, fill * half), frequency, 2 * np.pi * ((j * golden) % 1.0), mid)
    return out


def joint_trajectory(spec: GeneratorSpec, t: float):
    """Joint positions and velocities of the generator at time ``t``."""
    model = spec.model
    s = np.clip(np.zeros(model.n), model.lower, model.upper)
    sd = np.zeros(model.n)
    for name, sine in spec.sinusoids.items():
        j = model.dof_index(name)
        w = 2.0 * np.pi * sine.frequency
        s[j] = sine.offset + sine.amplitude * np.sin(w * t + sine.phase)
        sd[j] = sine.amplitude * w * np.cos(w * t + sine.phase)
    return s, sd


def check_spec(spec: GeneratorSpec):
    model = spec.model
    if not spec.rate > 0 or not spec.duration >= 0:
        raise ValueError("rate must be positive and duration non-negative")
    for name, sine in spec.sinusoids.items():
        if name not in model.dof_order:
            raise KeyError(f"generator joint {name!r} not in model")
        j = model.dof_index(name)
        lo, hi = model.lower[j], model.upper[j]
        a = abs(sine.amplitude)
        if sine.offset - a < lo or sine.offset + a > hi:
            raise AmplitudeExceedsLimit(
                f"joint {name!r}: {sine.offset:g} +/- {a:g} leaves [{lo:g}, {hi:g}]")
    for link in spec.links or ():
        model.link_index(link)


def generate_synthetic_stream(spec: GeneratorSpec):
    """Yield :class:`MotionFrame` objects at ``spec.rate`` for ``spec.duration`` seconds.

    Orientations come from forward kinematics; angular velocities are the
    analytic ``J^a nu`` of the generator model, not finite differences.
    """
    check_spec(spec)
    model = spec.model
    links = list(spec.links) if spec.links else list(model.link_names)
    idx = [model.link_index(name) for name in links]
    count = int(round(spec.duration * spec.rate))
    for k in range(count):
        t = k / spec.rate
        s, sd = joint_trajectory(spec, t)
        frames = compute_frames(model, SystemState(np.asarray(spec.base_position, dtype=float),
                                                   np.asarray(spec.base_orientation, dtype=float), s))
        nu = np.concatenate([np.zeros(6), sd])
        omega = (frames.stacked_angular_jacobian(idx) @ nu).reshape(-1, 3)
        entries = {name: LinkMeasurement(frames.R[i].copy(), omega[r].copy())
                   for r, (name, i) in enumerate(zip(links, idx))}
        yield MotionFrame(t, entries)
