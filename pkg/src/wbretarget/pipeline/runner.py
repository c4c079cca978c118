"""Streaming retargeting runtime: frames in, joint trajectories and metrics out."""
from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from ..diffik import IKParams, IKSolver
from ..kinematics import SystemState
from ..model import KinematicModel, load_urdf, scale_model
from ..retarget import CorrespondenceMap, compute_targets, load_correspondence
from .smoother import SmootherState, min_jerk_filter
from .streamio import StreamOrder, TrajectoryWriter, read_frames
from .synthetic import GeneratorSpec, Sinusoid, default_sinusoids, generate_synthetic_stream


class ConfigError(ValueError):
    pass


@dataclass
class StreamConfig:
    model: Optional[str] = None
    correspondence: Optional[str] = None
    input: Optional[str] = None
    generator: Optional[dict] = None
    rate: float = 200.0
    gain: float = 10.0
    link_gains: dict = field(default_factory=dict)
    lam: float = 1e-3
    base_lam: Optional[float] = None
    qp_tolerance: float = 1e-9
    max_qp_iters: int = 200
    fixed_base: bool = False
    policy: str = "strict"
    output: Optional[str] = None
    summary: Optional[str] = None
    smoothing_time: Optional[float] = None
    warmup: float = 0.0
    live: bool = False

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigError(f"rate must be positive, got {self.rate}")
        if self.smoothing_time is not None and not self.smoothing_time > 0:
            raise ConfigError("smoothing_time must be positive when set")

    def ik_params(self) -> IKParams:
        return IKParams(gain=self.gain, link_gains=dict(self.link_gains), lam=self.lam,
                        base_lam=self.base_lam, dt=1.0 / self.rate, qp_tolerance=self.qp_tolerance,
                        max_qp_iters=self.max_qp_iters, fixed_base=self.fixed_base)


# config-file keys that differ from the attribute names
_ALIASES = {"lambda": "lam", "base_lambda": "base_lam", "smoothing-time": "smoothing_time",
            "fixed-base": "fixed_base", "link-gains": "link_gains"}


def load_config(text: str, base_dir=None) -> StreamConfig:
    """Read a YAML run configuration; relative paths resolve against ``base_dir``."""
    doc = yaml.safe_load(text) or {}
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    known = {f.name for f in fields(StreamConfig)}
    kwargs = {}
    for key, value in doc.items():
        name = _ALIASES.get(key, key.replace("-", "_"))
        if name not in known:
            raise ConfigError(f"unknown configuration key {key!r}")
        kwargs[name] = value
    if base_dir is not None:
        for key in ("model", "correspondence", "input", "output", "summary"):
            v = kwargs.get(key)
            if v and v != "-" and not Path(v).is_absolute():
                kwargs[key] = str(Path(base_dir) / v)
        gen = kwargs.get("generator")
        if isinstance(gen, dict) and gen.get("model") and not Path(gen["model"]).is_absolute():
            kwargs["generator"] = {**gen, "model": str(Path(base_dir) / gen["model"])}
    return StreamConfig(**kwargs)


@dataclass
class JointTrajectoryRecord:
    t: float
    s: np.ndarray
    link_errors: dict
    active_constraints: int
    solve_time: float
    qp_status: str = "optimal"


def generator_from_dict(doc: dict) -> GeneratorSpec:
    """Build a :class:`GeneratorSpec` from its config-file form."""
    if "model" not in doc:
        raise ConfigError("generator needs a 'model' path")
    model = load_urdf(doc["model"])
    if doc.get("scale", 1.0) != 1.0:
        model = scale_model(model, float(doc["scale"]))
    sines = {}
    default = doc.get("default")
    if default:
        sines.update(default_sinusoids(model, float(default.get("amplitude", 0.0)),
                                       float(default.get("frequency", 0.0))))
    for name, item in (doc.get("joints") or {}).items():
        sines[name] = Sinusoid(float(item.get("amplitude", 0.0)), float(item.get("frequency", 0.0)),
                               float(item.get("phase", 0.0)), float(item.get("offset", 0.0)))
    return GeneratorSpec(model, sines, float(doc.get("duration", 10.0)), float(doc.get("rate", 200.0)),
                         doc.get("links"))


def _percentile(values, q):
    return float(np.percentile(values, q)) if len(values) else float("nan")


def retarget_frames(model: KinematicModel, cmap: CorrespondenceMap, frames, params: IKParams,
                    policy: str = "strict", state: Optional[SystemState] = None,
                    smoothing_time: Optional[float] = None, live: bool = False):
    """Generator of :class:`JointTrajectoryRecord`, one per consumed frame.

    Each record holds the configuration at the frame time (before the update
    driven by that frame) and its geodesic error against that frame's targets.
    """
    cmap.bind(model)
    solver = IKSolver(model, params)
    state = SystemState.neutral(model) if state is None else state.copy()
    smoother = SmootherState(state.s, smoothing_time) if smoothing_time else None
    last_t = None
    t_wall0 = time.perf_counter()
    t_stream0 = None
    for frame in frames:
        if last_t is not None and not frame.t > last_t:
            raise StreamOrder(f"timestamp {frame.t!r} does not increase (previous {last_t!r})")
        last_t = frame.t
        if live:
            if t_stream0 is None:
                t_stream0 = frame.t
            lag = (frame.t - t_stream0) - (time.perf_counter() - t_wall0)
            if lag > 0:
                time.sleep(lag)
        targets = compute_targets(frame, cmap, policy)
        _, next_state, report = solver.step(state, targets)
        s_out = state.s if smoother is None else min_jerk_filter(smoother, state.s, params.dt)
        yield JointTrajectoryRecord(frame.t, np.array(s_out, dtype=float), report.link_errors,
                                    len(report.active), report.solve_time, report.qp.status)
        state = next_state


def summarize(records, links, warmup: float = 0.0) -> dict:
    t0 = records[0].t if records else 0.0
    kept = [r for r in records if r.t - t0 >= warmup]
    errs = np.array([[r.link_errors.get(name, np.nan) for name in links] for r in kept]).reshape(len(kept), len(links))
    times = [r.solve_time for r in records]
    per_link = {}
    for i, name in enumerate(links):
        col = errs[:, i][np.isfinite(errs[:, i])]
        per_link[name] = float(col.mean()) if col.size else float("nan")
    finite = errs[np.isfinite(errs)]
    return {
        "frames": len(records),
        "frames_scored": len(kept),
        "warmup_s": warmup,
        "mean_error_rad": float(finite.mean()) if finite.size else float("nan"),
        "max_error_rad": float(finite.max()) if finite.size else float("nan"),
        "per_link_mean_error_rad": per_link,
        "solve_time_p50_s": _percentile(times, 50),
        "solve_time_p99_s": _percentile(times, 99),
        "solve_time_max_s": float(max(times)) if times else float("nan"),
        "frames_with_active_constraints": sum(1 for r in records if r.active_constraints),
        "qp_not_optimal": sum(1 for r in records if r.qp_status != "optimal"),
    }


def _open_frames(config: StreamConfig):
    if config.generator is not None:
        return generate_synthetic_stream(generator_from_dict(config.generator)), None
    if config.input is None:
        raise ConfigError("either 'input' or 'generator' must be configured")
    if config.input == "-":
        return read_frames(sys.stdin), None
    fh = open(config.input, encoding="utf-8")
    return read_frames(fh), fh


def run_stream(config: StreamConfig) -> dict:
    """Run one retargeting stream end to end and return its summary."""
    if not config.model or not config.correspondence:
        raise ConfigError("both 'model' and 'correspondence' must be configured")
    model = load_urdf(config.model)
    cmap = load_correspondence(Path(config.correspondence).read_text(encoding="utf-8")).bind(model)
    frames, fh = _open_frames(config)
    out = open(config.output, "w", encoding="utf-8", newline="") if config.output else None
    records = []
    try:
        writer = TrajectoryWriter(out, model.dof_order, cmap.robot_links) if out else None
        for rec in retarget_frames(model, cmap, frames, config.ik_params(), config.policy,
                                   smoothing_time=config.smoothing_time, live=config.live):
            records.append(rec)
            if writer:
                writer.write(rec)
    finally:
        if fh:
            fh.close()
        if out:
            out.close()
    summary = summarize(records, cmap.robot_links, config.warmup)
    if config.summary:
        Path(config.summary).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary
