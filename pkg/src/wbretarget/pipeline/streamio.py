"""Motion-stream (newline-delimited JSON) and trajectory CSV formats."""
from __future__ import annotations

import csv
import json
import math

import numpy as np

from ..liegroup import BadQuaternionNorm, matrix_to_quat, quat_to_matrix
from ..retarget import LinkMeasurement, MotionFrame


class StreamFormatError(ValueError):
    pass


class StreamOrder(ValueError):
    pass


def frame_to_json(frame: MotionFrame) -> str:
    links = {}
    for name, m in frame.entries.items():
        links[name] = {"quat": [float(v) for v in matrix_to_quat(m.orientation)],
                       "omega": [float(v) for v in m.angular_velocity]}
    return json.dumps({"t": float(frame.t), "links": links})


def frame_from_json(line: str, lineno: int = 0) -> MotionFrame:
    try:
        doc = json.loads(line)
        t = float(doc["t"])
        raw = doc["links"]
        entries = {}
        for name, item in raw.items():
            omega = np.array([float(v) for v in item["omega"]])
            if omega.shape != (3,) or not np.all(np.isfinite(omega)):
                raise StreamFormatError(f"line {lineno}: link {name!r}: omega needs 3 finite numbers")
            entries[name] = LinkMeasurement(quat_to_matrix(item["quat"]), omega)
    except BadQuaternionNorm as exc:
        raise StreamFormatError(f"line {lineno}: {exc}") from None
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        if isinstance(exc, StreamFormatError):
            raise
        raise StreamFormatError(f"line {lineno}: malformed frame ({exc})") from None
    if not math.isfinite(t):
        raise StreamFormatError(f"line {lineno}: non-finite timestamp")
    return MotionFrame(t, entries)


def read_frames(lines):
    """Yield frames from an iterable of text lines; blank lines are skipped."""
    last = None
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        frame = frame_from_json(line, lineno)
        if last is not None and not frame.t > last:
            raise StreamOrder(f"line {lineno}: timestamp {frame.t!r} does not increase (previous {last!r})")
        last = frame.t
        yield frame


def write_frames(frames, fh):
    n = 0
    for frame in frames:
        fh.write(frame_to_json(frame))
        fh.write("\n")
        n += 1
    return n


def fmt17(x) -> str:
    return f"{float(x):.17g}"


class TrajectoryWriter:
    """CSV sink: ``t, <joints>, err_<links>, active_constraints, solve_time_s``."""

    def __init__(self, fh, joint_names, link_names):
        self._w = csv.writer(fh, lineterminator="\n")
        self._w.writerow(["t", *joint_names, *(f"err_{name}" for name in link_names),
                          "active_constraints", "solve_time_s"])
        self.links = list(link_names)

    def write(self, record):
        errs = [fmt17(record.link_errors.get(name, float("nan"))) for name in self.links]
        self._w.writerow([fmt17(record.t), *(fmt17(v) for v in record.s), *errs,
                          str(record.active_constraints), fmt17(record.solve_time)])
