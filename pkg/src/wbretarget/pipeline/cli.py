"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 bad input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from ..kinematics import SystemState, forward_kinematics
from ..liegroup import matrix_to_quat, quat_to_matrix
from ..model import ModelError, UnknownLink, load_urdf, scale_model, validate_model
from ..qp import QPError
from ..retarget import CorrespondenceError, calibrate, save_correspondence
from .runner import ConfigError, StreamConfig, generator_from_dict, load_config, run_stream
from .streamio import StreamFormatError, StreamOrder, read_frames, write_frames
from .synthetic import AmplitudeExceedsLimit, GeneratorSpec, Sinusoid, default_sinusoids, generate_synthetic_stream

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

INPUT_ERRORS = (ModelError, CorrespondenceError, StreamFormatError, StreamOrder, ConfigError,
                AmplitudeExceedsLimit, UnknownLink, KeyError, OSError, yaml.YAMLError, ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _joint_values(model, items):
    s = np.clip(np.zeros(model.n), model.lower, model.upper)
    for item in items or ():
        name, _, value = item.partition("=")
        if not value:
            raise UsageError(f"--joint expects NAME=VALUE, got {item!r}")
        s[model.dof_index(name)] = float(value)
    return s


def cmd_check_model(args):
    model = load_urdf(args.urdf)
    print(f"model {model.name!r}: n={model.n} links={len(model.links)} root={model.root}")
    for note in model.notes:
        print(note)
    problems = validate_model(model)
    for diag in problems:
        print(diag)
    return EXIT_INPUT if problems else EXIT_OK


def _frame_rotations(path):
    with open(path, encoding="utf-8") as fh:
        frames = list(read_frames(fh))
    if not frames:
        raise StreamFormatError(f"{path}: no frame found")
    return {name: m.orientation for name, m in frames[0].entries.items()}


def _model_rotations(path, joints):
    model = load_urdf(path)
    poses = forward_kinematics(model, SystemState.neutral(model, _joint_values(model, joints)))
    return {name: pose.rotation for name, pose in poses.items()}


def _read_pairs(args):
    pairs = []
    if args.pairs:
        for line in Path(args.pairs).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise StreamFormatError(f"pair line needs 'human robot [weight]': {line!r}")
            pairs.append((parts[0], parts[1], float(parts[2])) if len(parts) == 3 else (parts[0], parts[1]))
    for item in args.pair or ():
        h, sep, r = item.partition(":")
        if not sep:
            raise UsageError(f"--pair expects HUMAN:ROBOT, got {item!r}")
        pairs.append((h, r))
    return pairs


def cmd_calibrate(args):
    if bool(args.human_frame) == bool(args.human_model):
        raise UsageError("give exactly one of --human-frame / --human-model")
    if bool(args.robot_frame) == bool(args.robot_model):
        raise UsageError("give exactly one of --robot-frame / --robot-model")
    human = _frame_rotations(args.human_frame) if args.human_frame else _model_rotations(args.human_model, args.human_joint)
    robot = _frame_rotations(args.robot_frame) if args.robot_frame else _model_rotations(args.robot_model, args.robot_joint)
    text = save_correspondence(calibrate(human, robot, _read_pairs(args)))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fk(args):
    model = load_urdf(args.urdf)
    R = quat_to_matrix(args.base_quat) if args.base_quat else np.eye(3)
    state = SystemState(np.array(args.base_position or (0.0, 0.0, 0.0), dtype=float), R,
                        _joint_values(model, args.joint))
    for name, pose in forward_kinematics(model, state).items():
        print(json.dumps({"link": name, "position": pose.position.tolist(),
                          "quat": matrix_to_quat(pose.rotation).tolist()}))
    return EXIT_OK


def cmd_gen(args):
    if args.config:
        doc = yaml.safe_load(Path(args.config).read_text(encoding="utf-8")) or {}
        doc = doc.get("generator", doc)
        if not Path(doc.get("model", "")).is_absolute() and doc.get("model"):
            doc["model"] = str(Path(args.config).parent / doc["model"])
        spec = generator_from_dict(doc)
    else:
        if not args.urdf:
            raise UsageError("gen needs a URDF path or --config")
        model = load_urdf(args.urdf)
        if args.scale != 1.0:
            model = scale_model(model, args.scale)
        sines = default_sinusoids(model, args.amplitude, args.frequency)
        for item in args.joint or ():
            parts = item.split(":")
            if len(parts) < 3:
                raise UsageError(f"--joint expects NAME:AMP:FREQ[:PHASE[:OFFSET]], got {item!r}")
            sines[parts[0]] = Sinusoid(*(float(v) for v in parts[1:5]))
        links = args.links.split(",") if args.links else None
        spec = GeneratorSpec(model, sines, args.duration, args.rate, links)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        n = write_frames(generate_synthetic_stream(spec), out)
    finally:
        if args.output:
            out.close()
    print(f"wrote {n} frames", file=sys.stderr)
    return EXIT_OK


def cmd_run(args):
    if args.config:
        config = load_config(Path(args.config).read_text(encoding="utf-8"), Path(args.config).parent)
    else:
        config = StreamConfig()
    overrides = {
        "model": args.model, "correspondence": args.correspondence, "input": args.input,
        "output": args.output, "summary": args.summary, "rate": args.rate, "gain": args.gain,
        "lam": args.lam, "smoothing_time": args.smoothing_time, "policy": args.policy,
        "warmup": args.warmup,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    if args.input is not None:
        config.generator = None
    if args.fixed_base:
        config.fixed_base = True
    if args.live:
        config.live = True
    config.__post_init__()
    summary = run_stream(config)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="wbretarget", description="Whole-body orientation retargeting onto URDF robot models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check-model", help="parse a URDF and print diagnostics")
    c.add_argument("urdf")
    c.set_defaults(func=cmd_check_model)

    c = sub.add_parser("calibrate", help="compute constant link rotations from a shared reference pose")
    c.add_argument("--human-frame", help="NDJSON file whose first frame is the human reference pose")
    c.add_argument("--human-model", help="URDF of the human; reference pose from its forward kinematics")
    c.add_argument("--human-joint", action="append", metavar="NAME=VALUE")
    c.add_argument("--robot-frame", help="NDJSON file whose first frame is the robot reference pose")
    c.add_argument("--robot-model", help="URDF of the robot; reference pose from its forward kinematics")
    c.add_argument("--robot-joint", action="append", metavar="NAME=VALUE")
    c.add_argument("--pairs", help="text file, one 'human_link robot_link [weight]' per line")
    c.add_argument("--pair", action="append", metavar="HUMAN:ROBOT")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_calibrate)

    c = sub.add_parser("run", help="retarget a motion stream")
    c.add_argument("--config")
    c.add_argument("--model")
    c.add_argument("--correspondence")
    c.add_argument("--input", help="NDJSON motion stream, '-' for standard input")
    c.add_argument("--output", help="CSV trajectory output")
    c.add_argument("--summary", help="JSON summary output")
    c.add_argument("--rate", type=float)
    c.add_argument("--gain", type=float)
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--smoothing-time", type=float)
    c.add_argument("--policy", choices=("strict", "skip"))
    c.add_argument("--warmup", type=float)
    c.add_argument("--fixed-base", action="store_true")
    c.add_argument("--live", action="store_true", help="pace frames at wall-clock rate")
    c.set_defaults(func=cmd_run)

    c = sub.add_parser("fk", help="print world poses of every link")
    c.add_argument("urdf")
    c.add_argument("--joint", action="append", metavar="NAME=VALUE")
    c.add_argument("--base-position", type=float, nargs=3)
    c.add_argument("--base-quat", type=float, nargs=4, metavar=("W", "X", "Y", "Z"))
    c.set_defaults(func=cmd_fk)

    c = sub.add_parser("gen", help="write a synthetic motion stream")
    c.add_argument("urdf", nargs="?")
    c.add_argument("--config")
    c.add_argument("--duration", type=float, default=10.0)
    c.add_argument("--rate", type=float, default=200.0)
    c.add_argument("--amplitude", type=float, default=0.0, help="default amplitude for every joint (rad)")
    c.add_argument("--frequency", type=float, default=0.5, help="default frequency (Hz)")
    c.add_argument("--joint", action="append", metavar="NAME:AMP:FREQ[:PHASE[:OFFSET]]")
    c.add_argument("--links", help="comma-separated links to emit (default: all)")
    c.add_argument("--scale", type=float, default=1.0, help="multiply every link length")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wbretarget: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QPError as exc:
        print(f"wbretarget: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except INPUT_ERRORS as exc:
        print(f"wbretarget: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
