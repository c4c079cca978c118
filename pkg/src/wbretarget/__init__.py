"""Whole-body kinematic motion retargeting from human link orientations onto URDF robots."""
from .diffik import IKParams, IKProblem, IKSolver, build_constraints, build_problem, ik_step
from .kinematics import (FramePose, SystemState, SystemVelocity, angular_jacobian, compute_frames,
                         forward_kinematics, integrate, linear_jacobian)
from .model import KinematicModel, load_urdf, parse_urdf, to_urdf, validate_model
from .qp import ActiveSetQP, ConstraintSet, qp_solve
from .retarget import (CorrespondenceMap, CorrespondencePair, MotionFrame, calibrate, compute_targets,
                       load_correspondence, save_correspondence)

__version__ = "0.1.0"

__all__ = [
    "ActiveSetQP", "ConstraintSet", "CorrespondenceMap", "CorrespondencePair", "FramePose", "IKParams",
    "IKProblem", "IKSolver", "KinematicModel", "MotionFrame", "SystemState", "SystemVelocity",
    "angular_jacobian", "build_constraints", "build_problem", "calibrate", "compute_frames",
    "compute_targets", "forward_kinematics", "ik_step", "integrate", "linear_jacobian",
    "load_correspondence", "load_urdf", "parse_urdf", "qp_solve", "save_correspondence", "to_urdf",
    "validate_model",
]
