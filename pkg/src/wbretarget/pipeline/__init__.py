from .runner import (ConfigError, JointTrajectoryRecord, StreamConfig, load_config, retarget_frames,
                     run_stream, summarize)
from .smoother import SmootherState, min_jerk_filter
from .streamio import StreamFormatError, StreamOrder, TrajectoryWriter, read_frames, write_frames
from .synthetic import (AmplitudeExceedsLimit, GeneratorSpec, Sinusoid, default_sinusoids,
                        generate_synthetic_stream, joint_trajectory)

__all__ = [
    "AmplitudeExceedsLimit", "ConfigError", "GeneratorSpec", "JointTrajectoryRecord", "Sinusoid",
    "SmootherState", "StreamConfig", "StreamFormatError", "StreamOrder", "TrajectoryWriter",
    "default_sinusoids", "generate_synthetic_stream", "joint_trajectory", "load_config",
    "min_jerk_filter", "read_frames", "retarget_frames", "run_stream", "summarize", "write_frames",
]
