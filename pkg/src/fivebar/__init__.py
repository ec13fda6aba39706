"""Design and analysis tools for symmetric five-bar finger rehabilitators.

Subpackages map onto the workflow: ``mechanism`` (kinematics),
``synthesis`` (dimensional optimization), ``planner`` (quintic joint
trajectories), ``actuation`` (encoder setpoints), ``analysis`` (rotation
angle versus IMU logs) and ``io``/``cli`` (files and command line).
"""
from .kernels import BACKEND
from .mechanism import (ElbowConfig, FeasibilityReport, JointState, MechanismParams,
                        PlanarPath, feasibility, forward_kinematics,
                        inverse_kinematics, scale_amplitude, trace_path)

__all__ = ["BACKEND", "ElbowConfig", "FeasibilityReport", "JointState", "MechanismParams",
           "PlanarPath", "feasibility", "forward_kinematics", "inverse_kinematics",
           "scale_amplitude", "trace_path"]
__version__ = "0.1.0"
