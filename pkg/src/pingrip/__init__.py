"""Deterministic simulator of a pin-array terrain gripper.

Subpackages cover terrain heightfields and micro-asperity friction,
the pin-array kinematics (adapt / lock / release), cantilever-spine
grasp mechanics with pull-off campaigns, resistive pin sensing with
tactile shape recognition, and translate-press-read 3D terrain mapping.
"""

from .config import SimConfig, load_config, parse_config, save_config
from .errors import ConfigError, OutsideFootprintError, PhaseError, SimulationError
from .gripper import (
    GripperConfig,
    GripperState,
    PinState,
    Pose,
    adapt,
    lock,
    new_gripper,
    pin_world_xy,
    release,
)
from .mapping import (
    GridMap,
    PointCloud,
    ScanPlan,
    ScanPoint,
    bin_average,
    outlier_attenuation_report,
    run_scan,
)
from .mechanics import (
    ContactRecord,
    PullTestResult,
    SelfLockingError,
    baseline_pull_test,
    contact_records,
    holding_condition,
    local_friction,
    pull_test,
    pushing_force,
    wedge_spec_for,
)
from .sensing import (
    PinReading,
    RecognitionResult,
    SensorCalibration,
    calibrate_bank,
    forward_resistance,
    invert_height,
    read_pins,
    recognize_shape,
)
from .terrain import (
    AsperityModel,
    Heightfield,
    WedgeSpec,
    make_mapping_terrain,
    make_recognition_block,
    make_wedge,
    sample_asperity,
)

__version__ = "0.1.0"

__all__ = [
    "AsperityModel",
    "ConfigError",
    "ContactRecord",
    "GridMap",
    "GripperConfig",
    "GripperState",
    "Heightfield",
    "OutsideFootprintError",
    "PhaseError",
    "PinReading",
    "PinState",
    "PointCloud",
    "Pose",
    "PullTestResult",
    "RecognitionResult",
    "ScanPlan",
    "ScanPoint",
    "SelfLockingError",
    "SensorCalibration",
    "SimConfig",
    "SimulationError",
    "WedgeSpec",
    "adapt",
    "baseline_pull_test",
    "bin_average",
    "calibrate_bank",
    "contact_records",
    "forward_resistance",
    "holding_condition",
    "invert_height",
    "load_config",
    "local_friction",
    "lock",
    "make_mapping_terrain",
    "make_recognition_block",
    "make_wedge",
    "new_gripper",
    "outlier_attenuation_report",
    "parse_config",
    "pin_world_xy",
    "pull_test",
    "pushing_force",
    "read_pins",
    "recognize_shape",
    "release",
    "run_scan",
    "sample_asperity",
    "save_config",
    "wedge_spec_for",
]
