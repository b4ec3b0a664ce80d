"""Extended-object tracking from fused active and passive multistatic radio measurements."""

from .core import (
    Anchor,
    AugmentedState,
    BiasState,
    ExtentGeo,
    ExtentIdeal,
    KinematicState,
    Measurement,
    MeasurementFrame,
    SceneConstants,
    device_position,
)
from .scenario import Scenario
from .synthesis import simulate
from .tracker import MethodVariant, parse_variant, run_filter

__all__ = [
    "Anchor",
    "AugmentedState",
    "BiasState",
    "ExtentGeo",
    "ExtentIdeal",
    "KinematicState",
    "Measurement",
    "MeasurementFrame",
    "MethodVariant",
    "Scenario",
    "SceneConstants",
    "device_position",
    "parse_variant",
    "run_filter",
    "simulate",
]
