"""Hand-interaction engine: universal hand model, smart objects, intent-
mediated manipulation, LSTM gesture recognition and audio-tactile feedback."""

from .hand_model import (
    HandFrame,
    PoseMetrics,
    RawSensorFrame,
    SensorAdapter,
    normalize_frame,
    observe,
    pose_metrics,
)
from .interaction import InteractionConfig, World
from .scenarios import SessionEngine, replay_verify, run_scenario
from .smart_objects import SmartObject, catalog, surface_query

__version__ = "0.1.0"

__all__ = [
    "HandFrame",
    "InteractionConfig",
    "PoseMetrics",
    "RawSensorFrame",
    "SensorAdapter",
    "SessionEngine",
    "SmartObject",
    "World",
    "catalog",
    "normalize_frame",
    "observe",
    "pose_metrics",
    "replay_verify",
    "run_scenario",
    "surface_query",
    "__version__",
]
