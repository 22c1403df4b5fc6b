from kestrel.core.tracking.association import Association, associate, gate_and_associate
from kestrel.core.tracking.filters import (
    BaseTrackFilter,
    ImmTrackFilter,
    KalmanTrackFilter,
    initiate_filter,
)
from kestrel.core.tracking.flow import TrackingFlow, TrackingRun
from kestrel.core.tracking.pipeline import initiate_track, pipeline_step
from kestrel.core.tracking.types import (
    FilterKind,
    HistoryEntry,
    StepReport,
    Track,
    TrackerConfig,
    TrackMetrics,
)

__all__ = [
    "Association",
    "BaseTrackFilter",
    "FilterKind",
    "HistoryEntry",
    "ImmTrackFilter",
    "KalmanTrackFilter",
    "StepReport",
    "Track",
    "TrackMetrics",
    "TrackerConfig",
    "TrackingFlow",
    "TrackingRun",
    "associate",
    "gate_and_associate",
    "initiate_filter",
    "initiate_track",
    "pipeline_step",
]
