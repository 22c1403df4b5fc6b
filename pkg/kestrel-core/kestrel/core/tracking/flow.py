from logging import getLogger
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from kestrel.core.detectors import BaseDetector, GrayImage
from kestrel.core.errors import ContractViolationError
from kestrel.core.estimation import Measurement
from kestrel.core.geometry import CameraRig
from kestrel.core.monitors import StepMonitor, step_observer
from kestrel.core.tracking.pipeline import initiate_track, pipeline_step
from kestrel.core.tracking.types import FilterKind, HistoryEntry, StepReport, Track, TrackerConfig
from pydantic import BaseModel, ConfigDict, Field

logger = getLogger(__name__)


class TrackingRun(BaseModel):
    """Tracks and step reports of one run, in time order."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tracks: List[Track] = Field(default_factory=list)
    reports: List[StepReport] = Field(default_factory=list)

    @property
    def history(self) -> List[HistoryEntry]:
        return [entry for track in self.tracks for entry in track.history]

    @property
    def miss_count(self) -> int:
        return sum(track.miss_count for track in self.tracks)

    @property
    def mean_step_time_ms(self) -> float:
        if not self.reports:
            return 0.0
        return float(np.mean([r.step_time_ms for r in self.reports]))


class TrackingFlow:
    """
    A single-target tracking flow from measurements or frames to a fused trajectory.

    Args:
        config (TrackerConfig, optional): Tracker settings. Defaults to `TrackerConfig()`.
        filter_kind (FilterKind): `imm` for the multiple-model bank, `kf` for the
            single constant-velocity filter. Defaults to `FilterKind.IMM`.
        detector (BaseDetector, optional): Detector used by the frame path.
        camera (CameraRig, optional): Camera used to back-project detections.
        callback_manager (StepMonitor, optional): Receives a `StepRecord` after every step.

    Example:
        .. code-block:: python

            from kestrel.core.tracking import TrackingFlow

            tracking_flow = TrackingFlow(filter_kind="imm")
            run = tracking_flow.run(measurements, dt=0.05)
    """

    def __init__(
        self,
        config: Optional[TrackerConfig] = None,
        filter_kind: FilterKind = FilterKind.IMM,
        detector: Optional[BaseDetector] = None,
        camera: Optional[CameraRig] = None,
        callback_manager: Optional[StepMonitor] = None,
    ) -> None:
        self.config = config or TrackerConfig()
        self.filter_kind = FilterKind(filter_kind)
        self.detector = detector
        self.camera = camera
        self.callback_manager = callback_manager

    def initiate(self, measurement: Measurement, track_id: int = 0) -> Track:
        return initiate_track(measurement, self.config, self.filter_kind, track_id)

    @step_observer()
    def step(self, track: Track, detections: Sequence[Measurement], dt: float) -> Tuple[Track, StepReport]:
        return pipeline_step(track, detections, dt, self.config)

    def frame_measurement(self, frame: GrayImage, depth: float, timestamp: float) -> Optional[Measurement]:
        """Back-project the strongest blob of `frame` to a world position measurement."""
        if self.detector is None or self.camera is None:
            raise ContractViolationError("The frame path needs both `detector` and `camera`.")

        blobs = self.detector.detect(frame)
        if not blobs:
            return None
        world = self.camera.pixel_to_world((blobs[0].x, blobs[0].y), depth)
        return Measurement(z=world[:2], timestamp=timestamp)

    def run(self, measurements: Sequence[Optional[Measurement]], dt: float, t0: float = 0.0) -> TrackingRun:
        """
        Track over a fixed-rate measurement sequence. `None` marks a missed detection.

        A dropped track is retired and a new one starts at the next measurement.
        """
        tracks: List[Track] = []
        reports: List[StepReport] = []
        track: Optional[Track] = None

        for k, measurement in enumerate(measurements):
            t = t0 + k * dt
            if track is None:
                if measurement is not None:
                    stamped = Measurement(z=measurement.z, timestamp=t)
                    track = self.initiate(stamped, track_id=len(tracks))
                continue

            detections = [] if measurement is None else [measurement]
            track, report = self.step(track, detections, dt)
            reports.append(report)

            if report.dropped:
                logger.warning(f"Track {track.id} lost at t={t:.3f}s.")
                tracks.append(track)
                track = None

        if track is not None:
            tracks.append(track)
        return TrackingRun(tracks=tracks, reports=reports)

    def run_frames(
        self,
        frames: Iterable[Tuple[GrayImage, float]],
        dt: float,
        t0: float = 0.0,
    ) -> TrackingRun:
        """Track over `(frame, depth)` pairs through the detector."""
        measurements = [
            self.frame_measurement(frame, depth, t0 + k * dt) for k, (frame, depth) in enumerate(frames)
        ]
        return self.run(measurements, dt, t0)
