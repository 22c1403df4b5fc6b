from logging import getLogger
from typing import Sequence, Tuple

from kestrel.core.estimation import Measurement
from kestrel.core.motion_models.base import check_time_step
from kestrel.core.tracking.association import gate_and_associate
from kestrel.core.tracking.filters import BaseTrackFilter, initiate_filter
from kestrel.core.tracking.types import FilterKind, HistoryEntry, StepReport, Track, TrackerConfig

logger = getLogger(__name__)


def initiate_track(
    measurement: Measurement,
    config: TrackerConfig,
    kind: FilterKind = FilterKind.IMM,
    track_id: int = 0,
) -> Track:
    """Start a track at `measurement.timestamp` from a single position."""
    track_filter: BaseTrackFilter = initiate_filter(kind, measurement.z, config)
    entry = HistoryEntry(
        t=measurement.timestamp,
        belief=track_filter.fused(),
        mode_probabilities=track_filter.mode_probabilities,
    )
    return Track(
        id=track_id,
        filter=track_filter,
        last_update=measurement.timestamp,
        history=[entry],
    )


def pipeline_step(
    track: Track,
    detections: Sequence[Measurement],
    dt: float,
    config: TrackerConfig,
) -> Tuple[Track, StepReport]:
    """
    Advance a track by `dt` seconds.

    The detections are gated against the fused prior. On association the filter is
    corrected, otherwise it coasts and the miss counters grow. The report flags the
    track as dropped once its consecutive misses exceed `max_misses`.

    The returned track takes over `track.history` and appends to it in place, so only
    the returned track should be used afterwards.
    """
    check_time_step(dt)
    t = track.t + dt
    association = gate_and_associate(track, detections, dt, config.gate_threshold)

    imm_report = None
    if association.associated:
        track_filter, imm_report = track.filter.correct(association.measurement, dt)
        last_update = t
        consecutive_misses = 0
        miss_count = track.miss_count
    else:
        track_filter = track.filter.coast(dt)
        last_update = track.last_update
        consecutive_misses = track.consecutive_misses + 1
        miss_count = track.miss_count + 1

    dropped = consecutive_misses > config.max_misses
    if dropped:
        logger.info(f"Track {track.id} dropped after {consecutive_misses} consecutive misses.")

    probabilities = track_filter.mode_probabilities
    history = track.history
    history.append(
        HistoryEntry(
            t=t,
            belief=track_filter.fused(),
            mode_probabilities=probabilities,
            coasted=not association.associated,
        )
    )
    # ordered since dt > 0
    new_track = track.model_copy(
        update={
            "filter": track_filter,
            "last_update": last_update,
            "consecutive_misses": consecutive_misses,
            "miss_count": miss_count,
            "history": history,
        }
    )
    report = StepReport(
        t=t,
        associated=association.associated,
        d2=association.d2,
        detection_index=association.index,
        coasted=not association.associated,
        dropped=dropped,
        mode_probabilities=probabilities,
        imm=imm_report,
    )
    return new_track, report
