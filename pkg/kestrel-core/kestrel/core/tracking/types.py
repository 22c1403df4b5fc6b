from enum import Enum
from typing import Any, List, Optional

from kestrel.core.estimation import GaussianBelief
from kestrel.core.imm import ImmConfig, ImmStepReport
from pydantic import BaseModel, ConfigDict, Field, model_validator


class FilterKind(str, Enum):
    """Track filters available to the tracker."""

    KF = "kf"
    IMM = "imm"


class TrackerConfig(BaseModel):
    """
    Tracker settings.

    Attributes:
        gate_threshold (float): Chi-square gate on the squared Mahalanobis distance. Default is `9.21`.
        max_misses (int): Consecutive misses tolerated before the track is dropped. Default is `5`.
        measurement_std (float): Position measurement noise std in meters. Default is `0.02`.
        velocity_std (float): Initial velocity std in m/s. Default is `1.0`.
        acceleration_std (float): Initial acceleration std in m/s². Default is `1.0`.
        kf_q (float): Process intensity of the single-model constant-velocity filter. Default is `0.01`.
        burn_in (float): Seconds excluded from error metrics at the start of a run. Default is `1.0`.
        imm (ImmConfig): IMM bank settings.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    gate_threshold: float = Field(default=9.21, gt=0.0)
    max_misses: int = Field(default=5, ge=1)
    measurement_std: float = Field(default=0.02, gt=0.0)
    velocity_std: float = Field(default=1.0, gt=0.0)
    acceleration_std: float = Field(default=1.0, gt=0.0)
    kf_q: float = Field(default=0.01, ge=0.0)
    burn_in: float = Field(default=1.0, ge=0.0)
    imm: ImmConfig = Field(default_factory=ImmConfig)


class HistoryEntry(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: float
    belief: GaussianBelief
    mode_probabilities: List[float] = Field(default_factory=list)
    coasted: bool = False


class StepReport(BaseModel):
    """Outcome of one tracking step."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: float
    associated: bool
    d2: Optional[float] = None
    detection_index: Optional[int] = None
    coasted: bool = False
    dropped: bool = False
    step_time_ms: float = 0.0
    mode_probabilities: List[float] = Field(default_factory=list)
    imm: Optional[ImmStepReport] = None


class Track(BaseModel):
    """
    A single target track.

    `filter` is a `BaseTrackFilter` carrying the estimator state (a belief or an IMM bank).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    id: int = 0
    filter: Any
    last_update: float
    consecutive_misses: int = Field(default=0, ge=0)
    miss_count: int = Field(default=0, ge=0)
    history: List[HistoryEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_history(self) -> "Track":
        times = [entry.t for entry in self.history]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("track history timestamps must be strictly increasing.")
        return self

    @property
    def t(self) -> float:
        return self.history[-1].t if self.history else self.last_update

    @property
    def fused(self) -> GaussianBelief:
        return self.filter.fused()


class TrackMetrics(BaseModel):
    """Position error statistics of a tracked run, in meters."""

    model_config = ConfigDict(frozen=True)

    max_error: float = Field(ge=0.0)
    rmse: float = Field(ge=0.0)
    mean_step_time: float = Field(default=0.0, ge=0.0, description="Milliseconds.")
    miss_count: int = Field(default=0, ge=0)
    samples: int = Field(default=0, ge=0)

    @property
    def max_error_cm(self) -> float:
        return 100.0 * self.max_error

    @property
    def rmse_cm(self) -> float:
        return 100.0 * self.rmse
