import math
from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from kestrel.core.geometry import CameraIntrinsics, CameraRig, RigidPose
from kestrel.core.utils.linalg import as_vector
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SEED_MAX = 2**64 - 1


class SegmentKind(str, Enum):
    CRUISE = "cruise"
    TURN = "turn"
    ACCELERATE = "accelerate"


class SegmentSpec(BaseModel):
    """One piece of a trajectory. Heading and speed carry over from the previous segment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: SegmentKind
    duration: float = Field(gt=0.0, description="Seconds.")
    turn_rate: Optional[float] = Field(default=None, description="rad/s, positive counter-clockwise.")
    accel: Optional[float] = Field(default=None, description="m/s² along the heading.")

    @model_validator(mode="after")
    def _check_parameters(self) -> "SegmentSpec":
        if self.kind == SegmentKind.TURN and self.turn_rate is None:
            raise ValueError("a `turn` segment needs `turn_rate`.")
        if self.kind == SegmentKind.ACCELERATE and self.accel is None:
            raise ValueError("an `accelerate` segment needs `accel`.")
        if self.kind == SegmentKind.CRUISE and (self.turn_rate is not None or self.accel is not None):
            raise ValueError("a `cruise` segment takes no `turn_rate` or `accel`.")
        return self


class SensorModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    position_noise_std: float = Field(default=0.02, ge=0.0, description="Meters per axis.")
    dropout_prob: float = Field(default=0.0, ge=0.0, le=1.0)


class Appearance(BaseModel):
    """How the target is drawn into synthetic frames."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    shape: Literal["gaussian", "square"] = "gaussian"
    blob_sigma_px: float = Field(default=5.0, gt=0.0)
    gain: float = Field(default=1.0, ge=0.0)
    rotation_deg: float = 0.0
    background: float = Field(default=0.0, ge=0.0, le=1.0)
    noise_std: float = Field(default=0.0, ge=0.0)

    @property
    def square_side_px(self) -> float:
        """Side of the square patch, 2√2·σ."""
        return 2.0 * math.sqrt(2.0) * self.blob_sigma_px


def default_camera() -> CameraRig:
    return CameraRig(
        intrinsics=CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0, width=640, height=480),
        pose=RigidPose.looking_down((0.0, 0.0, 10.0)),
    )


class Scenario(BaseModel):
    """Declarative target motion, sensor and camera description."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = "custom"
    dt: float = Field(default=0.05, gt=0.0)
    seed: int = Field(default=0, ge=0, le=SEED_MAX)
    initial_position: Tuple[float, float] = (0.0, 0.0)
    initial_speed: float = Field(default=1.0, ge=0.0)
    initial_heading: float = Field(default=0.0, description="Radians from +x.")
    segments: List[SegmentSpec] = Field(min_length=1)
    sensor: SensorModel = Field(default_factory=SensorModel)
    camera: CameraRig = Field(default_factory=default_camera)
    appearance: Appearance = Field(default_factory=Appearance)
    target_height: float = Field(default=0.0, description="World z of the target plane, meters.")

    @property
    def total_duration(self) -> float:
        return float(sum(segment.duration for segment in self.segments))

    @property
    def sample_count(self) -> int:
        return int(math.floor(self.total_duration / self.dt + 1e-9)) + 1

    def with_seed(self, seed: int) -> "Scenario":
        return self.model_copy(update={"seed": seed})


class GroundTruthSample(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: float
    position: np.ndarray
    velocity: np.ndarray

    @field_validator("position", "velocity", mode="before")
    @classmethod
    def _validate_vector(cls, v, info) -> np.ndarray:
        return as_vector(v, info.field_name)

    @property
    def speed(self) -> float:
        return float(np.hypot(*self.velocity))


class RngState(BaseModel):
    """
    Position in the measurement noise stream.

    Draw `counter` of run `seed` comes from ``numpy.random.default_rng([seed, counter])``,
    a PCG64 generator keyed through SeedSequence, so any step can be reproduced alone.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, le=SEED_MAX)
    counter: int = Field(default=0, ge=0)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.counter])

    def advance(self) -> "RngState":
        return RngState(seed=self.seed, counter=self.counter + 1)
