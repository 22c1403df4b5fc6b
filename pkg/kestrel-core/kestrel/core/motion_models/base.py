from abc import ABC, abstractmethod
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from kestrel.core.errors import ContractViolationError
from kestrel.core.estimation.types import GaussianBelief, LinearGaussianModel
from pydantic import BaseModel, ConfigDict, Field, model_validator

POSITION_LABELS = ("x", "y")
CANONICAL_LABELS = ("x", "vx", "ax", "y", "vy", "ay")


class MotionModelKind(str, Enum):
    """Supported motion hypotheses."""

    CV = "cv"
    CA = "ca"
    CT = "ct"


class MotionModelSpec(BaseModel):
    """Declarative description of one motion hypothesis."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: MotionModelKind
    dt: float = Field(default=0.05, gt=0.0, description="Time step in seconds.")
    q: float = Field(default=1.0, ge=0.0, description="Continuous white-noise intensity.")
    omega: Optional[float] = Field(default=None, description="Turn rate in rad/s (CT only).")
    axes: int = Field(default=2, ge=1, le=2)
    measurement_std: float = Field(default=1.0, gt=0.0, description="Position noise std in meters.")

    @model_validator(mode="after")
    def _check_turn_rate(self) -> "MotionModelSpec":
        if self.kind == MotionModelKind.CT:
            if self.omega is None or self.omega == 0.0:
                raise ValueError("`omega` must be non-zero for a coordinated-turn model.")
            if self.axes != 2:
                raise ValueError("coordinated-turn models are planar, `axes` must be 2.")
        return self

    def with_dt(self, dt: float) -> "MotionModelSpec":
        return self.model_copy(update={"dt": dt})


def state_labels(kind: MotionModelKind, axes: int = 2) -> List[str]:
    """Per-component names of a model's state, in state order."""
    kind = MotionModelKind(kind)
    if kind == MotionModelKind.CA:
        per_axis = ("x", "vx", "ax"), ("y", "vy", "ay")
    else:
        per_axis = ("x", "vx"), ("y", "vy")
    if kind == MotionModelKind.CT and axes != 2:
        raise ContractViolationError("coordinated-turn models are planar, `axes` must be 2.")
    return [label for block in per_axis[:axes] for label in block]


def observation_matrix(labels: Sequence[str]) -> np.ndarray:
    """H selecting the position components found in `labels`."""
    positions = [p for p in POSITION_LABELS if p in labels]
    H = np.zeros((len(positions), len(labels)))
    for row, name in enumerate(positions):
        H[row, list(labels).index(name)] = 1.0
    return H


def check_time_step(dt: float) -> None:
    if not dt > 0.0:
        raise ContractViolationError(f"`dt` must be > 0, got {dt}.")


class BaseMotionModel(ABC):
    """
    Abstract interface for discrete-time motion hypotheses.

    Subclasses describe the per-step transition and process noise; `build`
    assembles the full linear-Gaussian model with a position measurement.
    """

    kind: MotionModelKind

    def __init__(self, q: float = 1.0, axes: int = 2, measurement_std: float = 1.0) -> None:
        if q < 0.0:
            raise ContractViolationError(f"`q` must be >= 0, got {q}.")
        if axes not in (1, 2):
            raise ContractViolationError(f"`axes` must be 1 or 2, got {axes}.")
        if measurement_std <= 0.0:
            raise ContractViolationError(f"`measurement_std` must be > 0, got {measurement_std}.")

        self.q = q
        self.axes = axes
        self.measurement_std = measurement_std

    @classmethod
    def class_name(cls) -> str:
        return "BaseMotionModel"

    @property
    def state_labels(self) -> List[str]:
        return state_labels(self.kind, self.axes)

    @abstractmethod
    def transition(self, dt: float) -> np.ndarray:
        """State transition matrix A(dt)."""

    @abstractmethod
    def process_noise(self, dt: float) -> np.ndarray:
        """Discretized process noise Q(dt)."""

    def build(self, dt: float) -> LinearGaussianModel:
        """Assemble A, H, Q, R for one step of length `dt`."""
        check_time_step(dt)
        H = observation_matrix(self.state_labels)
        return LinearGaussianModel(
            transition=self.transition(dt),
            observation=H,
            process_noise=self.process_noise(dt),
            measurement_noise=self.measurement_std**2 * np.eye(H.shape[0]),
        )


def initial_belief(
    labels: Sequence[str],
    position: Sequence[float],
    position_std: float,
    velocity_std: float = 1.0,
    acceleration_std: float = 1.0,
    velocity: Optional[Sequence[float]] = None,
) -> GaussianBelief:
    """
    Single-point track initiation: the position is taken from a measurement,
    velocity and acceleration start at zero (or `velocity`) with the given spread.
    """
    mean = np.zeros(len(labels))
    variances = np.zeros(len(labels))
    for k, label in enumerate(labels):
        axis = 0 if label.endswith("x") else 1
        if label in POSITION_LABELS:
            mean[k] = position[axis]
            variances[k] = position_std**2
        elif label.startswith("v"):
            mean[k] = 0.0 if velocity is None else velocity[axis]
            variances[k] = velocity_std**2
        else:
            variances[k] = acceleration_std**2
    return GaussianBelief(mean=mean, covariance=np.diag(variances))
