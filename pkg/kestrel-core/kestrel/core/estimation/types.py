from typing import Optional

import numpy as np
from kestrel.core.errors import ContractViolationError
from kestrel.core.utils.linalg import PSD_TOLERANCE, as_matrix, as_vector
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SYMMETRY_TOLERANCE = 1e-9


class GaussianBelief(BaseModel):
    """Mean and covariance of a tracked state."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray = Field(description="State mean, length n.")
    covariance: np.ndarray = Field(description="Symmetric PSD n×n covariance.")

    @field_validator("mean", mode="before")
    @classmethod
    def _validate_mean(cls, v) -> np.ndarray:
        return as_vector(v, "mean")

    @field_validator("covariance", mode="before")
    @classmethod
    def _validate_covariance(cls, v) -> np.ndarray:
        return as_matrix(v, "covariance")

    @model_validator(mode="after")
    def _check_shapes(self) -> "GaussianBelief":
        n = self.mean.shape[0]
        if self.covariance.shape != (n, n):
            raise ContractViolationError(
                f"covariance shape {self.covariance.shape} does not match mean length {n}.",
            )
        if not np.allclose(self.covariance, self.covariance.T, atol=SYMMETRY_TOLERANCE, rtol=0.0):
            raise ContractViolationError("covariance must be symmetric.")
        scale = max(1.0, float(np.abs(self.covariance).max())) if n else 1.0
        if n and np.linalg.eigvalsh(self.covariance).min() < -PSD_TOLERANCE * scale:
            raise ContractViolationError("covariance must be positive semi-definite.")
        return self

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


class LinearGaussianModel(BaseModel):
    """
    Matrices of one linear-Gaussian motion and measurement hypothesis.

    Attributes:
        transition (np.ndarray): A, n×n.
        control (np.ndarray): B, n×m. Zero-width when there is no control input.
        observation (np.ndarray): H, p×n.
        process_noise (np.ndarray): Q, n×n symmetric PSD.
        measurement_noise (np.ndarray): R, p×p symmetric positive definite.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    transition: np.ndarray
    observation: np.ndarray
    process_noise: np.ndarray
    measurement_noise: np.ndarray
    control: Optional[np.ndarray] = None

    @field_validator("transition", "observation", "process_noise", "measurement_noise", mode="before")
    @classmethod
    def _validate_matrix(cls, v, info) -> np.ndarray:
        return as_matrix(v, info.field_name)

    @field_validator("control", mode="before")
    @classmethod
    def _validate_control(cls, v) -> Optional[np.ndarray]:
        if v is None:
            return None
        arr = np.array(v, dtype=np.float64)
        if arr.size == 0:
            return None
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return as_matrix(arr, "control")

    @model_validator(mode="after")
    def _check_dimensions(self) -> "LinearGaussianModel":
        n = self.transition.shape[0]
        p = self.observation.shape[0]
        checks = [
            ("transition", self.transition.shape, (n, n)),
            ("observation", self.observation.shape, (p, n)),
            ("process_noise", self.process_noise.shape, (n, n)),
            ("measurement_noise", self.measurement_noise.shape, (p, p)),
        ]
        if self.control is not None:
            checks.append(("control", self.control.shape, (n, self.control.shape[1])))
        for name, shape, expected in checks:
            if shape != expected:
                raise ContractViolationError(f"`{name}` has shape {shape}, expected {expected}.")

        for name in ("process_noise", "measurement_noise"):
            m = getattr(self, name)
            if not np.allclose(m, m.T, atol=SYMMETRY_TOLERANCE, rtol=0.0):
                raise ContractViolationError(f"`{name}` must be symmetric.")
        if np.linalg.eigvalsh(self.process_noise).min() < -SYMMETRY_TOLERANCE:
            raise ContractViolationError("`process_noise` must be positive semi-definite.")
        if self.measurement_noise.size and np.linalg.eigvalsh(self.measurement_noise).min() <= 0.0:
            raise ContractViolationError("`measurement_noise` must be positive definite.")
        return self

    @property
    def state_dim(self) -> int:
        return self.transition.shape[0]

    @property
    def measurement_dim(self) -> int:
        return self.observation.shape[0]

    @property
    def control_dim(self) -> int:
        return 0 if self.control is None else self.control.shape[1]


class ControlInput(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u: np.ndarray

    @field_validator("u", mode="before")
    @classmethod
    def _validate_u(cls, v) -> np.ndarray:
        return as_vector(v, "u")


class Measurement(BaseModel):
    """A sensor observation `z` taken at `timestamp` seconds."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: np.ndarray
    timestamp: float = 0.0

    @field_validator("z", mode="before")
    @classmethod
    def _validate_z(cls, v) -> np.ndarray:
        return as_vector(v, "z")


class KalmanGain(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gain: np.ndarray

    @field_validator("gain", mode="before")
    @classmethod
    def _validate_gain(cls, v) -> np.ndarray:
        return as_matrix(v, "gain")

