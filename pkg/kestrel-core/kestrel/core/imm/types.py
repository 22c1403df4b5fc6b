from typing import List, Optional

import numpy as np
from kestrel.core.estimation.types import GaussianBelief, LinearGaussianModel
from kestrel.core.motion_models import MotionModelSpec, build_model, state_labels
from kestrel.core.utils.linalg import as_matrix, as_vector
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SIMPLEX_TOLERANCE = 1e-12


class TransitionMatrix(BaseModel):
    """Row-stochastic M×M matrix of per-step mode switch probabilities."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _validate_matrix(cls, v) -> np.ndarray:
        arr = as_matrix(v, "transition")
        if arr.shape[0] != arr.shape[1]:
            raise ValueError(f"`transition` must be square, got shape {arr.shape}.")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("`transition` entries must lie in [0, 1].")
        if np.any(np.abs(arr.sum(axis=1) - 1.0) > SIMPLEX_TOLERANCE):
            raise ValueError("`transition` rows must sum to 1.")
        return arr

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


class ModeProbabilities(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    probabilities: np.ndarray

    @field_validator("probabilities", mode="before")
    @classmethod
    def _validate_probabilities(cls, v) -> np.ndarray:
        arr = as_vector(v, "probabilities")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("mode probabilities must lie in [0, 1].")
        if abs(arr.sum() - 1.0) > SIMPLEX_TOLERANCE:
            raise ValueError(f"mode probabilities must sum to 1, got {arr.sum()!r}.")
        return arr

    @classmethod
    def uniform(cls, size: int) -> "ModeProbabilities":
        return cls(probabilities=np.full(size, 1.0 / size))

    @property
    def size(self) -> int:
        return self.probabilities.shape[0]


class ImmMode(BaseModel):
    """
    One hypothesis of the bank.

    A mode is described either by a `spec`, rebuilt for every step length, or by a
    fixed `model` used as is.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    belief: GaussianBelief
    spec: Optional[MotionModelSpec] = None
    model: Optional[LinearGaussianModel] = None

    @model_validator(mode="after")
    def _check_source(self) -> "ImmMode":
        if (self.spec is None) == (self.model is None):
            raise ValueError("an IMM mode needs exactly one of `spec` or `model`.")
        expected = len(self.labels)
        if self.belief.dim != expected:
            raise ValueError(f"mode belief has dimension {self.belief.dim}, expected {expected}.")
        return self

    @property
    def labels(self) -> List[str]:
        if self.spec is not None:
            return state_labels(self.spec.kind, self.spec.axes)
        return [f"s{i}" for i in range(self.model.state_dim)]

    @property
    def name(self) -> str:
        if self.spec is None:
            return "fixed"
        if self.spec.omega is None:
            return self.spec.kind.value
        return f"{self.spec.kind.value}({self.spec.omega:+g})"

    def model_for(self, dt: Optional[float]) -> LinearGaussianModel:
        if self.spec is None:
            return self.model
        spec = self.spec if dt is None else self.spec.with_dt(dt)
        return build_model(spec)

    def with_belief(self, belief: GaussianBelief) -> "ImmMode":
        return self.model_copy(update={"belief": belief})


class ImmBank(BaseModel):
    """Per-mode beliefs with their mode probabilities and switching matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    modes: List[ImmMode] = Field(min_length=2)
    probabilities: ModeProbabilities
    transition: TransitionMatrix

    @model_validator(mode="after")
    def _check_sizes(self) -> "ImmBank":
        m = len(self.modes)
        if self.probabilities.size != m or self.transition.size != m:
            raise ValueError(
                f"bank has {m} modes but {self.probabilities.size} probabilities "
                f"and a {self.transition.size}×{self.transition.size} transition matrix.",
            )
        return self

    @property
    def size(self) -> int:
        return len(self.modes)

    @property
    def beliefs(self) -> List[GaussianBelief]:
        return [mode.belief for mode in self.modes]

    @property
    def labels(self) -> List[List[str]]:
        return [mode.labels for mode in self.modes]

    def replace(
        self,
        beliefs: List[GaussianBelief],
        probabilities: ModeProbabilities,
    ) -> "ImmBank":
        modes = [mode.with_belief(b) for mode, b in zip(self.modes, beliefs)]
        return self.model_copy(update={"modes": modes, "probabilities": probabilities})


class MixingResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    beliefs: List[GaussianBelief]
    predicted: ModeProbabilities
    degenerate_modes: List[int] = Field(default_factory=list)


class ImmStepReport(BaseModel):
    """Diagnostics of one IMM cycle."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    likelihoods: List[float] = Field(default_factory=list)
    log_likelihoods: List[float] = Field(default_factory=list)
    degenerate_modes: List[int] = Field(default_factory=list)
    likelihood_underflow: bool = False

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_modes) or self.likelihood_underflow


class ImmStepResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bank: ImmBank
    fused: GaussianBelief
    report: ImmStepReport
