from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from kestrel.core.estimation import (
    GaussianBelief,
    LinearGaussianModel,
    Measurement,
    predict,
    update,
)
from kestrel.core.imm import (
    ImmBank,
    ImmStepReport,
    combine,
    fused_labels,
    imm_step,
    initiate_bank,
    predict_bank,
)
from kestrel.core.motion_models import (
    MotionModelKind,
    MotionModelSpec,
    build_model,
    initial_belief,
    observation_matrix,
    state_labels,
)
from kestrel.core.tracking.types import FilterKind, TrackerConfig
from pydantic import BaseModel, ConfigDict

MeasurementLike = Union[Measurement, np.ndarray]


class BaseTrackFilter(ABC, BaseModel):
    """
    Generic abstract interface for the estimator behind a track.

    Filters are immutable: `coast` and `correct` return a new filter.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    measurement_std: float

    @classmethod
    def class_name(cls) -> str:
        return "BaseTrackFilter"

    @property
    @abstractmethod
    def labels(self) -> List[str]:
        """State layout of the fused belief."""

    @property
    @abstractmethod
    def mode_probabilities(self) -> List[float]:
        """Current mode probabilities, `[1.0]` for single-model filters."""

    @abstractmethod
    def fused(self) -> GaussianBelief:
        """Current output belief."""

    @abstractmethod
    def prior(self, dt: float) -> GaussianBelief:
        """Output belief predicted `dt` seconds ahead, used for gating."""

    @abstractmethod
    def coast(self, dt: float) -> "BaseTrackFilter":
        """Predict without a measurement."""

    @abstractmethod
    def correct(self, z: MeasurementLike, dt: float) -> Tuple["BaseTrackFilter", Optional[ImmStepReport]]:
        """Predict `dt` seconds ahead and update with `z`."""

    def measurement_model(self) -> LinearGaussianModel:
        """Position measurement model over the fused layout."""
        labels = self.labels
        H = observation_matrix(labels)
        n = len(labels)
        return LinearGaussianModel(
            transition=np.eye(n),
            observation=H,
            process_noise=np.zeros((n, n)),
            measurement_noise=self.measurement_std**2 * np.eye(H.shape[0]),
        )


class KalmanTrackFilter(BaseTrackFilter):
    """Single motion model Kalman filter."""

    spec: MotionModelSpec
    belief: GaussianBelief

    @classmethod
    def class_name(cls) -> str:
        return "KalmanTrackFilter"

    @classmethod
    def initiate(cls, position: Sequence[float], config: TrackerConfig) -> "KalmanTrackFilter":
        spec = MotionModelSpec(
            kind=MotionModelKind.CV,
            q=config.kf_q,
            axes=2,
            measurement_std=config.measurement_std,
        )
        belief = initial_belief(
            state_labels(spec.kind, spec.axes),
            position,
            position_std=config.measurement_std,
            velocity_std=config.velocity_std,
            acceleration_std=config.acceleration_std,
        )
        return cls(spec=spec, belief=belief, measurement_std=config.measurement_std)

    @property
    def labels(self) -> List[str]:
        return state_labels(self.spec.kind, self.spec.axes)

    @property
    def mode_probabilities(self) -> List[float]:
        return [1.0]

    def fused(self) -> GaussianBelief:
        return self.belief

    def _model(self, dt: float) -> LinearGaussianModel:
        return build_model(self.spec.with_dt(dt))

    def prior(self, dt: float) -> GaussianBelief:
        return predict(self.belief, self._model(dt))

    def coast(self, dt: float) -> "KalmanTrackFilter":
        return self.model_copy(update={"belief": self.prior(dt)})

    def correct(self, z: MeasurementLike, dt: float) -> Tuple["KalmanTrackFilter", None]:
        model = self._model(dt)
        posterior = update(predict(self.belief, model), z, model)
        return self.model_copy(update={"belief": posterior}), None


class ImmTrackFilter(BaseTrackFilter):
    """Interacting multiple-model filter over a bank of motion hypotheses."""

    bank: ImmBank
    output: GaussianBelief

    @classmethod
    def class_name(cls) -> str:
        return "ImmTrackFilter"

    @classmethod
    def initiate(cls, position: Sequence[float], config: TrackerConfig) -> "ImmTrackFilter":
        bank = initiate_bank(
            config.imm.mode_specs(dt=0.05, measurement_std=config.measurement_std),
            position,
            transition=config.imm.transition_matrix(),
            probabilities=config.imm.probabilities(),
            velocity_std=config.velocity_std,
            acceleration_std=config.acceleration_std,
        )
        output = combine(bank.beliefs, bank.probabilities, bank.labels)
        return cls(bank=bank, output=output, measurement_std=config.measurement_std)

    @property
    def labels(self) -> List[str]:
        return fused_labels(self.bank)

    @property
    def mode_probabilities(self) -> List[float]:
        return self.bank.probabilities.probabilities.tolist()

    def fused(self) -> GaussianBelief:
        return self.output

    def prior(self, dt: float) -> GaussianBelief:
        return predict_bank(self.bank, dt).fused

    def coast(self, dt: float) -> "ImmTrackFilter":
        result = predict_bank(self.bank, dt)
        return self.model_copy(update={"bank": result.bank, "output": result.fused})

    def correct(self, z: MeasurementLike, dt: float) -> Tuple["ImmTrackFilter", ImmStepReport]:
        result = imm_step(self.bank, z, dt)
        return self.model_copy(update={"bank": result.bank, "output": result.fused}), result.report


def initiate_filter(kind: FilterKind, position: Sequence[float], config: TrackerConfig) -> BaseTrackFilter:
    if FilterKind(kind) == FilterKind.KF:
        return KalmanTrackFilter.initiate(position, config)
    return ImmTrackFilter.initiate(position, config)
