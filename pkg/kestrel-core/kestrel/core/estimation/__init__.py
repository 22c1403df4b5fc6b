from kestrel.core.estimation.kalman import (
    innovation,
    innovation_likelihood,
    kalman_gain,
    log_innovation_likelihood,
    mahalanobis_squared,
    normalized_innovation_squared,
    predict,
    update,
)
from kestrel.core.estimation.types import (
    ControlInput,
    GaussianBelief,
    KalmanGain,
    LinearGaussianModel,
    Measurement,
)

__all__ = [
    "ControlInput",
    "GaussianBelief",
    "KalmanGain",
    "LinearGaussianModel",
    "Measurement",
    "innovation",
    "innovation_likelihood",
    "kalman_gain",
    "log_innovation_likelihood",
    "mahalanobis_squared",
    "normalized_innovation_squared",
    "predict",
    "update",
]
