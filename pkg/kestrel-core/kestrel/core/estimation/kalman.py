from typing import Optional, Tuple, Union

import numpy as np
from kestrel.core.errors import ContractViolationError, NumericError
from kestrel.core.estimation.types import (
    ControlInput,
    GaussianBelief,
    KalmanGain,
    LinearGaussianModel,
    Measurement,
)
from kestrel.core.utils.linalg import clamp_psd, symmetrize
from scipy.linalg import LinAlgError, cho_factor, cho_solve

LOG_2PI = float(np.log(2.0 * np.pi))


def _check_state(belief: GaussianBelief, model: LinearGaussianModel) -> None:
    if belief.dim != model.state_dim:
        raise ContractViolationError(
            f"belief has dimension {belief.dim}, model expects {model.state_dim}.",
        )


def _as_measurement(z: Union[Measurement, np.ndarray], model: LinearGaussianModel) -> np.ndarray:
    value = z.z if isinstance(z, Measurement) else np.asarray(z, dtype=np.float64).reshape(-1)
    if value.shape[0] != model.measurement_dim:
        raise ContractViolationError(
            f"measurement has dimension {value.shape[0]}, model expects {model.measurement_dim}.",
        )
    if not np.all(np.isfinite(value)):
        raise NumericError("measurement contains non-finite values.")
    return value


def _factor_innovation(S: np.ndarray):
    try:
        factor = cho_factor(S, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise NumericError(
            f"innovation covariance S = HP'Hᵀ + R is not positive definite: {S.tolist()}",
        ) from e
    return factor


def predict(
    belief: GaussianBelief,
    model: LinearGaussianModel,
    control: Optional[ControlInput] = None,
) -> GaussianBelief:
    """
    Propagate a belief one step through the model.

    mean ← A·mean + B·u, covariance ← A·P·Aᵀ + Q.
    """
    _check_state(belief, model)
    A = model.transition

    mean = A @ belief.mean
    if control is not None:
        if control.u.shape[0] != model.control_dim:
            raise ContractViolationError(
                f"control has dimension {control.u.shape[0]}, model expects {model.control_dim}.",
            )
        if model.control_dim:
            mean = mean + model.control @ control.u

    covariance = symmetrize(A @ belief.covariance @ A.T + model.process_noise)
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(covariance))):
        raise NumericError("prediction produced non-finite values.")

    return GaussianBelief(mean=mean, covariance=clamp_psd(covariance))


def innovation(
    prior: GaussianBelief,
    z: Union[Measurement, np.ndarray],
    model: LinearGaussianModel,
) -> Tuple[np.ndarray, np.ndarray]:
    """Return the innovation ν = z − H·mean and its covariance S = HP'Hᵀ + R."""
    _check_state(prior, model)
    value = _as_measurement(z, model)
    H = model.observation
    nu = value - H @ prior.mean
    S = symmetrize(H @ prior.covariance @ H.T + model.measurement_noise)
    return nu, S


def kalman_gain(prior: GaussianBelief, model: LinearGaussianModel) -> KalmanGain:
    """K = P'Hᵀ S⁻¹, solved through a Cholesky factor of S."""
    _check_state(prior, model)
    H = model.observation
    S = symmetrize(H @ prior.covariance @ H.T + model.measurement_noise)
    factor = _factor_innovation(S)
    # S and P' are symmetric, so K = (S⁻¹ H P')ᵀ
    gain = cho_solve(factor, H @ prior.covariance).T
    if not np.all(np.isfinite(gain)):
        raise NumericError("Kalman gain is not finite.")
    return KalmanGain(gain=gain)


def update(
    prior: GaussianBelief,
    z: Union[Measurement, np.ndarray],
    model: LinearGaussianModel,
) -> GaussianBelief:
    """
    Correct a prior belief with a measurement.

    mean ← mean + K(z − H·mean), covariance ← (I − KH)P', then symmetrized.
    """
    nu, _ = innovation(prior, z, model)
    K = kalman_gain(prior, model).gain
    H = model.observation

    mean = prior.mean + K @ nu
    covariance = symmetrize((np.eye(prior.dim) - K @ H) @ prior.covariance)

    return GaussianBelief(mean=mean, covariance=clamp_psd(covariance))


def log_innovation_likelihood(
    prior: GaussianBelief,
    z: Union[Measurement, np.ndarray],
    model: LinearGaussianModel,
) -> float:
    """Log of the Gaussian density of the innovation under N(0, S)."""
    nu, S = innovation(prior, z, model)
    factor = _factor_innovation(S)
    mahalanobis = float(nu @ cho_solve(factor, nu))
    log_det = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
    return -0.5 * (mahalanobis + log_det + nu.shape[0] * LOG_2PI)


def innovation_likelihood(
    prior: GaussianBelief,
    z: Union[Measurement, np.ndarray],
    model: LinearGaussianModel,
) -> float:
    """Gaussian density of the innovation. Maximal at ν = 0."""
    return float(np.exp(log_innovation_likelihood(prior, z, model)))


def mahalanobis_squared(nu: np.ndarray, S: np.ndarray) -> float:
    """νᵀS⁻¹ν for an innovation and its covariance."""
    return float(nu @ cho_solve(_factor_innovation(S), nu))


def normalized_innovation_squared(
    prior: GaussianBelief,
    z: Union[Measurement, np.ndarray],
    model: LinearGaussianModel,
) -> float:
    """νᵀS⁻¹ν, used for gating."""
    nu, S = innovation(prior, z, model)
    return mahalanobis_squared(nu, S)
