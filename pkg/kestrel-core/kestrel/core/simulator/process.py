import numpy as np
from kestrel.core.estimation import GaussianBelief, LinearGaussianModel
from pydantic import BaseModel, ConfigDict


class ProcessRun(BaseModel):
    """Truth states x₀…x_N and measurements z₁…z_N of a linear-Gaussian process."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    states: np.ndarray
    measurements: np.ndarray


def simulate_process(
    model: LinearGaussianModel,
    initial: GaussianBelief,
    steps: int,
    seed: int,
) -> ProcessRun:
    """
    Draw a trajectory from the model itself: x₀ ~ N(m₀, P₀), x ← Ax + w with w ~ N(0, Q),
    z = Hx + v with v ~ N(0, R).
    """
    rng = np.random.default_rng(seed)
    n, p = model.state_dim, model.measurement_dim

    states = np.empty((steps + 1, n))
    measurements = np.empty((steps, p))
    states[0] = rng.multivariate_normal(initial.mean, initial.covariance, method="eigh")
    for k in range(steps):
        w = rng.multivariate_normal(np.zeros(n), model.process_noise, method="eigh")
        states[k + 1] = model.transition @ states[k] + w
        v = rng.multivariate_normal(np.zeros(p), model.measurement_noise, method="eigh")
        measurements[k] = model.observation @ states[k + 1] + v

    states.setflags(write=False)
    measurements.setflags(write=False)
    return ProcessRun(states=states, measurements=measurements)
