import numpy as np
from kestrel.core.estimation.types import LinearGaussianModel
from kestrel.core.motion_models.base import BaseMotionModel, MotionModelKind, check_time_step
from scipy.linalg import block_diag


class ConstantAccelerationModel(BaseMotionModel):
    """
    Constant acceleration per axis, state ``[x, vx, ax]`` per axis.

    Process noise is the white-noise-jerk discretization with intensity `q` in (m/s³)².
    """

    kind = MotionModelKind.CA

    @classmethod
    def class_name(cls) -> str:
        return "ConstantAccelerationModel"

    def transition(self, dt: float) -> np.ndarray:
        check_time_step(dt)
        A = np.array(
            [
                [1.0, dt, dt**2 / 2.0],
                [0.0, 1.0, dt],
                [0.0, 0.0, 1.0],
            ],
        )
        return block_diag(*[A] * self.axes)

    def process_noise(self, dt: float) -> np.ndarray:
        check_time_step(dt)
        Q = self.q * np.array(
            [
                [dt**5 / 20.0, dt**4 / 8.0, dt**3 / 6.0],
                [dt**4 / 8.0, dt**3 / 3.0, dt**2 / 2.0],
                [dt**3 / 6.0, dt**2 / 2.0, dt],
            ],
        )
        return block_diag(*[Q] * self.axes)


def ca_model(dt: float, q: float = 1.0, axes: int = 2, measurement_std: float = 1.0) -> LinearGaussianModel:
    return ConstantAccelerationModel(q=q, axes=axes, measurement_std=measurement_std).build(dt)
