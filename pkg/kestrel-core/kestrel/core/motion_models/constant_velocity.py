import numpy as np
from kestrel.core.estimation.types import LinearGaussianModel
from kestrel.core.motion_models.base import BaseMotionModel, MotionModelKind, check_time_step
from scipy.linalg import block_diag


def cv_blocks(dt: float, q: float):
    """Per-axis transition and white-noise-acceleration process noise."""
    A = np.array([[1.0, dt], [0.0, 1.0]])
    Q = q * np.array(
        [
            [dt**3 / 3.0, dt**2 / 2.0],
            [dt**2 / 2.0, dt],
        ],
    )
    return A, Q


class ConstantVelocityModel(BaseMotionModel):
    """
    Constant velocity per axis, state ``[x, vx]`` or ``[x, vx, y, vy]``.

    Args:
        q (float, optional): Acceleration noise intensity in (m/s²)². Default is `1.0`.
        axes (int, optional): Number of spatial axes, 1 or 2. Default is `2`.
        measurement_std (float, optional): Position measurement noise std. Default is `1.0`.

    Example:
        .. code-block:: python

            from kestrel.core.motion_models import ConstantVelocityModel

            model = ConstantVelocityModel(q=0.01).build(dt=0.05)
    """

    kind = MotionModelKind.CV

    @classmethod
    def class_name(cls) -> str:
        return "ConstantVelocityModel"

    def transition(self, dt: float) -> np.ndarray:
        check_time_step(dt)
        A, _ = cv_blocks(dt, self.q)
        return block_diag(*[A] * self.axes)

    def process_noise(self, dt: float) -> np.ndarray:
        check_time_step(dt)
        _, Q = cv_blocks(dt, self.q)
        return block_diag(*[Q] * self.axes)


def cv_model(dt: float, q: float = 1.0, axes: int = 2, measurement_std: float = 1.0) -> LinearGaussianModel:
    """Constant-velocity linear-Gaussian model for a step of `dt` seconds."""
    return ConstantVelocityModel(q=q, axes=axes, measurement_std=measurement_std).build(dt)
