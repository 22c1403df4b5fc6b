import numpy as np
from kestrel.core.errors import ContractViolationError
from kestrel.core.estimation.types import LinearGaussianModel
from kestrel.core.motion_models.base import BaseMotionModel, MotionModelKind, check_time_step
from kestrel.core.motion_models.constant_velocity import cv_blocks
from scipy.linalg import block_diag


class CoordinatedTurnModel(BaseMotionModel):
    """
    Planar turn at a known constant rate, state ``[x, vx, y, vy]``.

    The velocity rotates by ωdt each step and the position advances along the arc,
    so speed is preserved. Process noise reuses the constant-velocity blocks.

    Args:
        omega (float): Turn rate in rad/s, positive counter-clockwise. Must be non-zero.
        q (float, optional): Acceleration noise intensity. Default is `1.0`.
        measurement_std (float, optional): Position measurement noise std. Default is `1.0`.
    """

    kind = MotionModelKind.CT

    def __init__(self, omega: float, q: float = 1.0, measurement_std: float = 1.0) -> None:
        if omega == 0.0:
            raise ContractViolationError("`omega` must be non-zero, use a constant-velocity model instead.")
        super().__init__(q=q, axes=2, measurement_std=measurement_std)
        self.omega = omega

    @classmethod
    def class_name(cls) -> str:
        return "CoordinatedTurnModel"

    def transition(self, dt: float) -> np.ndarray:
        check_time_step(dt)
        w = self.omega
        s = np.sin(w * dt)
        c = np.cos(w * dt)
        a = s / w
        # (1 - cos ωdt) / ω without cancellation
        b = 2.0 * np.sin(0.5 * w * dt) ** 2 / w
        return np.array(
            [
                [1.0, a, 0.0, -b],
                [0.0, c, 0.0, -s],
                [0.0, b, 1.0, a],
                [0.0, s, 0.0, c],
            ],
        )

    def process_noise(self, dt: float) -> np.ndarray:
        check_time_step(dt)
        _, Q = cv_blocks(dt, self.q)
        return block_diag(Q, Q)


def ct_model(dt: float, omega: float, q: float = 1.0, measurement_std: float = 1.0) -> LinearGaussianModel:
    return CoordinatedTurnModel(omega=omega, q=q, measurement_std=measurement_std).build(dt)
