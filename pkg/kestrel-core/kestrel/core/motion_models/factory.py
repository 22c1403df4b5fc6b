from kestrel.core.estimation.types import LinearGaussianModel
from kestrel.core.motion_models.base import BaseMotionModel, MotionModelKind, MotionModelSpec
from kestrel.core.motion_models.constant_acceleration import ConstantAccelerationModel
from kestrel.core.motion_models.constant_velocity import ConstantVelocityModel
from kestrel.core.motion_models.coordinated_turn import CoordinatedTurnModel


def motion_model_from_spec(spec: MotionModelSpec) -> BaseMotionModel:
    if spec.kind == MotionModelKind.CV:
        return ConstantVelocityModel(q=spec.q, axes=spec.axes, measurement_std=spec.measurement_std)
    if spec.kind == MotionModelKind.CA:
        return ConstantAccelerationModel(q=spec.q, axes=spec.axes, measurement_std=spec.measurement_std)
    return CoordinatedTurnModel(omega=spec.omega, q=spec.q, measurement_std=spec.measurement_std)


def build_model(spec: MotionModelSpec) -> LinearGaussianModel:
    """Build the linear-Gaussian model described by `spec` at its `dt`."""
    return motion_model_from_spec(spec).build(spec.dt)
