from kestrel.core.motion_models.base import (
    CANONICAL_LABELS,
    BaseMotionModel,
    MotionModelKind,
    MotionModelSpec,
    initial_belief,
    observation_matrix,
    state_labels,
)
from kestrel.core.motion_models.constant_acceleration import ConstantAccelerationModel, ca_model
from kestrel.core.motion_models.constant_velocity import ConstantVelocityModel, cv_model
from kestrel.core.motion_models.coordinated_turn import CoordinatedTurnModel, ct_model
from kestrel.core.motion_models.factory import build_model, motion_model_from_spec

__all__ = [
    "CANONICAL_LABELS",
    "BaseMotionModel",
    "ConstantAccelerationModel",
    "ConstantVelocityModel",
    "CoordinatedTurnModel",
    "MotionModelKind",
    "MotionModelSpec",
    "build_model",
    "ca_model",
    "ct_model",
    "cv_model",
    "initial_belief",
    "motion_model_from_spec",
    "observation_matrix",
    "state_labels",
]
