from typing import Sequence, Tuple

import numpy as np
from kestrel.core.errors import BehindCameraError, ContractViolationError
from kestrel.core.utils.linalg import as_matrix, as_vector
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.transform import Rotation

ORTHONORMAL_TOLERANCE = 1e-9

# camera looking straight down at the ground plane, image x along world +x
DOWNWARD_ROTATION = ((1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, -1.0))


class CameraIntrinsics(BaseModel):
    """Pinhole intrinsics without distortion. `width` and `height` bound valid pixels."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fx: float = Field(gt=0.0)
    fy: float = Field(gt=0.0)
    cx: float
    cy: float
    width: int = Field(default=640, gt=0)
    height: int = Field(default=480, gt=0)


class RigidPose(BaseModel):
    """
    Camera frame expressed in the world frame: p_world = R·p_cam + t.

    Attributes:
        rotation (np.ndarray): 3×3 orthonormal matrix with det +1.
        translation (np.ndarray): Camera origin in world coordinates, meters.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rotation: np.ndarray = Field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = Field(default_factory=lambda: np.zeros(3))

    @field_validator("rotation", mode="before")
    @classmethod
    def _validate_rotation(cls, v) -> np.ndarray:
        return as_matrix(v, "rotation")

    @field_validator("translation", mode="before")
    @classmethod
    def _validate_translation(cls, v) -> np.ndarray:
        return as_vector(v, "translation")

    @model_validator(mode="after")
    def _check_rotation(self) -> "RigidPose":
        R = self.rotation
        if R.shape != (3, 3) or self.translation.shape != (3,):
            raise ContractViolationError("pose needs a 3×3 rotation and a 3-vector translation.")
        if not np.allclose(R.T @ R, np.eye(3), atol=ORTHONORMAL_TOLERANCE, rtol=0.0):
            raise ContractViolationError("`rotation` is not orthonormal.")
        if abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOLERANCE:
            raise ContractViolationError("`rotation` must have determinant +1.")
        return self

    @classmethod
    def identity(cls) -> "RigidPose":
        return cls()

    @classmethod
    def from_euler(
        cls,
        angles: Sequence[float],
        translation: Sequence[float] = (0.0, 0.0, 0.0),
        seq: str = "xyz",
        degrees: bool = False,
    ) -> "RigidPose":
        rotation = Rotation.from_euler(seq, angles, degrees=degrees).as_matrix()
        return cls(rotation=rotation, translation=translation)

    @classmethod
    def looking_down(cls, position: Sequence[float]) -> "RigidPose":
        """Camera at `position` with its optical axis along world −z."""
        return cls(rotation=DOWNWARD_ROTATION, translation=position)

    def compose(self, other: "RigidPose") -> "RigidPose":
        """self ∘ other: apply `other` first."""
        return RigidPose(
            rotation=self.rotation @ other.rotation,
            translation=self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidPose":
        return RigidPose(rotation=self.rotation.T, translation=-self.rotation.T @ self.translation)


def back_project(pixel: Sequence[float], depth: float, intrinsics: CameraIntrinsics) -> np.ndarray:
    """Camera-frame point at `depth` meters along the ray through `pixel`."""
    if not depth > 0.0:
        raise ContractViolationError(f"`depth` must be > 0, got {depth}.")
    u, v = float(pixel[0]), float(pixel[1])
    return np.array(
        [
            (u - intrinsics.cx) * depth / intrinsics.fx,
            (v - intrinsics.cy) * depth / intrinsics.fy,
            depth,
        ],
    )


def transform_to_world(point: Sequence[float], pose: RigidPose) -> np.ndarray:
    return pose.rotation @ np.asarray(point, dtype=np.float64) + pose.translation


def project(
    point: Sequence[float],
    pose: RigidPose,
    intrinsics: CameraIntrinsics,
) -> Tuple[np.ndarray, float]:
    """
    Pixel coordinates and depth of a world point.

    Raises:
        BehindCameraError: If the point is not in front of the camera.
    """
    p_cam = pose.rotation.T @ (np.asarray(point, dtype=np.float64) - pose.translation)
    depth = float(p_cam[2])
    if not depth > 0.0:
        raise BehindCameraError(f"point is behind the camera (camera-frame Z = {depth}).")
    pixel = np.array(
        [
            intrinsics.fx * p_cam[0] / depth + intrinsics.cx,
            intrinsics.fy * p_cam[1] / depth + intrinsics.cy,
        ],
    )
    return pixel, depth


class CameraRig(BaseModel):
    """Intrinsics and pose of one camera."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    intrinsics: CameraIntrinsics
    pose: RigidPose = Field(default_factory=RigidPose)

    def project(self, point: Sequence[float]) -> Tuple[np.ndarray, float]:
        return project(point, self.pose, self.intrinsics)

    def pixel_to_world(self, pixel: Sequence[float], depth: float) -> np.ndarray:
        return transform_to_world(back_project(pixel, depth, self.intrinsics), self.pose)


def pixel_to_world(
    pixel: Sequence[float],
    depth: float,
    intrinsics: CameraIntrinsics,
    pose: RigidPose,
) -> np.ndarray:
    return transform_to_world(back_project(pixel, depth, intrinsics), pose)
