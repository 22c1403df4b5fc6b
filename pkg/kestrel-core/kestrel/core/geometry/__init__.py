from kestrel.core.geometry.camera import (
    CameraIntrinsics,
    CameraRig,
    RigidPose,
    back_project,
    pixel_to_world,
    project,
    transform_to_world,
)

__all__ = [
    "CameraIntrinsics",
    "CameraRig",
    "RigidPose",
    "back_project",
    "pixel_to_world",
    "project",
    "transform_to_world",
]
