from typing import Optional, Tuple

import numpy as np
from kestrel.core.detectors import GrayImage
from kestrel.core.geometry import CameraRig
from kestrel.core.simulator.types import Appearance, GroundTruthSample, RngState

SUPERSAMPLE = 4


def target_pixel(truth: GroundTruthSample, camera: CameraRig, target_height: float = 0.0) -> Tuple[np.ndarray, float]:
    """Projected pixel and depth of the target."""
    point = np.array([truth.position[0], truth.position[1], target_height])
    return camera.project(point)


def _square_coverage(
    us: np.ndarray,
    vs: np.ndarray,
    center: np.ndarray,
    side: float,
    rotation_deg: float,
) -> np.ndarray:
    """Fraction of each pixel covered by the rotated square, by regular supersampling."""
    theta = np.deg2rad(rotation_deg)
    c, s = np.cos(theta), np.sin(theta)
    offsets = (np.arange(SUPERSAMPLE) + 0.5) / SUPERSAMPLE - 0.5

    coverage = np.zeros(us.shape)
    for oy in offsets:
        for ox in offsets:
            du = us + ox - center[0]
            dv = vs + oy - center[1]
            a = c * du + s * dv
            b = -s * du + c * dv
            coverage += (np.abs(a) <= 0.5 * side) & (np.abs(b) <= 0.5 * side)
    return coverage / SUPERSAMPLE**2


def synthesize_frame(
    truth: GroundTruthSample,
    camera: CameraRig,
    appearance: Optional[Appearance] = None,
    target_height: float = 0.0,
    rng_state: Optional[RngState] = None,
) -> GrayImage:
    """
    Render the target at its projected pixel.

    The target is an isotropic Gaussian of `blob_sigma_px` or a rotated square patch,
    scaled by `gain` on top of `background`. Pixel noise is added only when
    `appearance.noise_std` is positive and an `rng_state` is supplied. Values are
    clipped to [0, 1].

    Raises:
        BehindCameraError: If the target is not in front of the camera.
    """
    appearance = appearance or Appearance()
    pixel, _ = target_pixel(truth, camera, target_height)

    width, height = camera.intrinsics.width, camera.intrinsics.height
    vs, us = np.mgrid[0:height, 0:width].astype(np.float64)

    if appearance.shape == "square":
        shape = _square_coverage(us, vs, pixel, appearance.square_side_px, appearance.rotation_deg)
    else:
        r2 = (us - pixel[0]) ** 2 + (vs - pixel[1]) ** 2
        shape = np.exp(-r2 / (2.0 * appearance.blob_sigma_px**2))

    frame = appearance.background + appearance.gain * shape
    if appearance.noise_std > 0.0 and rng_state is not None:
        frame = frame + rng_state.generator().normal(0.0, appearance.noise_std, size=frame.shape)
    return GrayImage(pixels=np.clip(frame, 0.0, 1.0))
