import math
from logging import getLogger
from typing import List, Optional, Tuple

import numpy as np
from kestrel.core.detectors.base import BaseDetector
from kestrel.core.detectors.types import (
    Blob,
    DetectorConfig,
    GrayImage,
    LoGKernel,
    ScaleLevel,
    ScaleSpaceStack,
)
from kestrel.core.errors import ContractViolationError
from scipy import ndimage, signal

logger = getLogger(__name__)

VARIANCE_EPS = 1e-24


def make_log_kernel(sigma: float) -> LoGKernel:
    """
    Sampled ∇²G truncated at radius ⌈4σ⌉ and shifted to an exact zero sum.

    The centre tap is the minimum, so bright blobs give negative responses.
    """
    if not sigma > 0.0:
        raise ContractViolationError(f"`sigma` must be > 0, got {sigma}.")

    radius = math.ceil(4.0 * sigma)
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    xx, yy = np.meshgrid(coords, coords)
    r2 = xx**2 + yy**2
    s2 = sigma**2
    taps = (r2 - 2.0 * s2) / (s2**2) * np.exp(-r2 / (2.0 * s2)) / (2.0 * np.pi * s2)
    taps = taps - taps.mean()
    return LoGKernel(sigma=sigma, radius=radius, taps=taps)


def convolve(image: GrayImage, kernel: LoGKernel) -> GrayImage:
    """Dense 2-D convolution with reflect-101 borders. Output has the input's shape."""
    if kernel.radius >= min(image.width, image.height):
        raise ContractViolationError(
            f"kernel radius {kernel.radius} does not fit a {image.width}×{image.height} image.",
        )
    padded = np.pad(image.pixels, kernel.radius, mode="reflect")
    response = signal.convolve(padded, kernel.taps, mode="valid", method="auto")
    return GrayImage(pixels=response)


def scale_space_response(image: GrayImage, config: Optional[DetectorConfig] = None) -> ScaleSpaceStack:
    """Stack of σ²·(LoG_σ ∗ image) over the configured σ progression."""
    config = config or DetectorConfig()
    levels = []
    for sigma in config.sigmas():
        sigma = float(sigma)
        response = sigma**2 * convolve(image, make_log_kernel(sigma)).pixels
        levels.append(ScaleLevel(sigma=sigma, response=response))
    return ScaleSpaceStack(levels=levels)


def _parabola_offset(minus: float, center: float, plus: float) -> float:
    curvature = minus - 2.0 * center + plus
    if curvature >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (minus - plus) / curvature, -0.5, 0.5))


def _refine(magnitude: np.ndarray, k: int, y: int, x: int) -> Tuple[float, float, float]:
    """Sub-pixel offset (dk, dy, dx) of a maximum from a quadratic fit of its neighbourhood."""
    point = (k, y, x)
    interior = [0 < p < size - 1 for p, size in zip(point, magnitude.shape)]

    if all(interior):
        cube = magnitude[k - 1 : k + 2, y - 1 : y + 2, x - 1 : x + 2]
        f0 = cube[1, 1, 1]
        gradient = 0.5 * np.array(
            [
                cube[2, 1, 1] - cube[0, 1, 1],
                cube[1, 2, 1] - cube[1, 0, 1],
                cube[1, 1, 2] - cube[1, 1, 0],
            ],
        )
        hessian = np.empty((3, 3))
        hessian[0, 0] = cube[2, 1, 1] - 2.0 * f0 + cube[0, 1, 1]
        hessian[1, 1] = cube[1, 2, 1] - 2.0 * f0 + cube[1, 0, 1]
        hessian[2, 2] = cube[1, 1, 2] - 2.0 * f0 + cube[1, 1, 0]
        hessian[0, 1] = hessian[1, 0] = 0.25 * (cube[2, 2, 1] - cube[2, 0, 1] - cube[0, 2, 1] + cube[0, 0, 1])
        hessian[0, 2] = hessian[2, 0] = 0.25 * (cube[2, 1, 2] - cube[2, 1, 0] - cube[0, 1, 2] + cube[0, 1, 0])
        hessian[1, 2] = hessian[2, 1] = 0.25 * (cube[1, 2, 2] - cube[1, 2, 0] - cube[1, 0, 2] + cube[1, 0, 0])
        try:
            offset = -np.linalg.solve(hessian, gradient)
            if np.all(np.isfinite(offset)) and np.all(np.abs(offset) <= 0.5):
                return float(offset[0]), float(offset[1]), float(offset[2])
        except np.linalg.LinAlgError:
            pass

    offsets = []
    for axis, inside in enumerate(interior):
        if not inside:
            offsets.append(0.0)
            continue
        lo, hi = list(point), list(point)
        lo[axis] -= 1
        hi[axis] += 1
        offsets.append(_parabola_offset(magnitude[tuple(lo)], magnitude[point], magnitude[tuple(hi)]))
    return offsets[0], offsets[1], offsets[2]


def detect_blobs(stack: ScaleSpaceStack, config: Optional[DetectorConfig] = None) -> List[Blob]:
    """
    3-D local maxima of |response| over (σ, y, x).

    Peaks must reach `response_threshold` times the global maximum and the absolute
    floor. Candidates are ordered by descending response, then level, row and column,
    and greedily suppressed when closer than 2·min(σᵢ, σⱼ) to a kept blob.
    """
    config = config or DetectorConfig()
    if not stack.levels:
        raise ContractViolationError("scale-space stack is empty.")

    magnitude = np.abs(stack.feature_map())
    global_max = float(magnitude.max())
    threshold = max(config.response_threshold * global_max, config.absolute_floor)

    peaks = magnitude == ndimage.maximum_filter(magnitude, size=3, mode="nearest")
    peaks &= (magnitude >= threshold) & (magnitude > 0.0)
    ks, ys, xs = np.nonzero(peaks)
    values = magnitude[ks, ys, xs]
    order = np.lexsort((xs, ys, ks, -values))

    sigmas = stack.sigmas
    log_step = float(np.log(sigmas[1] / sigmas[0])) if len(sigmas) > 1 else 0.0
    height, width = magnitude.shape[1:]

    blobs: List[Blob] = []
    for i in order:
        k, y, x = int(ks[i]), int(ys[i]), int(xs[i])
        dk, dy, dx = _refine(magnitude, k, y, x)
        sigma = float(sigmas[k] * np.exp(dk * log_step))
        candidate = Blob(
            x=float(np.clip(x + dx, 0.0, width - 1)),
            y=float(np.clip(y + dy, 0.0, height - 1)),
            sigma=float(np.clip(sigma, sigmas[0], sigmas[-1])),
            response=float(values[i]),
        )
        if all(
            math.hypot(candidate.x - b.x, candidate.y - b.y) >= 2.0 * min(candidate.sigma, b.sigma)
            for b in blobs
        ):
            blobs.append(candidate)
            if len(blobs) == config.max_blobs:
                break
    return blobs


def normalize_contrast(image: GrayImage) -> Tuple[GrayImage, bool]:
    """
    Affine renormalization to zero mean and unit standard deviation.

    Returns the normalized image and a low-signal flag. A zero-variance image
    normalizes to zeros with the flag set.
    """
    pixels = image.pixels
    mean = pixels.mean()
    centered = pixels - mean
    variance = float(np.mean(centered**2))
    if variance <= VARIANCE_EPS * max(1.0, mean**2):
        return GrayImage(pixels=np.zeros_like(pixels)), True
    return GrayImage(pixels=centered / math.sqrt(variance)), False


class LoGBlobDetector(BaseDetector):
    """
    Scale-normalized Laplacian-of-Gaussian blob detector.

    Args:
        config (DetectorConfig, optional): Detector settings. Defaults to `DetectorConfig()`.

    Example:
        .. code-block:: python

            from kestrel.core.detectors import LoGBlobDetector

            detector = LoGBlobDetector()
            blobs = detector.detect(image)
    """

    def __init__(self, config: Optional[DetectorConfig] = None) -> None:
        self.config = config or DetectorConfig()

    @classmethod
    def class_name(cls) -> str:
        return "LoGBlobDetector"

    def feature_map(self, image: GrayImage) -> np.ndarray:
        """LoG filter-bank responses of the (optionally normalized) image."""
        return scale_space_response(self._prepare(image), self.config).feature_map()

    def _prepare(self, image: GrayImage) -> GrayImage:
        if not self.config.normalize:
            return image
        normalized, low_signal = normalize_contrast(image)
        if low_signal:
            logger.warning("Image has no contrast, no blobs will be detected.")
        return normalized

    def detect(self, image: GrayImage) -> List[Blob]:
        stack = scale_space_response(self._prepare(image), self.config)
        return detect_blobs(stack, self.config)
