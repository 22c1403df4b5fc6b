from kestrel.core.detectors.base import BaseDetector
from kestrel.core.detectors.log import (
    LoGBlobDetector,
    convolve,
    detect_blobs,
    make_log_kernel,
    normalize_contrast,
    scale_space_response,
)
from kestrel.core.detectors.types import (
    Blob,
    DetectorConfig,
    GrayImage,
    LoGKernel,
    ScaleLevel,
    ScaleSpaceStack,
)

__all__ = [
    "BaseDetector",
    "Blob",
    "DetectorConfig",
    "GrayImage",
    "LoGBlobDetector",
    "LoGKernel",
    "ScaleLevel",
    "ScaleSpaceStack",
    "convolve",
    "detect_blobs",
    "make_log_kernel",
    "normalize_contrast",
    "scale_space_response",
]
