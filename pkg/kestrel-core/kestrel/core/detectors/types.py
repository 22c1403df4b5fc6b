import math
from typing import Dict, List

import numpy as np
from kestrel.core.errors import ContractViolationError, NumericError
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_image(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ContractViolationError(f"`{name}` must be a non-empty 2-D array, got shape {arr.shape}.")
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"`{name}` contains non-finite values.")
    arr.setflags(write=False)
    return arr


class GrayImage(BaseModel):
    """
    Row-major single-channel image.

    Pixels loaded from files lie in [0, 1]. Normalized images and filter responses
    use the same container with arbitrary finite values.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray

    @field_validator("pixels", mode="before")
    @classmethod
    def _validate_pixels(cls, v) -> np.ndarray:
        return _frozen_image(v, "pixels")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


class LoGKernel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sigma: float = Field(gt=0.0)
    radius: int = Field(ge=0)
    taps: np.ndarray

    @field_validator("taps", mode="before")
    @classmethod
    def _validate_taps(cls, v) -> np.ndarray:
        return _frozen_image(v, "taps")

    @property
    def size(self) -> int:
        return 2 * self.radius + 1


class ScaleLevel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sigma: float
    response: np.ndarray

    @field_validator("response", mode="before")
    @classmethod
    def _validate_response(cls, v) -> np.ndarray:
        return _frozen_image(v, "response")


class ScaleSpaceStack(BaseModel):
    """Scale-normalized LoG responses at geometrically spaced σ."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    levels: List[ScaleLevel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_levels(self) -> "ScaleSpaceStack":
        sigmas = [level.sigma for level in self.levels]
        if any(b <= a for a, b in zip(sigmas, sigmas[1:])):
            raise ValueError("stack σ must be strictly increasing.")
        if len({level.response.shape for level in self.levels}) > 1:
            raise ValueError("stack levels must share one image shape.")
        return self

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([level.sigma for level in self.levels])

    def feature_map(self) -> np.ndarray:
        """Responses as a (levels, height, width) tensor."""
        if not self.levels:
            raise ContractViolationError("scale-space stack is empty.")
        return np.stack([level.response for level in self.levels])


class Blob(BaseModel):
    """A detection at sub-pixel (x, y) with characteristic scale σ."""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    sigma: float
    response: float

    def to_json_dict(self) -> Dict[str, float]:
        return {"x": self.x, "y": self.y, "sigma": self.sigma, "response": self.response}


class DetectorConfig(BaseModel):
    """
    LoG detector settings.

    Attributes:
        sigma_min (float): Smallest scale in pixels. Default is `2`.
        sigma_max (float): Largest scale in pixels. Default is `32`.
        levels_per_octave (int): Scale levels per doubling of σ. Default is `4`.
        response_threshold (float): Fraction of the global maximum a peak must reach. Default is `0.5`.
        absolute_floor (float): Minimum response regardless of the relative threshold. Default is `1e-3`.
        max_blobs (int): Maximum number of detections. Default is `10`.
        normalize (bool): Apply contrast normalization before filtering. Default is `True`.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma_min: float = Field(default=2.0, gt=0.0)
    sigma_max: float = Field(default=32.0, gt=0.0)
    levels_per_octave: int = Field(default=4, ge=1)
    response_threshold: float = Field(default=0.5, gt=0.0, le=1.0)
    absolute_floor: float = Field(default=1e-3, ge=0.0)
    max_blobs: int = Field(default=10, ge=1)
    normalize: bool = True

    @model_validator(mode="after")
    def _check_range(self) -> "DetectorConfig":
        if not self.sigma_min < self.sigma_max:
            raise ValueError(
                f"`sigma_min` ({self.sigma_min}) must be smaller than `sigma_max` ({self.sigma_max}).",
            )
        return self

    @property
    def level_count(self) -> int:
        return math.ceil(self.levels_per_octave * math.log2(self.sigma_max / self.sigma_min)) + 1

    def sigmas(self) -> np.ndarray:
        n = self.level_count
        ratio = self.sigma_max / self.sigma_min
        return self.sigma_min * ratio ** (np.arange(n) / (n - 1))
