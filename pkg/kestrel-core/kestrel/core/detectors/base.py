from abc import ABC, abstractmethod
from typing import List

from kestrel.core.detectors.types import Blob, GrayImage


class BaseDetector(ABC):
    """An interface for image blob detectors."""

    @classmethod
    def class_name(cls) -> str:
        return "BaseDetector"

    @abstractmethod
    def detect(self, image: GrayImage) -> List[Blob]:
        """Detect blobs, strongest first."""

    def __call__(self, image: GrayImage) -> List[Blob]:
        return self.detect(image)
