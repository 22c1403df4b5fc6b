from abc import ABC, abstractmethod
from typing import Any

from pydantic import BaseModel


class BaseReader(ABC, BaseModel):
    """An interface for readers of frames and scenario documents."""

    @classmethod
    def class_name(cls) -> str:
        return "BaseReader"

    @abstractmethod
    def load_data(self, *args, **kwargs) -> Any:
        """Loads data."""

    def load(self, *args, **kwargs) -> Any:
        return self.load_data(*args, **kwargs)
