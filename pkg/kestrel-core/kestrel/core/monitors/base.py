from abc import ABC, abstractmethod
from typing import List

import numpy as np
from kestrel.core.monitors.types import StepRecord


class BaseMonitor(ABC):
    """An interface for observability."""

    @classmethod
    def class_name(cls) -> str:
        return "BaseMonitor"


class StepMonitor(BaseMonitor):
    """An interface for tracking-step observability."""

    @classmethod
    def class_name(cls) -> str:
        return "StepMonitor"

    @abstractmethod
    def __call__(self, record: StepRecord) -> None:
        """StepMonitor."""


class TimingMonitor(StepMonitor):
    """Collects step records in arrival order and summarizes step times."""

    def __init__(self) -> None:
        self.records: List[StepRecord] = []

    @classmethod
    def class_name(cls) -> str:
        return "TimingMonitor"

    def __call__(self, record: StepRecord) -> None:
        self.records.append(record)

    @property
    def mean_step_time_ms(self) -> float:
        if not self.records:
            return 0.0
        return float(np.mean([r.step_time_ms for r in self.records]))

    def reset(self) -> None:
        self.records = []
