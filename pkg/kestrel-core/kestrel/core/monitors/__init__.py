from kestrel.core.monitors.base import BaseMonitor, StepMonitor, TimingMonitor
from kestrel.core.monitors.decorators import step_observer
from kestrel.core.monitors.types import StepRecord

__all__ = ["BaseMonitor", "StepMonitor", "StepRecord", "TimingMonitor", "step_observer"]
