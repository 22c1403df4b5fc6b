import time
from logging import getLogger
from typing import Callable

from kestrel.core.monitors.types import StepRecord

logger = getLogger(__name__)


def step_observer() -> Callable:
    """
    Decorator to wrap a tracking step with timing and observability logic.
    The wrapped method returns ``(track, report)``; the report is stamped with the
    step time in milliseconds. Looks for a monitor in `self.callback_manager`.
    """

    def decorator(f: Callable) -> Callable:
        def wrapper(self, *args, **kwargs):
            callback_manager_fn = getattr(self, "callback_manager", None)

            start_time = time.perf_counter()
            track, report = f(self, *args, **kwargs)
            step_time_ms = (time.perf_counter() - start_time) * 1000.0
            report = report.model_copy(update={"step_time_ms": step_time_ms})

            if callback_manager_fn:
                try:
                    callback_manager_fn(
                        StepRecord(
                            track_id=track.id,
                            t=report.t,
                            associated=report.associated,
                            d2=report.d2,
                            coasted=report.coasted,
                            dropped=report.dropped,
                            step_time_ms=step_time_ms,
                            mode_probabilities=report.mode_probabilities,
                        ),
                    )
                except Exception as e:
                    logger.error(f"Observability callback error: {e}")

            return track, report

        return wrapper

    return decorator
