from typing import List, Optional, Sequence

import numpy as np
from kestrel.core.errors import ContractViolationError
from kestrel.core.simulator import GroundTruthSample
from kestrel.core.tracking.types import HistoryEntry, TrackMetrics

TIME_TOLERANCE = 1e-6


def align(history: Sequence[HistoryEntry], truth: Sequence[GroundTruthSample]) -> List[int]:
    """Index of the truth sample at each history timestamp."""
    times = np.array([sample.t for sample in truth])
    indices = []
    for entry in history:
        k = int(np.argmin(np.abs(times - entry.t))) if len(times) else -1
        if k < 0 or abs(times[k] - entry.t) > TIME_TOLERANCE:
            raise ContractViolationError(f"no ground truth sample at t={entry.t:.6f}s.")
        indices.append(k)
    return indices


def position_errors(
    history: Sequence[HistoryEntry],
    truth: Sequence[GroundTruthSample],
    labels: Sequence[str] = ("x", "vx", "y", "vy"),
) -> np.ndarray:
    """Euclidean position error at every history entry."""
    ix, iy = list(labels).index("x"), list(labels).index("y")
    errors = []
    for entry, k in zip(history, align(history, truth)):
        estimate = entry.belief.mean[[ix, iy]]
        errors.append(float(np.linalg.norm(estimate - truth[k].position)))
    return np.array(errors)


def compute_metrics(
    history: Sequence[HistoryEntry],
    truth: Sequence[GroundTruthSample],
    burn_in: float = 0.0,
    labels: Optional[Sequence[str]] = None,
    step_times_ms: Optional[Sequence[float]] = None,
    miss_count: int = 0,
) -> TrackMetrics:
    """
    Max and RMS position error of a track against ground truth.

    Entries earlier than `burn_in` seconds after the first truth sample are ignored.
    The default keeps every sample. Flows pass their configured burn-in explicitly.

    Raises:
        ContractViolationError: If a history timestamp has no matching truth sample.
    """
    if labels is None:
        labels = _labels_of(history)
    errors = position_errors(history, truth, labels)

    start = truth[0].t if truth else 0.0
    kept = np.array([entry.t - start >= burn_in - TIME_TOLERANCE for entry in history], dtype=bool)
    errors = errors[kept] if errors.size else errors

    mean_step_time = float(np.mean(step_times_ms)) if step_times_ms else 0.0
    if errors.size == 0:
        return TrackMetrics(max_error=0.0, rmse=0.0, mean_step_time=mean_step_time, miss_count=miss_count)
    return TrackMetrics(
        max_error=float(errors.max()),
        rmse=float(np.sqrt(np.mean(errors**2))),
        mean_step_time=mean_step_time,
        miss_count=miss_count,
        samples=int(errors.size),
    )


def _labels_of(history: Sequence[HistoryEntry]) -> List[str]:
    n = history[0].belief.dim if history else 4
    if n == 6:
        return ["x", "vx", "ax", "y", "vy", "ay"]
    if n == 4:
        return ["x", "vx", "y", "vy"]
    raise ContractViolationError(f"cannot infer the state layout of a {n}-dimensional belief, pass `labels`.")
