from kestrel.core.evaluation.consistency import ConsistencyEvaluator, chi2_band, nees, nis
from kestrel.core.evaluation.metrics import align, compute_metrics, position_errors

__all__ = [
    "ConsistencyEvaluator",
    "align",
    "chi2_band",
    "compute_metrics",
    "nees",
    "nis",
    "position_errors",
]
