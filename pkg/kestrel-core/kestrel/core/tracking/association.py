from typing import Optional, Sequence

from kestrel.core.estimation import (
    GaussianBelief,
    LinearGaussianModel,
    Measurement,
    normalized_innovation_squared,
)
from kestrel.core.tracking.types import Track
from pydantic import BaseModel, ConfigDict


class Association(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    measurement: Optional[Measurement] = None
    index: Optional[int] = None
    d2: Optional[float] = None

    @property
    def associated(self) -> bool:
        return self.measurement is not None


def associate(
    prior: GaussianBelief,
    model: LinearGaussianModel,
    detections: Sequence[Measurement],
    gate_threshold: float,
) -> Association:
    """
    Nearest neighbour under the squared Mahalanobis distance d² = νᵀS⁻¹ν.

    Ties are broken by detection index. The closest detection is rejected when
    d² exceeds `gate_threshold`; its d² is still reported.
    """
    if not detections:
        return Association()

    scored = sorted(
        (normalized_innovation_squared(prior, detection, model), index)
        for index, detection in enumerate(detections)
    )
    d2, index = scored[0]
    if d2 > gate_threshold:
        return Association(d2=d2)
    return Association(measurement=detections[index], index=index, d2=d2)


def gate_and_associate(
    track: Track,
    detections: Sequence[Measurement],
    dt: float,
    gate_threshold: float = 9.21,
) -> Association:
    """Associate against the track's fused prior `dt` seconds ahead."""
    return associate(
        track.filter.prior(dt),
        track.filter.measurement_model(),
        detections,
        gate_threshold,
    )
