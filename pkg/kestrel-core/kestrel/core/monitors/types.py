from typing import List, Optional

from pydantic import BaseModel, Field


class StepRecord(BaseModel):
    """Observation of one tracking step."""

    track_id: int
    t: float
    associated: bool
    d2: Optional[float] = None
    coasted: bool = False
    dropped: bool = False
    step_time_ms: float = 0.0
    mode_probabilities: List[float] = Field(default_factory=list)
