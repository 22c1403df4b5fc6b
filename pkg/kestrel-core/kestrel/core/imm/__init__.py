from kestrel.core.imm.config import (
    ImmConfig,
    ImmModeConfig,
    default_modes,
    default_transition,
    initiate_bank,
)
from kestrel.core.imm.estimator import (
    combine,
    filter_modes,
    fused_labels,
    imm_step,
    mix,
    mix_beliefs,
    predict_bank,
    union_labels,
    update_mode_probabilities,
)
from kestrel.core.imm.types import (
    ImmBank,
    ImmMode,
    ImmStepReport,
    ImmStepResult,
    MixingResult,
    ModeProbabilities,
    TransitionMatrix,
)

__all__ = [
    "ImmBank",
    "ImmConfig",
    "ImmMode",
    "ImmModeConfig",
    "ImmStepReport",
    "ImmStepResult",
    "MixingResult",
    "ModeProbabilities",
    "TransitionMatrix",
    "combine",
    "default_modes",
    "default_transition",
    "filter_modes",
    "fused_labels",
    "imm_step",
    "initiate_bank",
    "mix",
    "mix_beliefs",
    "predict_bank",
    "union_labels",
    "update_mode_probabilities",
]
