from typing import List, Optional, Sequence

import numpy as np
from kestrel.core.imm.types import ImmBank, ImmMode, ModeProbabilities, TransitionMatrix
from kestrel.core.motion_models import MotionModelKind, MotionModelSpec, initial_belief, state_labels
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ImmModeConfig(BaseModel):
    """One entry of the `imm.modes` list of a scenario file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: MotionModelKind
    q: float = Field(default=0.01, ge=0.0)
    omega: Optional[float] = None

    @model_validator(mode="after")
    def _check_turn_rate(self) -> "ImmModeConfig":
        if self.kind == MotionModelKind.CT and not self.omega:
            raise ValueError("`omega` must be non-zero for a `ct` mode.")
        return self


def default_modes(omega0: float = 0.5) -> List[ImmModeConfig]:
    """CV, CA and a left and right coordinated turn at ±omega0."""
    return [
        ImmModeConfig(kind=MotionModelKind.CV, q=0.01),
        ImmModeConfig(kind=MotionModelKind.CA, q=1.0),
        ImmModeConfig(kind=MotionModelKind.CT, q=0.01, omega=omega0),
        ImmModeConfig(kind=MotionModelKind.CT, q=0.01, omega=-omega0),
    ]


def default_transition(size: int, self_transition: float = 0.95) -> TransitionMatrix:
    """`self_transition` on the diagonal, the remainder spread uniformly."""
    if size < 2:
        raise ValueError(f"`size` must be >= 2, got {size}.")
    off = (1.0 - self_transition) / (size - 1)
    matrix = np.full((size, size), off)
    np.fill_diagonal(matrix, self_transition)
    # absorb rounding so rows sum to 1
    matrix[np.diag_indices(size)] = 1.0 - off * (size - 1)
    return TransitionMatrix(matrix=matrix)


class ImmConfig(BaseModel):
    """
    IMM bank configuration.

    Attributes:
        modes (List[ImmModeConfig]): Motion hypotheses. Defaults to CV, CA, CT(±omega0).
        omega0 (float): Turn rate of the default CT modes in rad/s.
        self_transition (float): Diagonal of the default transition matrix.
        pi (List[List[float]], optional): Explicit transition matrix, overrides `self_transition`.
        initial_probabilities (List[float], optional): Initial μ. Uniform when omitted.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    omega0: float = Field(default=0.5, gt=0.0)
    modes: Optional[List[ImmModeConfig]] = None
    self_transition: float = Field(default=0.95, ge=0.0, le=1.0)
    pi: Optional[List[List[float]]] = None
    initial_probabilities: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_sizes(self) -> "ImmConfig":
        m = len(self.mode_configs())
        if m < 2:
            raise ValueError("an IMM bank needs at least 2 modes.")
        if self.pi is not None and (len(self.pi) != m or any(len(row) != m for row in self.pi)):
            raise ValueError(f"`pi` must be {m}×{m}.")
        if self.initial_probabilities is not None and len(self.initial_probabilities) != m:
            raise ValueError(f"`initial_probabilities` must have {m} entries.")
        return self

    def mode_configs(self) -> List[ImmModeConfig]:
        return list(self.modes) if self.modes is not None else default_modes(self.omega0)

    def mode_specs(self, dt: float, measurement_std: float) -> List[MotionModelSpec]:
        return [
            MotionModelSpec(
                kind=mode.kind,
                dt=dt,
                q=mode.q,
                omega=mode.omega,
                axes=2,
                measurement_std=measurement_std,
            )
            for mode in self.mode_configs()
        ]

    def transition_matrix(self) -> TransitionMatrix:
        if self.pi is not None:
            return TransitionMatrix(matrix=self.pi)
        return default_transition(len(self.mode_configs()), self.self_transition)

    def probabilities(self) -> ModeProbabilities:
        if self.initial_probabilities is not None:
            return ModeProbabilities(probabilities=self.initial_probabilities)
        return ModeProbabilities.uniform(len(self.mode_configs()))


def initiate_bank(
    specs: Sequence[MotionModelSpec],
    position: Sequence[float],
    transition: TransitionMatrix,
    probabilities: Optional[ModeProbabilities] = None,
    velocity_std: float = 1.0,
    acceleration_std: float = 1.0,
) -> ImmBank:
    """Start a bank from a single position measurement."""
    modes = []
    for spec in specs:
        labels = state_labels(spec.kind, spec.axes)
        belief = initial_belief(
            labels,
            position,
            position_std=spec.measurement_std,
            velocity_std=velocity_std,
            acceleration_std=acceleration_std,
        )
        modes.append(ImmMode(spec=spec, belief=belief))

    return ImmBank(
        modes=modes,
        probabilities=probabilities or ModeProbabilities.uniform(len(modes)),
        transition=transition,
    )
