from typing import Dict, Optional, Tuple

import numpy as np
from kestrel.core.errors import ContractViolationError, NumericError
from kestrel.core.estimation import (
    GaussianBelief,
    LinearGaussianModel,
    innovation,
    mahalanobis_squared,
    predict,
    update,
)
from kestrel.core.simulator import simulate_process
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats
from scipy.linalg import LinAlgError, cho_factor, cho_solve


def nees(error: np.ndarray, covariance: np.ndarray) -> float:
    """Normalized estimation error squared eᵀP⁻¹e."""
    try:
        factor = cho_factor(covariance, lower=True)
    except LinAlgError as e:
        raise NumericError("estimate covariance is not positive definite.") from e
    return float(error @ cho_solve(factor, error))


def nis(nu: np.ndarray, S: np.ndarray) -> float:
    """Normalized innovation squared νᵀS⁻¹ν."""
    return mahalanobis_squared(nu, S)


def chi2_band(alpha: float, dof: int, runs: int = 1) -> Tuple[float, float]:
    """
    Two-sided (1 − alpha) acceptance interval for the average of `runs`
    independent chi-square(dof) statistics.
    """
    total = dof * runs
    return (
        float(stats.chi2.ppf(alpha / 2.0, total) / runs),
        float(stats.chi2.ppf(1.0 - alpha / 2.0, total) / runs),
    )


class ConsistencyEvaluator(BaseModel):
    """
    Monte-Carlo consistency check of a Kalman filter.

    Every run draws a trajectory from `model`, filters it with `filter_model` (or `model`
    itself) and records NEES and NIS per step. A run is consistent when at least
    `run_threshold` of its steps fall inside the single-run chi-square band. The filter
    passes when at least `pass_fraction` of the runs are consistent.

    Per-step ensemble averages and their narrower band are reported alongside for plotting.

    Args:
        model (LinearGaussianModel): Model the trajectories are drawn from.
        initial (GaussianBelief): Initial state distribution and filter prior.
        filter_model (LinearGaussianModel, optional): Model the filter runs with. Defaults to `model`.
        steps (int, optional): Steps per run. Defaults to `1000`.
        runs (int, optional): Number of seeded runs. Defaults to `50`.
        alpha (float, optional): Significance of the two-sided band. Defaults to `0.05`.
        run_threshold (float, optional): Fraction of a run's steps that must fall in the band. Defaults to `0.9`.
        pass_fraction (float, optional): Fraction of runs that must be consistent. Defaults to `0.9`.

    Example:
        .. code-block:: python

            from kestrel.core.evaluation import ConsistencyEvaluator
            from kestrel.core.motion_models import cv_model

            evaluator = ConsistencyEvaluator(model=cv_model(dt=0.05), initial=belief)
            result = evaluator.evaluate(seed=0)
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: LinearGaussianModel
    initial: GaussianBelief
    filter_model: Optional[LinearGaussianModel] = None
    steps: int = Field(default=1000, ge=1)
    runs: int = Field(default=50, ge=1)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    run_threshold: float = Field(default=0.9, gt=0.0, le=1.0)
    pass_fraction: float = Field(default=0.9, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_filter_model(self) -> "ConsistencyEvaluator":
        if self.filter_model is None:
            return self
        same = (
            self.filter_model.state_dim == self.model.state_dim
            and self.filter_model.measurement_dim == self.model.measurement_dim
        )
        if not same:
            raise ContractViolationError("`filter_model` dimensions differ from `model`.")
        return self

    def _run(self, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        process = simulate_process(self.model, self.initial, self.steps, seed)
        tracker = self.filter_model or self.model
        belief = self.initial
        nees_values = np.empty(self.steps)
        nis_values = np.empty(self.steps)
        for k in range(self.steps):
            prior = predict(belief, tracker)
            z = process.measurements[k]
            nu, S = innovation(prior, z, tracker)
            nis_values[k] = nis(nu, S)
            belief = update(prior, z, tracker)
            nees_values[k] = nees(process.states[k + 1] - belief.mean, belief.covariance)
        return nees_values, nis_values

    def evaluate(self, seed: int = 0) -> Dict:
        """
        Args:
            seed (int): Run `i` uses seed `seed + i`.

        Returns:
            Dict: ``nees_run_inside`` and ``nis_run_inside`` with the in-band step fraction of
            every run, ``nees_run_pass_fraction`` and ``nis_run_pass_fraction`` with the share
            of consistent runs, and ``passing``. Also ``nees`` and ``nis`` per-step ensemble
            averages with their ``nees_band`` and ``nis_band`` and the fractions of steps inside.
        """
        runs = [self._run(seed + i) for i in range(self.runs)]
        nees_runs = np.array([r[0] for r in runs])
        nis_runs = np.array([r[1] for r in runs])

        nees_run_inside = _inside(nees_runs, chi2_band(self.alpha, self.model.state_dim))
        nis_run_inside = _inside(nis_runs, chi2_band(self.alpha, self.model.measurement_dim))
        nees_run_pass = float(np.mean(nees_run_inside >= self.run_threshold))
        nis_run_pass = float(np.mean(nis_run_inside >= self.run_threshold))

        mean_nees = nees_runs.mean(axis=0)
        mean_nis = nis_runs.mean(axis=0)
        nees_band = chi2_band(self.alpha, self.model.state_dim, self.runs)
        nis_band = chi2_band(self.alpha, self.model.measurement_dim, self.runs)

        return {
            "nees": mean_nees,
            "nis": mean_nis,
            "nees_band": nees_band,
            "nis_band": nis_band,
            "nees_inside_fraction": float(_inside(mean_nees, nees_band)),
            "nis_inside_fraction": float(_inside(mean_nis, nis_band)),
            "nees_run_inside": nees_run_inside,
            "nis_run_inside": nis_run_inside,
            "nees_run_pass_fraction": nees_run_pass,
            "nis_run_pass_fraction": nis_run_pass,
            "passing": nees_run_pass >= self.pass_fraction,
        }


def _inside(values: np.ndarray, band: Tuple[float, float]) -> np.ndarray:
    """Fraction of entries along the last axis that lie inside `band`."""
    return np.mean((values >= band[0]) & (values <= band[1]), axis=-1)
