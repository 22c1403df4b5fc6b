from logging import getLogger
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from kestrel.core.errors import ContractViolationError
from kestrel.core.estimation import (
    GaussianBelief,
    LinearGaussianModel,
    Measurement,
    log_innovation_likelihood,
    predict,
    update,
)
from kestrel.core.imm.types import (
    ImmBank,
    ImmStepReport,
    ImmStepResult,
    MixingResult,
    ModeProbabilities,
    TransitionMatrix,
)
from kestrel.core.motion_models import CANONICAL_LABELS
from kestrel.core.motion_models.base import check_time_step
from kestrel.core.utils.linalg import clamp_psd, symmetrize

logger = getLogger(__name__)

LIKELIHOOD_FLOOR = 1e-300
LOG_LIKELIHOOD_FLOOR = float(np.log(LIKELIHOOD_FLOOR))

Labels = Sequence[str]


def union_labels(labels: Sequence[Labels]) -> List[str]:
    """Smallest state layout holding every mode's components, in canonical order."""
    first = list(labels[0])
    if all(list(other) == first for other in labels[1:]):
        return first

    present = {label for mode_labels in labels for label in mode_labels}
    if not present.issubset(CANONICAL_LABELS):
        raise ContractViolationError(
            "modes with different state layouts must use the kinematic labels "
            f"{list(CANONICAL_LABELS)}, got {sorted(present)}.",
        )
    return [label for label in CANONICAL_LABELS if label in present]


def embed(
    belief: GaussianBelief,
    labels: Labels,
    target_labels: Labels,
    fill_mean: np.ndarray,
    fill_covariance: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Express `belief` in the layout `target_labels`.

    Components `belief` lacks take their mean from `fill_mean` and their covariance
    block from `fill_covariance`, uncorrelated with the rest.
    """
    if list(labels) == list(target_labels):
        return belief.mean, belief.covariance

    shared = [k for k, label in enumerate(target_labels) if label in labels]
    source = [list(labels).index(target_labels[k]) for k in shared]
    missing = [k for k, label in enumerate(target_labels) if label not in labels]

    mean = np.array(fill_mean, dtype=np.float64)
    covariance = np.zeros((len(target_labels), len(target_labels)))
    mean[shared] = belief.mean[source]
    covariance[np.ix_(shared, shared)] = belief.covariance[np.ix_(source, source)]
    covariance[np.ix_(missing, missing)] = fill_covariance[np.ix_(missing, missing)]
    return mean, covariance


def _mixture(
    means: Sequence[np.ndarray],
    covariances: Sequence[np.ndarray],
    weights: np.ndarray,
) -> GaussianBelief:
    mean = np.zeros_like(means[0])
    for w, x in zip(weights, means):
        mean = mean + w * x

    covariance = np.zeros_like(covariances[0])
    for w, x, P in zip(weights, means, covariances):
        d = x - mean
        covariance = covariance + w * (P + np.outer(d, d))

    return GaussianBelief(mean=mean, covariance=clamp_psd(symmetrize(covariance)))


def mix_beliefs(
    beliefs: Sequence[GaussianBelief],
    probabilities: ModeProbabilities,
    transition: TransitionMatrix,
    labels: Optional[Sequence[Labels]] = None,
) -> MixingResult:
    """
    Interaction step of the IMM cycle.

    c_j = Σᵢ πᵢⱼ μᵢ, ωᵢ|ⱼ = πᵢⱼ μᵢ / c_j. Each mode's mixed belief is the moment-matched
    mixture of every mode's belief expressed in that mode's layout. A mode whose c_j is
    zero keeps its own prior and is reported as degenerate.
    """
    m = len(beliefs)
    if labels is None:
        labels = [[f"s{i}" for i in range(b.dim)] for b in beliefs]
    if probabilities.size != m or transition.size != m:
        raise ContractViolationError(
            f"got {m} beliefs, {probabilities.size} probabilities and a {transition.size}-mode transition.",
        )

    mu = probabilities.probabilities
    pi = transition.matrix
    c = pi.T @ mu

    mixed: List[GaussianBelief] = []
    degenerate: List[int] = []
    for j in range(m):
        if c[j] <= 0.0:
            logger.warning(f"IMM mode {j} has zero predicted probability, keeping its prior.")
            degenerate.append(j)
            mixed.append(beliefs[j])
            continue

        weights = pi[:, j] * mu / c[j]
        embedded = [
            embed(beliefs[i], labels[i], labels[j], beliefs[j].mean, beliefs[j].covariance)
            for i in range(m)
        ]
        mixed.append(
            _mixture([e[0] for e in embedded], [e[1] for e in embedded], weights),
        )

    predicted = ModeProbabilities(probabilities=c / c.sum())
    return MixingResult(beliefs=mixed, predicted=predicted, degenerate_modes=degenerate)


def mix(bank: ImmBank) -> MixingResult:
    """Mix the bank's mode beliefs, see `mix_beliefs`."""
    return mix_beliefs(bank.beliefs, bank.probabilities, bank.transition, bank.labels)


def _filter_modes(
    mixed: Sequence[GaussianBelief],
    models: Sequence[LinearGaussianModel],
    z: Union[Measurement, np.ndarray],
) -> Tuple[List[GaussianBelief], List[float]]:
    if len(mixed) != len(models):
        raise ContractViolationError(f"got {len(mixed)} beliefs for {len(models)} models.")

    posteriors, log_likelihoods = [], []
    for belief, model in zip(mixed, models):
        prior = predict(belief, model)
        posteriors.append(update(prior, z, model))
        log_likelihoods.append(log_innovation_likelihood(prior, z, model))
    return posteriors, log_likelihoods


def filter_modes(
    mixed: Sequence[GaussianBelief],
    models: Sequence[LinearGaussianModel],
    z: Union[Measurement, np.ndarray],
) -> Tuple[List[GaussianBelief], List[float]]:
    """Run predict and update per mode, returning posteriors and innovation likelihoods."""
    posteriors, log_likelihoods = _filter_modes(mixed, models, z)
    return posteriors, [float(np.exp(v)) for v in log_likelihoods]


def update_mode_probabilities(
    predicted: ModeProbabilities,
    likelihoods: Sequence[float],
) -> Tuple[ModeProbabilities, bool]:
    """
    μⱼ ∝ Λⱼ cⱼ.

    Returns the updated probabilities and a degeneracy flag. When every likelihood is
    zero the predicted probabilities are returned unchanged with the flag set.
    """
    c = predicted.probabilities
    values = np.asarray(likelihoods, dtype=np.float64)
    if values.shape != c.shape:
        raise ContractViolationError(
            f"got {values.shape[0]} likelihoods for {c.shape[0]} modes.",
        )
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise ContractViolationError("likelihoods must be finite and non-negative.")

    if not np.any(values * c > 0.0):
        logger.warning("All IMM mode likelihoods vanished, keeping predicted probabilities.")
        return predicted, True

    weighted = np.maximum(values, LIKELIHOOD_FLOOR) * c
    return ModeProbabilities(probabilities=weighted / weighted.sum()), False


def _carried_fill(
    beliefs: Sequence[GaussianBelief],
    labels: Sequence[Labels],
    weights: np.ndarray,
    missing: Sequence[str],
) -> Tuple[np.ndarray, np.ndarray]:
    """Weighted mixture of the `missing` components over the modes that carry all of them."""
    carriers = [i for i, lab in enumerate(labels) if set(missing).issubset(lab)]
    if not carriers:
        raise ContractViolationError(f"no mode carries the components {list(missing)}.")

    w = weights[carriers]
    w = w / w.sum() if w.sum() > 0.0 else np.full(len(carriers), 1.0 / len(carriers))
    means, covariances = [], []
    for i in carriers:
        index = [list(labels[i]).index(label) for label in missing]
        means.append(beliefs[i].mean[index])
        covariances.append(beliefs[i].covariance[np.ix_(index, index)])
    block = _mixture(means, covariances, w)
    return block.mean, block.covariance


def combine(
    beliefs: Sequence[GaussianBelief],
    probabilities: ModeProbabilities,
    labels: Optional[Sequence[Labels]] = None,
) -> GaussianBelief:
    """
    Moment-matched output of the bank.

    mean = Σμⱼxⱼ, covariance = Σμⱼ(Pⱼ + (xⱼ − x̄)(xⱼ − x̄)ᵀ). Modes with different
    layouts are expressed in the union layout first; components a mode lacks are
    filled with the μ-weighted estimate of the modes that carry them.
    """
    if len(beliefs) != probabilities.size:
        raise ContractViolationError(
            f"got {len(beliefs)} beliefs for {probabilities.size} probabilities.",
        )
    if labels is None:
        dims = {b.dim for b in beliefs}
        if len(dims) != 1:
            raise ContractViolationError(f"beliefs have different dimensions {sorted(dims)}.")
        labels = [[f"s{i}" for i in range(beliefs[0].dim)]] * len(beliefs)

    mu = probabilities.probabilities
    target = union_labels(labels)
    n = len(target)

    means, covariances = [], []
    for belief, lab in zip(beliefs, labels):
        missing = [label for label in target if label not in lab]
        fill_mean = np.zeros(n)
        fill_covariance = np.zeros((n, n))
        if missing:
            index = [target.index(label) for label in missing]
            block_mean, block_covariance = _carried_fill(beliefs, labels, mu, missing)
            fill_mean[index] = block_mean
            fill_covariance[np.ix_(index, index)] = block_covariance
        mean, covariance = embed(belief, lab, target, fill_mean, fill_covariance)
        means.append(mean)
        covariances.append(covariance)

    return _mixture(means, covariances, mu)


def fused_labels(bank: ImmBank) -> List[str]:
    return union_labels(bank.labels)


def imm_step(
    bank: ImmBank,
    z: Union[Measurement, np.ndarray],
    dt: Optional[float] = None,
) -> ImmStepResult:
    """
    One full IMM cycle: mix, filter each mode, update mode probabilities, combine.

    Mode probabilities are updated from log-likelihoods relative to the largest one. When
    every log-likelihood is below the log of `LIKELIHOOD_FLOOR` the predicted probabilities
    c are kept and the report flags the underflow.

    Args:
        bank (ImmBank): Bank after the previous step.
        z (Measurement): Measurement at the end of the step.
        dt (float, optional): Step length used to rebuild spec-driven modes.

    Returns:
        ImmStepResult: The new bank, the fused belief and a step report.
    """
    if dt is not None:
        check_time_step(dt)

    mixing = mix(bank)
    models = [mode.model_for(dt) for mode in bank.modes]
    posteriors, log_likelihoods = _filter_modes(mixing.beliefs, models, z)

    log_l = np.asarray(log_likelihoods)
    likelihoods = np.exp(log_l)
    underflow = bool(np.all(log_l < LOG_LIKELIHOOD_FLOOR))
    if underflow:
        logger.warning("IMM likelihoods all below the floor, keeping predicted mode probabilities.")
        probabilities, degenerate = mixing.predicted, True
    else:
        # rescaling by the largest likelihood leaves the normalized result unchanged
        probabilities, degenerate = update_mode_probabilities(
            mixing.predicted,
            np.exp(log_l - log_l.max()),
        )

    new_bank = bank.replace(posteriors, probabilities)
    fused = combine(posteriors, probabilities, bank.labels)
    report = ImmStepReport(
        likelihoods=likelihoods.tolist(),
        log_likelihoods=log_l.tolist(),
        degenerate_modes=mixing.degenerate_modes,
        likelihood_underflow=underflow or degenerate,
    )
    return ImmStepResult(bank=new_bank, fused=fused, report=report)


def predict_bank(bank: ImmBank, dt: Optional[float] = None) -> ImmStepResult:
    """Mix and predict every mode without a measurement. Mode probabilities become c."""
    if dt is not None:
        check_time_step(dt)

    mixing = mix(bank)
    priors = [
        predict(belief, mode.model_for(dt)) for belief, mode in zip(mixing.beliefs, bank.modes)
    ]
    new_bank = bank.replace(priors, mixing.predicted)
    fused = combine(priors, mixing.predicted, bank.labels)
    return ImmStepResult(
        bank=new_bank,
        fused=fused,
        report=ImmStepReport(degenerate_modes=mixing.degenerate_modes),
    )
