from typing import List, Optional, Tuple

import numpy as np
from kestrel.core.estimation import Measurement
from kestrel.core.simulator.types import GroundTruthSample, RngState, Scenario, SensorModel


def sense(
    truth: GroundTruthSample,
    sensor: SensorModel,
    rng_state: RngState,
) -> Tuple[Optional[Measurement], RngState]:
    """
    Noisy position measurement of `truth`, or None when the detection drops out.

    Every call draws the dropout uniform first and then the two noise normals,
    whether or not the sample is dropped.
    """
    rng = rng_state.generator()
    dropped = rng.random() < sensor.dropout_prob
    noise = rng.normal(0.0, sensor.position_noise_std, size=2)
    if dropped:
        return None, rng_state.advance()
    return Measurement(z=truth.position + noise, timestamp=truth.t), rng_state.advance()


def simulate_measurements(
    scenario: Scenario,
    truth: List[GroundTruthSample],
) -> List[Optional[Measurement]]:
    state = RngState(seed=scenario.seed)
    measurements = []
    for sample in truth:
        measurement, state = sense(sample, scenario.sensor, state)
        measurements.append(measurement)
    return measurements


def measurement_errors(
    truth: List[GroundTruthSample],
    measurements: List[Optional[Measurement]],
) -> np.ndarray:
    """Measurement minus true position for every sample that was not dropped."""
    pairs = [(m.z - s.position) for s, m in zip(truth, measurements) if m is not None]
    return np.array(pairs).reshape(-1, 2)
