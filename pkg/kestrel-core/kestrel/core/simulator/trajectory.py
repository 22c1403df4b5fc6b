from typing import List, Tuple

import numpy as np
from kestrel.core.errors import ConfigError
from kestrel.core.simulator.types import GroundTruthSample, Scenario, SegmentKind, SegmentSpec


def _turn_coefficients(omega: float, tau: float) -> Tuple[float, float]:
    """sin(ωτ)/ω and (1 − cos ωτ)/ω, with their ω → 0 limits."""
    if omega == 0.0:
        return tau, 0.0
    return np.sin(omega * tau) / omega, 2.0 * np.sin(0.5 * omega * tau) ** 2 / omega


def _advance(
    segment: SegmentSpec,
    position: np.ndarray,
    speed: float,
    heading: float,
    tau: float,
) -> Tuple[np.ndarray, float, float]:
    """State `tau` seconds into `segment`, given the state at its start."""
    direction = np.array([np.cos(heading), np.sin(heading)])

    if segment.kind == SegmentKind.CRUISE:
        return position + speed * tau * direction, speed, heading

    if segment.kind == SegmentKind.TURN:
        omega = segment.turn_rate
        a, b = _turn_coefficients(omega, tau)
        velocity = speed * direction
        normal = np.array([-velocity[1], velocity[0]])
        return position + a * velocity + b * normal, speed, heading + omega * tau

    accel = segment.accel
    distance = speed * tau + 0.5 * accel * tau**2
    return position + distance * direction, speed + accel * tau, heading


def segment_start_states(scenario: Scenario) -> List[Tuple[float, np.ndarray, float, float]]:
    """(start time, position, speed, heading) at the beginning of every segment."""
    position = np.array(scenario.initial_position, dtype=np.float64)
    speed = scenario.initial_speed
    heading = scenario.initial_heading
    start = 0.0

    states = []
    for index, segment in enumerate(scenario.segments):
        states.append((start, position, speed, heading))
        if segment.kind == SegmentKind.ACCELERATE and speed + segment.accel * segment.duration < 0.0:
            raise ConfigError(
                f"segments[{index}].accel",
                f"speed would become negative ({speed + segment.accel * segment.duration:.3f} m/s).",
            )
        position, speed, heading = _advance(segment, position, speed, heading, segment.duration)
        start += segment.duration
    return states


def simulate_trajectory(scenario: Scenario) -> List[GroundTruthSample]:
    """
    Sample the piecewise trajectory every `dt` seconds.

    Each sample is evaluated in closed form from the start of its segment, so
    position and velocity are continuous across joins and no integration error builds up.
    """
    starts = segment_start_states(scenario)
    start_times = np.array([s[0] for s in starts])

    samples = []
    for k in range(scenario.sample_count):
        t = k * scenario.dt
        index = int(np.searchsorted(start_times, t, side="right")) - 1
        start, position, speed, heading = starts[index]
        segment = scenario.segments[index]
        tau = min(t - start, segment.duration)
        p, s, h = _advance(segment, position, speed, heading, tau)
        samples.append(
            GroundTruthSample(t=t, position=p, velocity=s * np.array([np.cos(h), np.sin(h)])),
        )
    return samples
