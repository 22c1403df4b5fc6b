from typing import Iterator, List

import numpy as np
from kestrel.core.detectors import GrayImage
from kestrel.core.errors import ConfigError
from kestrel.core.geometry import CameraIntrinsics, CameraRig, RigidPose
from kestrel.core.simulator.render import synthesize_frame, target_pixel
from kestrel.core.simulator.trajectory import simulate_trajectory
from kestrel.core.simulator.types import (
    Appearance,
    GroundTruthSample,
    RngState,
    Scenario,
    SegmentKind,
    SegmentSpec,
)
from pydantic import BaseModel, ConfigDict, Field

CORPUS_NAMES = ("rotation", "low-light")
SEQUENCE_COUNT = 7
FRAME_COUNT = 100
FRAME_DT = 0.05
ROTATION_RATE_DEG = 30.0
LOW_LIGHT_GAINS = np.linspace(0.1, 0.3, SEQUENCE_COUNT)


def corpus_camera() -> CameraRig:
    return CameraRig(
        intrinsics=CameraIntrinsics(fx=180.0, fy=180.0, cx=96.0, cy=72.0, width=192, height=144),
        pose=RigidPose.looking_down((0.0, 0.0, 3.0)),
    )


class CorpusFrame(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    index: int
    image: GrayImage
    truth: GroundTruthSample
    pixel: np.ndarray
    depth: float


class CorpusSequence(BaseModel):
    """
    One synthetic sequence. Frames are rendered lazily, in order, and are
    identical on every iteration.
    """

    model_config = ConfigDict(frozen=True)

    corpus: str
    index: int
    seed: int
    scenario: Scenario
    appearance: Appearance
    rotation_rate_deg: float = 0.0
    frame_count: int = Field(default=FRAME_COUNT, ge=1)

    @property
    def name(self) -> str:
        return f"{self.corpus}-{self.index}"

    def frames(self) -> Iterator[CorpusFrame]:
        camera = self.scenario.camera
        truth = simulate_trajectory(self.scenario)[: self.frame_count]
        for k, sample in enumerate(truth):
            appearance = self.appearance.model_copy(
                update={"rotation_deg": self.appearance.rotation_deg + self.rotation_rate_deg * sample.t},
            )
            image = synthesize_frame(
                sample,
                camera,
                appearance,
                rng_state=RngState(seed=self.seed, counter=k),
            )
            pixel, depth = target_pixel(sample, camera)
            yield CorpusFrame(index=k, image=image, truth=sample, pixel=pixel, depth=depth)


def _sequence_scenario(rng: np.random.Generator, seed: int) -> Scenario:
    start = rng.uniform(-0.3, 0.3, size=2)
    heading = float(rng.uniform(0.0, 2.0 * np.pi))
    return Scenario(
        name="corpus",
        dt=FRAME_DT,
        seed=seed,
        initial_position=(float(start[0]), float(start[1])),
        initial_speed=0.1,
        initial_heading=heading,
        segments=[SegmentSpec(kind=SegmentKind.CRUISE, duration=FRAME_DT * (FRAME_COUNT - 1))],
        camera=corpus_camera(),
    )


def build_corpus(name: str, seed: int = 0) -> List[CorpusSequence]:
    """
    Seven seeded sequences of a named corpus.

    `rotation` renders a square patch spinning at 30°/s. `low-light` renders a Gaussian
    blob at gains from 0.1 to 0.3 with faint pixel noise.
    """
    if name not in CORPUS_NAMES:
        raise ConfigError("corpus", f"unknown corpus `{name}`, expected one of {list(CORPUS_NAMES)}.")

    sequences = []
    for index in range(SEQUENCE_COUNT):
        sequence_seed = seed + index
        rng = np.random.default_rng([sequence_seed, 7919])
        scenario = _sequence_scenario(rng, sequence_seed)
        sigma = float(rng.uniform(4.0, 6.0))
        if name == "rotation":
            appearance = Appearance(
                shape="square",
                blob_sigma_px=sigma,
                rotation_deg=float(rng.uniform(0.0, 90.0)),
                noise_std=0.01,
            )
            rate = ROTATION_RATE_DEG
        else:
            appearance = Appearance(
                shape="gaussian",
                blob_sigma_px=sigma,
                gain=float(LOW_LIGHT_GAINS[index]),
                noise_std=0.005,
            )
            rate = 0.0
        sequences.append(
            CorpusSequence(
                corpus=name,
                index=index,
                seed=sequence_seed,
                scenario=scenario,
                appearance=appearance,
                rotation_rate_deg=rate,
            ),
        )
    return sequences
