from kestrel.core.simulator.corpora import (
    CORPUS_NAMES,
    CorpusFrame,
    CorpusSequence,
    build_corpus,
    corpus_camera,
)
from kestrel.core.simulator.presets import PRESETS, preset_names
from kestrel.core.simulator.process import ProcessRun, simulate_process
from kestrel.core.simulator.render import synthesize_frame, target_pixel
from kestrel.core.simulator.sensor import measurement_errors, sense, simulate_measurements
from kestrel.core.simulator.trajectory import segment_start_states, simulate_trajectory
from kestrel.core.simulator.types import (
    Appearance,
    GroundTruthSample,
    RngState,
    Scenario,
    SegmentKind,
    SegmentSpec,
    SensorModel,
)

__all__ = [
    "CORPUS_NAMES",
    "PRESETS",
    "Appearance",
    "CorpusFrame",
    "CorpusSequence",
    "GroundTruthSample",
    "ProcessRun",
    "RngState",
    "Scenario",
    "SegmentKind",
    "SegmentSpec",
    "SensorModel",
    "build_corpus",
    "corpus_camera",
    "measurement_errors",
    "preset_names",
    "segment_start_states",
    "sense",
    "simulate_measurements",
    "simulate_process",
    "simulate_trajectory",
    "synthesize_frame",
    "target_pixel",
]
