import math
from typing import Any, Dict, List

# Scenario documents in the scenario-file schema.
PRESETS: Dict[str, Dict[str, Any]] = {
    "moving-platform-turn": {
        "scenario": {
            "dt": 0.05,
            "seed": 0,
            "initial_position": [0.0, 0.0],
            "initial_speed": 1.0,
            "initial_heading": 0.0,
        },
        "segments": [
            {"kind": "cruise", "duration": 4.0},
            {"kind": "turn", "duration": math.pi, "turn_rate": 0.5},
            {"kind": "accelerate", "duration": 3.0, "accel": 1.0},
        ],
        "sensor": {"position_noise_std": 0.02, "dropout_prob": 0.0},
        "camera": {
            "intrinsics": {"fx": 500.0, "fy": 500.0, "cx": 320.0, "cy": 240.0, "width": 640, "height": 480},
            "pose": {"position": [3.0, 4.75, 12.0]},
        },
    },
    "moving-pillar": {
        "scenario": {
            "dt": 0.05,
            "seed": 0,
            "initial_position": [0.0, 0.0],
            "initial_speed": 0.5,
            "initial_heading": 0.0,
        },
        "segments": [
            {"kind": "cruise", "duration": 3.0},
            {"kind": "turn", "duration": 3.0, "turn_rate": -0.4},
            {"kind": "accelerate", "duration": 2.0, "accel": 0.3},
            {"kind": "cruise", "duration": 2.0},
        ],
        "sensor": {"position_noise_std": 0.02, "dropout_prob": 0.05},
        "camera": {
            "intrinsics": {"fx": 500.0, "fy": 500.0, "cx": 320.0, "cy": 240.0, "width": 640, "height": 480},
            "pose": {"position": [2.0, -2.2, 10.0]},
        },
    },
}


def preset_names() -> List[str]:
    return sorted(PRESETS)
