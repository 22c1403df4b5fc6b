import copy
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from kestrel.core.detectors import DetectorConfig
from kestrel.core.errors import ConfigError
from kestrel.core.geometry import CameraIntrinsics, CameraRig, RigidPose
from kestrel.core.imm import ImmConfig
from kestrel.core.readers.base import BaseReader
from kestrel.core.simulator import (
    PRESETS,
    Appearance,
    Scenario,
    SegmentSpec,
    SensorModel,
    segment_start_states,
)
from kestrel.core.simulator.types import SEED_MAX
from kestrel.core.tracking import TrackerConfig
from pydantic import BaseModel, ConfigDict, Field, ValidationError


class ScenarioSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dt: float = Field(gt=0.0)
    seed: int = Field(default=0, ge=0, le=SEED_MAX)
    name: Optional[str] = None
    initial_position: Tuple[float, float] = (0.0, 0.0)
    initial_speed: float = Field(default=1.0, ge=0.0)
    initial_heading: float = 0.0
    target_height: float = 0.0


class PoseSection(BaseModel):
    """Camera position in world meters; looking straight down unless `euler_deg` is given."""

    model_config = ConfigDict(extra="forbid")

    position: Tuple[float, float, float] = (0.0, 0.0, 10.0)
    euler_deg: Optional[Tuple[float, float, float]] = None
    seq: str = "xyz"

    def to_pose(self) -> RigidPose:
        if self.euler_deg is None:
            return RigidPose.looking_down(self.position)
        return RigidPose.from_euler(self.euler_deg, self.position, seq=self.seq, degrees=True)


class CameraSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    intrinsics: CameraIntrinsics = Field(
        default_factory=lambda: CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0),
    )
    pose: PoseSection = Field(default_factory=PoseSection)


class ScenarioDocument(BaseModel):
    """Schema of a scenario file."""

    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioSection
    segments: List[SegmentSpec] = Field(min_length=1)
    sensor: SensorModel = Field(default_factory=SensorModel)
    camera: CameraSection = Field(default_factory=CameraSection)
    appearance: Appearance = Field(default_factory=Appearance)
    imm: Optional[ImmConfig] = None
    detector: DetectorConfig = Field(default_factory=DetectorConfig)
    tracker: TrackerConfig = Field(default_factory=TrackerConfig)


class ScenarioBundle(BaseModel):
    """A validated scenario with its tracker and detector settings."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    scenario: Scenario
    tracker: TrackerConfig
    detector: DetectorConfig
    document: Dict[str, Any]


def _key_path(loc: Sequence[Union[str, int]]) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path


def to_config_error(error: ValidationError, prefix: str = "") -> ConfigError:
    """`ConfigError` naming the dotted key path of the first violation in `error`."""
    first = error.errors()[0]
    key = _key_path([*prefix.split("."), *first["loc"]] if prefix else first["loc"])
    return ConfigError(key, first["msg"])


def _coerce(value: str) -> Any:
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def apply_overrides(document: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """
    Apply ``key.path=value`` overrides to a raw document.

    Values are parsed as JSON when possible, otherwise kept as strings. Numeric path
    parts index into lists, e.g. ``segments.1.duration=2``.
    """
    document = copy.deepcopy(document)
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep or not key:
            raise ConfigError(override, "overrides must look like `key.path=value`.")

        parts = key.split(".")
        node: Any = document
        for i, part in enumerate(parts[:-1]):
            if isinstance(node, list):
                if not part.isdigit() or int(part) >= len(node):
                    raise ConfigError(".".join(parts[: i + 1]), "list index out of range.")
                node = node[int(part)]
            else:
                node = node.setdefault(part, {})
            if not isinstance(node, (dict, list)):
                raise ConfigError(".".join(parts[: i + 1]), "cannot override inside a scalar value.")

        last = parts[-1]
        if isinstance(node, list):
            if not last.isdigit() or int(last) >= len(node):
                raise ConfigError(key, "list index out of range.")
            node[int(last)] = _coerce(raw)
        else:
            node[last] = _coerce(raw)
    return document


def build_bundle(document: Dict[str, Any], name: str = "custom") -> ScenarioBundle:
    """
    Validate a raw scenario document.

    Raises:
        ConfigError: Naming the dotted key path of the first schema violation.
    """
    try:
        parsed = ScenarioDocument.model_validate(document)
    except ValidationError as e:
        raise to_config_error(e) from e

    section = parsed.scenario
    scenario = Scenario(
        name=section.name or name,
        dt=section.dt,
        seed=section.seed,
        initial_position=section.initial_position,
        initial_speed=section.initial_speed,
        initial_heading=section.initial_heading,
        segments=parsed.segments,
        sensor=parsed.sensor,
        camera=CameraRig(intrinsics=parsed.camera.intrinsics, pose=parsed.camera.pose.to_pose()),
        appearance=parsed.appearance,
        target_height=section.target_height,
    )
    segment_start_states(scenario)

    tracker = parsed.tracker
    updates: Dict[str, Any] = {}
    if parsed.imm is not None:
        updates["imm"] = parsed.imm
    if "measurement_std" not in tracker.model_fields_set and parsed.sensor.position_noise_std > 0.0:
        updates["measurement_std"] = parsed.sensor.position_noise_std
    if updates:
        tracker = tracker.model_copy(update=updates)

    return ScenarioBundle(scenario=scenario, tracker=tracker, detector=parsed.detector, document=document)


class ScenarioReader(BaseReader):
    """
    Scenario file reader.

    Loads a JSON scenario document, or a built-in preset by name, applies
    ``key=value`` overrides and validates the result.

    Example:
        .. code-block:: python

            from kestrel.core.readers import ScenarioReader

            bundle = ScenarioReader().load_data(
                "moving-platform-turn",
                overrides=["sensor.position_noise_std=0.05"],
            )
    """

    @classmethod
    def class_name(cls) -> str:
        return "ScenarioReader"

    def load_document(self, source: Union[str, Path]) -> Tuple[Dict[str, Any], str]:
        if str(source) in PRESETS:
            return copy.deepcopy(PRESETS[str(source)]), str(source)

        path = Path(source)
        if not path.is_file():
            raise FileNotFoundError(f"Scenario file `{source}` not found.")
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except UnicodeDecodeError as e:
            raise ConfigError("", f"`{source}` is not valid UTF-8: {e.reason} at byte {e.start}.") from e
        except json.JSONDecodeError as e:
            raise ConfigError("", f"`{source}` is not valid JSON: {e}") from e
        if not isinstance(document, dict):
            raise ConfigError("", f"`{source}` must contain a JSON object.")
        return document, path.stem

    def load_data(
        self,
        source: Union[str, Path],
        overrides: Sequence[str] = (),
        seed: Optional[int] = None,
    ) -> ScenarioBundle:
        document, name = self.load_document(source)
        document = apply_overrides(document, overrides)
        if seed is not None:
            document.setdefault("scenario", {})["seed"] = seed
        return build_bundle(document, name)


def parse_scenario_file(
    source: Union[str, Path],
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
) -> ScenarioBundle:
    """Scenario, tracker and detector settings from a file path or preset name."""
    return ScenarioReader().load_data(source, overrides, seed)
