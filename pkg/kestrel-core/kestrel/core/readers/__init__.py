from kestrel.core.readers.base import BaseReader
from kestrel.core.readers.directory import DirectoryReader
from kestrel.core.readers.graymap import GraymapReader, encode_graymap, write_graymap
from kestrel.core.readers.scenario import (
    ScenarioBundle,
    ScenarioDocument,
    ScenarioReader,
    apply_overrides,
    build_bundle,
    parse_scenario_file,
    to_config_error,
)

__all__ = [
    "BaseReader",
    "DirectoryReader",
    "GraymapReader",
    "ScenarioBundle",
    "ScenarioDocument",
    "ScenarioReader",
    "apply_overrides",
    "build_bundle",
    "encode_graymap",
    "parse_scenario_file",
    "to_config_error",
    "write_graymap",
]
