import json

import numpy as np
import pytest
from kestrel.core.detectors import GrayImage
from kestrel.core.errors import ConfigError, ContractViolationError
from kestrel.core.readers import (
    DirectoryReader,
    GraymapReader,
    apply_overrides,
    build_bundle,
    encode_graymap,
    parse_scenario_file,
    write_graymap,
)
from kestrel.core.simulator import PRESETS

MINIMAL = {"scenario": {"dt": 0.1}, "segments": [{"kind": "cruise", "duration": 1.0}]}


@pytest.fixture
def scenario_file(tmp_path):
    def write(document) -> str:
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write


class TestScenarioReader:
    def test_preset_loads_without_file(self):
        bundle = parse_scenario_file("moving-platform-turn")
        assert bundle.scenario.name == "moving-platform-turn"
        assert bundle.scenario.dt == 0.05
        assert [s.kind for s in bundle.scenario.segments] == ["cruise", "turn", "accelerate"]

    def test_defaults_filled(self, scenario_file):
        bundle = parse_scenario_file(scenario_file(MINIMAL))
        assert bundle.scenario.name == "scenario"
        assert bundle.scenario.seed == 0
        assert bundle.tracker.gate_threshold == 9.21
        assert bundle.tracker.max_misses == 5
        assert bundle.detector.sigma_max == 32.0

    def test_missing_dt(self, scenario_file):
        with pytest.raises(ConfigError) as exc_info:
            parse_scenario_file(scenario_file({"scenario": {}, "segments": MINIMAL["segments"]}))
        assert exc_info.value.key == "scenario.dt"

    def test_unknown_key_is_named(self, scenario_file):
        document = {**MINIMAL, "sensor": {"position_noise_std": 0.1, "colour": "red"}}
        with pytest.raises(ConfigError) as exc_info:
            parse_scenario_file(scenario_file(document))
        assert exc_info.value.key == "sensor.colour"

    def test_segment_error_has_index(self, scenario_file):
        document = {**MINIMAL, "segments": [{"kind": "cruise", "duration": 1.0}, {"kind": "turn", "duration": -1.0}]}
        with pytest.raises(ConfigError) as exc_info:
            parse_scenario_file(scenario_file(document))
        assert exc_info.value.key.startswith("segments[1]")

    def test_override_wins(self, scenario_file):
        document = {**MINIMAL, "sensor": {"position_noise_std": 0.02}}
        bundle = parse_scenario_file(scenario_file(document), overrides=["sensor.position_noise_std=0.05"])
        assert bundle.scenario.sensor.position_noise_std == 0.05

    def test_seed_override(self):
        assert parse_scenario_file("moving-pillar", seed=17).scenario.seed == 17

    def test_presets_are_not_mutated(self):
        parse_scenario_file("moving-pillar", overrides=["scenario.dt=0.1"])
        assert PRESETS["moving-pillar"]["scenario"]["dt"] == 0.05

    def test_tracker_noise_follows_sensor(self, scenario_file):
        document = {**MINIMAL, "sensor": {"position_noise_std": 0.07}}
        assert parse_scenario_file(scenario_file(document)).tracker.measurement_std == 0.07
        document["tracker"] = {"measurement_std": 0.01}
        assert parse_scenario_file(scenario_file(document)).tracker.measurement_std == 0.01

    def test_imm_section(self, scenario_file):
        document = {**MINIMAL, "imm": {"modes": [{"kind": "cv"}, {"kind": "ct", "omega": 0.3}], "pi": [[0.9, 0.1], [0.2, 0.8]]}}
        imm = parse_scenario_file(scenario_file(document)).tracker.imm
        assert len(imm.mode_configs()) == 2
        np.testing.assert_allclose(imm.transition_matrix().matrix, [[0.9, 0.1], [0.2, 0.8]])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_scenario_file(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_scenario_file(path)

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin.json"
        path.write_bytes(b"\xff\xfe\x00bad")
        with pytest.raises(ConfigError, match="not valid UTF-8"):
            parse_scenario_file(path)

    def test_build_bundle_checks_speed(self):
        document = {**MINIMAL, "segments": [{"kind": "accelerate", "duration": 2.0, "accel": -1.0}]}
        with pytest.raises(ConfigError) as exc_info:
            build_bundle(document)
        assert exc_info.value.key == "segments[0].accel"


class TestApplyOverrides:
    def test_nested_and_coerced(self):
        document = apply_overrides(MINIMAL, ["scenario.seed=5", "scenario.name=walk", "detector.normalize=false"])
        assert document["scenario"] == {"dt": 0.1, "seed": 5, "name": "walk"}
        assert document["detector"] == {"normalize": False}
        assert "seed" not in MINIMAL["scenario"]

    def test_list_index(self):
        document = apply_overrides(MINIMAL, ["segments.0.duration=2.5"])
        assert document["segments"][0]["duration"] == 2.5

    @pytest.mark.parametrize("override", ["novalue", "=3", "segments.4.duration=1", "scenario.dt.x=1"])
    def test_rejected(self, override):
        with pytest.raises(ConfigError):
            apply_overrides(MINIMAL, [override])


class TestGraymap:
    def test_roundtrip_8bit(self, tmp_path):
        image = GrayImage(pixels=np.arange(12, dtype=np.float64).reshape(3, 4) / 11.0)
        write_graymap(tmp_path / "a.pgm", image)
        loaded = GraymapReader().load_data(tmp_path / "a.pgm")
        assert (loaded.height, loaded.width) == (3, 4)
        np.testing.assert_allclose(loaded.pixels, image.pixels, atol=0.51 / 255)

    def test_16bit_is_big_endian(self, tmp_path):
        image = GrayImage(pixels=[[0.0, 1.0]])
        data = encode_graymap(image, maxval=65535)
        assert data.startswith(b"P5\n2 1\n65535\n")
        assert data.endswith(b"\x00\x00\xff\xff")
        (tmp_path / "b.pgm").write_bytes(data)
        np.testing.assert_allclose(GraymapReader().load_data(tmp_path / "b.pgm").pixels, [[0.0, 1.0]])

    def test_header_comments(self, tmp_path):
        (tmp_path / "c.pgm").write_bytes(b"P5\n# made by hand\n2 1\n255\n\x00\xff")
        np.testing.assert_allclose(GraymapReader().load_data(tmp_path / "c.pgm").pixels, [[0.0, 1.0]])

    def test_not_a_graymap(self, tmp_path):
        (tmp_path / "d.pgm").write_bytes(b"P2\n1 1\n255\n0")
        with pytest.raises(ContractViolationError, match="P5"):
            GraymapReader().load_data(tmp_path / "d.pgm")

    def test_unsupported_maxval(self, tmp_path):
        (tmp_path / "f.pgm").write_bytes(b"P5\n1 1\n0\n\x00")
        with pytest.raises(ContractViolationError, match="maxval"):
            GraymapReader().load_data(tmp_path / "f.pgm")

    def test_truncated(self, tmp_path):
        (tmp_path / "e.pgm").write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(ContractViolationError, match="truncated"):
            GraymapReader().load_data(tmp_path / "e.pgm")


class TestDirectoryReader:
    def test_sorted_frames(self, tmp_path):
        for index, value in [(2, 0.2), (0, 0.0), (1, 0.6)]:
            write_graymap(tmp_path / f"frame_{index:05d}.pgm", GrayImage(pixels=np.full((2, 2), value)))
        (tmp_path / "notes.txt").write_text("ignored")
        frames = DirectoryReader().load_data(str(tmp_path))
        assert [round(f.pixels[0, 0], 2) for f in frames] == [0.0, 0.6, 0.2]

    def test_recursive(self, tmp_path):
        (tmp_path / "nested").mkdir()
        write_graymap(tmp_path / "nested" / "a.pgm", GrayImage(pixels=np.zeros((2, 2))))
        assert DirectoryReader().load_data(str(tmp_path)) == []
        assert len(DirectoryReader(recursive=True).load_data(str(tmp_path))) == 1

    def test_not_a_directory(self, tmp_path):
        with pytest.raises(ValueError):
            DirectoryReader().load_data(str(tmp_path / "missing"))
