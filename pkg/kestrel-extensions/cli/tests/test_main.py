import csv
import json
from hashlib import sha256

import pytest
from kestrel.cli.main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, build_parser, main


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestParser:
    def test_defaults(self):
        args = build_parser().parse_args(["track", "--scenario", "moving-pillar", "--out", "out"])
        assert args.filters == "kf,imm"
        assert args.source == "measurements"
        assert args.set == []
        assert args.seed is None

    def test_repeatable_set(self):
        args = build_parser().parse_args(
            ["simulate", "--scenario", "x", "--out", "o", "--set", "a=1", "--set", "b=2"],
        )
        assert args.set == ["a=1", "b=2"]

    @pytest.mark.parametrize(
        "argv",
        [
            ["simulate", "--out", "o"],
            ["detect", "--corpus", "fog", "--out", "o"],
            ["track", "--scenario", "x", "--out", "o", "--seed", "-1"],
            ["bench", "--scenario", "x", "--out", "o", "--runs", "0"],
            ["fly", "--out", "o"],
        ],
    )
    def test_usage_errors_exit_2(self, argv):
        with pytest.raises(SystemExit) as exc_info:
            main(argv)
        assert exc_info.value.code == 2


class TestSimulate:
    def test_row_count(self, tmp_path):
        assert main(["simulate", "--scenario", "moving-pillar", "--out", str(tmp_path)]) == EXIT_OK
        truth = read_csv(tmp_path / "truth.csv")
        # 10 s at 20 Hz
        assert len(truth) == 201
        assert list(truth[0]) == ["t", "x", "y", "vx", "vy"]
        assert len(read_csv(tmp_path / "measurements.csv")) == 201

    def test_manifest(self, tmp_path):
        main(["simulate", "--scenario", "moving-pillar", "--seed", "7", "--out", str(tmp_path)])
        manifest = read_json(tmp_path / "run_manifest.json")
        assert manifest["command"] == "simulate"
        assert manifest["seed"] == 7
        assert manifest["scenario"] == "moving-pillar"
        assert len(manifest["config_hash"]) == 64
        assert "numpy" in manifest["versions"]
        for name in ("truth.csv", "measurements.csv"):
            assert manifest["artifacts"][name] == sha256((tmp_path / name).read_bytes()).hexdigest()

    def test_override_wins(self, tmp_path):
        argv = ["simulate", "--scenario", "moving-pillar", "--set", "sensor.position_noise_std=0", "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        truth = read_csv(tmp_path / "truth.csv")
        for sample, measurement in zip(truth, read_csv(tmp_path / "measurements.csv")):
            if measurement["detected"] == "1":
                assert (measurement["x"], measurement["y"]) == (sample["x"], sample["y"])

    def test_frames(self, tmp_path):
        argv = ["simulate", "--scenario", "moving-pillar", "--set", "segments=[{\"kind\":\"cruise\",\"duration\":0.2}]"]
        assert main([*argv, "--frames", "--out", str(tmp_path)]) == EXIT_OK
        frames = sorted(p.name for p in (tmp_path / "frames").iterdir())
        assert frames == [f"frame_{k:05d}.pgm" for k in range(5)]
        assert (tmp_path / "frames" / "frame_00000.pgm").read_bytes().startswith(b"P5\n640 480\n255\n")

    def test_reruns_are_byte_identical(self, tmp_path):
        for name in ("a", "b"):
            main(["simulate", "--scenario", "moving-pillar", "--seed", "3", "--out", str(tmp_path / name)])
        for artifact in ("truth.csv", "measurements.csv"):
            assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()


class TestErrors:
    def test_missing_scenario_file(self, tmp_path, capsys):
        code = main(["simulate", "--scenario", str(tmp_path / "none.json"), "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        err = capsys.readouterr().err
        assert err.count("\n") == 1
        assert "none.json" in err
        assert not (tmp_path / "out").exists()

    def test_scenario_file_not_utf8(self, tmp_path, capsys):
        scenario = tmp_path / "latin.json"
        scenario.write_bytes(b"\xff\xfe\x00bad")
        code = main(["simulate", "--scenario", str(scenario), "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        err = capsys.readouterr().err
        assert err.count("\n") == 1
        assert "UTF-8" in err

    def test_output_path_is_a_file(self, tmp_path, capsys):
        out = tmp_path / "taken"
        out.write_text("")
        code = main(["simulate", "--scenario", "moving-pillar", "--out", str(out)])
        assert code == EXIT_CONFIG
        assert "kestrel: I/O error:" in capsys.readouterr().err

    def test_schema_violation_names_key(self, tmp_path, capsys):
        code = main(["track", "--scenario", "moving-pillar", "--set", "scenario.dt=-1", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "scenario.dt" in capsys.readouterr().err

    def test_unknown_filter(self, tmp_path, capsys):
        code = main(["track", "--scenario", "moving-pillar", "--filters", "kf,ukf", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "--filters" in capsys.readouterr().err

    def test_detect_rejects_scenario_keys_without_scenario(self, tmp_path):
        code = main(["detect", "--corpus", "rotation", "--set", "sensor.dropout_prob=0.5", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_runtime_error_leaves_no_artifacts(self, tmp_path, capsys):
        # camera below the ground plane: the target is behind it
        argv = ["simulate", "--scenario", "moving-pillar", "--set", "camera.pose.position=[0,0,-5]", "--frames"]
        code = main([*argv, "--out", str(tmp_path)])
        assert code == EXIT_RUNTIME
        assert "BehindCameraError" in capsys.readouterr().err
        assert list(tmp_path.iterdir()) == []


class TestTrack:
    def test_imm_beats_kf(self, tmp_path):
        argv = ["track", "--scenario", "moving-platform-turn", "--filters", "kf,imm", "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        metrics = read_json(tmp_path / "metrics.json")
        assert metrics["filters"]["imm"]["max_error_cm"] < metrics["filters"]["kf"]["max_error_cm"]
        assert metrics["max_error_reduction_cm"] > 0.0
        assert "wall_times_s" not in metrics

    def test_trajectory_files(self, tmp_path):
        main(["track", "--scenario", "moving-pillar", "--out", str(tmp_path)])
        kf_rows = read_csv(tmp_path / "trajectory_kf.csv")
        imm_rows = read_csv(tmp_path / "trajectory_imm.csv")
        assert list(kf_rows[0])[:7] == ["t", "x_est", "y_est", "vx_est", "vy_est", "x_true", "y_true"]
        assert [c for c in imm_rows[0] if c.startswith("mu_")]
        svg = (tmp_path / "trajectory.svg").read_text(encoding="utf-8")
        assert svg.startswith("<svg") and svg.count("<polyline") == 3

    def test_manifest_reports_throughput(self, tmp_path):
        main(["track", "--scenario", "moving-pillar", "--filters", "imm", "--out", str(tmp_path)])
        manifest = read_json(tmp_path / "run_manifest.json")
        assert manifest["throughput"]["mean_step_ms"]["imm"] > 0.0
        assert "track_imm" in manifest["wall_times_s"]

    def test_reruns_are_byte_identical(self, tmp_path):
        for name in ("a", "b"):
            main(["track", "--scenario", "moving-pillar", "--seed", "5", "--out", str(tmp_path / name)])
        for artifact in ("metrics.json", "trajectory_kf.csv", "trajectory_imm.csv", "trajectory.svg"):
            assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()

    @pytest.mark.slow
    def test_frames_source(self, tmp_path):
        argv = ["track", "--scenario", "moving-pillar", "--source", "frames", "--filters", "imm", "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        throughput = read_json(tmp_path / "run_manifest.json")["throughput"]
        assert throughput["frames"] == 201
        assert throughput["target_ms"] == 22.0
        assert isinstance(throughput["meets_target"], bool)


class TestBench:
    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            main(["bench", "--scenario", "moving-pillar", "--runs", "3", "--seed", "11", "--out", str(tmp_path / name)])
        assert (tmp_path / "a" / "metrics.json").read_bytes() == (tmp_path / "b" / "metrics.json").read_bytes()
        metrics = read_json(tmp_path / "a" / "metrics.json")
        assert [run["seed"] for run in metrics["per_run"]] == [11, 12, 13]
        assert 0 <= metrics["summary"]["imm_wins"] <= 3
        assert len(read_csv(tmp_path / "a" / "runs.csv")) == 3

    def test_workers_do_not_change_results(self, tmp_path):
        base = ["bench", "--scenario", "moving-pillar", "--runs", "4", "--filters", "imm"]
        main([*base, "--workers", "1", "--out", str(tmp_path / "serial")])
        main([*base, "--workers", "2", "--out", str(tmp_path / "pool")])
        serial = read_json(tmp_path / "serial" / "metrics.json")
        pool = read_json(tmp_path / "pool" / "metrics.json")
        assert serial == pool

    def test_invalid_segment_override(self, tmp_path):
        argv = ["bench", "--scenario", "moving-pillar", "--runs", "2", "--workers", "2", "--filters", "kf"]
        assert main([*argv, "--set", "segments.0.accel=1", "--out", str(tmp_path)]) == EXIT_CONFIG


@pytest.mark.slow
def test_detect_low_light(tmp_path):
    assert main(["detect", "--corpus", "low-light", "--out", str(tmp_path)]) == EXIT_OK
    metrics = read_json(tmp_path / "metrics.json")
    assert (metrics["success"], metrics["failure"]) == (7, 0)
    lines = (tmp_path / "detections.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 700
    assert set(json.loads(lines[0])["blobs"][0]) == {"x", "y", "sigma", "response"}


@pytest.mark.slow
def test_detect_rotation(tmp_path):
    assert main(["detect", "--corpus", "rotation", "--out", str(tmp_path)]) == EXIT_OK
    assert read_json(tmp_path / "metrics.json")["success"] == 7
