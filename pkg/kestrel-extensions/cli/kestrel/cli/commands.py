import argparse
import copy
import time
from concurrent.futures import ProcessPoolExecutor
from logging import getLogger
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from kestrel.cli.artifacts import ArtifactSet, RunManifest, config_hash, csv_text, jsonl_text, trajectory_svg
from kestrel.core.detectors import DetectorConfig, GrayImage, LoGBlobDetector
from kestrel.core.errors import ConfigError
from kestrel.core.estimation import Measurement
from kestrel.core.evaluation import align, compute_metrics
from kestrel.core.readers import (
    ScenarioBundle,
    apply_overrides,
    build_bundle,
    encode_graymap,
    parse_scenario_file,
    to_config_error,
)
from kestrel.core.simulator import (
    GroundTruthSample,
    RngState,
    Scenario,
    build_corpus,
    simulate_measurements,
    simulate_trajectory,
    synthesize_frame,
    target_pixel,
)
from kestrel.core.simulator.types import SEED_MAX
from kestrel.core.tracking import FilterKind, TrackingFlow, TrackingRun, TrackMetrics
from pydantic import BaseModel, ConfigDict, ValidationError

logger = getLogger(__name__)

DETECTION_TOLERANCE_PX = 3.0
THROUGHPUT_TARGET_MS = 22.0
FrameInput = Tuple[GrayImage, float]


class FilterResult(BaseModel):
    """One filter tracked over one scenario."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: FilterKind
    run: TrackingRun
    metrics: TrackMetrics
    labels: List[str]
    mode_names: List[str]
    wall_time_s: float


def parse_filters(text: str) -> List[FilterKind]:
    kinds: List[FilterKind] = []
    for name in (part.strip() for part in text.split(",")):
        try:
            kind = FilterKind(name)
        except ValueError as e:
            expected = [k.value for k in FilterKind]
            raise ConfigError("--filters", f"unknown filter `{name}`, expected one of {expected}.") from e
        if kind not in kinds:
            kinds.append(kind)
    return kinds


def metrics_dict(metrics: TrackMetrics) -> Dict[str, Any]:
    return {
        "max_error_m": metrics.max_error,
        "rmse_m": metrics.rmse,
        "max_error_cm": metrics.max_error_cm,
        "rmse_cm": metrics.rmse_cm,
        "miss_count": metrics.miss_count,
        "samples": metrics.samples,
    }


def render_frames(scenario: Scenario, truth: Sequence[GroundTruthSample]) -> List[FrameInput]:
    """Camera frames of the target with the depth of each one."""
    frames = []
    for k, sample in enumerate(truth):
        image = synthesize_frame(
            sample,
            scenario.camera,
            scenario.appearance,
            target_height=scenario.target_height,
            rng_state=RngState(seed=scenario.seed, counter=k),
        )
        _, depth = target_pixel(sample, scenario.camera, scenario.target_height)
        frames.append((image, depth))
    return frames


def track_scenario(
    bundle: ScenarioBundle,
    kind: FilterKind,
    truth: Sequence[GroundTruthSample],
    measurements: Optional[Sequence[Optional[Measurement]]] = None,
    frames: Optional[Sequence[FrameInput]] = None,
) -> FilterResult:
    """Track one filter over the scenario from measurements, or from frames when given."""
    scenario = bundle.scenario
    flow = TrackingFlow(config=bundle.tracker, filter_kind=kind)

    start = time.perf_counter()
    if frames is not None:
        flow.detector = LoGBlobDetector(bundle.detector)
        flow.camera = scenario.camera
        run = flow.run_frames(frames, scenario.dt, t0=truth[0].t)
    else:
        if measurements is None:
            measurements = simulate_measurements(scenario, list(truth))
        run = flow.run(measurements, scenario.dt, t0=truth[0].t)
    wall_time = time.perf_counter() - start

    metrics = compute_metrics(
        run.history,
        truth,
        burn_in=bundle.tracker.burn_in,
        step_times_ms=[r.step_time_ms for r in run.reports],
        miss_count=run.miss_count,
    )
    track_filter = run.tracks[0].filter if run.tracks else None
    labels = track_filter.labels if track_filter is not None else []
    mode_names = [mode.name for mode in track_filter.bank.modes] if kind == FilterKind.IMM and track_filter else []
    return FilterResult(
        kind=kind,
        run=run,
        metrics=metrics,
        labels=labels,
        mode_names=mode_names,
        wall_time_s=wall_time,
    )


def trajectory_rows(result: FilterResult, truth: Sequence[GroundTruthSample]) -> Tuple[List[str], List[List[float]]]:
    header = ["t", "x_est", "y_est", "vx_est", "vy_est", "x_true", "y_true"]
    header += [f"mu_{name}" for name in result.mode_names]

    history = result.run.history
    index = {label: i for i, label in enumerate(result.labels)}
    rows = []
    for entry, k in zip(history, align(history, truth)):
        mean = entry.belief.mean
        row = [entry.t, *(mean[index[label]] for label in ("x", "y", "vx", "vy"))]
        row += [*truth[k].position]
        if result.mode_names:
            row += entry.mode_probabilities
        rows.append(row)
    return header, rows


def _load_bundle(args: argparse.Namespace) -> ScenarioBundle:
    if not args.scenario:
        raise ConfigError("--scenario", "a scenario file or preset name is required.")
    return parse_scenario_file(args.scenario, args.set, args.seed)


def _write_manifest(
    artifacts: ArtifactSet,
    args: argparse.Namespace,
    config: Dict[str, Any],
    wall_times: Dict[str, float],
    scenario: Optional[str] = None,
    seed: Optional[int] = None,
    throughput: Optional[Dict[str, Any]] = None,
) -> None:
    manifest = RunManifest(
        command=args.command,
        argv=list(getattr(args, "argv", [])),
        scenario=scenario,
        seed=seed,
        config_hash=config_hash(config),
        config=config,
        wall_times_s=wall_times,
        throughput=throughput,
        artifacts=artifacts.digests,
    )
    artifacts.write_json("run_manifest.json", manifest.model_dump())


def simulate(args: argparse.Namespace) -> int:
    """Ground truth, noisy measurements and optionally rendered frames of a scenario."""
    started = time.perf_counter()
    bundle = _load_bundle(args)
    scenario = bundle.scenario

    truth = simulate_trajectory(scenario)
    measurements = simulate_measurements(scenario, truth)
    wall_times = {"simulate": time.perf_counter() - started}

    with ArtifactSet(args.out) as artifacts:
        artifacts.write_text(
            "truth.csv",
            csv_text(["t", "x", "y", "vx", "vy"], [[s.t, *s.position, *s.velocity] for s in truth]),
        )
        rows = [
            [s.t, "", "", "0"] if m is None else [s.t, *m.z, "1"] for s, m in zip(truth, measurements)
        ]
        artifacts.write_text("measurements.csv", csv_text(["t", "x", "y", "detected"], rows))

        if args.frames:
            render_started = time.perf_counter()
            for k, (image, _) in enumerate(render_frames(scenario, truth)):
                artifacts.write_bytes(f"frames/frame_{k:05d}.pgm", encode_graymap(image))
            wall_times["render"] = time.perf_counter() - render_started

        _write_manifest(artifacts, args, bundle.document, wall_times, scenario.name, scenario.seed)

    logger.info(f"Simulated {len(truth)} samples of `{scenario.name}`.")
    return 0


def _detector_config(args: argparse.Namespace) -> DetectorConfig:
    if args.scenario:
        return _load_bundle(args).detector

    document = apply_overrides({}, args.set)
    unknown = sorted(set(document) - {"detector"})
    if unknown:
        raise ConfigError(unknown[0], "only `detector.*` overrides apply without `--scenario`.")
    try:
        return DetectorConfig.model_validate(document.get("detector", {}))
    except ValidationError as e:
        raise to_config_error(e, prefix="detector") from e


def detect(args: argparse.Namespace) -> int:
    """Run the blob detector over a synthetic corpus and score every sequence."""
    config = _detector_config(args)
    detector = LoGBlobDetector(config)
    seed = args.seed if args.seed is not None else 0

    records: List[Dict[str, Any]] = []
    summaries: List[Dict[str, Any]] = []
    frame_times: List[float] = []
    started = time.perf_counter()
    for sequence in build_corpus(args.corpus, seed=seed):
        errors: List[Optional[float]] = []
        for frame in sequence.frames():
            frame_started = time.perf_counter()
            blobs = detector.detect(frame.image)
            frame_times.append(1000.0 * (time.perf_counter() - frame_started))

            error = float(np.hypot(blobs[0].x - frame.pixel[0], blobs[0].y - frame.pixel[1])) if blobs else None
            errors.append(error)
            records.append(
                {
                    "sequence": sequence.name,
                    "frame": frame.index,
                    "truth_px": [float(frame.pixel[0]), float(frame.pixel[1])],
                    "blobs": [blob.to_json_dict() for blob in blobs],
                    "error_px": error,
                    "success": error is not None and error <= DETECTION_TOLERANCE_PX,
                },
            )

        failed = sum(1 for e in errors if e is None or e > DETECTION_TOLERANCE_PX)
        found = [e for e in errors if e is not None]
        summaries.append(
            {
                "sequence": sequence.name,
                "frames": len(errors),
                "failed_frames": failed,
                "max_error_px": max(found) if found else None,
                "success": failed == 0,
            },
        )
        logger.info(f"Sequence `{sequence.name}`: {len(errors) - failed}/{len(errors)} frames within tolerance.")

    successes = sum(1 for s in summaries if s["success"])
    metrics = {
        "corpus": args.corpus,
        "seed": seed,
        "tolerance_px": DETECTION_TOLERANCE_PX,
        "sequences": summaries,
        "success": successes,
        "failure": len(summaries) - successes,
    }
    config_document = {"corpus": args.corpus, "seed": seed, "detector": config.model_dump()}
    throughput = {
        "stage": "detector",
        "frames": len(frame_times),
        "mean_frame_ms": float(np.mean(frame_times)) if frame_times else 0.0,
    }

    with ArtifactSet(args.out) as artifacts:
        artifacts.write_text("detections.jsonl", jsonl_text(records))
        artifacts.write_json("metrics.json", metrics)
        _write_manifest(
            artifacts,
            args,
            config_document,
            {"detect": time.perf_counter() - started},
            seed=seed,
            throughput=throughput,
        )
    return 0


def _comparison(per_filter: Dict[str, Dict[str, Any]]) -> Dict[str, Any]:
    if "kf" not in per_filter or "imm" not in per_filter:
        return {}
    kf, imm = per_filter["kf"], per_filter["imm"]
    return {"max_error_reduction_cm": kf["max_error_cm"] - imm["max_error_cm"]}


def track(args: argparse.Namespace) -> int:
    """Track a scenario with each requested filter and compare them against ground truth."""
    bundle = _load_bundle(args)
    scenario = bundle.scenario
    kinds = parse_filters(args.filters)

    truth = simulate_trajectory(scenario)
    measurements = frames = None
    wall_times: Dict[str, float] = {}
    started = time.perf_counter()
    if args.source == "frames":
        frames = render_frames(scenario, truth)
        wall_times["render"] = time.perf_counter() - started
    else:
        measurements = simulate_measurements(scenario, truth)
        wall_times["simulate"] = time.perf_counter() - started

    results = [track_scenario(bundle, kind, truth, measurements, frames) for kind in kinds]
    wall_times.update({f"track_{r.kind.value}": r.wall_time_s for r in results})

    per_filter = {r.kind.value: metrics_dict(r.metrics) for r in results}
    metrics = {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "source": args.source,
        "burn_in_s": bundle.tracker.burn_in,
        "filters": per_filter,
        **_comparison(per_filter),
    }

    throughput: Dict[str, Any] = {
        "source": args.source,
        "mean_step_ms": {r.kind.value: r.run.mean_step_time_ms for r in results},
    }
    if frames:
        frame_ms = {r.kind.value: 1000.0 * r.wall_time_s / len(frames) for r in results}
        throughput.update(
            {
                "frames": len(frames),
                "mean_frame_ms": frame_ms,
                "target_ms": THROUGHPUT_TARGET_MS,
                "meets_target": all(ms <= THROUGHPUT_TARGET_MS for ms in frame_ms.values()),
            },
        )
        if not throughput["meets_target"]:
            logger.warning(f"Frame time above the {THROUGHPUT_TARGET_MS} ms target: {frame_ms}.")

    series = {"truth": np.array([s.position for s in truth])}
    with ArtifactSet(args.out) as artifacts:
        artifacts.write_json("metrics.json", metrics)
        for result in results:
            header, rows = trajectory_rows(result, truth)
            artifacts.write_text(f"trajectory_{result.kind.value}.csv", csv_text(header, rows))
            series[result.kind.value] = np.array([row[1:3] for row in rows]).reshape(-1, 2)
        artifacts.write_text("trajectory.svg", trajectory_svg(series))
        _write_manifest(
            artifacts,
            args,
            bundle.document,
            wall_times,
            scenario.name,
            scenario.seed,
            throughput=throughput,
        )

    for result in results:
        logger.info(
            f"{result.kind.value}: max error {result.metrics.max_error_cm:.2f} cm, "
            f"RMSE {result.metrics.rmse_cm:.2f} cm",
        )
    return 0


def bench_run(task: Tuple[Dict[str, Any], str, int, List[str], str]) -> Dict[str, Any]:
    """Metrics of every filter on one seeded run. Runs in a worker process."""
    document, name, seed, filters, source = task
    document = copy.deepcopy(document)
    document.setdefault("scenario", {})["seed"] = seed
    bundle = build_bundle(document, name)

    truth = simulate_trajectory(bundle.scenario)
    measurements = frames = None
    if source == "frames":
        frames = render_frames(bundle.scenario, truth)
    else:
        measurements = simulate_measurements(bundle.scenario, truth)

    per_filter = {}
    for kind in filters:
        result = track_scenario(bundle, FilterKind(kind), truth, measurements, frames)
        per_filter[kind] = metrics_dict(result.metrics)
    return {"seed": seed, "filters": per_filter}


def bench_summary(runs: Sequence[Dict[str, Any]], filters: Sequence[str]) -> Dict[str, Any]:
    summary: Dict[str, Any] = {}
    for kind in filters:
        max_cm = np.array([run["filters"][kind]["max_error_cm"] for run in runs])
        rmse_cm = np.array([run["filters"][kind]["rmse_cm"] for run in runs])
        summary[kind] = {
            "median_max_error_cm": float(np.median(max_cm)),
            "mean_max_error_cm": float(np.mean(max_cm)),
            "median_rmse_cm": float(np.median(rmse_cm)),
        }

    if "kf" in summary and "imm" in summary:
        kf_max = summary["kf"]["median_max_error_cm"]
        summary["imm_wins"] = sum(
            1 for run in runs if run["filters"]["imm"]["max_error_cm"] < run["filters"]["kf"]["max_error_cm"]
        )
        summary["median_max_error_ratio"] = summary["imm"]["median_max_error_cm"] / kf_max if kf_max > 0 else None
    return summary


def bench(args: argparse.Namespace) -> int:
    """Seeded Monte-Carlo comparison of the filters, fanned out over worker processes."""
    started = time.perf_counter()
    bundle = _load_bundle(args)
    filters = [kind.value for kind in parse_filters(args.filters)]
    base_seed = bundle.scenario.seed
    if base_seed + args.runs - 1 > SEED_MAX:
        raise ConfigError("--seed", f"seeds up to {base_seed + args.runs - 1} exceed {SEED_MAX}.")

    tasks = [
        (bundle.document, bundle.scenario.name, base_seed + i, filters, args.source) for i in range(args.runs)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as executor:
            runs = list(executor.map(bench_run, tasks))
    else:
        runs = [bench_run(task) for task in tasks]

    metrics = {
        "scenario": bundle.scenario.name,
        "base_seed": base_seed,
        "runs": args.runs,
        "source": args.source,
        "per_run": runs,
        "summary": bench_summary(runs, filters),
    }
    header = ["seed"] + [f"{kind}_{field}" for kind in filters for field in ("max_error_cm", "rmse_cm")]
    rows = [
        [str(run["seed"])]
        + [run["filters"][kind][field] for kind in filters for field in ("max_error_cm", "rmse_cm")]
        for run in runs
    ]

    with ArtifactSet(args.out) as artifacts:
        artifacts.write_json("metrics.json", metrics)
        artifacts.write_text("runs.csv", csv_text(header, rows))
        _write_manifest(
            artifacts,
            args,
            bundle.document,
            {"bench": time.perf_counter() - started},
            bundle.scenario.name,
            base_seed,
            throughput={"workers": args.workers, "runs_per_s": args.runs / (time.perf_counter() - started)},
        )

    logger.info(f"Bench summary: {metrics['summary']}")
    return 0


COMMANDS = {"simulate": simulate, "detect": detect, "track": track, "bench": bench}
