from kestrel.cli.artifacts import ArtifactSet, RunManifest, trajectory_svg
from kestrel.cli.commands import bench, detect, simulate, track
from kestrel.cli.main import build_parser, main

__all__ = [
    "ArtifactSet",
    "RunManifest",
    "bench",
    "build_parser",
    "detect",
    "main",
    "simulate",
    "track",
    "trajectory_svg",
]
