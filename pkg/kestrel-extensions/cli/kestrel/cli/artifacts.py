import json
import os
import platform
import tempfile
from hashlib import sha256
from importlib.metadata import PackageNotFoundError, version
from logging import getLogger
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

logger = getLogger(__name__)

TRACKED_PACKAGES = ("kestrel-core", "kestrel-cli", "numpy", "scipy", "pydantic")
SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def canonical_json(value: Any) -> str:
    """Key-sorted, indented JSON text with a trailing newline."""
    return json.dumps(value, sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(document: Mapping[str, Any]) -> str:
    return sha256(json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")).hexdigest()


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def format_float(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def jsonl_text(records: Sequence[Mapping[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True, allow_nan=False) + "\n" for r in records)


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""

    command: str
    argv: List[str] = Field(default_factory=list)
    scenario: Optional[str] = None
    seed: Optional[int] = None
    config_hash: str
    config: Dict[str, Any] = Field(default_factory=dict)
    versions: Dict[str, str] = Field(default_factory=package_versions)
    wall_times_s: Dict[str, float] = Field(default_factory=dict)
    throughput: Optional[Dict[str, Any]] = None
    artifacts: Dict[str, str] = Field(default_factory=dict, description="sha256 of every artifact.")


class ArtifactSet:
    """
    Stage artifacts of a run and publish them together.

    Every write goes to a temporary file next to its destination. `commit` renames
    them all into place; leaving the context on an exception removes the temporary
    files, so a failed run leaves nothing behind.

    Example:
        .. code-block:: python

            with ArtifactSet("out/") as artifacts:
                artifacts.write_text("truth.csv", text)
    """

    def __init__(self, output_dir: Union[str, Path]) -> None:
        self.output_dir = Path(output_dir)
        self._staged: Dict[str, Path] = {}
        self._digests: Dict[str, str] = {}

    def __enter__(self) -> "ArtifactSet":
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.commit()
        else:
            self.discard()

    @property
    def digests(self) -> Dict[str, str]:
        return dict(sorted(self._digests.items()))

    def write_bytes(self, name: str, data: bytes) -> None:
        target = self.output_dir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_path = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
        with os.fdopen(fd, "wb") as f:
            f.write(data)

        previous = self._staged.pop(name, None)
        if previous is not None:
            previous.unlink(missing_ok=True)
        self._staged[name] = Path(temp_path)
        self._digests[name] = sha256(data).hexdigest()

    def write_text(self, name: str, text: str) -> None:
        self.write_bytes(name, text.encode("utf-8"))

    def write_json(self, name: str, value: Any) -> None:
        self.write_text(name, canonical_json(value))

    def commit(self) -> None:
        for name, temp_path in self._staged.items():
            os.replace(temp_path, self.output_dir / name)
        logger.info(f"Wrote {len(self._staged)} artifacts to `{self.output_dir}`.")
        self._staged.clear()

    def discard(self) -> None:
        for temp_path in self._staged.values():
            temp_path.unlink(missing_ok=True)
        self._staged.clear()
        self._digests.clear()


def trajectory_svg(series: Mapping[str, np.ndarray], width: int = 640, height: int = 480, margin: int = 40) -> str:
    """
    Plot xy polylines, one per named series, on a shared equal-aspect frame.

    Args:
        series (Mapping[str, np.ndarray]): `(N, 2)` arrays of positions in meters.
    """
    points = [np.asarray(xy, dtype=np.float64).reshape(-1, 2) for xy in series.values()]
    stacked = np.vstack([p for p in points if p.size]) if any(p.size for p in points) else np.zeros((1, 2))
    low, high = stacked.min(axis=0), stacked.max(axis=0)
    span = float(max(np.max(high - low), 1e-9))
    scale = min(width - 2 * margin, height - 2 * margin) / span

    def to_px(xy: np.ndarray) -> str:
        u = margin + (xy[:, 0] - low[0]) * scale
        v = height - margin - (xy[:, 1] - low[1]) * scale
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(u, v))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, (name, xy) in enumerate(zip(series, points)):
        color = SVG_COLORS[i % len(SVG_COLORS)]
        if xy.size:
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{to_px(xy)}"/>')
        parts.append(f'<text x="{margin}" y="{20 + 16 * i}" font-size="12" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
