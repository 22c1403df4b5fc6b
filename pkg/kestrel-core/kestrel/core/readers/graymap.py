import re
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from kestrel.core.detectors import GrayImage
from kestrel.core.errors import ContractViolationError
from kestrel.core.readers.base import BaseReader

_HEADER = re.compile(rb"\AP5(?:\s+|#[^\n]*\n)+?(\d+)(?:\s+|#[^\n]*\n)+?(\d+)(?:\s+|#[^\n]*\n)+?(\d+)\s")


def _parse_header(data: bytes, source: str) -> Tuple[int, int, int, int]:
    match = _HEADER.match(data)
    if match is None:
        raise ContractViolationError(f"`{source}` is not a binary graymap (missing `P5` header).")
    width, height, maxval = (int(g) for g in match.groups())
    if not 0 < maxval < 65536:
        raise ContractViolationError(f"`{source}` has unsupported graymap maxval {maxval}.")
    return width, height, maxval, match.end()


class GraymapReader(BaseReader):
    """
    Binary portable graymap (``P5``) reader.

    Supports 8-bit and big-endian 16-bit samples; pixels are normalized to [0, 1].

    Example:
        .. code-block:: python

            from kestrel.core.readers import GraymapReader

            image = GraymapReader().load_data("frame_000.pgm")
    """

    @classmethod
    def class_name(cls) -> str:
        return "GraymapReader"

    def load_data(self, input_file: Union[str, Path]) -> GrayImage:
        data = Path(input_file).read_bytes()
        width, height, maxval, offset = _parse_header(data, str(input_file))
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        count = width * height
        if len(data) - offset < count * dtype.itemsize:
            raise ContractViolationError(f"`{input_file}` is truncated.")
        pixels = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        return GrayImage(pixels=pixels.reshape(height, width).astype(np.float64) / maxval)


def encode_graymap(image: GrayImage, maxval: int = 255) -> bytes:
    """``P5`` bytes of `image`, clipped to [0, 1] and quantized to `maxval`."""
    if not 0 < maxval < 65536:
        raise ValueError(f"`maxval` must be in [1, 65535], got {maxval}.")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    samples = np.round(np.clip(image.pixels, 0.0, 1.0) * maxval).astype(dtype)
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    return header + samples.tobytes()


def write_graymap(output_file: Union[str, Path], image: GrayImage, maxval: int = 255) -> None:
    Path(output_file).write_bytes(encode_graymap(image, maxval))
