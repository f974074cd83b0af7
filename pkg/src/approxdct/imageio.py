"""Binary PGM (P5) reading and writing for 8-bit greyscale planes."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class BadFormat(ValueError):
    pass


class UnsupportedDepth(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ImagePlane:
    """Greyscale raster; ``samples`` has shape ``(height, width)``."""

    samples: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {s.shape}")
        if s.size and (s.min() < 0 or s.max() > (1 << self.bit_depth) - 1):
            raise ValueError(f"samples outside [0, {(1 << self.bit_depth) - 1}]")
        dtype = np.uint8 if self.bit_depth <= 8 else np.uint16
        s = s.astype(dtype)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ImagePlane):
            return NotImplemented
        return (self.bit_depth == other.bit_depth
                and np.array_equal(self.samples, other.samples))


# Header: magic, width, height, maxval separated by whitespace and comments,
# then exactly one whitespace byte before the raster.
_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*([^\s#]+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if not m:
            raise BadFormat("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise BadFormat("missing whitespace after PGM header")
    return tokens, pos + 1


def decode_pgm(data: bytes) -> ImagePlane:
    if data[:2] != b"P5":
        raise BadFormat(f"not a binary PGM (magic {data[:2]!r})")
    tokens, offset = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise BadFormat(f"non-numeric PGM header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise BadFormat(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedDepth(f"maxval {maxval} (only 255 is supported)")
    payload = data[offset:offset + width * height]
    if len(payload) < width * height:
        raise BadFormat(f"pixel payload truncated: {len(payload)} of {width * height} bytes")
    raster = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return ImagePlane(raster.copy())


def encode_pgm(plane: ImagePlane) -> bytes:
    if plane.bit_depth != 8:
        raise UnsupportedDepth(f"cannot write {plane.bit_depth}-bit samples as PGM")
    header = f"P5\n{plane.width} {plane.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(plane.samples, dtype=np.uint8).tobytes()


def load_pgm(path: str | os.PathLike) -> ImagePlane:
    data = Path(path).read_bytes()
    try:
        return decode_pgm(data)
    except (BadFormat, UnsupportedDepth) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def save_pgm(plane: ImagePlane, path: str | os.PathLike) -> None:
    data = encode_pgm(plane)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write PGM: {exc.strerror}", str(path)) from exc


def load_corpus(directory: str | os.PathLike) -> list[tuple[str, ImagePlane]]:
    """All ``*.pgm`` files in ``directory``, sorted by file name."""
    paths = sorted(Path(directory).glob("*.pgm"))
    return [(p.stem, load_pgm(p)) for p in paths]


def bundled_corpus_dir() -> Path:
    return Path(__file__).parent / "data" / "corpus"


def load_bundled_corpus() -> list[tuple[str, ImagePlane]]:
    return load_corpus(bundled_corpus_dir())
