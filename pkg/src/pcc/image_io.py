"""Binary PPM (P6) reading and writing for planar RGB 4:4:4 images.

Internally the planes are kept in G, B, R order; files stay R, G, B.
8-bit images use maxval 255, 10-bit images use maxval 65535 with samples
restricted to [0, 1023] and stored big-endian.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

G, B, R = 0, 1, 2
CHANNEL_NAMES = ("G", "B", "R")

SUPPORTED_BIT_DEPTHS = (8, 10)


class PPMFormatError(ValueError):
    """Malformed PPM header; ``field`` names the offending header field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnsupportedFormatError(PPMFormatError):
    pass


@dataclass(frozen=True, eq=False)
class ImagePlanar:
    """Planar RGB image; ``planes`` has shape (3, height, width) in G, B, R order."""

    width: int
    height: int
    bit_depth: int
    planes: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if self.bit_depth not in SUPPORTED_BIT_DEPTHS:
            raise ValueError(f"unsupported bit depth {self.bit_depth}")
        planes = np.asarray(self.planes)
        if planes.shape != (3, self.height, self.width):
            raise ValueError(
                f"planes shape {planes.shape} does not match (3, {self.height}, {self.width})"
            )
        if not np.issubdtype(planes.dtype, np.integer):
            raise ValueError("planes must hold integer samples")
        if planes.size and (planes.min() < 0 or planes.max() > self.max_value):
            raise ValueError(f"sample values outside [0, {self.max_value}]")
        planes = planes.astype(np.int32, copy=True)
        planes.setflags(write=False)
        object.__setattr__(self, "planes", planes)

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def g(self) -> np.ndarray:
        return self.planes[G]

    @property
    def b(self) -> np.ndarray:
        return self.planes[B]

    @property
    def r(self) -> np.ndarray:
        return self.planes[R]

    @classmethod
    def from_rgb(cls, rgb: np.ndarray, bit_depth: int = 8) -> ImagePlanar:
        """Build from an interleaved (height, width, 3) array in R, G, B order."""
        rgb = np.asarray(rgb)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) array, got shape {rgb.shape}")
        planes = np.stack([rgb[..., 1], rgb[..., 2], rgb[..., 0]])
        return cls(rgb.shape[1], rgb.shape[0], bit_depth, planes)

    def to_rgb(self) -> np.ndarray:
        """Interleaved (height, width, 3) array in R, G, B order."""
        return np.stack([self.r, self.g, self.b], axis=-1)

    def __eq__(self, other):
        if not isinstance(other, ImagePlanar):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.bit_depth == other.bit_depth
            and np.array_equal(self.planes, other.planes)
        )

    __hash__ = None


def _read_token(data: bytes, pos: int, field: str) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PPMFormatError(field, "missing value")
    return data[start:pos], pos


def _read_int(data: bytes, pos: int, field: str) -> tuple[int, int]:
    token, pos = _read_token(data, pos, field)
    if not token.isdigit():
        raise PPMFormatError(field, f"not a decimal integer: {token!r}")
    return int(token), pos


def parse_ppm(data: bytes) -> ImagePlanar:
    magic, pos = _read_token(data, 0, "magic")
    if magic != b"P6":
        raise PPMFormatError("magic", f"expected b'P6', got {magic[:8]!r}")
    width, pos = _read_int(data, pos, "width")
    height, pos = _read_int(data, pos, "height")
    maxval, pos = _read_int(data, pos, "maxval")
    if width <= 0:
        raise PPMFormatError("width", "must be positive")
    if height <= 0:
        raise PPMFormatError("height", "must be positive")
    if maxval not in (255, 65535):
        raise UnsupportedFormatError("maxval", f"{maxval} not in {{255, 65535}}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PPMFormatError("maxval", "not followed by a single whitespace byte")
    pos += 1

    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
    count = width * height * 3
    need = count * dtype.itemsize
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise OSError(f"truncated PPM payload: expected {need} bytes, got {len(payload)}")
    samples = np.frombuffer(payload, dtype=dtype).reshape(height, width, 3)

    bit_depth = 8
    if maxval == 65535:
        if samples.max(initial=0) > 1023:
            raise UnsupportedFormatError("maxval", "16-bit samples above 1023 are not supported")
        bit_depth = 10
    return ImagePlanar.from_rgb(samples.astype(np.int32), bit_depth)


def format_ppm(image: ImagePlanar) -> bytes:
    if image.bit_depth == 8:
        maxval, dtype = 255, np.dtype("u1")
    else:
        maxval, dtype = 65535, np.dtype(">u2")
    header = f"P6\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    return header + image.to_rgb().astype(dtype).tobytes()


def read_ppm(path: str | os.PathLike) -> ImagePlanar:
    with open(path, "rb") as f:
        return parse_ppm(f.read())


def write_ppm(image: ImagePlanar, path: str | os.PathLike) -> None:
    with open(path, "wb") as f:
        f.write(format_ppm(image))
