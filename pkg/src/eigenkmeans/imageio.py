"""PGM (P2/P5) reading and writing, and image <-> face vector conversion.

Face vectors are 1-D ``float64`` arrays in row-major order with the origin at
the top-left pixel: ``vec[r * width + c] == pixel(r, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GrayImage",
    "PGMError",
    "load_pgm",
    "read_pgm",
    "encode_pgm",
    "write_pgm",
    "vectorize",
    "reshape",
    "to_display_image",
]

_WHITESPACE = b" \t\n\r\v\f"


class PGMError(ValueError):
    """Malformed PGM data. ``field`` names the offending part of the file."""

    def __init__(self, field: str, message: str):
        super().__init__(f"PGM {field}: {message}")
        self.field = field


@dataclass(frozen=True, eq=False)
class GrayImage:
    """A grayscale raster. ``pixels`` has shape (height, width)."""

    width: int
    height: int
    maxval: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image must be at least 1x1, got {self.width}x{self.height}")
        if not 1 <= self.maxval <= 65535:
            raise ValueError(f"maxval must be in [1, 65535], got {self.maxval}")
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array shape {px.shape} does not match {self.height}x{self.width}"
            )
        if px.size and (px.min() < 0 or px.max() > self.maxval):
            raise ValueError(f"pixel values outside [0, {self.maxval}]")
        px = px.astype(np.uint16)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def dims(self) -> tuple[int, int]:
        return self.width, self.height

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.maxval == other.maxval
            and np.array_equal(self.pixels, other.pixels)
        )

    __hash__ = None


class _Tokens:
    """Whitespace/comment aware header tokenizer."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def next(self, field: str) -> bytes:
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos : self.pos + 1]
            if ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            elif ch in _WHITESPACE:
                self.pos += 1
            else:
                break
        start = self.pos
        while self.pos < n and data[self.pos : self.pos + 1] not in _WHITESPACE + b"#":
            self.pos += 1
        if start == self.pos:
            raise PGMError(field, "missing (unexpected end of data)")
        return data[start : self.pos]

    def integer(self, field: str) -> int:
        tok = self.next(field)
        if not tok.isdigit():
            raise PGMError(field, f"expected a non-negative integer, got {tok[:16]!r}")
        return int(tok)


def load_pgm(data: bytes) -> GrayImage:
    """Decode a P2 (ASCII) or P5 (binary) PGM byte string."""
    magic = data[:2]
    if magic not in (b"P2", b"P5") or (len(data) > 2 and data[2:3] not in _WHITESPACE + b"#"):
        raise PGMError("magic", f"expected P2 or P5, got {data[:3]!r}")
    tokens = _Tokens(data)
    tokens.pos = 2
    width = tokens.integer("width")
    if width == 0:
        raise PGMError("width", "must be positive")
    height = tokens.integer("height")
    if height == 0:
        raise PGMError("height", "must be positive")
    maxval = tokens.integer("maxval")
    if not 1 <= maxval <= 65535:
        raise PGMError("maxval", f"{maxval} not in [1, 65535]")
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        if tokens.pos >= len(data) or data[tokens.pos : tokens.pos + 1] not in _WHITESPACE:
            raise PGMError("pixels", "missing raster data")
        start = tokens.pos + 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        raw = data[start : start + need]
        if len(raw) < need:
            raise PGMError("pixels", f"truncated: expected {need} bytes, got {len(raw)}")
        pixels = np.frombuffer(raw, dtype=dtype).astype(np.uint16)
    else:
        values = []
        for i in range(count):
            try:
                values.append(tokens.integer("pixels"))
            except PGMError as exc:
                raise PGMError("pixels", f"truncated or invalid at pixel {i}: {exc}") from None
        pixels = np.array(values, dtype=np.int64)

    if pixels.size and pixels.max() > maxval:
        raise PGMError("pixels", f"value {int(pixels.max())} exceeds maxval {maxval}")
    return GrayImage(width, height, maxval, pixels.reshape(height, width))


def read_pgm(path) -> GrayImage:
    return load_pgm(Path(path).read_bytes())


def encode_pgm(img: GrayImage, binary: bool = True) -> bytes:
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n{img.maxval}\n".encode()
    if binary:
        dtype = ">u2" if img.maxval > 255 else "u1"
        return header + img.pixels.astype(dtype).tobytes()
    rows = (" ".join(str(int(v)) for v in row) for row in img.pixels)
    return header + ("\n".join(rows) + "\n").encode()


def write_pgm(path, img: GrayImage, binary: bool = True) -> None:
    Path(path).write_bytes(encode_pgm(img, binary=binary))


def vectorize(img: GrayImage) -> np.ndarray:
    """Flatten an image into a row-major float64 face vector."""
    return img.pixels.astype(np.float64).ravel(order="C")


def reshape(vec, width: int, height: int, maxval: int = 255) -> GrayImage:
    """Inverse of :func:`vectorize` for integer-valued vectors in [0, maxval]."""
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (width * height,):
        raise ValueError(f"vector of length {vec.size} cannot be shaped to {width}x{height}")
    if not np.all(vec == np.round(vec)):
        raise ValueError("vector has non-integer intensities; use to_display_image")
    return GrayImage(width, height, maxval, vec.reshape(height, width).astype(np.int64))


def to_display_image(vec, width: int, height: int) -> GrayImage:
    """Linearly rescale an arbitrary real vector onto [0, 255] (min -> 0, max -> 255).

    A constant vector maps to all zeros.
    """
    vec = np.asarray(vec, dtype=np.float64)
    lo, hi = float(vec.min()), float(vec.max())
    if hi > lo:
        scaled = np.round((vec - lo) * (255.0 / (hi - lo)))
    else:
        scaled = np.zeros_like(vec)
    return reshape(np.clip(scaled, 0, 255), width, height, 255)
