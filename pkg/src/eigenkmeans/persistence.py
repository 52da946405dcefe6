"""Binary ``.ekm`` model files.

Layout (all integers unsigned little-endian, all reals IEEE-754 float64 LE)::

    magic        4 bytes   b"EKM1"
    header       u32 d, u32 E, u32 C, u32 width, u32 height
                 C times: u16 label byte length, UTF-8 label, u32 P_k
    payload      d       mean face
                 E       eigenvalues
                 d * E   eigenfaces, column-major (eigenface 0 first)
                 M       u32 class index of each projection (M = sum P_k)
                 M * E   projections, one face-space vector after another
                 C * E   class means, in header class order
    checksum     u64     CRC-64/XZ of the payload bytes
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .trainer import EigenModel

__all__ = [
    "MAGIC",
    "ModelFormatError",
    "ChecksumError",
    "VersionError",
    "crc64",
    "dumps_model",
    "loads_model",
    "save_model",
    "load_model",
]

MAGIC = b"EKM1"
_F64 = np.dtype("<f8")
_U32 = np.dtype("<u4")


class ModelFormatError(ValueError):
    pass


class ChecksumError(ModelFormatError):
    pass


class VersionError(ModelFormatError):
    pass


def _make_table() -> list[int]:
    poly = 0xC96C5795D7870F42  # ECMA-182, reflected
    table = []
    for i in range(256):
        crc = i
        for _ in range(8):
            crc = (crc >> 1) ^ poly if crc & 1 else crc >> 1
        table.append(crc)
    return table


_TABLE = _make_table()


def crc64(data: bytes, crc: int = 0) -> int:
    """CRC-64/XZ (the variant used by xz and Go's ``crc64.ECMA``)."""
    crc ^= 0xFFFFFFFFFFFFFFFF
    table = _TABLE
    for b in data:
        crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFFFFFFFFFF


def dumps_model(model: EigenModel) -> bytes:
    d, e = model.eigenfaces.shape
    width, height = model.image_dims
    header = [MAGIC, struct.pack("<5I", d, e, model.num_classes, width, height)]
    for label, size in zip(model.labels, model.class_sizes):
        raw = label.encode("utf-8")
        header.append(struct.pack("<H", len(raw)) + raw + struct.pack("<I", size))
    class_idx = np.array([model.class_index(lab) for lab in model.projection_labels], dtype=_U32)
    payload = b"".join([
        np.asarray(model.mean_face, dtype=_F64).tobytes(),
        np.asarray(model.eigenvalues, dtype=_F64).tobytes(),
        np.asarray(model.eigenfaces, dtype=_F64).tobytes(order="F"),
        class_idx.tobytes(),
        np.asarray(model.projections, dtype=_F64).tobytes(order="C"),
        np.asarray(model.class_means, dtype=_F64).tobytes(order="C"),
    ])
    return b"".join(header) + payload + struct.pack("<Q", crc64(payload))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(f"truncated model file while reading {what}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def array(self, count: int, dtype, what: str) -> np.ndarray:
        return np.frombuffer(self.take(count * dtype.itemsize, what), dtype=dtype)


def loads_model(data: bytes) -> EigenModel:
    if len(data) < 4:
        raise ModelFormatError("truncated model file while reading magic")
    magic = data[:4]
    if magic != MAGIC:
        if magic[:3] == MAGIC[:3]:
            raise VersionError(f"unsupported model format version {magic!r}; expected {MAGIC!r}")
        raise ModelFormatError(f"not a model file (magic {magic!r})")
    r = _Reader(data)
    r.pos = 4
    d, e, c, width, height = r.unpack("<5I", "header")
    if d != width * height:
        raise ModelFormatError(f"header dimension {d} != {width}x{height}")
    labels, sizes = [], []
    for i in range(c):
        (n,) = r.unpack("<H", f"label {i}")
        labels.append(r.take(n, f"label {i}").decode("utf-8"))
        sizes.append(r.unpack("<I", f"class size {i}")[0])
    m = sum(sizes)

    start = r.pos
    psi = r.array(d, _F64, "mean face")
    values = r.array(e, _F64, "eigenvalues")
    u = r.array(d * e, _F64, "eigenfaces").reshape((d, e), order="F")
    class_idx = r.array(m, _U32, "projection labels")
    omegas = r.array(m * e, _F64, "projections").reshape(m, e)
    xi = r.array(c * e, _F64, "class means").reshape(c, e)
    payload = data[start : r.pos]
    (stored,) = r.unpack("<Q", "checksum")
    if r.pos != len(data):
        raise ModelFormatError(f"{len(data) - r.pos} unexpected trailing bytes")
    actual = crc64(payload)
    if stored != actual:
        raise ChecksumError(f"checksum mismatch: stored {stored:016x}, computed {actual:016x}")
    if class_idx.size and int(class_idx.max()) >= c:
        raise ModelFormatError("projection label index out of range")
    counts = np.bincount(class_idx, minlength=c) if m else np.zeros(c, dtype=int)
    if list(counts) != sizes:
        raise ModelFormatError("projection labels do not match class sizes")

    return EigenModel(
        mean_face=psi.copy(),
        eigenfaces=np.ascontiguousarray(u),
        eigenvalues=values.copy(),
        projections=omegas.copy(),
        projection_labels=[labels[i] for i in class_idx],
        labels=labels,
        class_means=xi.copy(),
        class_sizes=sizes,
        image_dims=(width, height),
    )


def save_model(model: EigenModel, path) -> None:
    Path(path).write_bytes(dumps_model(model))


def load_model(path) -> EigenModel:
    return loads_model(Path(path).read_bytes())
