"""ARCMIMO1 binary container for complex grids.

Layout (fully specified so alternate implementations interoperate):

* 8-byte magic ``ARCMIMO1``
* little-endian u32 rank
* per axis: u32 length, f64 origin, f64 step, 16-byte ASCII label
  (NUL padded)
* payload: interleaved f64 (re, im) pairs in row-major order
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"ARCMIMO1"
_AXIS_STRUCT = struct.Struct("<Idd16s")
_RANK_STRUCT = struct.Struct("<I")


class FileFormatError(Exception):
    """Base class for ARCMIMO1 container errors."""


class BadMagicError(FileFormatError):
    """File does not start with the ARCMIMO1 magic."""


class HeaderError(FileFormatError):
    """Header is malformed or inconsistent."""


class TruncatedPayloadError(FileFormatError):
    """Payload length does not match the axis lengths in the header."""


@dataclass(frozen=True)
class Axis:
    label: str
    origin: float
    step: float
    count: int

    def values(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)


def save(path, data: np.ndarray, axes) -> None:
    data = np.ascontiguousarray(data, dtype=np.complex128)
    if data.ndim != len(axes):
        raise ValueError(f"rank {data.ndim} data with {len(axes)} axes")
    for ax, n in zip(axes, data.shape):
        if ax.count != n:
            raise ValueError(f"axis {ax.label!r} length {ax.count} != data {n}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_RANK_STRUCT.pack(len(axes)))
        for ax in axes:
            label = ax.label.encode("ascii")
            if len(label) > 16:
                raise ValueError(f"axis label {ax.label!r} longer than 16 bytes")
            fh.write(_AXIS_STRUCT.pack(ax.count, ax.origin, ax.step, label))
        # complex128 is already interleaved little-endian (re, im) on disk
        fh.write(data.astype("<c16", copy=False).tobytes())


def load(path):
    """Read a container; returns (data, axes)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) or blob[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"{path}: missing ARCMIMO1 magic")
    off = len(MAGIC)
    if len(blob) < off + _RANK_STRUCT.size:
        raise HeaderError(f"{path}: header ends before rank field")
    (rank,) = _RANK_STRUCT.unpack_from(blob, off)
    off += _RANK_STRUCT.size
    if rank == 0 or rank > 16:
        raise HeaderError(f"{path}: implausible rank {rank}")
    axes = []
    for _ in range(rank):
        if len(blob) < off + _AXIS_STRUCT.size:
            raise HeaderError(f"{path}: header ends inside axis record")
        count, origin, step, label = _AXIS_STRUCT.unpack_from(blob, off)
        off += _AXIS_STRUCT.size
        try:
            text = label.rstrip(b"\x00").decode("ascii")
        except UnicodeDecodeError as exc:
            raise HeaderError(f"{path}: axis label is not ASCII") from exc
        if count == 0:
            raise HeaderError(f"{path}: axis {text!r} has zero length")
        axes.append(Axis(label=text, origin=origin, step=step, count=count))
    expected = 16 * int(np.prod([a.count for a in axes], dtype=np.int64))
    payload = blob[off:]
    if len(payload) != expected:
        raise TruncatedPayloadError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}")
    data = np.frombuffer(payload, dtype="<c16").reshape([a.count for a in axes])
    return data.astype(np.complex128), axes
