"""Portable "NSTW" weight container.

Binary layout (little-endian, no alignment padding):

    magic   4 bytes  b"NSTW"
    version u32      = 1
    count   u32      number of tensors
    per tensor:
        name_len u16, name bytes (UTF-8),
        dtype u8 (0 = f32 LE), ndim u8, dims u32 each,
        raw row-major f32 payload

Loads are strict: any truncation, bad magic or unknown dtype raises.
The store itself is a plain immutable name -> array mapping; validation
against a concrete network architecture happens where the network is
assembled (see :mod:`nstlab.vgg`), so small hand-made files stay loadable.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from .errors import ManifestError, UnsupportedDtypeError, WeightFormatError

MAGIC = b"NSTW"
VERSION = 1
DTYPE_F32 = 0


class WeightStore(Mapping[str, np.ndarray]):
    """Immutable named-tensor collection."""

    def __init__(self, tensors: dict[str, np.ndarray]):
        frozen = {}
        for name, t in tensors.items():
            a = np.ascontiguousarray(t, dtype=np.float32)
            a.flags.writeable = False
            frozen[name] = a
        self._tensors = frozen

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self._tensors[name]
        except KeyError:
            raise ManifestError(f"weight store has no tensor named {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise WeightFormatError(f"truncated weight file while reading {what}")
    return buf


def load_weights(path: str | Path) -> WeightStore:
    """Read an NSTW file into a :class:`WeightStore`."""
    tensors: dict[str, np.ndarray] = {}
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != MAGIC:
            raise WeightFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
        if version != VERSION:
            raise WeightFormatError(f"unsupported NSTW version {version}")
        (count,) = struct.unpack("<I", _read_exact(fh, 4, "tensor count"))
        for i in range(count):
            (name_len,) = struct.unpack("<H", _read_exact(fh, 2, "name length"))
            name = _read_exact(fh, name_len, "tensor name").decode("utf-8")
            dtype, ndim = struct.unpack("<BB", _read_exact(fh, 2, "dtype/ndim"))
            if dtype != DTYPE_F32:
                raise UnsupportedDtypeError(
                    f"tensor {name!r} has dtype code {dtype}, only f32 (0) is supported"
                )
            dims = struct.unpack(
                "<" + "I" * ndim, _read_exact(fh, 4 * ndim, f"dims of {name!r}")
            )
            n_elem = int(np.prod(dims, dtype=np.int64)) if ndim else 1
            payload = _read_exact(fh, 4 * n_elem, f"payload of {name!r}")
            arr = np.frombuffer(payload, dtype="<f4").reshape(dims)
            if name in tensors:
                raise WeightFormatError(f"duplicate tensor name {name!r}")
            tensors[name] = arr
        if fh.read(1):
            raise WeightFormatError("trailing bytes after last tensor")
    return WeightStore(tensors)


def save_weights(path: str | Path, tensors: Mapping[str, np.ndarray]) -> None:
    """Write tensors to ``path`` in NSTW format (f32, bit-exact round trip)."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(tensors)))
        for name, t in tensors.items():
            a = np.ascontiguousarray(t, dtype="<f4")
            name_b = name.encode("utf-8")
            fh.write(struct.pack("<H", len(name_b)))
            fh.write(name_b)
            fh.write(struct.pack("<BB", DTYPE_F32, a.ndim))
            fh.write(struct.pack("<" + "I" * a.ndim, *a.shape))
            fh.write(a.tobytes())
