"""Reader/writer for the shared ensemble tensor container.

This is the trainer's own implementation of the documented wire format
(magic ``XTNSR01\\n``, dtype byte 0x01 = LE float32, rank byte 4, four LE
uint32 dims, row-major payload); it shares no code with the core package.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"XTNSR01\n"
HEADER_SIZE = 26


class ContainerError(ValueError):
    pass


def save_tensor(values: np.ndarray, path) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 4:
        raise ContainerError(f"tensor must be 4-D, got ndim={values.ndim}")
    if not np.isfinite(values).all():
        raise ContainerError("refusing to write non-finite values")
    header = MAGIC + bytes([0x01, 4]) + struct.pack("<4I", *values.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(values.tobytes())


def load_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE or raw[:8] != MAGIC:
        raise ContainerError(f"{path}: not a tensor container")
    if raw[8] != 0x01 or raw[9] != 4:
        raise ContainerError(f"{path}: unsupported dtype/rank ({raw[8]:#x}, {raw[9]})")
    dims = struct.unpack("<4I", raw[10:HEADER_SIZE])
    flat = np.frombuffer(raw[HEADER_SIZE:], dtype="<f4")
    expected = int(np.prod([int(d) for d in dims], dtype=np.int64))
    if flat.size != expected:
        raise ContainerError(f"{path}: payload holds {flat.size} words, header promises {expected}")
    if not np.isfinite(flat).all():
        raise ContainerError(f"{path}: payload holds non-finite values")
    return flat.reshape(dims).copy()
