"""Ensemble tensor container, grid metadata, and rank/CDF utilities.

The on-disk container format is fixed and bit-exact:

    bytes 0..7   magic ``XTNSR01\\n``
    byte  8      dtype code (0x01 = IEEE-754 little-endian float32)
    byte  9      rank (must be 4)
    bytes 10..25 four unsigned little-endian uint32 dims (samples, steps, rows, cols)
    bytes 26..   payload, row-major (sample-major) float32

Pixel p of an (H, W) grid is always flattened row-major: p = row * W + col.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import FormatError, NonFiniteError, ValidationError

MAGIC = b"XTNSR01\n"
DTYPE_FLOAT32 = 0x01
HEADER_SIZE = len(MAGIC) + 1 + 1 + 4 * 4  # 26 bytes


@dataclass(frozen=True)
class EnsembleTensor:
    """Immutable 4-D field ensemble indexed (sample, time, row, col).

    Values are stored as float32 (the container dtype); computations
    promote to float64 internally. All entries are finite.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 4:
            raise ValidationError(f"tensor must be 4-D (sample,time,row,col), got ndim={v.ndim}")
        if any(d <= 0 for d in v.shape):
            raise ValidationError(f"all dims must be positive, got shape {v.shape}")
        v = np.array(v, dtype=np.float32)  # private copy; frozen below
        bad = ~np.isfinite(v)
        if bad.any():
            idx = int(np.flatnonzero(bad.ravel())[0])
            raise NonFiniteError("tensor holds a non-finite value", index=idx)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1]

    @property
    def n_rows(self) -> int:
        return self.values.shape[2]

    @property
    def n_cols(self) -> int:
        return self.values.shape[3]

    @property
    def n_pixels(self) -> int:
        return self.n_rows * self.n_cols

    def pixel_series(self, row: int, col: int) -> np.ndarray:
        """All observations at one pixel, pooled over samples and steps."""
        return np.asarray(self.values[:, :, row, col], dtype=np.float64).ravel()

    def pooled_matrix(self) -> np.ndarray:
        """(samples*steps, pixels) float64 view of the data, pixels row-major."""
        s, t, h, w = self.values.shape
        return self.values.reshape(s * t, h * w).astype(np.float64)


@dataclass(frozen=True)
class GridMeta:
    """Grid shape plus optional per-pixel region labels and coordinates.

    ``pixel_labels`` is an (n_rows, n_cols) object array; ``None`` marks an
    unlabeled pixel. Region aggregation requires >= 2 pixels per label.
    """

    n_rows: int
    n_cols: int
    pixel_labels: np.ndarray | None = None
    lat: np.ndarray | None = None
    lon: np.ndarray | None = None

    def __post_init__(self):
        if self.n_rows <= 0 or self.n_cols <= 0:
            raise ValidationError("grid dims must be positive")
        if self.pixel_labels is not None:
            lab = np.asarray(self.pixel_labels, dtype=object)
            if lab.shape != (self.n_rows, self.n_cols):
                raise ValidationError(
                    f"label grid must have exactly {self.n_rows}x{self.n_cols} entries, got {lab.shape}"
                )
            object.__setattr__(self, "pixel_labels", lab)
        if self.lat is not None and len(np.asarray(self.lat)) != self.n_rows:
            raise ValidationError("lat must have one entry per row")
        if self.lon is not None and len(np.asarray(self.lon)) != self.n_cols:
            raise ValidationError("lon must have one entry per col")


def save_tensor(t: EnsembleTensor, path) -> None:
    """Write the container; save -> load round-trips bit-exactly."""
    header = MAGIC + bytes([DTYPE_FLOAT32, 4]) + struct.pack("<4I", *t.values.shape)
    payload = np.ascontiguousarray(t.values, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_tensor(path) -> EnsembleTensor:
    """Read and validate a container file."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"file too short for header ({len(raw)} bytes)", offset=len(raw))
    if raw[:8] != MAGIC:
        raise FormatError(f"bad magic {raw[:8]!r}, expected {MAGIC!r}", offset=0)
    if raw[8] != DTYPE_FLOAT32:
        raise FormatError(f"unsupported dtype code 0x{raw[8]:02x}", offset=8)
    if raw[9] != 4:
        raise FormatError(f"rank must be 4, got {raw[9]}", offset=9)
    dims = struct.unpack("<4I", raw[10:HEADER_SIZE])
    if any(d == 0 for d in dims):
        raise FormatError(f"zero dimension in header {dims}", offset=10)
    n_expected = int(np.prod([int(d) for d in dims], dtype=np.int64))
    n_got, rem = divmod(len(raw) - HEADER_SIZE, 4)
    if rem != 0 or n_got != n_expected:
        raise FormatError(
            f"truncated or oversized payload: header promises {n_expected} float32 words, "
            f"payload holds {n_got} full words plus {rem} bytes",
            offset=HEADER_SIZE + min(n_got, n_expected) * 4,
        )
    flat = np.frombuffer(raw[HEADER_SIZE:], dtype="<f4")
    bad = ~np.isfinite(flat)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise NonFiniteError("payload holds a non-finite value", index=idx)
    return EnsembleTensor(flat.reshape(dims).copy())


# ---------------------------------------------------------------------------
# Rank / empirical-CDF utilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalCdf:
    """Plotting-position CDF of one pixel's pooled observations.

    F maps a value to mid-rank / (N + 1), which is strictly inside (0, 1)
    for any query, so downstream threshold comparisons and -1/log(F)
    transforms never degenerate.
    """

    sorted_values: np.ndarray
    _n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "_n", len(self.sorted_values))

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=np.float64)
        lo = np.searchsorted(self.sorted_values, x, side="left")
        hi = np.searchsorted(self.sorted_values, x, side="right")
        f = (lo + hi + 1.0) / 2.0 / (self._n + 1.0)
        return float(f) if f.ndim == 0 else f

    @property
    def n_observations(self) -> int:
        return self._n


def empirical_cdf(t: EnsembleTensor, pixel: tuple[int, int]) -> EmpiricalCdf:
    """CDF at ``pixel`` = (row, col), pooled over all samples and steps."""
    row, col = pixel
    series = t.pixel_series(row, col)
    if series.size < 2:
        raise ValidationError(f"pixel ({row},{col}) needs >= 2 observations, has {series.size}")
    return EmpiricalCdf(np.sort(series))


def rank_transform(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Mid-rank plotting positions rank/(N+1) along ``axis``.

    Strictly increasing transforms of the input leave the output unchanged;
    ties share their average rank, so four equal values all map to 0.5.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[axis]
    return rankdata(values, method="average", axis=axis) / (n + 1.0)


def pooled_rank_matrix(t: EnsembleTensor) -> np.ndarray:
    """(samples*steps, pixels) matrix of per-pixel plotting positions."""
    return rank_transform(t.pooled_matrix(), axis=0)
