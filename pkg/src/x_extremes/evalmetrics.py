"""Distribution-level evaluation battery for generated ensembles.

Covers the kernel two-sample statistic (MMD), multi-scale sliced
Wasserstein distance over Laplacian pyramids, radially averaged power
spectral density, and pixelwise moment / quantile maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ConfigError, ValidationError
from .tensor import EnsembleTensor


# ---------------------------------------------------------------------------
# Maximum mean discrepancy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian kernel exp(-||a-b||^2 / (2 sigma2)); sigma2=None selects the
    median-pairwise-distance heuristic (sigma = median ||a-b|| on the pooled
    sample, so sigma2 = median^2)."""

    sigma2: float | None = None

    def __post_init__(self):
        if self.sigma2 is not None and self.sigma2 <= 0:
            raise ConfigError("sigma2 must be > 0 when explicit")


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = np.einsum("ij,ij->i", a, a)[:, None]
    bb = np.einsum("ij,ij->i", b, b)[None, :]
    d2 = aa + bb - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def median_heuristic_sigma2(x: np.ndarray, y: np.ndarray, cap: int = 2048) -> float:
    """sigma^2 from the median pairwise Euclidean distance of the pooled set.

    Deterministic: very large pools are strided down to ``cap`` rows.
    """
    pooled = np.vstack([x, y])
    if len(pooled) > cap:
        pooled = pooled[:: int(np.ceil(len(pooled) / cap))]
    d2 = _sq_dists(pooled, pooled)
    off = d2[np.triu_indices(len(pooled), k=1)]
    med = float(np.median(np.sqrt(off)))
    if med == 0.0:
        raise ValidationError("median pairwise distance is zero; set sigma2 explicitly")
    return med * med


def mmd_squared(x: np.ndarray, y: np.ndarray, kernel: KernelConfig = KernelConfig()) -> float:
    """Unbiased squared MMD: diagonal-free within-set sums minus the cross term.

        1/(m(m-1)) sum_{a != c} k(x_a,x_c)
      - 2/(m l)    sum_{a, c}   k(x_a,y_c)
      + 1/(l(l-1)) sum_{a != c} k(y_a,y_c)

    Can be negative on matched distributions; its expectation is zero there.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2:
        raise ValidationError("sample sets must be 2-D (samples, features)")
    if x.shape[1] != y.shape[1]:
        raise ValidationError(f"feature dims differ: {x.shape[1]} vs {y.shape[1]}")
    m, l = len(x), len(y)
    if m < 2 or l < 2:
        raise ValidationError("need >= 2 samples on each side")
    sigma2 = kernel.sigma2 if kernel.sigma2 is not None else median_heuristic_sigma2(x, y)
    kxx = np.exp(-_sq_dists(x, x) / (2.0 * sigma2))
    kyy = np.exp(-_sq_dists(y, y) / (2.0 * sigma2))
    kxy = np.exp(-_sq_dists(x, y) / (2.0 * sigma2))
    term_x = (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
    term_y = (kyy.sum() - np.trace(kyy)) / (l * (l - 1))
    term_xy = 2.0 * kxy.sum() / (m * l)
    return float(term_x + term_y - term_xy)


def tensor_sample_matrix(t: EnsembleTensor, unit: str = "frame") -> np.ndarray:
    """Flatten an ensemble into MMD-ready rows: one row per frame or per video."""
    if unit == "frame":
        return t.values.reshape(t.n_samples * t.n_steps, -1).astype(np.float64)
    if unit == "video":
        return t.values.reshape(t.n_samples, -1).astype(np.float64)
    raise ValidationError(f"unit must be 'frame' or 'video', got {unit!r}")


# ---------------------------------------------------------------------------
# Multi-scale sliced Wasserstein distance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PyramidConfig:
    levels: int = 3
    projections: int = 64
    seed: int = 0
    patch: int = 7

    def __post_init__(self):
        if self.levels < 1:
            raise ConfigError("levels must be >= 1")
        if self.projections < 16:
            raise ConfigError("need >= 16 projections per level")
        if self.patch < 1:
            raise ConfigError("patch must be >= 1")

    def validate_for_shape(self, h: int, w: int) -> None:
        if min(h, w) < 8:
            raise ValidationError("images must be at least 8x8")
        if min(h, w) >> (self.levels - 1) < 4:
            raise ValidationError(
                f"{self.levels} levels would shrink a {h}x{w} image below 4 pixels"
            )


_BLUR_1D = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _blur(img: np.ndarray) -> np.ndarray:
    # Separable 5-tap binomial blur with edge replication.
    pad = np.pad(img, ((2, 2), (0, 0)), mode="edge")
    out = sum(_BLUR_1D[k] * pad[k : k + img.shape[0]] for k in range(5))
    pad = np.pad(out, ((0, 0), (2, 2)), mode="edge")
    return sum(_BLUR_1D[k] * pad[:, k : k + img.shape[1]] for k in range(5))


def _downsample(img: np.ndarray) -> np.ndarray:
    return _blur(img)[::2, ::2]


def _upsample(img: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    up = np.repeat(np.repeat(img, 2, axis=0), 2, axis=1)[: shape[0], : shape[1]]
    return _blur(up)


def laplacian_pyramid(img: np.ndarray, levels: int) -> list[np.ndarray]:
    """Band-pass stack: finest difference bands first, coarse residual last.

    With levels=1 this is just [img], so single-level distances act on the
    raw field (constant shifts survive, which the shift oracle relies on).
    """
    gauss = [np.asarray(img, dtype=np.float64)]
    for _ in range(levels - 1):
        gauss.append(_downsample(gauss[-1]))
    bands = [gauss[k] - _upsample(gauss[k + 1], gauss[k].shape) for k in range(levels - 1)]
    bands.append(gauss[-1])
    return bands


def _patches(images: np.ndarray, patch: int) -> np.ndarray:
    """(N, H, W) -> (N * n_patches, patch*patch), stride = ceil(patch/2)."""
    n, h, w = images.shape
    p = min(patch, h, w)
    stride = max(1, p // 2)
    ys = list(range(0, h - p + 1, stride))
    xs = list(range(0, w - p + 1, stride))
    if ys[-1] != h - p:
        ys.append(h - p)
    if xs[-1] != w - p:
        xs.append(w - p)
    out = np.empty((n, len(ys) * len(xs), p * p), dtype=np.float64)
    for iy, y0 in enumerate(ys):
        for ix, x0 in enumerate(xs):
            out[:, iy * len(xs) + ix, :] = images[:, y0 : y0 + p, x0 : x0 + p].reshape(n, -1)
    return out.reshape(n * len(ys) * len(xs), p * p)


def _sliced_w1(a: np.ndarray, b: np.ndarray, directions: np.ndarray) -> float:
    pa = a @ directions.T
    pb = b @ directions.T
    if len(a) == len(b):
        d = np.mean(np.abs(np.sort(pa, axis=0) - np.sort(pb, axis=0)), axis=0)
        return float(d.mean())
    return float(
        np.mean([stats.wasserstein_distance(pa[:, k], pb[:, k]) for k in range(directions.shape[0])])
    )


def ms_swd(x: np.ndarray, y: np.ndarray, cfg: PyramidConfig = PyramidConfig()) -> float:
    """Average sliced W1 between patch clouds across pyramid levels.

    Deterministic given cfg.seed: the same projection directions are drawn
    per level for both sets, which makes the distance symmetric and zero on
    identical inputs.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 3 or y.ndim != 3 or x.shape[1:] != y.shape[1:]:
        raise ValidationError("image sets must be (N, H, W) with matching frame shape")
    cfg.validate_for_shape(x.shape[1], x.shape[2])
    rng = np.random.default_rng(cfg.seed)
    level_dists = []
    bands_x = [laplacian_pyramid(img, cfg.levels) for img in x]
    bands_y = [laplacian_pyramid(img, cfg.levels) for img in y]
    for lvl in range(cfg.levels):
        ax = np.stack([b[lvl] for b in bands_x])
        ay = np.stack([b[lvl] for b in bands_y])
        pa = _patches(ax, cfg.patch)
        pb = _patches(ay, cfg.patch)
        dirs = rng.standard_normal((cfg.projections, pa.shape[1]))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        level_dists.append(_sliced_w1(pa, pb, dirs))
    return float(np.mean(level_dists))


def ms_swd_tensor(a: EnsembleTensor, b: EnsembleTensor, cfg: PyramidConfig = PyramidConfig()) -> float:
    """MS-SWD between two ensembles, frames pooled over samples and steps."""
    return ms_swd(
        a.values.reshape(-1, a.n_rows, a.n_cols),
        b.values.reshape(-1, b.n_rows, b.n_cols),
        cfg,
    )


def pairwise_ms_swd(
    a: EnsembleTensor, b: EnsembleTensor, cfg: PyramidConfig = PyramidConfig()
) -> np.ndarray:
    """Distance matrix between individual samples of two ensembles.

    Row block = samples of ``a`` then of ``b``; ditto columns. Feed this to
    any external multi-dimensional-scaling plot.
    """
    frames = [s for s in a.values.astype(np.float64)] + [s for s in b.values.astype(np.float64)]
    k = len(frames)
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = ms_swd(frames[i], frames[j], cfg)
    return out


# ---------------------------------------------------------------------------
# Radially averaged power spectral density
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialSpectrum:
    """Direction-independent power spectrum: power summed per integer-radius
    annulus of the 2-D periodogram, averaged across snapshots. The bin sums
    preserve Parseval: sum(power) equals the snapshot-mean of mean(x^2)."""

    wavenumber: np.ndarray
    power: np.ndarray

    @property
    def total_power(self) -> float:
        return float(self.power.sum())


def radial_psd(t: EnsembleTensor) -> RadialSpectrum:
    h, w = t.n_rows, t.n_cols
    if min(h, w) < 8:
        raise ValidationError("fields must be at least 8x8 for spectral binning")
    ky = np.fft.fftfreq(h) * h
    kx = np.fft.fftfreq(w) * w
    radius = np.sqrt(ky[:, None] ** 2 + kx[None, :] ** 2)
    bins = np.rint(radius).astype(int).ravel()
    n_bins = bins.max() + 1
    snaps = t.values.reshape(-1, h, w).astype(np.float64)
    accum = np.zeros(n_bins)
    for snap in snaps:
        period = np.abs(np.fft.fft2(snap)) ** 2 / (h * w) ** 2
        accum += np.bincount(bins, weights=period.ravel(), minlength=n_bins)
    power = accum / len(snaps)
    return RadialSpectrum(wavenumber=np.arange(n_bins), power=power)


def parseval_residual(t: EnsembleTensor, spectrum: RadialSpectrum | None = None) -> float:
    """|sum of binned power - snapshot-mean second moment| (0 in exact arithmetic)."""
    if spectrum is None:
        spectrum = radial_psd(t)
    snaps = t.values.reshape(-1, t.n_rows, t.n_cols).astype(np.float64)
    second_moment = float(np.mean([np.mean(s**2) for s in snaps]))
    return abs(spectrum.total_power - second_moment)


# ---------------------------------------------------------------------------
# Moments and marginals
# ---------------------------------------------------------------------------


def moment_maps(t: EnsembleTensor) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel mean and population standard deviation pooled over samples x steps."""
    pooled = t.values.reshape(-1, t.n_rows, t.n_cols).astype(np.float64)
    return pooled.mean(axis=0), pooled.std(axis=0, ddof=0)


def marginal_band(t: EnsembleTensor, quantiles) -> np.ndarray:
    """(len(quantiles), H, W) per-pixel empirical quantiles, linear interpolation."""
    quantiles = np.asarray(quantiles, dtype=np.float64)
    if quantiles.size == 0:
        raise ValidationError("quantile list must be nonempty")
    if np.any((quantiles <= 0) | (quantiles >= 1)):
        raise ValidationError("quantiles must lie strictly inside (0, 1)")
    pooled = t.values.reshape(-1, t.n_rows, t.n_cols).astype(np.float64)
    return np.quantile(pooled, quantiles, axis=0)
