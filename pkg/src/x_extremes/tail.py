"""Pairwise extremal dependence diagnostics.

Everything here is rank-based: estimates are invariant under strictly
increasing marginal transformations, and plotting positions keep empirical
CDFs strictly inside (0, 1) so the unit-Frechet transform never blows up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ValidationError
from .tensor import EnsembleTensor, pooled_rank_matrix, rank_transform


@dataclass(frozen=True)
class ExtremalMatrix:
    """Pairwise upper-tail dependence over row-major pixels.

    chi[i, j] estimates P(pixel i extreme | pixel j extreme) at quantile q;
    NaN where pixel j never exceeds (empty conditioning set). The estimator
    conditions on the second index; ``symmetrized`` averages both directions.
    """

    chi: np.ndarray
    q: float
    joint_counts: np.ndarray
    marginal_counts: np.ndarray
    n_rows: int
    n_cols: int

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.chi)

    @property
    def symmetrized(self) -> np.ndarray:
        return 0.5 * (self.chi + self.chi.T)

    @property
    def n_undefined_pairs(self) -> int:
        return int((~self.defined).sum())


def extremal_correlation(t: EnsembleTensor, q: float) -> ExtremalMatrix:
    """Empirical upper-tail dependence between every pixel pair.

    chi_ij = #{both i and j exceed q} / #{j exceeds q}, with exceedance
    judged on pooled plotting positions. Requires a pooled sample large
    enough to put ~10 points in the tail: N >= 10 / (1 - q).
    """
    if not (0.0 < q < 1.0):
        raise ValidationError("q must lie in (0, 1)")
    pooled_n = t.n_samples * t.n_steps
    floor = 10.0 / (1.0 - q)
    if pooled_n < floor:
        raise ValidationError(
            f"pooled sample size {pooled_n} below tail floor {floor:.0f} for q={q}"
        )
    exceed = pooled_rank_matrix(t) > q  # (N, n)
    joint = exceed.T.astype(np.float64) @ exceed.astype(np.float64)
    marginal = exceed.sum(axis=0).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        chi = np.where(marginal[None, :] > 0, joint / marginal[None, :], np.nan)
    return ExtremalMatrix(
        chi=chi,
        q=q,
        joint_counts=joint.astype(np.int64),
        marginal_counts=marginal.astype(np.int64),
        n_rows=t.n_rows,
        n_cols=t.n_cols,
    )


def chi_pair(x: np.ndarray, y: np.ndarray, q: float) -> float:
    """Upper-tail dependence of two aligned series, conditioning on the second."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("series must be aligned 1-D arrays")
    ex = rank_transform(x) > q
    ey = rank_transform(y) > q
    denom = int(ey.sum())
    if denom == 0:
        raise ValidationError("empty conditioning set: second series never exceeds q")
    return float((ex & ey).sum() / denom)


def chi_rmse(real: ExtremalMatrix, gen: ExtremalMatrix) -> float:
    """RMSE over off-diagonal pairs defined in both matrices."""
    if real.chi.shape != gen.chi.shape:
        raise ValidationError("matrices must have matched shapes")
    if real.q != gen.q:
        raise ValidationError(f"quantiles differ: {real.q} vs {gen.q}")
    mask = real.defined & gen.defined
    np.fill_diagonal(mask, False)
    if not mask.any():
        raise ValidationError("no common defined off-diagonal pairs")
    diff = real.chi[mask] - gen.chi[mask]
    return float(np.sqrt(np.mean(diff**2)))


# ---------------------------------------------------------------------------
# Spectral distribution of extremal angles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralSample:
    """Pseudo-polar angles of the joint upper tail of one pixel pair.

    Margins are mapped to unit Frechet via -1/log(F); points whose
    pseudo-radius exceeds the ``radial_q`` empirical quantile are kept and
    summarized by the angle omega in [0, 1]. Dependent pairs pile mass near
    0.5, independent pairs near the endpoints {0, 1}.
    """

    angles: np.ndarray
    radial_threshold: float
    radial_q: float
    n_total: int

    @property
    def n_retained(self) -> int:
        return len(self.angles)

    def mean_angle(self) -> float:
        if self.n_retained == 0:
            raise ValidationError("no retained points")
        return float(self.angles.mean())


def spectral_distribution(x: np.ndarray, y: np.ndarray, radial_q: float = 0.95) -> SpectralSample:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("series must be aligned 1-D arrays")
    if len(x) < 100:
        raise ValidationError(f"series too short for tail work: {len(x)} < 100")
    if not (0.0 < radial_q < 1.0):
        raise ValidationError("radial_q must lie in (0, 1)")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ValidationError("degenerate constant series")
    fx = -1.0 / np.log(rank_transform(x))
    fy = -1.0 / np.log(rank_transform(y))
    radius = fx + fy
    u = float(np.quantile(radius, radial_q))
    keep = radius > u
    angles = fx[keep] / radius[keep]
    return SpectralSample(angles=angles, radial_threshold=u, radial_q=radial_q, n_total=len(x))


def spectral_wasserstein(a: SpectralSample, b: SpectralSample) -> float:
    """Order-statistics Wasserstein-1 distance between two angle samples."""
    if a.n_retained == 0 or b.n_retained == 0:
        raise ValidationError("both spectral samples must be nonempty")
    return float(stats.wasserstein_distance(a.angles, b.angles))


# ---------------------------------------------------------------------------
# Rank correlation and return-period diagnostics
# ---------------------------------------------------------------------------


def kendall_tau(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Kendall's tau-b with tie correction; p-value from the normal approximation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("series must be aligned 1-D arrays")
    if len(x) < 10:
        raise ValidationError(f"need >= 10 observations, got {len(x)}")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ValidationError("constant series: tau undefined")
    res = stats.kendalltau(x, y, variant="b", method="asymptotic")
    return float(res.statistic), float(res.pvalue)


def bivariate_return_amplification(
    real: np.ndarray, gen: np.ndarray, level: tuple[float, float]
) -> float:
    """Ratio of generated to real joint AND-exceedance return periods.

    Inputs are (N, 2) paired block maxima; the joint return period at
    ``level`` = (x, y) is 1 / P(X > x and Y > y), estimated empirically in
    each set. Values < 1 mean the generated set makes the joint event more
    frequent than the data does.
    """
    real = np.asarray(real, dtype=np.float64)
    gen = np.asarray(gen, dtype=np.float64)
    for name, arr in (("real", real), ("gen", gen)):
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValidationError(f"{name} must be (N, 2) paired maxima")
        if arr.shape[0] < 20:
            raise ValidationError(f"{name} needs >= 20 paired maxima, got {arr.shape[0]}")
    x, y = float(level[0]), float(level[1])
    p_real = float(np.mean((real[:, 0] > x) & (real[:, 1] > y)))
    p_gen = float(np.mean((gen[:, 0] > x) & (gen[:, 1] > y)))
    if p_real == 0.0 or p_gen == 0.0:
        raise ValidationError("zero empirical joint exceedances: return period undefined")
    return (1.0 / p_gen) / (1.0 / p_real)


# ---------------------------------------------------------------------------
# Co-occurrence counts of threshold exceedances
# ---------------------------------------------------------------------------


def cooccurrence_histogram(t: EnsembleTensor, thresholds: np.ndarray) -> np.ndarray:
    """Distribution of per-snapshot counts of pixels at or above their threshold.

    Returns probabilities over counts 0..n_pixels (length n_pixels + 1).
    Exceedance is >= , matching the at-least-as-severe convention used for
    record-breaking thresholds.
    """
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if thresholds.shape != (t.n_rows, t.n_cols):
        raise ValidationError(
            f"thresholds must be ({t.n_rows},{t.n_cols}), got {thresholds.shape}"
        )
    snaps = t.values.reshape(-1, t.n_rows, t.n_cols)
    counts = (snaps >= thresholds[None, :, :]).sum(axis=(1, 2))
    hist = np.bincount(counts, minlength=t.n_pixels + 1).astype(np.float64)
    return hist / hist.sum()


def binomial_count_pmf(n_pixels: int, p: float) -> np.ndarray:
    """Reference pmf when every pixel exceeds independently with probability p."""
    if not (0.0 <= p <= 1.0):
        raise ValidationError("p must lie in [0, 1]")
    return stats.binom.pmf(np.arange(n_pixels + 1), n_pixels, p)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValidationError("distributions must share support")
    return float(0.5 * np.abs(p - q).sum())


__all__ = [
    "ExtremalMatrix",
    "SpectralSample",
    "extremal_correlation",
    "chi_pair",
    "chi_rmse",
    "spectral_distribution",
    "spectral_wasserstein",
    "kendall_tau",
    "bivariate_return_amplification",
    "cooccurrence_histogram",
    "binomial_count_pmf",
    "total_variation",
]
