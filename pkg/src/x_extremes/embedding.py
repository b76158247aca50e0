"""Dependence-enhanced space-time embedding metric.

For each sample, pixel i, and step t the metric combines the pixel's
deviation from a mixed space-time expectation with the deviations of its
grid neighbors:

    metric_it = (n - 1) * z_it / sum_j z_jt^2 * sum_{j != i} w_ij z_jt
    z_it      = x_it - (theta_a * mu_a_it + theta_b * mu_b_it)

mu_a couples the current spatial snapshot with an exponentially-weighted
sum of the pixel's past; mu_b reweights the spatial sum by joint upper-tail
exceedance indicators and the pairwise extremal-correlation matrix, so that
tail-synchronized neighborhoods pull the expectation. With theta = (1, 0)
the metric collapses to the plain space-time autocorrelation baseline.

Conventions locked here and mirrored by every consumer:
  - the first step has no past: z and the metric are defined as 0 there;
  - mu_b's denominator is the same unweighted sum as mu_a's (the numerator
    alone carries the exceedance/chi weights);
  - spatial sums in the expectations include j = i, the neighbor-deviation
    sum excludes it;
  - per-pixel CDFs pool all samples and steps (mid-rank plotting position).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, ValidationError
from .tensor import EnsembleTensor, pooled_rank_matrix


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Symmetric pixel neighborhood on the grid, truncated at boundaries.

    kinds: ``moore-8`` (the 8 surrounding cells), ``von-neumann-4`` (the 4
    orthogonal cells), ``radius-k`` (all cells within Euclidean distance
    ``radius``, excluding the center).
    """

    kind: str = "moore-8"
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in ("moore-8", "von-neumann-4", "radius-k"):
            raise ConfigError(f"unknown neighborhood kind {self.kind!r}")
        if self.kind == "radius-k" and self.radius < 1.0:
            raise ConfigError("radius-k neighborhood needs radius >= 1")

    def offsets(self) -> tuple[tuple[int, int], ...]:
        if self.kind == "moore-8":
            return tuple((dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0))
        if self.kind == "von-neumann-4":
            return ((-1, 0), (0, -1), (0, 1), (1, 0))
        r = int(np.floor(self.radius))
        offs = [
            (dy, dx)
            for dy in range(-r, r + 1)
            for dx in range(-r, r + 1)
            if (dy, dx) != (0, 0) and dy * dy + dx * dx <= self.radius * self.radius
        ]
        return tuple(offs)

    def max_neighbors(self) -> int:
        return len(self.offsets())

    def adjacency(self, n_rows: int, n_cols: int) -> np.ndarray:
        """(n, n) binary weight matrix, zero diagonal, symmetric."""
        n = n_rows * n_cols
        w = np.zeros((n, n), dtype=np.float64)
        rows, cols = np.divmod(np.arange(n), n_cols)
        for dy, dx in self.offsets():
            r2, c2 = rows + dy, cols + dx
            ok = (r2 >= 0) & (r2 < n_rows) & (c2 >= 0) & (c2 < n_cols)
            w[np.arange(n)[ok], (r2 * n_cols + c2)[ok]] = 1.0
        return w

    def neighbor_counts(self, n_rows: int, n_cols: int) -> np.ndarray:
        """(n_rows, n_cols) count of in-grid neighbors (truncated at edges)."""
        return self.adjacency(n_rows, n_cols).sum(axis=1).reshape(n_rows, n_cols).astype(int)


@dataclass(frozen=True)
class EmbeddingConfig:
    theta_a: float = 1.0
    theta_b: float = 0.0
    length_scale: float = 1.0
    q: float = 0.90
    neighborhood: NeighborhoodSpec = NeighborhoodSpec()
    denominator_epsilon: float = 1e-8

    def __post_init__(self):
        if not (0.0 <= self.theta_a <= 1.0 and 0.0 <= self.theta_b <= 1.0):
            raise ConfigError("theta_a and theta_b must lie in [0, 1]")
        if not (0.0 < self.theta_a + self.theta_b <= 2.0):
            raise ConfigError("theta_a + theta_b must lie in (0, 2]")
        if self.length_scale <= 0:
            raise ConfigError("length_scale must be > 0")
        if not (0.0 < self.q < 1.0):
            raise ConfigError("q must lie in (0, 1)")
        if self.denominator_epsilon <= 0:
            raise ConfigError("denominator_epsilon must be > 0")


@dataclass(frozen=True)
class EmbeddingField:
    """Metric values plus companion deviations, aligned with the source tensor."""

    values: np.ndarray
    deviations: np.ndarray
    n_guarded: int  # epsilon substitutions applied to near-zero denominators

    def __post_init__(self):
        if self.values.shape != self.deviations.shape:
            raise ValidationError("values and deviations must be aligned")


def temporal_weights(n_steps: int, length_scale: float) -> np.ndarray:
    """(T, T) strictly-lower-triangular matrix of exp(-(t - t') / l)."""
    t = np.arange(n_steps, dtype=np.float64)
    lag = np.subtract.outer(t, t)
    out = np.where(lag > 0, np.exp(-lag / length_scale), 0.0)
    return out


def _guard(den: np.ndarray, eps: float) -> tuple[np.ndarray, int]:
    small = np.abs(den) < eps
    if not small.any():
        return den, 0
    sign = np.where(den < 0, -1.0, 1.0)
    return np.where(small, sign * eps, den), int(small.sum())


def _exceedance_indicators(t: EnsembleTensor, q: float) -> np.ndarray:
    """(samples, steps, pixels) booleans: pooled plotting position > q."""
    s, n = t.n_samples, t.n_pixels
    return (pooled_rank_matrix(t) > q).reshape(s, t.n_steps, n)


def spacetime_expectation_a(
    t: EnsembleTensor, cfg: EmbeddingConfig, sample: int
) -> np.ndarray:
    """Mixed space-time expectation without tail weighting, one sample.

    Step 0 has no past and is returned as NaN; the metric defines z = 0 there.
    """
    x = t.values[sample].reshape(t.n_steps, t.n_pixels).astype(np.float64)
    b = temporal_weights(t.n_steps, cfg.length_scale)
    past = b @ x  # past[t, i] = sum_{t'<t} b_tt' x_it'
    mu = np.full_like(x, np.nan)  # step 0 has no past
    den, _ = _guard(past[1:].sum(axis=1, keepdims=True), cfg.denominator_epsilon)
    mu[1:] = x[1:].sum(axis=1, keepdims=True) * past[1:] / den
    return mu.reshape(t.n_steps, t.n_rows, t.n_cols)


def spacetime_expectation_b(
    t: EnsembleTensor, cfg: EmbeddingConfig, chi: np.ndarray, sample: int
) -> np.ndarray:
    """Tail-weighted expectation: spatial sum gated by joint exceedances and chi."""
    n = t.n_pixels
    chi = _clean_chi(chi, n)
    x = t.values[sample].reshape(t.n_steps, n).astype(np.float64)
    exceed = _exceedance_indicators(t, cfg.q)[sample].astype(np.float64)
    b = temporal_weights(t.n_steps, cfg.length_scale)
    past = b @ x
    mu = np.full_like(x, np.nan)
    den, _ = _guard(past[1:].sum(axis=1, keepdims=True), cfg.denominator_epsilon)
    gated = ((exceed * x) @ chi.T) * exceed  # sum_j k_ij chi_ij x_jt, k = joint gate
    mu[1:] = gated[1:] * past[1:] / den
    return mu.reshape(t.n_steps, t.n_rows, t.n_cols)


def _clean_chi(chi: np.ndarray, n: int) -> np.ndarray:
    chi = np.asarray(chi, dtype=np.float64)
    if chi.shape != (n, n):
        raise ValidationError(f"chi must be ({n},{n}) to match the grid, got {chi.shape}")
    # Undefined pairs (no conditioning exceedances) can never be selected by
    # the joint-exceedance gate, so any finite placeholder is inert; 0 keeps
    # the arithmetic clean.
    return np.where(np.isfinite(chi), chi, 0.0)


def deepx_metric(
    t: EnsembleTensor,
    cfg: EmbeddingConfig,
    chi: np.ndarray | None = None,
    threads: int = 1,
) -> EmbeddingField:
    """Dependence-enhanced embedding of every sample in the ensemble.

    ``chi`` is the (n, n) pairwise upper-tail dependence matrix; when None
    it is estimated from ``t`` at the config's q (see tail.extremal_correlation).
    """
    from .parallel import thread_map

    s_n, n_steps, h, w = t.values.shape
    n = h * w
    if cfg.theta_b > 0.0:
        if chi is None:
            from .tail import extremal_correlation

            chi = extremal_correlation(t, cfg.q).chi
        chi = _clean_chi(chi, n)
        exceed_all = _exceedance_indicators(t, cfg.q)
    else:
        chi = None
        exceed_all = None

    b = temporal_weights(n_steps, cfg.length_scale)
    w_adj = cfg.neighborhood.adjacency(h, w)
    eps = cfg.denominator_epsilon
    guard_counts = [0] * s_n

    def one_sample(s: int) -> tuple[np.ndarray, np.ndarray]:
        x = t.values[s].reshape(n_steps, n).astype(np.float64)
        past = b @ x
        den, g1 = _guard(past[1:].sum(axis=1, keepdims=True), eps)
        mu = cfg.theta_a * (x[1:].sum(axis=1, keepdims=True) * past[1:] / den)
        if chi is not None:
            exceed = exceed_all[s].astype(np.float64)
            gated = ((exceed * x) @ chi.T) * exceed
            mu = mu + cfg.theta_b * (gated[1:] * past[1:] / den)
        z = np.zeros_like(x)  # first step has no past, z stays 0 there
        z[1:] = x[1:] - mu
        ssq_raw = np.einsum("ti,ti->t", z, z)[:, None]
        ssq, _ = _guard(ssq_raw, eps)
        metric = (n - 1) * z / ssq * (z @ w_adj.T)
        guard_counts[s] = g1 + int((ssq_raw[1:] < eps).sum())  # step 0 is 0 by design
        return metric, z

    results = thread_map(one_sample, range(s_n), threads=threads)
    values = np.stack([m for m, _ in results]).reshape(s_n, n_steps, h, w)
    devs = np.stack([z for _, z in results]).reshape(s_n, n_steps, h, w)
    return EmbeddingField(values=values, deviations=devs, n_guarded=sum(guard_counts))


def baseline_metric(t: EnsembleTensor, cfg: EmbeddingConfig, threads: int = 1) -> EmbeddingField:
    """Autocorrelation-only baseline: theta = (1, 0), no tail machinery."""
    return deepx_metric(t, replace(cfg, theta_a=1.0, theta_b=0.0), chi=None, threads=threads)
