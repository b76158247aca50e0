"""Differentiable tail-aware space-time embedding channel.

Semantics intentionally match the core package's metric bit for bit at the
formula level: mid-rank plotting positions pooled per pixel, exceedance
gates F > q, pairwise upper-tail dependence conditioned on the second
pixel, exponential temporal kernel over strictly-past steps, unweighted
denominator in the tail-weighted expectation, first step defined as zero,
epsilon floors on degenerate denominators. The parity test drives both
implementations over shared fixture files.

Two entry points:
  - ``embed_tensor``       self-referential (gates and chi estimated from
                           the input itself), used for fixtures/evaluation;
  - ``DeepxEmbedder``      gates and chi frozen from a reference set, used
                           inside the training loop so generated samples
                           are judged against the real data's tail geometry.
"""

from __future__ import annotations

import numpy as np
import torch


def _mid_rank_positions(values: np.ndarray) -> np.ndarray:
    """(N, n) mid-rank plotting positions per column, rank/(N+1)."""
    n_obs = values.shape[0]
    order = np.argsort(values, axis=0, kind="stable")
    ranks = np.empty_like(values, dtype=np.float64)
    base = np.arange(1, n_obs + 1, dtype=np.float64)
    for col in range(values.shape[1]):
        sorted_vals = values[order[:, col], col]
        avg = base.copy()
        # average ranks across tied runs
        start = 0
        while start < n_obs:
            end = start
            while end + 1 < n_obs and sorted_vals[end + 1] == sorted_vals[start]:
                end += 1
            avg[start : end + 1] = 0.5 * (base[start] + base[end])
            start = end + 1
        ranks[order[:, col], col] = avg
    return ranks / (n_obs + 1.0)


def tail_dependence_matrix(values: np.ndarray, q: float) -> np.ndarray:
    """chi[i, j] = #{i and j beyond q} / #{j beyond q}; 0 where undefined."""
    pooled = values.reshape(-1, values.shape[-2] * values.shape[-1]) if values.ndim == 4 else values
    exceed = _mid_rank_positions(np.asarray(pooled, dtype=np.float64)) > q
    joint = exceed.T.astype(np.float64) @ exceed.astype(np.float64)
    marginal = exceed.sum(axis=0).astype(np.float64)
    chi = np.divide(joint, marginal[None, :], out=np.zeros_like(joint), where=marginal[None, :] > 0)
    return chi


def temporal_kernel(n_steps: int, length_scale: float, dtype, device) -> torch.Tensor:
    t = torch.arange(n_steps, dtype=dtype, device=device)
    lag = t[:, None] - t[None, :]
    return torch.where(lag > 0, torch.exp(-lag / length_scale), torch.zeros((), dtype=dtype, device=device))


def neighbor_matrix(h: int, w: int, dtype, device) -> torch.Tensor:
    """Moore-8 adjacency, truncated at boundaries, zero diagonal."""
    n = h * w
    adj = torch.zeros((n, n), dtype=dtype, device=device)
    idx = torch.arange(n)
    rows, cols = idx // w, idx % w
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if (dy, dx) == (0, 0):
                continue
            r2, c2 = rows + dy, cols + dx
            ok = (r2 >= 0) & (r2 < h) & (c2 >= 0) & (c2 < w)
            adj[idx[ok], (r2 * w + c2)[ok]] = 1.0
    return adj


def _metric_from_parts(
    x: torch.Tensor,
    gates: torch.Tensor,
    chi: torch.Tensor,
    adj: torch.Tensor,
    kernel: torch.Tensor,
    theta_a: float,
    theta_b: float,
    eps: float,
) -> torch.Tensor:
    """Shared core: x and gates are (B, T, n); returns (B, T, n)."""
    past = torch.einsum("ts,bsn->btn", kernel, x)
    den = past.sum(dim=2, keepdim=True)
    den = torch.where(den.abs() < eps, torch.where(den < 0, -eps * torch.ones_like(den), eps * torch.ones_like(den)), den)
    mu = theta_a * (x.sum(dim=2, keepdim=True) * past / den)
    if theta_b != 0.0:
        gated = (gates * x) @ chi.T * gates
        mu = mu + theta_b * (gated * past / den)
    z = x - mu
    z = torch.cat([torch.zeros_like(z[:, :1]), z[:, 1:]], dim=1)  # no past at step 0
    ssq = (z * z).sum(dim=2, keepdim=True).clamp_min(eps)
    n = x.shape[2]
    return (n - 1) * z / ssq * (z @ adj.T)


def embed_tensor(
    values: np.ndarray,
    theta_a: float,
    theta_b: float,
    length_scale: float,
    q: float,
    eps: float = 1e-8,
    dtype: torch.dtype = torch.float64,
) -> np.ndarray:
    """Self-referential embedding of a (S, T, H, W) array; returns same shape."""
    s_n, n_t, h, w = values.shape
    n = h * w
    flat = np.asarray(values, dtype=np.float64).reshape(s_n * n_t, n)
    x = torch.as_tensor(flat.reshape(s_n, n_t, n), dtype=dtype)
    if theta_b != 0.0:
        gates = torch.as_tensor(
            (_mid_rank_positions(flat) > q).reshape(s_n, n_t, n), dtype=dtype
        )
        chi = torch.as_tensor(tail_dependence_matrix(flat, q), dtype=dtype)
    else:
        gates = torch.zeros_like(x)
        chi = torch.zeros((n, n), dtype=dtype)
    adj = neighbor_matrix(h, w, dtype, x.device)
    kernel = temporal_kernel(n_t, length_scale, dtype, x.device)
    out = _metric_from_parts(x, gates, chi, adj, kernel, theta_a, theta_b, eps)
    return out.reshape(s_n, n_t, h, w).numpy()


class DeepxEmbedder:
    """Embedding channel with gates/chi frozen from a reference ensemble.

    Per-pixel gate thresholds are the reference values whose plotting
    position sits at q, so for new (generated) fields the gate is a plain
    value comparison and the whole map stays differentiable in the inputs
    almost everywhere.
    """

    def __init__(
        self,
        reference: np.ndarray,
        theta_a: float,
        theta_b: float,
        length_scale: float,
        q: float,
        eps: float = 1e-8,
        dtype: torch.dtype = torch.float32,
        device: str = "cpu",
    ):
        s_n, n_t, h, w = reference.shape
        self.theta_a, self.theta_b, self.eps = theta_a, theta_b, eps
        self.shape = (n_t, h, w)
        n = h * w
        flat = np.asarray(reference, dtype=np.float64).reshape(s_n * n_t, n)
        if theta_b != 0.0:
            positions = _mid_rank_positions(flat)
            # smallest reference value whose plotting position clears q;
            # +inf when the pixel never clears it (gate never opens)
            thresh = np.full(n, np.inf)
            beyond = positions > q
            for p in range(n):
                if beyond[:, p].any():
                    thresh[p] = flat[beyond[:, p], p].min()
            chi = tail_dependence_matrix(flat, q)
        else:
            thresh = np.full(n, np.inf)
            chi = np.zeros((n, n))
        self.thresholds = torch.as_tensor(thresh, dtype=dtype, device=device)
        self.chi = torch.as_tensor(chi, dtype=dtype, device=device)
        self.adj = neighbor_matrix(h, w, dtype, device)
        self.kernel = temporal_kernel(n_t, length_scale, dtype, device)

    def __call__(self, fields: torch.Tensor) -> torch.Tensor:
        """(B, T, H, W) -> (B, T, H, W); differentiable in ``fields``."""
        b, n_t, h, w = fields.shape
        x = fields.reshape(b, n_t, h * w)
        gates = (x >= self.thresholds[None, None, :]).to(x.dtype)
        out = _metric_from_parts(
            x, gates, self.chi, self.adj, self.kernel, self.theta_a, self.theta_b, self.eps
        )
        return out.reshape(b, n_t, h, w)
