"""Entropy-regularized transport loss in critic feature space.

The adversarial objective is the mixed Sinkhorn divergence inherited from
the causal-transport line of sequence GANs, used here as a black-box loss:
each batch is split into two halves (x1, x2 real; y1, y2 generated) and

    L = W(x1, y1) + W(x2, y2) - W(x1, x2) - W(y1, y2)

with W the entropic transport cost between feature trajectories under the
squared-distance-per-step ground cost, uniform marginals, and a fixed
number of log-domain Sinkhorn sweeps. The generator minimizes L, the
critic maximizes it. The self-terms debias the batch estimate, so L sits
near zero for matched distributions instead of at the entropic floor.
"""

from __future__ import annotations

import torch


def _pairwise_cost(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """Mean-over-steps squared distance between feature sequences.

    a: (Na, T, d), b: (Nb, T, d) -> (Na, Nb).
    """
    diff = a[:, None] - b[None, :]
    return diff.pow(2).mean(dim=(2, 3))


def sinkhorn_cost(
    a: torch.Tensor, b: torch.Tensor, epsilon: float = 1.0, iterations: int = 30
) -> torch.Tensor:
    """Entropic transport cost <P, C> with uniform marginals, log-domain.

    The fixed-point sweeps run without autograd and the loss is the cost
    contracted against the converged (frozen) plan, so the gradient is the
    plan itself, the envelope gradient at convergence. This skips the
    expensive backward pass through the iteration chain.
    """
    cost = _pairwise_cost(a, b)
    n_a, n_b = cost.shape
    with torch.no_grad():
        raw = cost.detach()
        log_mu = torch.full((n_a,), -torch.log(torch.tensor(float(n_a))), device=cost.device)
        log_nu = torch.full((n_b,), -torch.log(torch.tensor(float(n_b))), device=cost.device)
        f = torch.zeros(n_a, device=cost.device)
        g = torch.zeros(n_b, device=cost.device)
        for _ in range(iterations):
            f = -epsilon * torch.logsumexp((-raw + g[None, :]) / epsilon + log_nu[None, :], dim=1)
            g = -epsilon * torch.logsumexp((-raw + f[:, None]) / epsilon + log_mu[:, None], dim=0)
        log_plan = (-raw + f[:, None] + g[None, :]) / epsilon + log_mu[:, None] + log_nu[None, :]
        plan = log_plan.exp()
    return (plan * cost).sum()


def mixed_sinkhorn(
    real_feats: torch.Tensor,
    fake_feats: torch.Tensor,
    epsilon: float = 1.0,
    iterations: int = 30,
) -> torch.Tensor:
    """Half-batch pairing: cross terms minus the two self terms."""
    half_r = real_feats.shape[0] // 2
    half_f = fake_feats.shape[0] // 2
    if half_r < 1 or half_f < 1:
        raise ValueError("need at least 2 sequences per side for the mixed pairing")
    x1, x2 = real_feats[:half_r], real_feats[half_r : 2 * half_r]
    y1, y2 = fake_feats[:half_f], fake_feats[half_f : 2 * half_f]
    return (
        sinkhorn_cost(x1, y1, epsilon, iterations)
        + sinkhorn_cost(x2, y2, epsilon, iterations)
        - sinkhorn_cost(x1, x2, epsilon, iterations)
        - sinkhorn_cost(y1, y2, epsilon, iterations)
    )


def embedding_match_loss(real_embed: torch.Tensor, fake_embed: torch.Tensor) -> torch.Tensor:
    """Match batch statistics of the embedding channel (mean and scale)."""
    mean_gap = (real_embed.mean(dim=0) - fake_embed.mean(dim=0)).pow(2).mean()
    std_gap = (real_embed.std(dim=0) - fake_embed.std(dim=0)).pow(2).mean()
    return mean_gap + std_gap
