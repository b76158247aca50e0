"""Adversarial training loop, checkpointing, generation, reconstruction.

The generator and critic trade updates on the mixed Sinkhorn objective in
critic feature space; both the real and generated sequences are fused with
their embedding channel before entering the critic, and the generator
additionally matches the batch statistics of the embedding channel
(weighted by ``embedding_loss_weight``). Fields are standardized with the
training set's mean/std; generation undoes the scaling.

Checkpoint file layout: 8-byte magic ``XCKPT01\\n``, LE uint32 JSON length,
UTF-8 JSON header (config + normalization + shapes), then the torch state
payload. The header is readable without torch.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass, asdict

import numpy as np
import torch

from .config import TrainerConfig
from .embedding import DeepxEmbedder
from .losses import embedding_match_loss, mixed_sinkhorn
from .models import SequenceCritic, SequenceGenerator

CKPT_MAGIC = b"XCKPT01\n"


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class Checkpoint:
    config: TrainerConfig
    n_steps: int
    side: int
    norm_mean: float
    norm_std: float
    generator_state: dict
    critic_state: dict
    generator_losses: list
    critic_losses: list

    def build_generator(self) -> SequenceGenerator:
        gen = SequenceGenerator(
            self.config.latent_dim, self.n_steps, self.side,
            hidden_dim=self.config.hidden_dim, channels=self.config.conv_channels,
        )
        gen.load_state_dict(self.generator_state)
        gen.eval()
        return gen


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    header = {
        "config": asdict(ckpt.config),
        "n_steps": ckpt.n_steps,
        "side": ckpt.side,
        "norm_mean": ckpt.norm_mean,
        "norm_std": ckpt.norm_std,
        "generator_losses": ckpt.generator_losses,
        "critic_losses": ckpt.critic_losses,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    buf = io.BytesIO()
    torch.save({"generator": ckpt.generator_state, "critic": ckpt.critic_state}, buf)
    with open(path, "wb") as fh:
        fh.write(CKPT_MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(buf.getvalue())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != CKPT_MAGIC:
            raise ValueError(f"{path}: not a trainer checkpoint")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        states = torch.load(io.BytesIO(fh.read()), weights_only=True)
    return Checkpoint(
        config=TrainerConfig(**header["config"]),
        n_steps=header["n_steps"],
        side=header["side"],
        norm_mean=header["norm_mean"],
        norm_std=header["norm_std"],
        generator_state=states["generator"],
        critic_state=states["critic"],
        generator_losses=header["generator_losses"],
        critic_losses=header["critic_losses"],
    )


def _fuse(fields: torch.Tensor, embedder: DeepxEmbedder) -> torch.Tensor:
    """(B, T, H, W) -> (B, T, 2, H, W): data channel + embedding channel."""
    return torch.stack([fields, embedder(fields)], dim=2)


def train(cfg: TrainerConfig, train_values: np.ndarray) -> Checkpoint:
    """Train on a (samples, steps, rows, cols) array; returns a checkpoint."""
    if train_values.ndim != 4:
        raise ValueError("training data must be (samples, steps, rows, cols)")
    s_n, n_steps, h, w = train_values.shape
    if h != w:
        raise ValueError(f"grids must be square, got {h}x{w}")
    if s_n < 4:
        raise ValueError("need at least 4 training samples")
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    mean = float(train_values.mean())
    std = float(train_values.std()) or 1.0
    data = torch.as_tensor((train_values - mean) / std, dtype=torch.float32)

    embedder = DeepxEmbedder(
        (train_values - mean) / std, cfg.theta_a, cfg.theta_b, cfg.length_scale, cfg.q
    )
    generator = SequenceGenerator(
        cfg.latent_dim, n_steps, h, hidden_dim=cfg.hidden_dim, channels=cfg.conv_channels
    )
    critic = SequenceCritic(2, h, hidden_dim=cfg.hidden_dim, channels=cfg.conv_channels)
    opt_g = torch.optim.Adam(generator.parameters(), lr=cfg.learning_rate)
    opt_c = torch.optim.Adam(critic.parameters(), lr=cfg.learning_rate)

    batch = min(cfg.batch_size, s_n)
    gen_losses, critic_losses = [], []
    for step in range(cfg.iterations):
        idx = rng.integers(0, s_n, size=batch)
        real = data[idx]
        z = torch.randn(batch, n_steps, cfg.latent_dim)
        fake = generator(z)
        fused_real = _fuse(real, embedder)
        fused_fake = _fuse(fake, embedder)

        if step % cfg.critic_every == 0:
            feats_real = critic(fused_real.detach())
            feats_fake = critic(fused_fake.detach())
            loss_c = -mixed_sinkhorn(
                feats_real, feats_fake, cfg.sinkhorn_epsilon, cfg.sinkhorn_iterations
            )
            opt_c.zero_grad()
            loss_c.backward()
            opt_c.step()
            critic_losses.append(float(loss_c.detach()))

        feats_real = critic(fused_real)
        feats_fake = critic(fused_fake)
        transport = mixed_sinkhorn(
            feats_real, feats_fake, cfg.sinkhorn_epsilon, cfg.sinkhorn_iterations
        )
        embed_gap = embedding_match_loss(fused_real[:, :, 1], fused_fake[:, :, 1])
        loss_g = transport + cfg.embedding_loss_weight * embed_gap
        if not torch.isfinite(loss_g):
            raise TrainingDiverged(f"non-finite generator loss at iteration {step}")
        opt_g.zero_grad()
        loss_g.backward()
        opt_g.step()
        gen_losses.append(float(loss_g.detach()))

    return Checkpoint(
        config=cfg,
        n_steps=n_steps,
        side=h,
        norm_mean=mean,
        norm_std=std,
        generator_state=generator.state_dict(),
        critic_state=critic.state_dict(),
        generator_losses=gen_losses,
        critic_losses=critic_losses,
    )


def generate(ckpt: Checkpoint, n: int, seed: int) -> np.ndarray:
    """Draw n sequences in data units; container-ready (n, T, H, W) float32."""
    if n <= 0:
        raise ValueError("need n >= 1 generated samples")
    generator = ckpt.build_generator()
    torch.manual_seed(seed)
    with torch.no_grad():
        z = torch.randn(n, ckpt.n_steps, ckpt.config.latent_dim)
        fields = generator(z).numpy()
    return (fields * ckpt.norm_std + ckpt.norm_mean).astype(np.float32)


def reconstruction_loss(
    ckpt: Checkpoint,
    targets: np.ndarray,
    max_iters: int = 500,
    lr: float = 0.05,
) -> np.ndarray:
    """Zero-initialized latent optimization against each target sequence.

    Returns the per-target final mean-squared error on the standardized
    scale; the fixed (max_iters, lr) budget keeps numbers comparable across
    checkpoints.
    """
    if targets.ndim != 4:
        raise ValueError("targets must be (n, steps, rows, cols)")
    generator = ckpt.build_generator()
    for p in generator.parameters():
        p.requires_grad_(False)
    scaled = torch.as_tensor(
        (targets - ckpt.norm_mean) / ckpt.norm_std, dtype=torch.float32
    )
    n = len(scaled)
    z = torch.zeros(n, ckpt.n_steps, ckpt.config.latent_dim, requires_grad=True)
    opt = torch.optim.Adam([z], lr=lr)
    losses = None
    for _ in range(max_iters):
        out = generator(z)
        per_target = (out - scaled).pow(2).mean(dim=(1, 2, 3))
        loss = per_target.sum()
        if not torch.isfinite(loss):
            raise TrainingDiverged("non-finite reconstruction state")
        opt.zero_grad()
        loss.backward()
        opt.step()
        losses = per_target.detach()
    if max_iters == 0:
        with torch.no_grad():
            losses = (generator(z) - scaled).pow(2).mean(dim=(1, 2, 3))
    return losses.numpy()
