"""Generator and critic for spatiotemporal field sequences.

Generator: per-step latent -> LSTM -> per-frame fully connected seed ->
two transposed-conv upsamplings to the target grid. Critic: per-frame conv
stack -> LSTM over time -> linear head, returning a feature sequence used
as the transport cost space. Grids must be square with side 4 * 2^k.
"""

from __future__ import annotations

import torch
from torch import nn


def _upsamplings(side: int) -> int:
    k, s = 0, 4
    while s < side:
        s *= 2
        k += 1
    if s != side:
        raise ValueError(f"grid side must be 4 * 2^k, got {side}")
    return k


class SequenceGenerator(nn.Module):
    def __init__(self, latent_dim: int, n_steps: int, side: int, hidden_dim: int = 64,
                 channels: int = 32):
        super().__init__()
        self.latent_dim = latent_dim
        self.n_steps = n_steps
        self.side = side
        n_up = _upsamplings(side)
        self.lstm = nn.LSTM(latent_dim, hidden_dim, batch_first=True)
        self.seed = nn.Linear(hidden_dim, channels * 16)
        ups = []
        ch = channels
        for _ in range(n_up):
            ups += [nn.ConvTranspose2d(ch, max(ch // 2, 8), 4, stride=2, padding=1),
                    nn.LeakyReLU(0.2)]
            ch = max(ch // 2, 8)
        ups.append(nn.Conv2d(ch, 1, 3, padding=1))
        self.upsample = nn.Sequential(*ups)
        self.channels = channels

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        """(B, T, latent) -> (B, T, side, side), standardized scale."""
        b, t, _ = z.shape
        h, _ = self.lstm(z)
        frames = self.seed(h.reshape(b * t, -1))
        frames = torch.nn.functional.leaky_relu(frames, 0.2)
        frames = frames.view(b * t, self.channels, 4, 4)
        out = self.upsample(frames)
        return out.view(b, t, self.side, self.side)


class SequenceCritic(nn.Module):
    """Maps (B, T, C, H, W) fused sequences to (B, T, feature) trajectories.

    Convolutions and the head carry spectral normalization and the features
    pass through a scaled tanh, bounding the transport cost the critic can
    induce; without that the adversarial game inflates the cost scale
    instead of sharpening the comparison.
    """

    def __init__(self, in_channels: int, side: int, hidden_dim: int = 64, channels: int = 32,
                 feature_dim: int = 32, feature_scale: float = 3.0):
        super().__init__()
        sn = nn.utils.parametrizations.spectral_norm
        n_down = _upsamplings(side)
        convs = []
        ch_in = in_channels
        ch = channels
        for _ in range(n_down):
            convs += [sn(nn.Conv2d(ch_in, ch, 4, stride=2, padding=1)), nn.LeakyReLU(0.2)]
            ch_in, ch = ch, ch * 2
        self.convs = nn.Sequential(*convs)
        self.flat_dim = ch_in * 16
        self.lstm = nn.LSTM(self.flat_dim, hidden_dim, batch_first=True)
        self.head = sn(nn.Linear(hidden_dim, feature_dim))
        self.feature_scale = feature_scale

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, t, c, h, w = x.shape
        frames = self.convs(x.reshape(b * t, c, h, w))
        seq = frames.reshape(b, t, self.flat_dim)
        out, _ = self.lstm(seq)
        return self.feature_scale * torch.tanh(self.head(out))
