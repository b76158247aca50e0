"""Configuration dataclasses for training and the unseen-split protocol."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TrainerConfig:
    """Hyperparameters for one adversarial run.

    ``mode='baseline'`` is the autocorrelation-only special case and is
    locked to (theta_a, theta_b) = (1, 0); ``mode='deepx'`` adds the
    tail-dependence weighting to the embedding channel.
    """

    mode: str = "deepx"
    theta_a: float = 0.5
    theta_b: float = 0.5
    length_scale: float = 2.0
    q: float = 0.90
    latent_dim: int = 32
    iterations: int = 2000
    batch_size: int = 64
    learning_rate: float = 1e-4
    critic_every: int = 2
    sinkhorn_epsilon: float = 1.0
    sinkhorn_iterations: int = 30
    embedding_loss_weight: float = 1.0
    hidden_dim: int = 64
    conv_channels: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("deepx", "baseline"):
            raise ValueError(f"mode must be 'deepx' or 'baseline', got {self.mode!r}")
        if self.mode == "baseline" and (self.theta_a, self.theta_b) != (1.0, 0.0):
            raise ValueError("baseline mode requires (theta_a, theta_b) = (1, 0)")
        if self.mode == "deepx" and self.theta_b == 0.0 and self.theta_a == 1.0:
            raise ValueError("(1, 0) is the baseline; set mode='baseline'")
        if not (0 <= self.theta_a <= 1 and 0 <= self.theta_b <= 1):
            raise ValueError("theta_a, theta_b must lie in [0, 1]")
        if self.theta_a + self.theta_b <= 0:
            raise ValueError("theta_a + theta_b must be positive")
        for name in ("length_scale", "learning_rate", "sinkhorn_epsilon"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not (0 < self.q < 1):
            raise ValueError("q must lie in (0, 1)")
        if min(self.latent_dim, self.iterations, self.batch_size, self.critic_every) < 1:
            raise ValueError("latent_dim, iterations, batch_size, critic_every must be >= 1")

    @classmethod
    def baseline(cls, **kw) -> "TrainerConfig":
        kw.update(mode="baseline", theta_a=1.0, theta_b=0.0)
        return cls(**kw)


@dataclass(frozen=True)
class ExperimentSplit:
    """Variant selection for the zero-shot protocol.

    Snapshots are ranked by spatial mean; the hottest ``top_k`` are flagged
    as extreme events. ``NoExtreme`` drops every sample containing at least
    one flagged event; ``ExtremeOnly`` keeps exactly those samples.
    """

    train_variant: str = "Complete"
    test_variant: str = "ExtremeOnly"
    top_k: int = 100

    _TRAIN = ("Complete", "NoExtreme")
    _TEST = ("Complete", "NoExtreme", "ExtremeOnly")

    def __post_init__(self):
        if self.train_variant not in self._TRAIN:
            raise ValueError(f"train_variant must be one of {self._TRAIN}")
        if self.test_variant not in self._TEST:
            raise ValueError(f"test_variant must be one of {self._TEST}")
        if self.top_k < 0:
            raise ValueError("top_k must be >= 0")
