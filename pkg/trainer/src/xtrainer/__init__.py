"""Toy-scale adversarial trainer with a tail-dependence embedding channel."""

from .config import ExperimentSplit, TrainerConfig
from .container import load_tensor, save_tensor
from .embedding import DeepxEmbedder, embed_tensor, tail_dependence_matrix
from .splits import SplitResult, flag_extreme_events, split_unseen
from .training import (
    Checkpoint,
    TrainingDiverged,
    generate,
    load_checkpoint,
    reconstruction_loss,
    save_checkpoint,
    train,
)

__version__ = "0.1.0"
