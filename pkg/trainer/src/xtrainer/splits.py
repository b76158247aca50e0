"""Deterministic extreme-aware train/test splits.

Events are (sample, step) snapshots ranked by spatial mean; the hottest
``top_k`` are flagged (ties broken by flat snapshot index, so the flag set
is reproducible). A sample is contaminated if it contains any flagged
snapshot: NoExtreme removes such samples entirely, ExtremeOnly keeps only
them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ExperimentSplit


@dataclass(frozen=True)
class SplitResult:
    train_values: np.ndarray
    test_values: np.ndarray
    train_indices: np.ndarray
    test_indices: np.ndarray
    flagged: np.ndarray  # (S, T) event mask
    n_flagged: int

    @property
    def counts(self) -> dict:
        return {
            "train_samples": int(len(self.train_indices)),
            "test_samples": int(len(self.test_indices)),
            "flagged_events": int(self.n_flagged),
        }


def flag_extreme_events(values: np.ndarray, top_k: int) -> np.ndarray:
    """(S, T) boolean mask of the top_k spatial-mean snapshots."""
    s_n, n_t = values.shape[:2]
    if top_k > s_n * n_t:
        raise ValueError(f"top_k={top_k} exceeds the {s_n * n_t} available snapshots")
    means = values.mean(axis=(2, 3)).ravel()
    flagged = np.zeros(s_n * n_t, dtype=bool)
    if top_k > 0:
        order = np.argsort(-means, kind="stable")
        flagged[order[:top_k]] = True
    return flagged.reshape(s_n, n_t)


def split_unseen(values: np.ndarray, rule: ExperimentSplit) -> SplitResult:
    """Materialize the train and test variants of one experiment row."""
    if values.ndim != 4:
        raise ValueError("values must be (samples, steps, rows, cols)")
    s_n, n_t = values.shape[:2]
    if s_n * n_t < 100:
        raise ValueError(f"need at least 100 snapshots, got {s_n * n_t}")
    flagged = flag_extreme_events(values, rule.top_k)
    contaminated = flagged.any(axis=1)
    variants = {
        "Complete": np.arange(s_n),
        "NoExtreme": np.flatnonzero(~contaminated),
        "ExtremeOnly": np.flatnonzero(contaminated),
    }
    train_idx = variants[rule.train_variant]
    test_idx = variants[rule.test_variant]
    if len(train_idx) == 0:
        raise ValueError(f"{rule.train_variant!r} training variant is empty under top_k={rule.top_k}")
    return SplitResult(
        train_values=values[train_idx],
        test_values=values[test_idx] if len(test_idx) else values[:0],
        train_indices=train_idx,
        test_indices=test_idx,
        flagged=flagged,
        n_flagged=int(flagged.sum()),
    )
