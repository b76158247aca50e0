"""Trainer acceptance suite.

Exercises the cross-package contract (embedding parity over shared fixture
files, container interchange) and the training protocol at toy scale. The
core package is touched only through its CLI and the container format.
Run with ``pytest tests/test_acceptance.py -v -s`` for one PASS line per
criterion; the smoke test trains 2000 iterations and takes a few minutes.
"""

import json

import numpy as np
import pytest
import torch

from conftest import core_cli
from xtrainer.config import ExperimentSplit, TrainerConfig
from xtrainer.container import load_tensor, save_tensor
from xtrainer.embedding import embed_tensor
from xtrainer.splits import split_unseen
from xtrainer.training import generate, reconstruction_loss, train


def _passed(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


# chi estimation needs pooled samples*steps >= 10 / (1 - q)
PARITY_FIXTURES = [
    # (shape, theta_a, theta_b, length_scale, q, low, high, seed)
    ((4, 20, 4, 4), 1.0, 0.0, 2.0, 0.90, 0.5, 1.5, 0),
    ((4, 30, 4, 4), 0.5, 0.5, 2.0, 0.90, 0.5, 1.5, 1),
    ((3, 30, 5, 5), 0.3, 0.7, 1.0, 0.85, 0.0, 2.0, 2),
    ((5, 25, 8, 8), 0.7, 0.3, 5.0, 0.90, 0.5, 1.5, 3),
    ((5, 20, 3, 3), 0.0, 1.0, 2.0, 0.80, 0.5, 1.5, 4),
    ((2, 40, 4, 4), 0.5, 0.5, 0.7, 0.80, 0.0, 1.0, 5),
    ((6, 20, 4, 6), 0.6, 0.4, 3.0, 0.90, 0.5, 1.5, 6),
    ((1, 120, 2, 2), 0.5, 0.5, 2.0, 0.90, 0.5, 1.5, 7),
    ((4, 30, 6, 4), 0.9, 0.1, 1.5, 0.88, 0.2, 1.8, 8),
    ((4, 40, 5, 5), 0.4, 0.6, 2.5, 0.92, 0.5, 1.5, 9),
]


def test_embedding_parity_on_shared_fixtures(tmp_path, has_core_cli, capsys):
    if not has_core_cli:
        pytest.fail("core CLI is required for the parity contract")
    worst = 0.0
    for i, (shape, ta, tb, ell, q, low, high, seed) in enumerate(PARITY_FIXTURES):
        rng = np.random.default_rng(seed)
        vals = rng.uniform(low, high, size=shape).astype(np.float32)
        src = tmp_path / f"fixture_{i}.xt"
        out = tmp_path / f"embedded_{i}.xt"
        save_tensor(vals, src)
        res = core_cli(
            "embed", "--input", src, "--output", out,
            "--theta-a", ta, "--theta-b", tb, "--length-scale", ell, "--q", q,
        )
        assert res.returncode == 0, f"fixture {i}: {res.stderr}"
        want = load_tensor(out)
        got = embed_tensor(vals, ta, tb, ell, q)
        worst = max(worst, float(np.abs(got - want).max()))
    assert worst <= 1e-5
    with capsys.disabled():
        _passed(f"embedding parity over 10 shared fixtures (worst gap {worst:.1e})")


@pytest.fixture(scope="module")
def lgcp_toy(tmp_path_factory, has_core_cli):
    if not has_core_cli:
        pytest.skip("core CLI not installed")
    path = tmp_path_factory.mktemp("toy") / "lgcp.xt"
    res = core_cli(
        "simulate-lgcp", "--output", path, "--samples", "64", "--steps", "10",
        "--rows", "16", "--cols", "16", "--gp-variance", "1.0",
        "--spatial-length", "2.0", "--seed", "11",
    )
    assert res.returncode == 0, res.stderr
    return load_tensor(path)


def test_training_smoke_two_thousand_iterations(lgcp_toy, tmp_path, capsys):
    # Toy regime: Lipschitz-bounded critic refreshed every 10th step keeps
    # the game generator-dominant, which the smoke contract requires.
    cfg = TrainerConfig(
        mode="deepx", theta_a=0.5, theta_b=0.5, iterations=2000,
        batch_size=16, hidden_dim=32, conv_channels=16, latent_dim=16,
        critic_every=10, seed=0,
    )
    ckpt = train(cfg, lgcp_toy)

    losses = np.asarray(ckpt.generator_losses)
    assert np.isfinite(losses).all()
    assert np.isfinite(ckpt.critic_losses).all()
    decile = len(losses) // 10
    first, last = np.median(losses[:decile]), np.median(losses[-decile:])
    assert last < first

    fields = generate(ckpt, 8, seed=3)
    gen_path = tmp_path / "generated.xt"
    save_tensor(fields, gen_path)
    for cmd in (
        ("moments", "--input", gen_path, "--output", tmp_path / "m.csv"),
        ("psd", "--input", gen_path, "--output", tmp_path / "p.csv"),
    ):
        res = core_cli(*cmd)
        assert res.returncode == 0, res.stderr  # core loader validates the ensemble

    gen = ckpt.build_generator()
    torch.manual_seed(7)
    with torch.no_grad():
        z_star = torch.randn(3, ckpt.n_steps, cfg.latent_dim)
        targets = gen(z_star).numpy() * ckpt.norm_std + ckpt.norm_mean
    self_losses = reconstruction_loss(ckpt, targets, max_iters=500, lr=0.05)
    assert self_losses.max() <= 1e-3
    with capsys.disabled():
        _passed(
            f"training smoke: 2k iterations (gen loss {first:.2f} -> {last:.2f}), "
            f"generated ensemble validates, self-reconstruction {self_losses.max():.1e}"
        )


def test_unseen_split_protocol(capsys):
    rng = np.random.default_rng(42)
    vals = rng.random((40, 10, 8, 8)).astype(np.float32)
    rule = ExperimentSplit(train_variant="NoExtreme", test_variant="ExtremeOnly", top_k=100)
    res = split_unseen(vals, rule)
    assert res.n_flagged == 100
    assert res.flagged[res.train_indices].sum() == 0
    assert set(res.train_indices).isdisjoint(res.test_indices)
    assert len(res.train_indices) + len(res.test_indices) == 40
    with capsys.disabled():
        _passed(
            f"unseen split: exactly 100 flagged events, clean training set "
            f"({len(res.train_indices)} train / {len(res.test_indices)} extreme samples)"
        )


def test_matched_distribution_reconstructs_no_worse_than_extremes(lgcp_toy, capsys):
    # Models trained without extremes must find in-distribution targets no
    # harder than held-out extremes, median over 3 seeds.
    small = lgcp_toy[:, :, :8, :8][:48, :8]
    res = split_unseen(small, ExperimentSplit("NoExtreme", "ExtremeOnly", top_k=20))
    matched_meds, extreme_meds = [], []
    for seed in (0, 1, 2):
        cfg = TrainerConfig(
            iterations=300, batch_size=8, hidden_dim=32, conv_channels=16,
            latent_dim=16, seed=seed,
        )
        ckpt = train(cfg, res.train_values)
        rng = np.random.default_rng(seed)
        matched = res.train_values[rng.choice(len(res.train_values), 8, replace=False)]
        extreme = res.test_values[
            rng.choice(len(res.test_values), min(8, len(res.test_values)), replace=False)
        ]
        matched_meds.append(np.median(reconstruction_loss(ckpt, matched, 200, 0.05)))
        extreme_meds.append(np.median(reconstruction_loss(ckpt, extreme, 200, 0.05)))
    assert np.median(matched_meds) <= np.median(extreme_meds)
    with capsys.disabled():
        _passed(
            f"matched-vs-extreme reconstruction over 3 seeds "
            f"({np.median(matched_meds):.3f} <= {np.median(extreme_meds):.3f})"
        )
