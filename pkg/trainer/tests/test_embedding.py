import numpy as np
import pytest
import torch

from conftest import core_cli
from xtrainer.container import load_tensor, save_tensor
from xtrainer.embedding import DeepxEmbedder, embed_tensor, tail_dependence_matrix


class TestTailDependence:
    def test_comonotone_pixels(self):
        rng = np.random.default_rng(0)
        x = rng.random(500)
        pooled = np.stack([x, 2 * x], axis=1)
        chi = tail_dependence_matrix(pooled, q=0.9)
        assert chi[0, 1] == 1.0 and chi[1, 0] == 1.0

    def test_undefined_column_is_zero(self):
        rng = np.random.default_rng(1)
        pooled = np.stack([rng.random(300), np.full(300, 2.0)], axis=1)
        chi = tail_dependence_matrix(pooled, q=0.9)
        assert chi[0, 1] == 0.0  # constant pixel never exceeds; inert placeholder


class TestSelfReferentialEmbedding:
    def test_baseline_has_zero_first_step_and_finite_values(self):
        rng = np.random.default_rng(2)
        vals = rng.uniform(0.5, 1.5, size=(2, 8, 4, 4)).astype(np.float32)
        out = embed_tensor(vals, 1.0, 0.0, 2.0, 0.9)
        assert out.shape == vals.shape
        assert np.all(out[:, 0] == 0.0)
        assert np.isfinite(out).all()

    def test_constant_field_is_zero_under_guard(self):
        vals = np.full((1, 6, 4, 4), 3.0, dtype=np.float32)
        out = embed_tensor(vals, 1.0, 0.0, 2.0, 0.9)
        # deviations are rounding residue; the epsilon floor crushes the ratio
        assert np.abs(out).max() < 1e-12

    def test_matches_core_embed_cli(self, tmp_path, has_core_cli):
        if not has_core_cli:
            pytest.skip("core CLI not installed")
        rng = np.random.default_rng(3)
        vals = rng.uniform(0.5, 1.5, size=(4, 20, 4, 4)).astype(np.float32)
        src, out = tmp_path / "f.xt", tmp_path / "e.xt"
        save_tensor(vals, src)
        res = core_cli(
            "embed", "--input", src, "--output", out, "--theta-a", "0.6", "--theta-b", "0.4",
            "--q", "0.85", "--length-scale", "1.5",
        )
        assert res.returncode == 0, res.stderr
        want = load_tensor(out)
        got = embed_tensor(vals, 0.6, 0.4, 1.5, 0.85)
        assert np.abs(got - want).max() <= 1e-5


class TestFrozenEmbedder:
    def test_reproduces_self_referential_on_reference(self):
        # Gates frozen from the reference agree with rank gates on the
        # reference itself, so the two routes coincide there.
        rng = np.random.default_rng(4)
        vals = rng.uniform(0.0, 2.0, size=(3, 15, 4, 4)).astype(np.float32)
        emb = DeepxEmbedder(vals, 0.5, 0.5, 2.0, 0.9, dtype=torch.float64)
        got = emb(torch.as_tensor(vals, dtype=torch.float64)).numpy()
        want = embed_tensor(vals, 0.5, 0.5, 2.0, 0.9)
        assert np.abs(got - want).max() <= 1e-10

    def test_differentiable_in_inputs(self):
        rng = np.random.default_rng(5)
        ref = rng.uniform(0.0, 2.0, size=(3, 10, 4, 4)).astype(np.float32)
        emb = DeepxEmbedder(ref, 0.5, 0.5, 2.0, 0.9)
        x = torch.tensor(ref[:1], requires_grad=True)
        emb(x).pow(2).sum().backward()
        assert x.grad is not None
        assert torch.isfinite(x.grad).all()

    def test_baseline_mode_ignores_tails(self):
        rng = np.random.default_rng(6)
        ref = rng.uniform(0.0, 2.0, size=(2, 10, 4, 4)).astype(np.float32)
        emb = DeepxEmbedder(ref, 1.0, 0.0, 2.0, 0.9, dtype=torch.float64)
        got = emb(torch.as_tensor(ref, dtype=torch.float64)).numpy()
        want = embed_tensor(ref, 1.0, 0.0, 2.0, 0.9)
        assert np.abs(got - want).max() <= 1e-12
