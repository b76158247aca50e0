import json

import numpy as np

from xtrainer.cli import main
from xtrainer.container import load_tensor, save_tensor


def run(argv) -> int:
    return main([str(a) for a in argv])


def test_full_cli_pipeline(tmp_path, capsys):
    rng = np.random.default_rng(0)
    data = rng.poisson(2.0, size=(20, 6, 8, 8)).astype(np.float32)
    src = tmp_path / "data.xt"
    save_tensor(data, src)

    train_out, test_out = tmp_path / "train.xt", tmp_path / "test.xt"
    code = run(
        ["unseen-split", "--input", src, "--train-variant", "NoExtreme",
         "--test-variant", "ExtremeOnly", "--top-k", "8",
         "--train-out", train_out, "--test-out", test_out,
         "--report-out", tmp_path / "split.json"]
    )
    assert code == 0
    report = json.loads((tmp_path / "split.json").read_text())
    assert report["flagged_events"] == 8
    assert report["train_samples"] + report["test_samples"] == 20
    capsys.readouterr()

    ckpt_path = tmp_path / "model.ckpt"
    code = run(
        ["train", "--input", train_out, "--output", ckpt_path, "--mode", "deepx",
         "--theta-a", "0.5", "--theta-b", "0.5", "--q", "0.8",
         "--iterations", "8", "--batch-size", "4", "--latent-dim", "8",
         "--critic-every", "4", "--seed", "1"]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["iterations"] == 8

    gen_out = tmp_path / "gen.xt"
    assert run(["generate", "--checkpoint", ckpt_path, "--output", gen_out,
                "--n", "3", "--seed", "2"]) == 0
    fields = load_tensor(gen_out)
    assert fields.shape == (3, 6, 8, 8)

    recon_out = tmp_path / "recon.json"
    code = run(
        ["reconstruct", "--checkpoint", ckpt_path, "--targets", test_out,
         "--n-targets", "2", "--max-iters", "5", "--lr", "0.05",
         "--output", recon_out, "--seed", "3"]
    )
    assert code == 0
    payload = json.loads(recon_out.read_text())
    assert len(payload["losses"]) == 2
    assert payload["q1"] <= payload["median"] <= payload["q3"]


def test_cli_validation_error_exit_code(tmp_path):
    missing = tmp_path / "none.xt"
    assert run(["generate", "--checkpoint", missing, "--output", tmp_path / "o.xt",
                "--n", "1"]) == 2


def test_baseline_mode_via_cli(tmp_path, capsys):
    rng = np.random.default_rng(4)
    data = rng.poisson(2.0, size=(12, 5, 8, 8)).astype(np.float32)
    src = tmp_path / "data.xt"
    save_tensor(data, src)
    code = run(
        ["train", "--input", src, "--output", tmp_path / "b.ckpt", "--mode", "baseline",
         "--iterations", "5", "--batch-size", "4", "--latent-dim", "8", "--seed", "0"]
    )
    assert code == 0
    from xtrainer.training import load_checkpoint

    ckpt = load_checkpoint(tmp_path / "b.ckpt")
    assert ckpt.config.mode == "baseline"
    assert (ckpt.config.theta_a, ckpt.config.theta_b) == (1.0, 0.0)
