import shutil
import subprocess
import sys

import pytest
import torch

torch.set_num_threads(1)  # many tiny ops; oversubscription is slower


def core_cli(*args: str) -> subprocess.CompletedProcess:
    """Invoke the core package's CLI (the only sanctioned crossing point)."""
    exe = shutil.which("x-extremes")
    cmd = [exe] if exe else [sys.executable, "-m", "x_extremes.cli"]
    return subprocess.run([*cmd, *map(str, args)], capture_output=True, text=True)


@pytest.fixture(scope="session")
def has_core_cli() -> bool:
    probe = core_cli("risk-analytic", "--p", "0.1", "--neighbors", "8")
    return probe.returncode == 0
