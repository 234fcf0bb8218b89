import os
import subprocess
import sys
from pathlib import Path
from typing import Callable

import pytest

Runner = Callable[..., subprocess.CompletedProcess]


@pytest.fixture
def run_cli(tmp_path: Path) -> Runner:
    """Run `python -m chaoslab.main` with HOME pointed at a scratch directory."""
    env = {**os.environ, "HOME": str(tmp_path / "home"), "COLUMNS": "200"}

    def _run(*args: str) -> subprocess.CompletedProcess:
        return subprocess.run(  # noqa: S603,S607
            [sys.executable, "-m", "chaoslab.main", *args],
            capture_output=True,
            text=True,
            env=env,
        )

    return _run
