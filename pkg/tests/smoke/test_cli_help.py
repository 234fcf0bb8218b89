import subprocess
import sys

import pytest


def test_cli_help() -> None:
    result = subprocess.run(  # noqa: S603,S607
        [sys.executable, "-m", "chaoslab.main", "--help"],
        check=True,
        capture_output=True,
        text=True,
    )
    assert "Exact verification of moment inequalities" in result.stdout


@pytest.mark.parametrize("command", ["init", "moment", "verify", "report", "bounds", "hadamard", "polarize"])
def test_command_help(command: str) -> None:
    result = subprocess.run(  # noqa: S603,S607
        [sys.executable, "-m", "chaoslab.main", command, "--help"],
        check=True,
        capture_output=True,
        text=True,
    )
    assert "Usage" in result.stdout
