import subprocess
from pathlib import Path
from typing import Callable

Runner = Callable[..., subprocess.CompletedProcess]


def test_hadamard_fixture(tmp_path: Path, run_cli: Runner) -> None:
    matrix = tmp_path / "s.txt"
    matrix.write_text("0.5 0.2\n0.2 0.5\n", encoding="utf-8")
    result = run_cli("--out", str(tmp_path / "out"), "hadamard", str(matrix), "--order", "40")
    assert result.returncode == 0
    error_line = next(line for line in result.stdout.splitlines() if line.startswith("relative error"))
    assert float(error_line.split("=")[1]) <= 1e-6
    assert (tmp_path / "out" / "hadamard.csv").exists()


def test_hadamard_rescales_inadmissible_matrix(tmp_path: Path, run_cli: Runner) -> None:
    matrix = tmp_path / "s.txt"
    matrix.write_text("4 0\n0 4\n", encoding="utf-8")
    result = run_cli("hadamard", str(matrix), "--order", "20")
    assert result.returncode == 0
    assert "c = 0.225" in result.stdout


def test_hadamard_non_symmetric_exits_1(tmp_path: Path, run_cli: Runner) -> None:
    matrix = tmp_path / "s.txt"
    matrix.write_text("0.5 0.2\n0.1 0.5\n", encoding="utf-8")
    assert run_cli("hadamard", str(matrix)).returncode == 1
