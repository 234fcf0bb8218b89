import csv
import math
import subprocess
from pathlib import Path
from typing import Callable

import pytest

Runner = Callable[..., subprocess.CompletedProcess]


def test_bounds_table(tmp_path: Path, run_cli: Runner) -> None:
    result = run_cli("--out", str(tmp_path), "bounds", "--d-min", "2", "--d-max", "4")
    assert result.returncode == 0
    with (tmp_path / "bounds.csv").open(encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert [row["d"] for row in rows] == ["2", "3", "4"]
    first = rows[0]
    assert first["winner"] == "pinasco"
    assert float(first["new_bound"]) == pytest.approx(math.sqrt(8))
    assert float(first["cd_lower"]) == 2.0


def test_bounds_many_forms_few_variables(tmp_path: Path, run_cli: Runner) -> None:
    result = run_cli("--out", str(tmp_path), "bounds", "--d-min", "20", "--d-max", "20", "--n", "3", "--k", "2")
    assert result.returncode == 0
    text = (tmp_path / "bounds.csv").read_text(encoding="utf-8")
    assert text.splitlines()[1].endswith(",new")


def test_bounds_rejects_small_d(run_cli: Runner) -> None:
    assert run_cli("bounds", "--d-min", "1").returncode == 1
