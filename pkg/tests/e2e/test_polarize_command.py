import json
import subprocess
from pathlib import Path
from typing import Callable

import pytest

Runner = Callable[..., subprocess.CompletedProcess]


def test_polarize_orthonormal_triple(tmp_path: Path, run_cli: Runner) -> None:
    forms = tmp_path / "forms.txt"
    forms.write_text("3 1; 1 = 1\n3 1; 2 = 1\n3 1; 3 = 1\n", encoding="utf-8")
    trace = tmp_path / "trace.csv"
    result = run_cli("--seed", "1", "polarize", str(forms), "--restarts", "8", "--trace", str(trace))
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert payload["lower_bound_on_sup"] == pytest.approx(3 ** -1.5, abs=1e-6)
    assert payload["checks"]["polarization"] == "attained"
    assert payload["checks"]["killpinasco"]["status"] == "holds"
    assert payload["checks"]["polarization_report"]["inequality_id"] == "polarization"
    assert payload["defects"] == []
    assert trace.exists()


def test_polarize_single_linear_form(tmp_path: Path, run_cli: Runner) -> None:
    forms = tmp_path / "forms.txt"
    forms.write_text("2 1; 1 = 3; 2 = 4\n", encoding="utf-8")
    result = run_cli("polarize", str(forms), "--restarts", "4")
    assert json.loads(result.stdout)["lower_bound_on_sup"] == pytest.approx(1.0)


def test_polarize_random_requires_seed(run_cli: Runner) -> None:
    assert run_cli("polarize", "--random").returncode == 1


def test_polarize_random_forms(run_cli: Runner) -> None:
    result = run_cli("--seed", "3", "polarize", "--random", "--count", "2", "--n", "3", "--k", "2", "--restarts", "4")
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert len(payload["per_form_lower_bound_on_sup"]) == 2


def test_polarize_exits_on_low_dimensional_shortfall(tmp_path: Path, run_cli: Runner) -> None:
    forms = tmp_path / "forms.txt"
    forms.write_text("3 1; 1 = 1\n3 1; 2 = 1\n3 1; 3 = 1\n", encoding="utf-8")
    result = run_cli("polarize", str(forms), "--restarts", "1", "--max-iter", "1")
    assert result.returncode == 4
    payload = json.loads(result.stdout)
    assert payload["checks"]["polarization"] == "below"
    assert payload["checks"]["polarization_report"]["status"] == "violated"
    assert "polarization" in payload["defects"]
