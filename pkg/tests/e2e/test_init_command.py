import subprocess
from pathlib import Path
from typing import Callable

Runner = Callable[..., subprocess.CompletedProcess]


def test_init_writes_config(tmp_path: Path, run_cli: Runner) -> None:
    config_path = tmp_path / "config.yml"
    result = run_cli("init", "--config", str(config_path), "--force")
    assert result.returncode == 0
    assert config_path.exists()
    assert "Configuration written" in result.stdout


def test_init_refuses_to_overwrite(tmp_path: Path, run_cli: Runner) -> None:
    config_path = tmp_path / "config.yml"
    config_path.write_text("defaults: {}\n", encoding="utf-8")
    result = run_cli("init", "--config", str(config_path))
    assert result.returncode == 1
    assert config_path.read_text(encoding="utf-8") == "defaults: {}\n"
