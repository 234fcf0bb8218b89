from pathlib import Path

import pytest

from chaoslab.config import load_config
from chaoslab.exceptions import ConfigError
from chaoslab.main import DEFAULT_CAMPAIGNS_PATH


def _write(tmp_path: Path, body: str) -> Path:
    path = tmp_path / "config.yml"
    path.write_text(
        "defaults:\n"
        f"  output_root: {tmp_path / 'runs'}\n"
        f"  history_log: {tmp_path / 'history.log'}\n" + body,
        encoding="utf-8",
    )
    return path


def test_default_config_loads(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("HOME", str(tmp_path))
    config = load_config(DEFAULT_CAMPAIGNS_PATH)
    hgp = config.get_campaign("hgp")
    assert (hgp.instances, hgp.seed, hgp.max_dim, hgp.max_degree) == (200, 7, 4, 4)
    assert config.optimizer.restarts == 64
    assert config.hadamard.order == 40
    assert len(config.get_campaign("phi").grid) == 5
    assert config.get_campaign("polarization").max_dim == 5
    assert config.defaults.output_root.is_dir()


def test_overrides_keep_other_fields(tmp_path: Path) -> None:
    config = load_config(_write(tmp_path, "campaigns:\n  gpc:\n    seed: 19\n    moments: [2, 3]\n"))
    campaign = config.get_campaign("gpc").with_overrides(instances=3, arithmetic="float")
    assert (campaign.instances, campaign.seed, campaign.arithmetic) == (3, 19, "float")
    assert campaign.moments == (2, 3)


def test_seed_is_mandatory(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "campaigns:\n  hgp:\n    instances: 3\n"))


def test_caps_above_hard_cap_are_rejected(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "  caps:\n    matching_legs: 40\n"))


def test_invalid_entries(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "campaigns:\n  hgp:\n    seed: 1\n    arithmetic: interval\n"))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "campaigns:\n  nope:\n    seed: 1\n"))
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yml")
    config = load_config(_write(tmp_path, ""))
    with pytest.raises(ConfigError):
        config.get_campaign("hgp")
