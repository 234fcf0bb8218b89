"""Configuration parsing utilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

import yaml

from .exceptions import ConfigError, InputError
from .moments import MAX_LEGS, MAX_PERMANENT
from .polarization import OptimizerSettings
from .utils import ensure_directory, expand_path, parse_scalar

CAMPAIGN_KINDS = (
    "hgp",
    "main",
    "frenkel",
    "averaged",
    "gpc",
    "complex",
    "phi",
    "negatif",
    "polarization",
)
ARITHMETIC_MODES = ("exact", "float")


@dataclass(frozen=True)
class Caps:
    matching_legs: int = MAX_LEGS
    permanent_size: int = MAX_PERMANENT
    chaos_degree: int = MAX_LEGS


@dataclass(frozen=True)
class Defaults:
    output_root: Path
    history_log: Path
    workers: int
    caps: Caps


@dataclass(frozen=True)
class HadamardSettings:
    order: int = 40
    rescale_factor: float = 0.9


@dataclass(frozen=True)
class CampaignConfig:
    kind: str
    instances: int
    seed: int
    max_dim: int
    max_degree: int
    ambient_dim: Optional[int]
    arithmetic: str
    grid: tuple[Fraction, ...] = ()
    moments: tuple[int, ...] = (2,)

    def with_overrides(
        self,
        *,
        instances: Optional[int] = None,
        seed: Optional[int] = None,
        arithmetic: Optional[str] = None,
    ) -> "CampaignConfig":
        return CampaignConfig(
            kind=self.kind,
            instances=self.instances if instances is None else instances,
            seed=self.seed if seed is None else seed,
            max_dim=self.max_dim,
            max_degree=self.max_degree,
            ambient_dim=self.ambient_dim,
            arithmetic=self.arithmetic if arithmetic is None else arithmetic,
            grid=self.grid,
            moments=self.moments,
        )


@dataclass(frozen=True)
class LabConfig:
    defaults: Defaults
    optimizer: OptimizerSettings
    hadamard: HadamardSettings
    campaigns: Dict[str, CampaignConfig] = field(default_factory=dict)

    def get_campaign(self, kind: str) -> CampaignConfig:
        """Fetch the campaign entry for a verify kind."""
        try:
            return self.campaigns[kind]
        except KeyError as exc:
            raise ConfigError(f"No campaign configured for '{kind}'") from exc


def load_config(path: Path) -> LabConfig:
    """Load configuration YAML and normalise paths."""
    if not path.exists():
        raise ConfigError(f"Configuration not found: {path}")

    with path.open("r", encoding="utf-8") as handle:
        try:
            raw = yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Configuration is not valid YAML: {exc}") from exc

    if not isinstance(raw, dict):
        raise ConfigError("Configuration must be a mapping")
    try:
        defaults = _parse_defaults(raw.get("defaults", {}))
        optimizer = _parse_optimizer(raw.get("optimizer", {}))
        hadamard = _parse_hadamard(raw.get("hadamard", {}))
        campaigns = _parse_campaigns(raw.get("campaigns", {}))
    except (KeyError, TypeError, ValueError, InputError) as exc:
        raise ConfigError(f"Invalid configuration: {exc}") from exc

    ensure_directory(defaults.output_root)
    ensure_directory(defaults.history_log.parent)

    return LabConfig(defaults=defaults, optimizer=optimizer, hadamard=hadamard, campaigns=campaigns)


def _parse_defaults(data: dict) -> Defaults:
    caps_data = data.get("caps", {})
    caps = Caps(
        matching_legs=int(caps_data.get("matching_legs", MAX_LEGS)),
        permanent_size=int(caps_data.get("permanent_size", MAX_PERMANENT)),
        chaos_degree=int(caps_data.get("chaos_degree", MAX_LEGS)),
    )
    if caps.matching_legs > MAX_LEGS or caps.chaos_degree > MAX_LEGS:
        raise ConfigError(f"Matching caps may not exceed the hard cap of {MAX_LEGS}")
    if caps.permanent_size > MAX_PERMANENT:
        raise ConfigError(f"Permanent cap may not exceed the hard cap of {MAX_PERMANENT}")

    workers = int(data.get("workers", 1))
    if workers < 0:
        raise ConfigError("defaults.workers must be >= 0")

    return Defaults(
        output_root=expand_path(data.get("output_root", "~/.chaoslab/runs")),
        history_log=expand_path(data.get("history_log", "~/.chaoslab/history.log")),
        workers=workers,
        caps=caps,
    )


def _parse_optimizer(data: dict) -> OptimizerSettings:
    return OptimizerSettings(
        restarts=int(data.get("restarts", 64)),
        max_iter=int(data.get("max_iter", 500)),
        tol=float(data.get("tol", 1e-10)),
        perturbation=float(data.get("perturbation", 1e-6)),
    )


def _parse_hadamard(data: dict) -> HadamardSettings:
    settings = HadamardSettings(
        order=int(data.get("order", 40)),
        rescale_factor=float(data.get("rescale_factor", 0.9)),
    )
    if settings.order < 0:
        raise ConfigError("hadamard.order must be >= 0")
    if not 0 < settings.rescale_factor < 1:
        raise ConfigError("hadamard.rescale_factor must lie in (0, 1)")
    return settings


def _parse_campaigns(data: dict) -> Dict[str, CampaignConfig]:
    campaigns: Dict[str, CampaignConfig] = {}
    for kind, payload in data.items():
        if kind not in CAMPAIGN_KINDS:
            raise ConfigError(f"Unknown campaign kind '{kind}'")
        if payload.get("seed") is None:
            raise ConfigError(f"campaigns.{kind}.seed is mandatory")
        arithmetic = payload.get("arithmetic", "exact")
        if arithmetic not in ARITHMETIC_MODES:
            raise ConfigError(f"campaigns.{kind}.arithmetic must be exact or float")
        ambient = payload.get("ambient_dim")
        campaigns[kind] = CampaignConfig(
            kind=kind,
            instances=int(payload.get("instances", 100)),
            seed=int(payload["seed"]),
            max_dim=int(payload.get("max_dim", 3)),
            max_degree=int(payload.get("max_degree", 3)),
            ambient_dim=int(ambient) if ambient is not None else None,
            arithmetic=arithmetic,
            grid=tuple(parse_scalar(value) for value in payload.get("grid", [])),
            moments=tuple(int(m) for m in payload.get("moments", [2])),
        )
    return campaigns
