"""Seeded verification campaigns behind `chaoslab verify`.

Instance i of a campaign draws everything from ``instance_rng(seed, i)``, so
results do not depend on the worker count and are collected in instance order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Dict, List, Optional

import numpy as np
import psutil

from .chaos import ChaosElement
from .config import CampaignConfig, Caps
from .exceptions import ConfigError, InputError
from .generators import (
    disjoint_family,
    random_chaos_family,
    random_complex_vectors,
    random_degrees,
    random_gram_correlation,
    random_unit_vector,
)
from .inequalities import (
    probe_complex,
    probe_gpc,
    verify_averaged_fourth,
    verify_frenkel_improved,
    verify_hgp,
    verify_main,
    verify_negatif,
    verify_phi_monotone,
)
from .moments import CorrelationMatrix
from .polarization import OptimizerSettings, polarization_conjecture_probe
from .reports import VerificationReport
from .utils import instance_rng

FIXTURES = ("h1-pair",)
FAMILY_KINDS = ("main", "phi", "negatif")
FLOAT_KINDS = ("hgp", "averaged", "gpc")
DEFAULT_GRID = (Fraction(1), Fraction(3, 4), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


@dataclass(frozen=True)
class CampaignTask:
    """Everything a worker process needs to rebuild instance i."""

    campaign: CampaignConfig
    caps: Caps
    fixture: Optional[str] = None
    include_singletons: bool = True
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    # A user-supplied family replaces the random draw in every instance.
    family: Optional[tuple[ChaosElement, ...]] = None

    def __post_init__(self) -> None:
        if self.family is not None:
            if self.campaign.kind not in FAMILY_KINDS:
                raise InputError(f"A family file applies to {', '.join(FAMILY_KINDS)} only")
            if self.fixture is not None:
                raise InputError("Use either a fixture or a family file, not both")
        if self.fixture is not None:
            if self.fixture not in FIXTURES:
                raise InputError(f"Unknown fixture '{self.fixture}'")
            if self.campaign.kind not in ("phi", "negatif"):
                raise InputError("The h1-pair fixture applies to phi and negatif only")
        if self.campaign.arithmetic == "float" and self.campaign.kind not in FLOAT_KINDS:
            raise InputError(
                f"Float arithmetic is available for {', '.join(FLOAT_KINDS)} campaigns only"
            )
        if self.campaign.instances < 1:
            raise InputError("A campaign needs at least one instance")

    @property
    def budget(self) -> int:
        # Squared products double every degree.
        return min(self.caps.matching_legs, self.caps.chaos_degree) // 2

    @property
    def ambient(self) -> int:
        return self.campaign.ambient_dim or self.campaign.max_dim


def _dimension(rng: np.random.Generator, low: int, high: int) -> int:
    return int(rng.integers(low, max(low, high) + 1))


def _correlation(task: CampaignTask, rng: np.random.Generator, d: int) -> CorrelationMatrix:
    correlation = random_gram_correlation(rng, d, task.campaign.ambient_dim)
    if task.campaign.arithmetic == "float":
        return correlation.as_float()
    return correlation


def _identity(task: CampaignTask, d: int) -> CorrelationMatrix:
    correlation = CorrelationMatrix.identity(d)
    if task.campaign.arithmetic == "float":
        return correlation.as_float()
    return correlation


def _family(task: CampaignTask, rng: np.random.Generator) -> List[ChaosElement]:
    if task.family is not None:
        return list(task.family)
    if task.fixture == "h1-pair":
        return [ChaosElement.hermite(1, 0, 1), ChaosElement.hermite(1, 0, 1)]
    d = _dimension(rng, 1, task.campaign.max_dim)
    return random_chaos_family(rng, d, task.ambient, task.campaign.max_degree, budget=task.budget)


def _grid(task: CampaignTask) -> tuple[Fraction, ...]:
    return task.campaign.grid or DEFAULT_GRID


def _hgp(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    d = _dimension(rng, 1, task.campaign.max_dim)
    degrees = random_degrees(rng, d, task.campaign.max_degree, budget=task.budget)
    # Instance 0 is the independent equality case.
    correlation = _identity(task, d) if index == 0 else _correlation(task, rng, d)
    return verify_hgp(degrees, correlation, cap=task.caps.matching_legs, seed=task.campaign.seed)


def _main(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    if index == 0 and task.family is None:
        degrees = random_degrees(rng, task.campaign.max_dim, task.campaign.max_degree, budget=task.budget)
        family = disjoint_family(degrees)
    else:
        family = _family(task, rng)
    return verify_main(family, cap=task.caps.matching_legs, seed=task.campaign.seed)


def _frenkel(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    d = _dimension(rng, 1, task.campaign.max_dim)
    vectors = [random_unit_vector(rng, task.ambient) for _ in range(d)]
    improved, _ = verify_frenkel_improved(vectors, cap=task.caps.matching_legs, seed=task.campaign.seed)
    return improved


def _averaged(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    d = _dimension(rng, 2, task.campaign.max_dim)
    correlation = _identity(task, d) if index == 0 else _correlation(task, rng, d)
    return verify_averaged_fourth(
        correlation,
        include_singletons=task.include_singletons,
        cap=task.caps.matching_legs,
        seed=task.campaign.seed,
    )


def _gpc(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    moments = task.campaign.moments
    m = moments[index % len(moments)]
    high = min(task.campaign.max_dim, task.caps.matching_legs // (2 * m))
    d = _dimension(rng, 1, high)
    return probe_gpc(_correlation(task, rng, d), m, cap=task.caps.matching_legs, seed=task.campaign.seed)


def _complex(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    d = _dimension(rng, 1, task.campaign.max_dim)
    degrees = random_degrees(rng, d, task.campaign.max_degree, budget=task.caps.permanent_size)
    vectors = random_complex_vectors(rng, d, task.ambient)
    return probe_complex(degrees, vectors, seed=task.campaign.seed)


def _polarization(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    d = _dimension(rng, 2, task.campaign.max_dim)
    n = task.campaign.ambient_dim or d
    vectors = [random_unit_vector(rng, n) for _ in range(d)]
    report, _ = polarization_conjecture_probe(vectors, task.optimizer, seed=task.campaign.seed)
    return report


def _phi(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    return verify_phi_monotone(
        _family(task, rng), _grid(task), cap=task.caps.matching_legs, seed=task.campaign.seed
    )


def _negatif(task: CampaignTask, index: int, rng: np.random.Generator) -> VerificationReport:
    grid = _grid(task)
    return verify_negatif(
        _family(task, rng),
        grid[index % len(grid)],
        cap=task.caps.matching_legs,
        seed=task.campaign.seed,
    )


_RUNNERS: Dict[str, Callable[[CampaignTask, int, np.random.Generator], VerificationReport]] = {
    "hgp": _hgp,
    "main": _main,
    "frenkel": _frenkel,
    "averaged": _averaged,
    "gpc": _gpc,
    "complex": _complex,
    "phi": _phi,
    "negatif": _negatif,
    "polarization": _polarization,
}


def run_instance(task: CampaignTask, index: int) -> VerificationReport:
    try:
        runner = _RUNNERS[task.campaign.kind]
    except KeyError as exc:
        raise ConfigError(f"Unknown campaign kind '{task.campaign.kind}'") from exc
    return runner(task, index, instance_rng(task.campaign.seed, index))


def resolve_workers(workers: int) -> int:
    """0 means one worker per physical core."""
    if workers < 0:
        raise InputError("Worker count must be >= 0")
    if workers == 0:
        return psutil.cpu_count(logical=False) or 1
    return workers


def run_campaign(task: CampaignTask, *, workers: int = 1) -> List[VerificationReport]:
    count = resolve_workers(workers)
    indices = range(task.campaign.instances)
    if count == 1:
        return [run_instance(task, index) for index in indices]
    with ProcessPoolExecutor(max_workers=count) as pool:
        return list(pool.map(partial(run_instance, task), indices))
