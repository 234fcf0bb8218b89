"""Utility helpers shared across chaoslab."""

from __future__ import annotations

import hashlib
import uuid
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from .exceptions import InputError

Scalar = Union[Fraction, float]


def expand_path(path_str: str) -> Path:
    """Expand user and resolve a filesystem path."""
    return Path(path_str).expanduser().resolve()


def ensure_directory(path: Path) -> Path:
    """Create directory if needed."""
    path.mkdir(parents=True, exist_ok=True)
    return path


def generate_run_id(prefix: str = "campaign") -> str:
    """Produce a run identifier with timestamp component."""
    timestamp = datetime.now(tz=timezone.utc).strftime("%Y%m%d%H%M%S")
    suffix = uuid.uuid4().hex[:6]
    return f"{prefix}-{timestamp}-{suffix}"


def parse_scalar(value: object) -> Fraction:
    """Parse an integer, `num/den` string or decimal string into an exact scalar."""
    if isinstance(value, bool):
        raise InputError(f"Not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # YAML floats such as 0.5 are taken at their decimal spelling.
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"Not a rational number: {value!r}") from exc
    raise InputError(f"Not a number: {value!r}")


def format_scalar(value: Scalar) -> str:
    """Render an exact scalar as `num/den` (or `n`), floats with repr."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def digest(canonical: str) -> str:
    """SHA-256 digest of a canonical serialization."""
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for instance `index` of a seeded campaign."""
    return np.random.default_rng([seed, index])
