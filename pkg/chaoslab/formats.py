"""Readers and writers for the CLI input files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List

import yaml

from .chaos import ChaosElement
from .exceptions import InputError
from .hadamard import SPDMatrix
from .moments import CorrelationMatrix, MomentQuery
from .polarization import MultilinearForm, parse_forms
from .utils import Scalar, parse_scalar

QUERY_KINDS = ("nodes", "squares", "monomial")


@dataclass(frozen=True)
class QueryFile:
    """A moment query: exactly one of `nodes`, `squares` or `monomial` plus a correlation."""

    kind: str
    correlation: CorrelationMatrix
    nodes: tuple[tuple[int, int], ...] = ()
    degrees: tuple[int, ...] = ()

    def hermite_query(self) -> MomentQuery:
        return MomentQuery(self.nodes, self.correlation)


def _read_text(path: Path) -> str:
    if not path.exists():
        raise InputError(f"File not found: {path}")
    return path.read_text(encoding="utf-8")


def _correlation(data: dict, dimension: int) -> CorrelationMatrix:
    if "correlation" in data:
        rows = data["correlation"]
        if not isinstance(rows, list):
            raise InputError("correlation must be a list of rows")
        return CorrelationMatrix.from_rows([[parse_scalar(v) for v in row] for row in rows])
    if "rho" in data:
        return CorrelationMatrix.bivariate(parse_scalar(data["rho"]))
    return CorrelationMatrix.identity(dimension)


def load_query(path: Path) -> QueryFile:
    """Parse a YAML moment query file.

    nodes: [[1, 2], [2, 2]]     # (variable, degree) pairs, variables 1-based
    squares: [2, 2]             # E[prod H_{p_i}(G_i)^2]
    monomial: [4, 0]            # E[prod G_i^{m_i}]
    correlation: [[1, "1/2"], ["1/2", 1]]   # or `rho: 1/2`, default identity
    """
    try:
        data = yaml.safe_load(_read_text(path))
    except yaml.YAMLError as exc:
        raise InputError(f"Query file is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("Query file must be a mapping")
    present = [kind for kind in QUERY_KINDS if kind in data]
    if len(present) != 1:
        raise InputError("Query file needs exactly one of nodes, squares, monomial")
    kind = present[0]
    try:
        if kind == "nodes":
            nodes = tuple((int(v), int(p)) for v, p in data["nodes"])
            dimension = max((v for v, _ in nodes), default=1)
            return QueryFile(kind, _correlation(data, dimension), nodes=nodes)
        degrees = tuple(int(value) for value in data[kind])
    except (TypeError, ValueError) as exc:
        raise InputError(f"Malformed {kind} entry: {exc}") from exc
    return QueryFile(kind, _correlation(data, len(degrees)), degrees=degrees)


def load_forms(path: Path) -> List[MultilinearForm]:
    return parse_forms(_read_text(path))


def load_chaos_family(path: Path) -> List[ChaosElement]:
    """One canonical chaos text per line; `#` starts a comment."""
    family = []
    for line in _read_text(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            family.append(ChaosElement.from_text(line))
    if not family:
        raise InputError(f"No chaos elements in {path}")
    return family


def load_matrix(path: Path) -> SPDMatrix:
    """Row-major whitespace-separated text, or a JSON list of rows (`.json`)."""
    text = _read_text(path)
    rows: List[List[Scalar]]
    if path.suffix == ".json":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"Matrix file is not valid JSON: {exc}") from exc
        if not isinstance(payload, list):
            raise InputError("JSON matrix must be a list of rows")
        rows = [[parse_scalar(v) for v in row] for row in payload]
    else:
        rows = [
            [parse_scalar(token) for token in line.split()]
            for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
    return SPDMatrix.from_rows(rows)

