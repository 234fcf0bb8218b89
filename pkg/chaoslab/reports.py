"""Verification reports, their persistence and the campaign history log."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .exceptions import InputError
from .utils import Scalar, digest, format_scalar, parse_scalar

FLOAT_TOL = 1e-9

REPORT_FIELDS = (
    "inequality_id",
    "lhs",
    "rhs",
    "margin",
    "status",
    "arithmetic",
    "inputs_digest",
    "seed",
)


class InequalityId(str, Enum):
    MAIN = "main"
    HGP = "hgp"
    FRENKEL = "frenkel"
    FRENKEL_IMPROVED = "frenkel_improved"
    AVERAGED_FOURTH = "averaged_fourth"
    GPC = "gpc"
    COMPLEX = "complex"
    PHI_MONOTONE = "phi_monotone"
    NEGATIF = "negatif"
    GRADIENT_SPLIT = "gradient_split"
    KILLPINASCO = "killpinasco"
    SUP_BOUND = "sup_bound"
    POLARIZATION = "polarization"
    POLARIZATION_CONJECTURE = "polarization_conjecture"
    CLASSICAL_HADAMARD = "classical_hadamard"

    @property
    def proven(self) -> bool:
        """Conjectures and optimizer-side probes report findings, not violations."""
        return self not in _PROBES


_PROBES = frozenset(
    {InequalityId.GPC, InequalityId.KILLPINASCO, InequalityId.POLARIZATION_CONJECTURE}
)


class Status(str, Enum):
    HOLDS = "holds"
    EQUALITY = "equality"
    VIOLATED = "violated"


class Arithmetic(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class VerificationReport:
    """One inequality check, always phrased as lhs >= rhs."""

    inequality_id: InequalityId
    lhs: Scalar
    rhs: Scalar
    margin: Scalar
    status: Status
    arithmetic: Arithmetic
    inputs_digest: str
    seed: Optional[int] = None

    @property
    def is_finding(self) -> bool:
        return self.status is Status.VIOLATED and not self.inequality_id.proven

    @property
    def is_defect(self) -> bool:
        return self.status is Status.VIOLATED and self.inequality_id.proven

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id.value,
            "lhs": _encode(self.lhs),
            "rhs": _encode(self.rhs),
            "margin": _encode(self.margin),
            "status": self.status.value,
            "arithmetic": self.arithmetic.value,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        try:
            arithmetic = Arithmetic(data["arithmetic"])
            decode = _decode_exact if arithmetic is Arithmetic.EXACT else float
            return cls(
                inequality_id=InequalityId(data["inequality_id"]),
                lhs=decode(data["lhs"]),
                rhs=decode(data["rhs"]),
                margin=decode(data["margin"]),
                status=Status(data["status"]),
                arithmetic=arithmetic,
                inputs_digest=data["inputs_digest"],
                seed=data.get("seed"),
            )
        except (KeyError, ValueError) as exc:
            raise InputError(f"Malformed report: {exc}") from exc


def _encode(value: Scalar) -> object:
    if isinstance(value, Fraction):
        return format_scalar(value)
    return float(value)


def _decode_exact(value: object) -> Fraction:
    return parse_scalar(value)


def make_report(
    inequality_id: InequalityId,
    lhs: Scalar,
    rhs: Scalar,
    canonical_inputs: str,
    *,
    seed: Optional[int] = None,
    tol: float = FLOAT_TOL,
) -> VerificationReport:
    """Classify lhs >= rhs; exact margins are compared with zero, floats with a relative tolerance."""
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        margin: Scalar = lhs - rhs
        arithmetic = Arithmetic.EXACT
        if margin == 0:
            status = Status.EQUALITY
        else:
            status = Status.HOLDS if margin > 0 else Status.VIOLATED
    else:
        lhs, rhs = float(lhs), float(rhs)
        margin = lhs - rhs
        arithmetic = Arithmetic.FLOAT
        scale = tol * max(1.0, abs(lhs), abs(rhs))
        if not math.isfinite(margin):
            status = Status.VIOLATED
        elif abs(margin) <= scale:
            status = Status.EQUALITY
        else:
            status = Status.HOLDS if margin > 0 else Status.VIOLATED
    return VerificationReport(
        inequality_id=inequality_id,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        status=status,
        arithmetic=arithmetic,
        inputs_digest=digest(f"{inequality_id.value}|{canonical_inputs}"),
        seed=seed,
    )


@dataclass(frozen=True)
class CampaignSummary:
    instances: int
    holds: int
    equalities: int
    violations: int
    findings: List[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return self.violations == 0


def summarize(reports: Sequence[VerificationReport]) -> CampaignSummary:
    """Counts per status; violations of conjectures are listed as findings instead."""
    return CampaignSummary(
        instances=len(reports),
        holds=sum(report.status is Status.HOLDS for report in reports),
        equalities=sum(report.status is Status.EQUALITY for report in reports),
        violations=sum(report.is_defect for report in reports),
        findings=[report.inputs_digest for report in reports if report.is_finding],
    )


def write_reports_json(path: Path, reports: Iterable[VerificationReport]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [report.to_dict() for report in reports]
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_reports_csv(path: Path, reports: Iterable[VerificationReport]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("instance", *REPORT_FIELDS))
        for index, report in enumerate(reports):
            row = report.to_dict()
            writer.writerow((index, *("" if row[key] is None else row[key] for key in REPORT_FIELDS)))


def load_reports(path: Path) -> List[VerificationReport]:
    if not path.exists():
        raise InputError(f"Report file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"Report file is not valid JSON: {path}") from exc
    return [VerificationReport.from_dict(item) for item in payload]


@dataclass
class CampaignRecord:
    run_id: str
    command: str
    seed: Optional[int]
    instances: int
    holds: int
    equalities: int
    violations: int
    findings: int
    output_dir: Optional[Path]
    started_at: str

    def to_json(self) -> str:
        payload = asdict(self)
        payload["output_dir"] = str(self.output_dir) if self.output_dir else None
        return json.dumps(payload)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignRecord":
        output_dir = data.get("output_dir")
        return cls(
            run_id=data["run_id"],
            command=data["command"],
            seed=data.get("seed"),
            instances=int(data["instances"]),
            holds=int(data["holds"]),
            equalities=int(data["equalities"]),
            violations=int(data["violations"]),
            findings=int(data.get("findings", 0)),
            output_dir=Path(output_dir) if output_dir else None,
            started_at=data["started_at"],
        )


def create_record(
    run_id: str,
    command: str,
    seed: Optional[int],
    summary: CampaignSummary,
    output_dir: Optional[Path],
) -> CampaignRecord:
    return CampaignRecord(
        run_id=run_id,
        command=command,
        seed=seed,
        instances=summary.instances,
        holds=summary.holds,
        equalities=summary.equalities,
        violations=summary.violations,
        findings=len(summary.findings),
        output_dir=output_dir,
        started_at=datetime.now(tz=timezone.utc).isoformat(),
    )


def append_record(history_path: Path, record: CampaignRecord) -> None:
    history_path.parent.mkdir(parents=True, exist_ok=True)
    with history_path.open("a", encoding="utf-8") as handle:
        handle.write(record.to_json())
        handle.write("\n")


def load_history(history_path: Path) -> List[CampaignRecord]:
    if not history_path.exists():
        return []
    records: List[CampaignRecord] = []
    with history_path.open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            try:
                records.append(CampaignRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError):
                continue
    return records


def find_record(history_path: Path, run_id: str) -> CampaignRecord:
    # Later runs win when an id was logged twice.
    for record in reversed(load_history(history_path)):
        if record.run_id == run_id:
            return record
    raise InputError(f"Run id not found in history: {run_id}")
