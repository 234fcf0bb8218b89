import json
from fractions import Fraction
from pathlib import Path

import pytest

from chaoslab.exceptions import InputError
from chaoslab.reports import (
    Arithmetic,
    InequalityId,
    Status,
    append_record,
    create_record,
    find_record,
    load_history,
    load_reports,
    make_report,
    summarize,
    write_reports_csv,
    write_reports_json,
)


def test_exact_reports_compare_with_zero() -> None:
    report = make_report(InequalityId.HGP, Fraction(27, 2), Fraction(4), "2,2|rho=1/2", seed=7)
    assert report.status is Status.HOLDS
    assert report.arithmetic is Arithmetic.EXACT
    assert report.margin == Fraction(19, 2)
    assert make_report(InequalityId.HGP, Fraction(4), Fraction(4), "x").status is Status.EQUALITY


def test_float_reports_use_relative_tolerance() -> None:
    close = make_report(InequalityId.HGP, 1e6 + 1e-4, 1e6, "x")
    assert close.status is Status.EQUALITY
    assert make_report(InequalityId.HGP, 1.0, 1.1, "x").status is Status.VIOLATED


def test_report_dict_layout() -> None:
    report = make_report(InequalityId.MAIN, Fraction(43, 25), Fraction(1), "family", seed=11)
    payload = report.to_dict()
    assert list(payload) == [
        "inequality_id",
        "lhs",
        "rhs",
        "margin",
        "status",
        "arithmetic",
        "inputs_digest",
        "seed",
    ]
    assert payload["lhs"] == "43/25"
    assert payload["rhs"] == "1"
    assert len(payload["inputs_digest"]) == 64


def test_digest_depends_on_inequality_and_inputs() -> None:
    first = make_report(InequalityId.MAIN, Fraction(1), Fraction(1), "a")
    assert first.inputs_digest == make_report(InequalityId.MAIN, Fraction(2), Fraction(1), "a").inputs_digest
    assert first.inputs_digest != make_report(InequalityId.HGP, Fraction(1), Fraction(1), "a").inputs_digest


def test_conjecture_violations_are_findings() -> None:
    conjecture = make_report(InequalityId.GPC, Fraction(1), Fraction(2), "open")
    proven = make_report(InequalityId.HGP, Fraction(1), Fraction(2), "proven")
    assert conjecture.is_finding and not conjecture.is_defect
    assert proven.is_defect
    summary = summarize([conjecture, make_report(InequalityId.GPC, Fraction(3), Fraction(2), "ok")])
    assert summary.violations == 0
    assert summary.findings == [conjecture.inputs_digest]
    assert summary.clean


def test_polarization_is_proven_only_in_low_dimension() -> None:
    assert InequalityId.POLARIZATION.proven
    assert not InequalityId.POLARIZATION_CONJECTURE.proven
    low = make_report(InequalityId.POLARIZATION, 0.06, 0.19, "low")
    high = make_report(InequalityId.POLARIZATION_CONJECTURE, 0.001, 0.004, "high")
    assert low.is_defect and not low.is_finding
    assert high.is_finding and not high.is_defect
    summary = summarize([low, high])
    assert summary.violations == 1
    assert not summary.clean


def test_report_files(tmp_path: Path) -> None:
    reports = [
        make_report(InequalityId.HGP, Fraction(27, 2), Fraction(4), "a", seed=7),
        make_report(InequalityId.HGP, 13.5, 4.0, "b", seed=7),
    ]
    write_reports_json(tmp_path / "reports.json", reports)
    write_reports_csv(tmp_path / "reports.csv", reports)
    assert load_reports(tmp_path / "reports.json") == reports
    rows = (tmp_path / "reports.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0].startswith("instance,inequality_id,lhs")
    assert rows[1].startswith("0,hgp,27/2,4,19/2,holds,exact")
    assert json.loads((tmp_path / "reports.json").read_text(encoding="utf-8"))[1]["lhs"] == 13.5


def test_history_roundtrip(tmp_path: Path) -> None:
    history_file = tmp_path / "history.log"
    summary = summarize([make_report(InequalityId.HGP, Fraction(2), Fraction(2), "a")])
    record = create_record("campaign-test", "verify hgp", 7, summary, tmp_path / "run")
    append_record(history_file, record)
    saved = load_history(history_file)
    assert saved[0].run_id == "campaign-test"
    assert saved[0].equalities == 1
    assert saved[0].output_dir == tmp_path / "run"
    append_record(history_file, create_record("campaign-next", "verify main", 8, summary, None))
    assert find_record(history_file, "campaign-next").seed == 8
    with pytest.raises(InputError):
        find_record(history_file, "campaign-missing")
