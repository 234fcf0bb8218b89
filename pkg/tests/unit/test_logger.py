from fractions import Fraction
from pathlib import Path

import pytest

from chaoslab.logger import print_campaign_outcome, styled_status
from chaoslab.reports import InequalityId, make_report, summarize


def test_styled_status_falls_back_to_info() -> None:
    assert styled_status("holds") == "[holds]holds[/holds]"
    assert styled_status("unknown") == "[info]unknown[/info]"


def test_outcome_prints_counts_and_findings(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    reports = [
        make_report(InequalityId.HGP, Fraction(2), Fraction(1), "a"),
        make_report(InequalityId.GPC, Fraction(1), Fraction(2), "b"),
    ]
    summary = summarize(reports)

    print_campaign_outcome(summary, tmp_path)

    out = capsys.readouterr().out
    assert "instances=2 holds=1 equalities=0 violations=0" in out
    assert summary.findings[0] in out
