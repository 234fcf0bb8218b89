from fractions import Fraction
from pathlib import Path

from chaoslab.reports import InequalityId, make_report, summarize
from chaoslab.template_renderer import render_summary


def test_summary_lists_tightest_instances(tmp_path: Path) -> None:
    reports = [
        make_report(InequalityId.HGP, Fraction(2), Fraction(1), "a", seed=7),
        make_report(InequalityId.GPC, Fraction(1), Fraction(2), "b", seed=7),
    ]
    path = render_summary(
        {
            "kind": "hgp",
            "seed": 7,
            "arithmetic": "exact",
            "fixture": None,
            "summary": summarize(reports),
            "tightest": list(enumerate(reports)),
        },
        tmp_path / "run" / "summary.md",
    )

    text = path.read_text(encoding="utf-8")
    assert text.startswith("# chaoslab verify hgp")
    assert "| 1 | gpc | 1 | 2 | -1 | violated |" in text
    assert "- findings: 1" in text
    assert "fixture" not in text
