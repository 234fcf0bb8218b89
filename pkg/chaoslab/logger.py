"""Rich console shared by every command, themed for verification output."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from rich.console import Console
from rich.markup import escape
from rich.theme import Theme

from .reports import CampaignSummary, Status

LAB_THEME = Theme(
    {
        "info": "cyan",
        "success": "green",
        "warning": "yellow",
        "error": "bold red",
        "finding": "bold magenta",
        Status.HOLDS.value: "green",
        Status.EQUALITY.value: "bold cyan",
        Status.VIOLATED.value: "bold red",
    }
)


@lru_cache(maxsize=1)
def get_console() -> Console:
    # No auto-highlighting: fractions like 3/4 would otherwise be coloured as paths.
    return Console(theme=LAB_THEME, highlight=False)


def styled_status(status: str) -> str:
    style = status if status in LAB_THEME.styles else "info"
    return f"[{style}]{status}[/{style}]"


def print_campaign_outcome(
    summary: CampaignSummary, out_dir: Path, *, location: str = "Reports written to"
) -> None:
    """Summary line, findings list and report location for one campaign."""
    console = get_console()
    style = "success" if summary.clean else Status.VIOLATED.value
    console.print(
        f"[{style}]instances={summary.instances} holds={summary.holds} "
        f"equalities={summary.equalities} violations={summary.violations}[/{style}]"
    )
    if summary.findings:
        console.print(f"[finding]findings ({len(summary.findings)}):[/finding]")
        for item in summary.findings:
            console.print(f"  [finding]{escape(item)}[/finding]")
    else:
        console.print("[info]findings: none[/info]")
    console.print(f"[info]{location} {escape(str(out_dir))}[/info]")
