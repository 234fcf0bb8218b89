"""Markdown campaign summaries rendered through Jinja2."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .utils import format_scalar

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
SUMMARY_TEMPLATE = "campaign_summary.md.j2"


@lru_cache(maxsize=None)
def _environment(template_dir: Path) -> Environment:
    env = Environment(
        loader=FileSystemLoader(str(template_dir)),
        undefined=StrictUndefined,
        autoescape=False,
        keep_trailing_newline=True,
    )
    env.filters["scalar"] = format_scalar
    return env


def render_summary(
    context: Mapping[str, Any], destination: Path, *, template_dir: Path = TEMPLATE_DIR
) -> Path:
    rendered = _environment(template_dir).get_template(SUMMARY_TEMPLATE).render(**context)
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(rendered, encoding="utf-8")
    return destination
