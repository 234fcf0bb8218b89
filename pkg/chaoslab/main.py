"""Entry point for the chaoslab CLI."""

from __future__ import annotations

import csv
import json
from contextlib import contextmanager
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterator, List, Optional

import numpy as np
import typer
from rich.markup import escape
from rich.table import Table

from .campaigns import DEFAULT_GRID, CampaignTask, run_campaign
from .chaos import ChaosElement
from .config import CAMPAIGN_KINDS, LabConfig, load_config
from .exceptions import InputError, LabError, OptimizerStall
from .formats import load_chaos_family, load_forms, load_matrix, load_query
from .generators import random_multilinear_form
from .hadamard import (
    admissible,
    classical_margin,
    closed_form,
    hadamard_series,
    rescale,
    series_trace,
)
from .logger import get_console, print_campaign_outcome, styled_status
from .moments import hermite_product_moment, isserlis_moment, squared_hermite_moment
from .polarization import (
    POLARIZATION_SLACK,
    MultilinearForm,
    OptimizerResult,
    cd_bracket,
    compare_bounds,
    frenkel_lower,
    moment_lower_bound,
    new_bound,
    pinasco_bound,
    polarization_conjecture_probe,
    sphere_lower_bound,
    sup_product_on_sphere,
    verify_killpinasco,
    verify_sup_bound,
    write_trace_csv,
)
from .reports import (
    VerificationReport,
    append_record,
    create_record,
    find_record,
    load_reports,
    summarize,
    write_reports_csv,
    write_reports_json,
)
from .semigroup import phi_curve
from .template_renderer import render_summary
from .utils import ensure_directory, expand_path, format_scalar, generate_run_id

console = get_console()
app = typer.Typer(help="Exact verification of moment inequalities on Wiener chaos.")

DEFAULT_CONFIG_PATH = Path("~/.chaoslab/config.yml")
REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CAMPAIGNS_PATH = REPO_ROOT / "config" / "default_campaigns.yml"
TIGHTEST_ROWS = 5
VIOLATION_EXIT_CODE = 4
INTERNAL_EXIT_CODE = 3


@dataclass
class GlobalOptions:
    seed: Optional[int]
    exact: bool
    out: Optional[Path]
    cap: Optional[int]
    config: Optional[Path]


def _resolve_config_path(path: Optional[Path]) -> Path:
    if path is None:
        candidate = expand_path(str(DEFAULT_CONFIG_PATH))
        if candidate.exists():
            return candidate
        return DEFAULT_CAMPAIGNS_PATH
    resolved = expand_path(str(path))
    return resolved if resolved.exists() else DEFAULT_CAMPAIGNS_PATH


def _load_config(options: GlobalOptions) -> LabConfig:
    config = load_config(_resolve_config_path(options.config))
    if options.cap is not None:
        caps = config.defaults.caps
        if options.cap < 1 or options.cap > caps.matching_legs:
            raise InputError(f"--cap must lie in [1, {caps.matching_legs}]")
        caps = replace(caps, matching_legs=options.cap, chaos_degree=min(caps.chaos_degree, options.cap))
        config = replace(config, defaults=replace(config.defaults, caps=caps))
    return config


@contextmanager
def _guarded() -> Iterator[None]:
    """Map LabError subclasses to their exit codes and anything unexpected to 3."""
    try:
        yield
    except typer.Exit:
        raise
    except LabError as err:
        console.print(f"[error]{escape(str(err))}[/error]")
        raise typer.Exit(code=err.exit_code) from err
    except Exception as err:  # pragma: no cover - top-level guard
        console.print(f"[error]Internal error: {escape(repr(err))}[/error]")
        raise typer.Exit(code=INTERNAL_EXIT_CODE) from err


@app.callback()
def _global_options(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for randomized commands."),
    exact: bool = typer.Option(True, "--exact/--float", help="Rational or float arithmetic."),
    out: Optional[Path] = typer.Option(None, "--out", help="Directory for report files."),
    cap: Optional[int] = typer.Option(None, "--cap", help="Lower the matching leg cap."),
    config: Optional[Path] = typer.Option(None, "--config", help="Alternate configuration path."),
) -> None:
    ctx.obj = GlobalOptions(seed=seed, exact=exact, out=out, cap=cap, config=config)


@app.command()
def init(
    config_path: Path = typer.Option(
        DEFAULT_CONFIG_PATH,
        "--config",
        help="Path where the configuration copy should be written.",
    ),
    force: bool = typer.Option(False, "--force", help="Overwrite existing config if present."),
) -> None:
    """Bootstrap chaoslab configuration under ~/.chaoslab/."""
    destination = expand_path(str(config_path))
    destination.parent.mkdir(parents=True, exist_ok=True)
    if destination.exists() and not force:
        console.print(f"[warning]Config already exists at {destination}, use --force to overwrite.[/warning]")
        raise typer.Exit(code=1)
    destination.write_text(DEFAULT_CAMPAIGNS_PATH.read_text(encoding="utf-8"), encoding="utf-8")
    console.print(f"[success]Configuration written to {destination}[/success]")


@app.command()
def moment(
    ctx: typer.Context,
    query: Path = typer.Argument(..., help="YAML query file (nodes, squares or monomial)."),
) -> None:
    """Print an exact Gaussian moment as num/den followed by its float value."""
    options: GlobalOptions = ctx.obj
    with _guarded():
        config = _load_config(options)
        cap = config.defaults.caps.matching_legs
        parsed = load_query(query)
        correlation = parsed.correlation if options.exact else parsed.correlation.as_float()
        if parsed.kind == "nodes":
            value = hermite_product_moment(replace(parsed.hermite_query(), correlation=correlation), cap=cap)
        elif parsed.kind == "squares":
            value = squared_hermite_moment(parsed.degrees, correlation, cap=cap)
        else:
            value = isserlis_moment(parsed.degrees, correlation, cap=cap)
        if isinstance(value, Fraction):
            typer.echo(format_scalar(value))
        typer.echo(repr(float(value)))


def _tightest(reports: List[VerificationReport]) -> list[tuple[int, VerificationReport]]:
    indexed = list(enumerate(reports))
    indexed.sort(key=lambda item: (float(item[1].margin), item[0]))
    return indexed[:TIGHTEST_ROWS]


def _echo_fixture_curve(task: CampaignTask) -> None:
    family = [ChaosElement.hermite(1, 0, 1), ChaosElement.hermite(1, 0, 1)]
    grid = task.campaign.grid or DEFAULT_GRID
    table = Table(title="phi(s) on the h1-pair fixture")
    table.add_column("s")
    table.add_column("phi(s)")
    for s, value in zip(grid, phi_curve(family, grid, cap=task.caps.matching_legs)):
        table.add_row(format_scalar(s), format_scalar(value))
    console.print(table)


def _write_campaign_outputs(
    out_dir: Path, task: CampaignTask, reports: List[VerificationReport]
) -> None:
    ensure_directory(out_dir)
    write_reports_json(out_dir / "reports.json", reports)
    write_reports_csv(out_dir / "reports.csv", reports)
    render_summary(
        {
            "kind": task.campaign.kind,
            "seed": task.campaign.seed,
            "arithmetic": task.campaign.arithmetic,
            "fixture": task.fixture,
            "summary": summarize(reports),
            "tightest": _tightest(reports),
        },
        out_dir / "summary.md",
    )


@app.command()
def verify(
    ctx: typer.Context,
    kind: str = typer.Argument(..., help=f"Campaign kind: {'|'.join(CAMPAIGN_KINDS)}."),
    instances: Optional[int] = typer.Option(None, "--instances", help="Override the instance count."),
    fixture: Optional[str] = typer.Option(None, "--fixture", help="Named fixture (h1-pair)."),
    family_file: Optional[Path] = typer.Option(
        None, "--family", help="Chaos family file used in place of random families."
    ),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker processes, 0 = physical cores."),
    include_singletons: bool = typer.Option(
        True,
        "--include-singletons/--no-singletons",
        help="Averaged fourth-moment check: keep the single-index terms.",
    ),
) -> None:
    """Run a seeded verification campaign and write its reports."""
    options: GlobalOptions = ctx.obj
    with _guarded():
        if kind not in CAMPAIGN_KINDS:
            raise InputError(f"Unknown campaign kind '{kind}'; choose from {', '.join(CAMPAIGN_KINDS)}")
        config = _load_config(options)
        campaign = config.get_campaign(kind).with_overrides(
            instances=instances,
            seed=options.seed,
            arithmetic=None if options.exact else "float",
        )
        task = CampaignTask(
            campaign=campaign,
            caps=config.defaults.caps,
            fixture=fixture,
            include_singletons=include_singletons,
            optimizer=config.optimizer,
            family=tuple(load_chaos_family(family_file)) if family_file is not None else None,
        )
        run_id = generate_run_id()
        out_dir = expand_path(str(options.out)) if options.out else config.defaults.output_root / run_id
        console.print(
            f"[info]Running {kind} campaign: {campaign.instances} instances, seed {campaign.seed}[/info]"
        )
        if fixture == "h1-pair" and kind == "phi":
            _echo_fixture_curve(task)
        reports = run_campaign(
            task, workers=config.defaults.workers if workers is None else workers
        )
        summary = summarize(reports)
        _write_campaign_outputs(out_dir, task, reports)
        append_record(
            config.defaults.history_log,
            create_record(run_id, f"verify {kind}", campaign.seed, summary, out_dir),
        )

    print_campaign_outcome(summary, out_dir)
    if not summary.clean:
        raise typer.Exit(code=VIOLATION_EXIT_CODE)


def _saved_reports(target: str, config: LabConfig) -> Path:
    """reports.json for a file, a run directory or a run id from the history log."""
    candidate = expand_path(target)
    if candidate.is_dir():
        return candidate / "reports.json"
    if candidate.exists():
        return candidate
    record = find_record(config.defaults.history_log, target)
    if record.output_dir is None:
        raise InputError(f"Run {target} has no output directory")
    return record.output_dir / "reports.json"


@app.command()
def report(
    ctx: typer.Context,
    target: str = typer.Argument(..., help="Run id, run directory or reports.json file."),
) -> None:
    """Re-read a saved campaign and show its tightest instances."""
    options: GlobalOptions = ctx.obj
    with _guarded():
        config = _load_config(options)
        path = _saved_reports(target, config)
        reports = load_reports(path)
        summary = summarize(reports)
        table = Table(title=f"Tightest instances of {path.parent.name}")
        for column in ("instance", "inequality", "margin", "status", "digest"):
            table.add_column(column)
        for index, item in _tightest(reports):
            table.add_row(
                str(index),
                item.inequality_id.value,
                format_scalar(item.margin),
                styled_status(item.status.value),
                item.inputs_digest,
            )
        console.print(table)

    print_campaign_outcome(summary, path, location="Reports read from")
    if not summary.clean:
        raise typer.Exit(code=VIOLATION_EXIT_CODE)


BOUND_COLUMNS = (
    "d",
    "n",
    "K",
    "new_bound",
    "pinasco_bound",
    "frenkel_lower",
    "cd_lower",
    "cd_upper",
    "winner",
)


def bound_rows(d_min: int, d_max: int, n: Optional[int], k: int) -> List[dict]:
    if d_min < 2 or d_max < d_min:
        raise InputError("Need 2 <= d-min <= d-max")
    if k < 1 or (n is not None and n < 1):
        raise InputError("n and k must be positive")
    rows = []
    for d in range(d_min, d_max + 1):
        ambient = n if n is not None else d
        ks = [k] * d
        cd_lower, cd_upper = cd_bracket(d)
        rows.append(
            {
                "d": d,
                "n": ambient,
                "K": sum(ks),
                "new_bound": new_bound(ambient, ks).value,
                "pinasco_bound": pinasco_bound(ks).value,
                "frenkel_lower": frenkel_lower(d).value,
                "cd_lower": cd_lower,
                "cd_upper": cd_upper,
                "winner": compare_bounds(ambient, ks).value,
            }
        )
    return rows


@app.command()
def bounds(
    ctx: typer.Context,
    d_min: int = typer.Option(2, "--d-min", help="Smallest number of forms."),
    d_max: int = typer.Option(12, "--d-max", help="Largest number of forms."),
    n: Optional[int] = typer.Option(None, "--n", help="Ambient dimension (defaults to d)."),
    k: int = typer.Option(1, "--k", help="Degree of every form."),
) -> None:
    """Tabulate the product-of-forms constants and the polarization bracket."""
    options: GlobalOptions = ctx.obj
    with _guarded():
        rows = bound_rows(d_min, d_max, n, k)
    table = Table(title="Product-of-forms constants")
    for column in BOUND_COLUMNS:
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            *(f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c]) for c in BOUND_COLUMNS)
        )
    console.print(table)
    if options.out:
        out_dir = ensure_directory(expand_path(str(options.out)))
        with (out_dir / "bounds.csv").open("w", encoding="utf-8", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=BOUND_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: repr(v) if isinstance(v, float) else v for key, v in row.items()})
        console.print(f"[info]Table written to {out_dir / 'bounds.csv'}[/info]")


@app.command()
def hadamard(
    ctx: typer.Context,
    matrix: Path = typer.Argument(..., help="Matrix file (whitespace text or .json rows)."),
    order: Optional[int] = typer.Option(None, "--order", help="Series truncation order N."),
) -> None:
    """Reconstruct det S from the refined Hadamard series."""
    options: GlobalOptions = ctx.obj
    with _guarded():
        config = _load_config(options)
        s = load_matrix(matrix)
        truncation = config.hadamard.order if order is None else order
        check = admissible(s)
        c = 1.0
        work = s
        if not check.ok:
            for line in check.diagnostics:
                console.print(f"[warning]{escape(line)}[/warning]")
            c, work = rescale(s, config.hadamard.rescale_factor)
            console.print(f"[warning]Rescaled by c = {c!r}[/warning]")
        result = hadamard_series(work, truncation, exact=None if options.exact else False)
        closed = closed_form(work)
        margin = classical_margin(s, seed=options.seed)
    det_direct = float(s.det())
    reconstructed = result.value**-2 / c**s.dimension
    relative_error = abs(reconstructed - det_direct) / abs(det_direct)

    table = Table(title=f"Refined Hadamard series ({'exact' if result.exact else 'float'} moments)")
    table.add_column("N", justify="right")
    table.add_column("order sum", justify="right")
    table.add_column("partial sum", justify="right")
    for index, (order_sum, partial) in enumerate(zip(result.order_sums, result.partial_sums)):
        table.add_row(str(index), f"{order_sum:.12g}", f"{partial:.12g}")
    console.print(table)
    console.print(f"c = {c!r}")
    console.print(f"series^-2 = {result.value**-2!r}")
    console.print(f"det S reconstructed = {reconstructed!r}")
    console.print(f"det S = {det_direct!r}")
    console.print(f"relative error = {relative_error:.3e}")
    console.print(f"closed form = {closed!r}")
    console.print(f"classical margin = {format_scalar(margin.margin)} ({styled_status(margin.status.value)})")
    if result.tail_ratio is not None:
        console.print(f"[info]last order ratio = {result.tail_ratio:.6g}[/info]")
    if options.out:
        out_dir = ensure_directory(expand_path(str(options.out)))
        trace = series_trace(result)
        with (out_dir / "hadamard.csv").open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(trace.keys())
            for values in zip(*trace.values()):
                writer.writerow(repr(v) if isinstance(v, float) else v for v in values)
        console.print(f"[info]Trace written to {out_dir / 'hadamard.csv'}[/info]")


def _linear_vector(form: MultilinearForm) -> List[float]:
    vector = [0.0] * form.n
    for (i,), value in form.terms:
        vector[i - 1] = float(value)
    return vector


def _polarization_flag(value: float, d: int) -> str:
    target = d ** (-d / 2)
    if abs(value - target) <= POLARIZATION_SLACK:
        return "attained"
    return "above" if value > target else "below"


def _certified_lower_bound(forms: List[MultilinearForm], cap: int) -> Optional[float]:
    if not all(form.exact for form in forms):
        return None
    try:
        return moment_lower_bound(forms, 1, cap=cap)
    except LabError:
        return None


def _polarize_payload(
    forms: List[MultilinearForm],
    result: OptimizerResult,
    seed: int,
    config: LabConfig,
    polarization: Optional[VerificationReport] = None,
) -> dict:
    settings = config.optimizer
    ks = [form.k for form in forms]
    n = forms[0].n
    sup_reports = [verify_sup_bound(form, settings, seed=seed) for form in forms]
    killpinasco = verify_killpinasco(forms, settings, seed=seed)
    checked = [*sup_reports, killpinasco]
    payload: dict = {
        "lower_bound_on_sup": result.value,
        "point": list(result.point),
        "restart": result.restart,
        "per_form_lower_bound_on_sup": [float(report.rhs) for report in sup_reports],
        "checks": {
            "sup_bound": [report.to_dict() for report in sup_reports],
            "killpinasco": killpinasco.to_dict(),
        },
        "new_bound": new_bound(n, ks).value,
        "sphere_lower_bound": sphere_lower_bound(n, ks).value,
        "moment_lower_bound": _certified_lower_bound(forms, config.defaults.caps.matching_legs),
        "stalled": False,
    }
    if polarization is not None:
        payload["checks"]["polarization"] = _polarization_flag(result.value, len(forms))
        payload["checks"]["polarization_report"] = polarization.to_dict()
        checked.append(polarization)
    payload["findings"] = [r.inequality_id.value for r in checked if r.is_finding]
    payload["defects"] = [r.inequality_id.value for r in checked if r.is_defect]
    return payload


@app.command()
def polarize(
    ctx: typer.Context,
    forms_file: Optional[Path] = typer.Argument(None, help="Forms file, one form per line."),
    random_forms: bool = typer.Option(False, "--random", help="Draw random normalized forms."),
    count: int = typer.Option(3, "--count", help="Number of random forms."),
    n: int = typer.Option(3, "--n", help="Ambient dimension of random forms."),
    k: int = typer.Option(1, "--k", help="Degree of random forms."),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Write the optimizer trace CSV."),
    restarts: Optional[int] = typer.Option(None, "--restarts", help="Override optimizer restarts."),
    max_iter: Optional[int] = typer.Option(None, "--max-iter", help="Override optimizer iterations."),
) -> None:
    """Lower-bound sup over the unit sphere of prod |F_i| and run the bound checks."""
    options: GlobalOptions = ctx.obj
    with _guarded():
        config = _load_config(options)
        overrides = {}
        if restarts is not None:
            overrides["restarts"] = restarts
        if max_iter is not None:
            overrides["max_iter"] = max_iter
        config = replace(config, optimizer=replace(config.optimizer, **overrides))
        if random_forms:
            if options.seed is None:
                raise InputError("--random requires --seed")
            if count < 1:
                raise InputError("--count must be positive")
            rng = np.random.default_rng(options.seed)
            forms = [random_multilinear_form(rng, n, k) for _ in range(count)]
        elif forms_file is not None:
            forms = [form.normalized() for form in load_forms(forms_file)]
        else:
            raise InputError("Provide a forms file or --random")
        seed = options.seed if options.seed is not None else 0
        polarization: Optional[VerificationReport] = None
        try:
            if all(form.k == 1 for form in forms):
                vectors = [_linear_vector(form) for form in forms]
                polarization, result = polarization_conjecture_probe(
                    vectors, config.optimizer, seed=seed
                )
            else:
                result = sup_product_on_sphere(forms, config.optimizer, seed=seed)
            payload = _polarize_payload(forms, result, seed, config, polarization)
        except OptimizerStall as stall:
            console.print(f"[warning]{escape(str(stall))}[/warning]")
            typer.echo(json.dumps({"lower_bound_on_sup": stall.best_value, "stalled": True}, indent=2))
            return
        if trace is not None:
            write_trace_csv(expand_path(str(trace)), result)
    typer.echo(json.dumps(payload, indent=2))
    if payload["defects"]:
        raise typer.Exit(code=VIOLATION_EXIT_CODE)


def main() -> None:
    app()


if __name__ == "__main__":  # pragma: no cover - CLI entrypoint
    main()
