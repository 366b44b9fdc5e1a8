"""
gentwist CLI library.

Commands: ``check`` runs suites against a manifold spec, ``fixtures`` lists the built-in manifolds and ``show``
prints a parsed spec. Exit codes: 0 when every verdict matches its expectation, 1 when one does not, 2 for
unusable input.
"""

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from pathlib import Path
from typing import List, Optional

import typer

from . import __app_name__, __version__
from .console import console, log, render_as, set_verbosity
from .errors import ConfigError, ExprDomainError, ExprSyntaxError, SpecError, UnknownIdentifierError
from .progress import create_suite_progress, suite_done
from .report import emit_report
from .spec_file import CheckConfig, builtin_names, load_spec
from .suites import run_suites
from .types import RenderTarget, ReportFormat, Suite

USER_ERRORS = (SpecError, ConfigError, ExprSyntaxError, UnknownIdentifierError, ExprDomainError)

app = typer.Typer(name=__app_name__, help="Numerical checks for generalized twistor spaces.", add_completion=False)


def version_callback(value: bool) -> None:
    """Return application name, version and exit."""
    if value:
        typer.echo(f"{__app_name__} v{__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Optional[bool] = typer.Option(  # pylint: disable=unused-argument
        None, "--version", "-V", help="Show version and exit.", callback=version_callback, is_eager=True
    ),
) -> None:
    """Generalized complex geometry and generalized twistor space checks."""


@app.command()
def check(  # pylint: disable=too-many-arguments,too-many-locals
    spec: str = typer.Argument(..., help="Spec file or built-in manifold name."),
    suite: Optional[List[Suite]] = typer.Option(None, "--suite", "-s", help="Suite to run, repeatable (default all)."),
    seed: Optional[int] = typer.Option(None, help="Sampling seed."),
    points: Optional[int] = typer.Option(None, help="Base points (1..4096)."),
    fibers: Optional[int] = typer.Option(None, help="Fiber points per base point (1..256)."),
    probes: Optional[int] = typer.Option(None, help="Probe vectors per fiber point (1..1024)."),
    tol: Optional[float] = typer.Option(None, "--tol", help="Absolute residual tolerance."),
    json_path: Optional[Path] = typer.Option(None, "--json", help="Also write the JSON report to this file."),
    fmt: ReportFormat = typer.Option(ReportFormat.TEXT, "--format", help="Report format on stdout."),
    partner: Optional[str] = typer.Option(None, help="Partner spec of the equivalence suite (default Θ = 0)."),
    timings: bool = typer.Option(False, "--timings", help="Include elapsed_ms in JSON reports."),
    threads: Optional[int] = typer.Option(None, help="Fan-out width (default GENTWIST_THREADS or physical cores)."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging."),
) -> None:
    """Run check suites against a manifold spec."""
    set_verbosity(verbose)
    try:
        manifold = load_spec(spec)
        other = load_spec(partner) if partner else None
        config = CheckConfig.resolve(
            manifold.sampling,
            seed=seed,
            points=points,
            fibers=fibers,
            probes=probes,
            tolerance=tol,
            threads=threads,
            timings=timings,
        )
        selected = list(suite) if suite else list(Suite)
        progress, task_id = create_suite_progress(len(selected), manifold.name)
        with progress:
            report = run_suites(manifold, selected, config, other, on_suite=suite_done(progress, task_id))
    except USER_ERRORS as error:
        log.error(":x: %s", error)
        raise SystemExit(2) from error

    if json_path is not None:
        emit_report(report, ReportFormat.JSON, json_path, config.timings)
    emit_report(report, fmt, None, config.timings)

    if not report.ok:
        log.warning(":x: %s verdict(s) did not match their expectation", len(report.unexpected))
        raise SystemExit(1)
    log.info(":sparkles: all verdicts as expected")


@app.command()
def fixtures() -> None:
    """List the built-in manifolds."""
    for name in builtin_names():
        manifold = load_spec(name)
        console.print(f"{name}\tdimension {manifold.n}", highlight=False)


@app.command()
def show(
    spec: str = typer.Argument(..., help="Spec file or built-in manifold name."),
    target: RenderTarget = typer.Option(RenderTarget.TREE, "--format", help="Output format."),
) -> None:
    """Print a parsed spec."""
    try:
        manifold = load_spec(spec)
    except USER_ERRORS as error:
        log.error(":x: %s", error)
        raise SystemExit(2) from error
    render_as(manifold.to_dict(), target, title=manifold.name)
