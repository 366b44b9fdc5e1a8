"""gentwist progress library."""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from rich.progress import BarColumn, Progress, SpinnerColumn, TaskID, TextColumn, TimeElapsedColumn

from .console import logConsole
from .report import SuiteResult


def create_overall_progress() -> Progress:
    """Overall progress template, drawn on stderr and cleared when done."""
    return Progress(
        "{task.description} {task.percentage:>3.0f}%",
        SpinnerColumn(),
        BarColumn(),
        TextColumn("[progress.percentage] [{task.completed:02}/{task.total:02}]"),
        TimeElapsedColumn(),
        console=logConsole,
        transient=True,
    )


def create_suite_progress(total: int, name: str = "") -> tuple[Progress, TaskID]:
    """Progress and task tracking the suites of one check run."""
    progress = create_overall_progress()
    task_id = progress.add_task(f":microscope: {name}".rstrip(), total=total)
    return progress, task_id


def suite_done(progress: Progress, task_id: TaskID):
    """Callback advancing the task once per finished suite."""

    def advance(result: SuiteResult) -> None:
        progress.update(task_id, advance=1, description=f":microscope: {result.name}")

    return advance
