"""gentwist report library."""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from humanfriendly import format_timespan
from rich.console import Console
from rich.table import Table

from . import __version__
from .console import Styles, console, log
from .integrability import Verdict
from .types import Expectation, JSONDict, ReportFormat


@dataclass
class SuiteResult:
    """Verdicts of one suite."""

    name: str
    verdicts: list[Verdict] = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def unexpected(self) -> list[Verdict]:
        """Verdicts whose outcome differs from the expectation."""
        return [verdict for verdict in self.verdicts if not verdict.as_expected]

    def to_dict(self, timings: bool = False) -> JSONDict:
        """JSON form; ``elapsed_ms`` only with timings."""
        data: JSONDict = {"name": self.name, "verdicts": [verdict.to_dict() for verdict in self.verdicts]}
        if timings:
            data["elapsed_ms"] = self.elapsed_ms
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SuiteResult:
        """Inverse of to_dict."""
        verdicts = [Verdict.from_dict(item) for item in data.get("verdicts", [])]
        return cls(data["name"], verdicts, float(data.get("elapsed_ms", 0.0)))


@dataclass
class Report:
    """Outcome of a check run."""

    spec_hash: str
    seed: int
    suites: list[SuiteResult] = field(default_factory=list)
    version: str = __version__

    @property
    def unexpected(self) -> list[Verdict]:
        """All verdicts that did not come out as expected."""
        return [verdict for suite in self.suites for verdict in suite.unexpected]

    @property
    def ok(self) -> bool:
        """Whether every verdict matches its expectation."""
        return not self.unexpected

    def to_dict(self, timings: bool = False) -> JSONDict:
        """JSON form; without timings the document depends only on spec, seed and configuration."""
        return {
            "version": self.version,
            "spec_hash": self.spec_hash,
            "seed": self.seed,
            "suites": [suite.to_dict(timings) for suite in self.suites],
        }

    def to_json(self, timings: bool = False) -> str:
        """Serialized report."""
        return json.dumps(self.to_dict(timings), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> Report:
        """Parse an emitted JSON report."""
        data = json.loads(text)
        return cls(
            spec_hash=data["spec_hash"],
            seed=int(data["seed"]),
            suites=[SuiteResult.from_dict(item) for item in data.get("suites", [])],
            version=data["version"],
        )


def _outcome(verdict: Verdict) -> str:
    if verdict.passed is None:
        return f"[{Styles.skipped}]n/a[/{Styles.skipped}]"
    style = Styles.passed if verdict.as_expected else Styles.failed
    text = "pass" if verdict.passed else "fail"
    return f"[{style}]{text}[/{style}]"


def suite_table(suite: SuiteResult) -> Table:
    """One table per suite."""
    table = Table(
        title=f"[{Styles.section}]{suite.name}",
        caption=f"elapsed {format_timespan(suite.elapsed_ms / 1000)}",
        title_justify="left",
    )
    for column in ("predicate", "component", "verdict", "max residual", "samples", "tolerance", "expected"):
        table.add_column(column, justify="right" if column in ("max residual", "samples", "tolerance") else "left")
    for verdict in suite.verdicts:
        expected = verdict.expected.value if verdict.expected is Expectation.FAIL else ""
        table.add_row(
            verdict.predicate,
            verdict.component.value if verdict.component else "",
            _outcome(verdict),
            f"{verdict.max_residual:.3e}",
            str(verdict.samples),
            f"{verdict.tolerance:.1e}",
            expected,
        )
    return table


def _print_text(report: Report, target: Console) -> None:
    target.print(f"[{Styles.highlight}]gentwist v{report.version}[/{Styles.highlight}] spec {report.spec_hash[:12]}")
    for suite in report.suites:
        target.print(suite_table(suite))
    for verdict in report.unexpected:
        detail = f" ({verdict.reason})" if verdict.reason else ""
        target.print(f"[{Styles.failed}]unexpected[/{Styles.failed}] {verdict.label}{detail}")


def emit_report(
    report: Report, fmt: ReportFormat = ReportFormat.TEXT, path: Path | None = None, timings: bool = False
) -> None:
    """Print the report to stdout or write it to a file."""
    if fmt is ReportFormat.JSON:
        text = report.to_json(timings)
        if path is None:
            console.print_json(text)
            return
        log.debug(":floppy_disk: writing report %s", path)
        path.write_text(text + "\n", encoding="utf-8")
        return

    if path is None:
        _print_text(report, console)
        return
    recorder = Console(record=True, width=120, file=io.StringIO())
    _print_text(report, recorder)
    log.debug(":floppy_disk: writing report %s", path)
    path.write_text(recorder.export_text(), encoding="utf-8")
