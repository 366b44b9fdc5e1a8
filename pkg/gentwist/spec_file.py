"""
gentwist spec file library.

Manifold specs are YAML documents with the sections ``chart``, ``metric``, ``theta``, ``sampling`` and
``expect``. Metric keys ``"i,j"`` are 1-based with i ≥ j, theta keys have i < j, values are expressions
over the chart coordinates:

    chart:
      coordinates: [x1, x2, x3, x4]
      box: [-1, 1]
    metric:
      conformal: 4/(1+x1^2+x2^2+x3^2+x4^2)^2
    theta:
      "2,3": x1
    expect:
      theorem1[++]: fail

Built-in specs live in the ``manifolds`` package directory and are addressed by file stem.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

import hashlib
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .console import log
from .errors import ConfigError, ExprDomainError, SpecError, ValidationError
from .expr import to_text
from .fields import ZERO, Chart, FieldGenMetric
from .integrability import Sampling
from .sampling import probe_points, thread_count
from .types import Expectation

SECTIONS = {"chart", "metric", "theta", "sampling", "expect"}

SAMPLING_KEYS = {"points", "fibers", "probes", "tolerance", "seed"}

RANGES = {"points": (1, 4096), "fibers": (1, 256), "probes": (1, 1024)}


@dataclass(frozen=True)
class CheckConfig:
    """Sampling budget and run options of one check run."""

    points: int = 16
    fibers: int = 8
    probes: int = 24
    tolerance: float = 1e-6
    seed: int = 0
    threads: int = 1
    timings: bool = False

    def __post_init__(self) -> None:
        for name, (low, high) in RANGES.items():
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or not low <= value <= high:
                raise ConfigError(f"{name} must be an integer in {low}..{high}, got {value!r}")
        if not 0 < self.tolerance < 1:
            raise ConfigError(f"tolerance must lie in (0, 1), got {self.tolerance!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")

    @classmethod
    def resolve(cls, spec_sampling: Mapping[str, Any] | None = None, **options: Any) -> CheckConfig:
        """CLI options (None means unset) over the spec's sampling section over the defaults."""
        names = {item.name for item in fields(cls)}
        unknown = set(options) - names
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        values: dict[str, Any] = dict(spec_sampling or {})
        values.update({key: value for key, value in options.items() if value is not None})
        try:
            if "tolerance" in values:
                values["tolerance"] = float(values["tolerance"])
        except (TypeError, ValueError) as error:
            raise ConfigError(f"tolerance must be a number, got {values['tolerance']!r}") from error
        values["threads"] = thread_count(values.get("threads"))
        return cls(**values)

    @property
    def sampling(self) -> Sampling:
        """Budget handed to the integrability predicates."""
        return Sampling(
            fibers=self.fibers, probes=self.probes, seed=self.seed, tolerance=self.tolerance, threads=self.threads
        )

    def as_dict(self) -> dict[str, Any]:
        """Plain mapping, e.g. for rendering."""
        return asdict(self)


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    """A parsed and validated manifold spec."""

    name: str
    chart: Chart
    metric: FieldGenMetric
    sampling: dict[str, Any] = field(default_factory=dict)
    expect: dict[str, Expectation] = field(default_factory=dict)
    text: str = ""

    @property
    def n(self) -> int:
        """Dimension."""
        return self.chart.n

    @property
    def spec_hash(self) -> str:
        """SHA-256 of the spec text."""
        return hashlib.sha256(self.text.encode()).hexdigest()

    def expectation(self, label: str) -> Expectation:
        """Expected outcome of a verdict label such as ``theorem1[++]``."""
        return self.expect.get(label, Expectation.PASS)

    def untwisted(self) -> ManifoldSpec:
        """Same metric with Θ = 0."""
        zero = np.full((self.n, self.n), ZERO, dtype=object)
        return replace(self, name=f"{self.name}_untwisted", metric=self.metric.with_theta(zero), expect={})

    def to_dict(self) -> dict[str, Any]:
        """Parsed content, with expressions printed back as text."""
        n = self.n
        g = self.metric.g_exprs
        theta = self.metric.theta_exprs
        lower = [(i, j) for i in range(n) for j in range(i + 1)]
        return {
            "name": self.name,
            "spec_hash": self.spec_hash,
            "chart": {
                "coordinates": list(self.chart.coords),
                "box": [list(interval) for interval in self.chart.box],
                "orientation": self.chart.orientation,
            },
            "metric": {f"{i + 1},{j + 1}": to_text(g[i, j]) for i, j in lower if g[i, j] != ZERO},
            "theta": {f"{i + 1},{j + 1}": to_text(theta[i, j]) for j, i in lower if i != j and theta[i, j] != ZERO},
            "sampling": dict(self.sampling),
            "expect": {label: expectation.value for label, expectation in self.expect.items()},
        }


def _manifolds():
    return resources.files("gentwist").joinpath("manifolds")


def builtin_names() -> list[str]:
    """Names of the built-in manifold specs."""
    return sorted(entry.name.removesuffix(".yaml") for entry in _manifolds().iterdir() if entry.name.endswith(".yaml"))


def _index_pair(key: Any, n: int, section: str) -> tuple[int, int]:
    try:
        first, second = (int(part) for part in str(key).split(","))
    except ValueError as error:
        raise SpecError(f"{section} key {key!r} is not of the form \"i,j\"") from error
    if not (1 <= first <= n and 1 <= second <= n):
        raise SpecError(f"{section} key {key!r} is outside the {n}-dimensional chart")
    return first - 1, second - 1


def _chart(section: Any) -> Chart:
    if not isinstance(section, dict) or "coordinates" not in section:
        raise SpecError("chart section must define coordinates")
    coords = [str(name) for name in section["coordinates"]]
    box = section.get("box", [-1.0, 1.0])
    if isinstance(box, dict):
        missing = set(coords) - set(box)
        if missing:
            raise SpecError(f"box is missing intervals for: {', '.join(sorted(missing))}")
        intervals = [box[name] for name in coords]
    elif len(box) == 2 and not isinstance(box[0], (list, tuple)):
        intervals = [box] * len(coords)
    else:
        intervals = list(box)
    try:
        return Chart(
            tuple(coords),
            tuple((float(low), float(high)) for low, high in intervals),
            int(section.get("orientation", 1)),
        )
    except (ValidationError, TypeError, ValueError) as error:
        raise SpecError(f"invalid chart: {error}") from error


def _metric_entries(section: Any, n: int) -> dict[tuple[int, int], str | float] | str:
    if not isinstance(section, dict) or not section:
        raise SpecError("metric section must be a non-empty mapping")
    if "conformal" in section:
        if len(section) > 1:
            raise SpecError("metric: conformal cannot be combined with explicit entries")
        return section["conformal"]
    entries = {}
    for key, value in section.items():
        row, column = _index_pair(key, n, "metric")
        if row < column:
            raise SpecError(f"metric key {key!r} must lie in the lower triangle (i ≥ j)")
        entries[(row, column)] = value
    missing = [index + 1 for index in range(n) if (index, index) not in entries]
    if missing:
        raise SpecError(f"metric diagonal entries are required, missing: {missing}")
    return entries


def _theta_entries(section: Any, n: int) -> dict[tuple[int, int], str | float]:
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise SpecError("theta section must be a mapping")
    entries = {}
    for key, value in section.items():
        row, column = _index_pair(key, n, "theta")
        if row >= column:
            raise SpecError(f"theta key {key!r} must lie in the strict upper triangle (i < j)")
        entries[(row, column)] = value
    return entries


def _expectations(section: Any) -> dict[str, Expectation]:
    if section is None:
        return {}
    try:
        return {str(label): Expectation(str(value).lower()) for label, value in section.items()}
    except (AttributeError, ValueError) as error:
        raise SpecError(f"expect entries must map predicate[component] to pass or fail: {error}") from error


def _check_positive(metric: FieldGenMetric) -> None:
    for point in probe_points(metric.chart):
        try:
            metric.at(point)
        except (ValidationError, ExprDomainError) as error:
            coordinates = ", ".join(f"{value:.6g}" for value in point)
            raise SpecError(f"metric is not a positive definite metric at ({coordinates}): {error}") from error


def parse_spec(text: str, name: str = "<spec>") -> ManifoldSpec:
    """Parse and validate spec text; expression errors propagate with their location."""
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as error:
        raise SpecError(f"{name} is not valid YAML: {error}") from error
    if not isinstance(document, dict):
        raise SpecError(f"{name} must be a YAML mapping")
    unknown = set(document) - SECTIONS
    if unknown:
        raise SpecError(f"{name} has unknown sections: {', '.join(sorted(map(str, unknown)))}")

    chart = _chart(document.get("chart"))
    entries = _metric_entries(document.get("metric"), chart.n)
    theta = _theta_entries(document.get("theta"), chart.n)
    try:
        if isinstance(entries, dict):
            metric = FieldGenMetric.from_entries(chart, entries, theta)
        else:
            metric = FieldGenMetric.conformal(chart, str(entries), theta)
    except ValidationError as error:
        raise SpecError(f"{name}: {error}") from error

    sampling = dict(document.get("sampling") or {})
    unknown = set(sampling) - SAMPLING_KEYS
    if unknown:
        raise SpecError(f"{name} has unknown sampling keys: {', '.join(sorted(unknown))}")

    _check_positive(metric)
    log.debug(":triangular_ruler: loaded %s (dimension %s)", name, chart.n)
    return ManifoldSpec(name, chart, metric, sampling, _expectations(document.get("expect")), text)


def load_spec(source: str | Path) -> ManifoldSpec:
    """Load a spec from a file path or a built-in name."""
    path = Path(source)
    if path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as error:
            raise SpecError(f"could not read {path}: {error}") from error
        return parse_spec(text, path.stem)
    if str(source) in builtin_names():
        text = _manifolds().joinpath(f"{source}.yaml").read_text(encoding="utf-8")
        return parse_spec(text, str(source))
    raise SpecError(f"no spec file or built-in manifold named {source!r} (built-ins: {', '.join(builtin_names())})")
