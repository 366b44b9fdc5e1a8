"""gentwist sampling library."""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np
import psutil
from scipy.stats import qmc

from .console import log
from .errors import ConfigError
from .expr import BinOp, Coord, Expr, constant
from .fields import Chart, FieldGenSection
from .linalg import GenElement, GenMetric
from .types import Matrix, Point

Task = TypeVar("Task")
Result = TypeVar("Result")

THREADS_VARIABLE = "GENTWIST_THREADS"

# box center plus this many low-discrepancy points are probed for positive definiteness
PROBE_POINTS = 7


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for a (seed, keys...) stream; streams do not depend on evaluation order."""
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def halton_points(chart: Chart, count: int, seed: int | None = 0) -> list[Point]:
    """Low-discrepancy base points in the chart box; ``seed=None`` gives the unscrambled sequence."""
    sampler = qmc.Halton(d=chart.n, scramble=seed is not None, seed=seed)
    return list(qmc.scale(sampler.random(count), chart.lower, chart.upper))


def probe_points(chart: Chart) -> list[Point]:
    """Points at which a spec's metric is checked before any suite runs."""
    return [chart.center, *halton_points(chart, PROBE_POINTS + 1, seed=None)[1:]]


def thread_count(requested: int | None = None) -> int:
    """Fan-out width: the request, capped by GENTWIST_THREADS; defaults to the physical core count."""
    width = requested if requested is not None else psutil.cpu_count(logical=False) or 1
    raw = os.environ.get(THREADS_VARIABLE)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError as error:
            raise ConfigError(f"{THREADS_VARIABLE} must be an integer, got {raw!r}") from error
        if cap < 1:
            raise ConfigError(f"{THREADS_VARIABLE} must be positive, got {cap}")
        width = min(width, cap)
    if width < 1:
        raise ConfigError(f"thread count must be positive, got {width}")
    return width


def fan_out(function: Callable[[Task], Result], tasks: Iterable[Task], threads: int = 1) -> list[Result]:
    """Evaluate tasks in a thread pool; results come back in task order."""
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [function(task) for task in tasks]
    log.debug(":thread: fanning out %s tasks over %s threads", len(tasks), threads)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, tasks))


def random_element(rng: np.random.Generator, n: int) -> GenElement:
    """Gaussian element of T⊕T*."""
    return GenElement.from_array(rng.standard_normal(2 * n))


def random_vector(rng: np.random.Generator, n: int) -> Matrix:
    """Gaussian tangent vector."""
    return rng.standard_normal(n)


def random_gen_metric(rng: np.random.Generator, n: int, spread: float = 0.5) -> GenMetric:
    """Random generalized metric: g = I + spread·AAᵀ/n and a Gaussian 2-form."""
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    return GenMetric(np.eye(n) + spread * a @ a.T / n, b - b.T)


def random_polynomial(rng: np.random.Generator, chart: Chart, degree: int = 2, terms: int = 3) -> Expr:
    """Random polynomial expression over the chart coordinates."""
    result: Expr = constant(round(float(rng.normal()), 3))
    for _ in range(terms):
        term: Expr = constant(round(float(rng.normal()), 3))
        for _ in range(int(rng.integers(1, degree + 1))):
            index = int(rng.integers(chart.n))
            term = BinOp("*", term, Coord(chart.coords[index], index))
        result = BinOp("+", result, term)
    return result


def random_section(rng: np.random.Generator, chart: Chart, degree: int = 2) -> FieldGenSection:
    """Section of TM⊕T*M with random polynomial components."""
    exprs = np.array([random_polynomial(rng, chart, degree) for _ in range(2 * chart.n)], dtype=object)
    return FieldGenSection(chart, exprs)


def random_vector_field(rng: np.random.Generator, chart: Chart, degree: int = 2) -> FieldGenSection:
    """Vector field with random polynomial components."""
    exprs = [random_polynomial(rng, chart, degree) for _ in range(chart.n)]
    return FieldGenSection(chart, np.array(exprs + [constant(0.0)] * chart.n, dtype=object))


def random_two_form(rng: np.random.Generator, chart: Chart, degree: int = 1) -> np.ndarray:
    """2-form with random polynomial coefficients."""
    n = chart.n
    form = np.full((n, n), constant(0.0), dtype=object)
    for i in range(n):
        for j in range(i + 1, n):
            entry = random_polynomial(rng, chart, degree, terms=2)
            form[i, j] = entry
            form[j, i] = BinOp("*", constant(-1.0), entry)
    return form

