"""Shared fixtures."""

import numpy as np
import pytest

from gentwist.fields import Chart, FieldGenMetric
from gentwist.spec_file import CheckConfig

SPHERE = "4/(1+x1^2+x2^2+x3^2+x4^2)^2"


@pytest.fixture
def rng():
    return np.random.default_rng(20220607)


@pytest.fixture
def chart2():
    return Chart.cube(2)


@pytest.fixture
def chart4():
    return Chart.cube(4)


@pytest.fixture
def flat4(chart4):
    return FieldGenMetric.conformal(chart4, "1")


@pytest.fixture
def sphere4(chart4):
    return FieldGenMetric.conformal(chart4, SPHERE)


@pytest.fixture
def twisted4(chart4):
    """Flat metric with Θ = x1 dx2∧dx3, so dΘ = dx1∧dx2∧dx3."""
    return FieldGenMetric.conformal(chart4, "1", {(1, 2): "x1"})


@pytest.fixture
def small_config():
    return CheckConfig(points=2, fibers=2, probes=2, threads=1)
