import numpy as np
import pytest
from numpy.testing import assert_allclose

from gentwist.errors import ConfigError
from gentwist.expr import eval_array
from gentwist.sampling import (
    THREADS_VARIABLE,
    fan_out,
    halton_points,
    probe_points,
    random_two_form,
    rng_for,
    thread_count,
)


def test_streams_are_deterministic_and_independent():
    assert rng_for(3, 1, 2).random() == rng_for(3, 1, 2).random()
    assert rng_for(3, 1, 2).random() != rng_for(3, 2, 1).random()
    assert rng_for(3).random() != rng_for(4).random()


def test_halton_points(chart4):
    points = halton_points(chart4, 16, seed=5)
    assert len(points) == 16
    assert all(np.all(point >= chart4.lower) and np.all(point <= chart4.upper) for point in points)
    assert_allclose(np.array(points), np.array(halton_points(chart4, 16, seed=5)))
    assert not np.allclose(np.array(points), np.array(halton_points(chart4, 16, seed=6)))


def test_probe_points_start_at_the_center(chart4):
    points = probe_points(chart4)
    assert_allclose(points[0], chart4.center)
    assert len(points) == 8


def test_thread_count(monkeypatch):
    monkeypatch.delenv(THREADS_VARIABLE, raising=False)
    assert thread_count(3) == 3
    assert thread_count() >= 1
    monkeypatch.setenv(THREADS_VARIABLE, "2")
    assert thread_count(8) == 2
    assert thread_count(1) == 1


@pytest.mark.parametrize("value", ["two", "0"])
def test_thread_count_rejects_bad_cap(monkeypatch, value):
    monkeypatch.setenv(THREADS_VARIABLE, value)
    with pytest.raises(ConfigError, match=THREADS_VARIABLE):
        thread_count(4)


def test_thread_count_rejects_non_positive_request(monkeypatch):
    monkeypatch.delenv(THREADS_VARIABLE, raising=False)
    with pytest.raises(ConfigError):
        thread_count(0)


@pytest.mark.parametrize("threads", [1, 4])
def test_fan_out_keeps_task_order(threads):
    assert fan_out(lambda value: value * value, range(10), threads) == [value * value for value in range(10)]


def test_random_two_form_is_antisymmetric(rng, chart4):
    values = eval_array(random_two_form(rng, chart4), [0.3, -0.2, 0.5, 0.1]).val
    assert_allclose(values, -values.T)
    assert np.max(np.abs(values)) > 0
