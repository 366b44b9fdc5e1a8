import pytest

from gentwist.errors import ConfigError
from gentwist.fields import Chart
from gentwist.spec_file import CheckConfig, load_spec, parse_spec
from gentwist.suites import BATTERIES, SuiteContext, _basis_nijenhuis, _symplectic_structure, run_suite, run_suites
from gentwist.types import Component, Expectation, Suite


def test_every_suite_has_a_battery():
    assert set(BATTERIES) == set(Suite)


def test_flat_space_runs_clean(small_config):
    report = run_suites(load_spec("flat4"), list(Suite), small_config)
    assert [suite.name for suite in report.suites] == [suite.value for suite in Suite]
    assert report.ok, [verdict.label for verdict in report.unexpected]
    assert report.seed == small_config.seed


def test_reports_are_reproducible(small_config):
    spec = load_spec("flat4_theta")
    suites = [Suite.TWISTOR, Suite.THEOREMS]
    first = run_suites(spec, suites, small_config).to_json()
    second = run_suites(spec, suites, small_config).to_json()
    threaded = run_suites(spec, suites, CheckConfig(points=2, fibers=2, probes=2, threads=3)).to_json()
    assert first == second == threaded


def test_expectations_are_applied(small_config):
    spec = load_spec("flat4_theta")
    result = run_suite(SuiteContext(spec, small_config), Suite.TWISTOR)
    verdict = next(verdict for verdict in result.verdicts if verdict.predicate == "horizontal_nijenhuis_vanishes")
    assert verdict.passed is False
    assert verdict.expected is Expectation.FAIL
    assert result.unexpected == []


def test_sphere_curvature_and_theorems(small_config):
    report = run_suites(load_spec("sphere4"), [Suite.CURVATURE, Suite.THEOREMS], small_config)
    assert report.ok, [verdict.label for verdict in report.unexpected]
    theorems = {verdict.label: verdict for verdict in report.suites[1].verdicts}
    assert theorems["theorem1[++]"].passed is False
    assert theorems["theorem2[+-]"].passed


def test_wrong_expectation_is_reported(small_config):
    text = load_spec("flat4").text + "expect:\n  theorem1[++]: fail\n"
    report = run_suites(parse_spec(text, "flat4_wrong"), [Suite.THEOREMS], small_config)
    assert [verdict.label for verdict in report.unexpected] == ["theorem1[++]"]


def test_b_transform_partner(small_config):
    report = run_suites(load_spec("flat4_btransform"), [Suite.EQUIVALENCE], small_config)
    verdicts = report.suites[0].verdicts
    assert [verdict.component for verdict in verdicts] == list(Component)
    assert all(verdict.passed for verdict in verdicts)


def test_partner_with_another_chart(small_config):
    partner = parse_spec("chart:\n  coordinates: [y1, y2, y3, y4]\nmetric:\n  conformal: 1\n", "other")
    with pytest.raises(ConfigError, match="another chart"):
        run_suites(load_spec("flat4"), [Suite.EQUIVALENCE], small_config, partner)


def test_unknown_suite(small_config):
    with pytest.raises(ConfigError, match="unknown suite"):
        run_suites(load_spec("flat4"), ["topology"], small_config)


def test_progress_callback(small_config):
    seen = []
    run_suites(load_spec("flat4"), [Suite.LINALG, Suite.CURVATURE], small_config, on_suite=seen.append)
    assert [result.name for result in seen] == ["linalg", "curvature"]


def test_symplectic_examples():
    chart = Chart.cube(4)
    point = [0.2, -0.3, 0.4, 0.1]
    assert _basis_nijenhuis(_symplectic_structure(chart, "exp(x1)", "exp(-x1)"), point) < 1e-10
    assert _basis_nijenhuis(_symplectic_structure(chart, "exp(x3)", "exp(-x3)"), point) > 1e-3


def test_full_battery_ignores_thread_count():
    spec = load_spec("flat4_theta")
    serial = run_suites(spec, list(Suite), CheckConfig(points=2, fibers=2, probes=2, threads=1)).to_json()
    threaded = run_suites(spec, list(Suite), CheckConfig(points=2, fibers=2, probes=2, threads=3)).to_json()
    assert serial == threaded


def test_perturbed_sphere_fails_both_theorems(small_config):
    report = run_suites(load_spec("perturbed4"), [Suite.THEOREMS], small_config)
    assert report.ok, [verdict.label for verdict in report.unexpected]
    verdicts = {verdict.label: verdict for verdict in report.suites[0].verdicts}
    assert verdicts["theorem1[++]"].passed is False
    assert verdicts["theorem2[+-]"].passed is False
    assert verdicts["theorem2_jklr[+-]"].witness is not None
    for component in Component:
        assert verdicts[f"psi_bar[{component.value}]"].passed is False
        assert verdicts[f"psi_bar_agreement[{component.value}]"].passed
    assert all(verdicts[label].passed for label in verdicts if "agreement" in label)


def test_empty_suite_list(small_config):
    report = run_suites(load_spec("flat4"), [], small_config)
    assert report.suites == []
    assert report.ok
