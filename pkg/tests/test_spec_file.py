import hashlib
import textwrap

import pytest

from gentwist.errors import ConfigError, SpecError, UnknownIdentifierError
from gentwist.sampling import THREADS_VARIABLE
from gentwist.spec_file import CheckConfig, builtin_names, load_spec, parse_spec
from gentwist.types import Expectation

CHART = """
chart:
  coordinates: [x1, x2, x3, x4]
  box: [-1, 1]
"""


def spec(body):
    return CHART + textwrap.dedent(body)


def test_builtin_fixtures():
    names = builtin_names()
    for name in ("flat4", "flat4_btransform", "flat4_theta", "sphere4", "hyperbolic4", "perturbed4"):
        assert name in names
    sphere = load_spec("sphere4")
    assert sphere.n == 4
    assert sphere.name == "sphere4"
    assert sphere.expectation("theorem1[++]") is Expectation.FAIL
    assert sphere.expectation("theorem2[+-]") is Expectation.PASS
    assert sphere.sampling == {"points": 16}


def test_load_from_file(tmp_path):
    path = tmp_path / "mine.yaml"
    text = spec("metric:\n  conformal: 1\n")
    path.write_text(text)
    manifold = load_spec(path)
    assert manifold.name == "mine"
    assert manifold.spec_hash == hashlib.sha256(text.encode()).hexdigest()


def test_unknown_source():
    with pytest.raises(SpecError, match="no spec file or built-in"):
        load_spec("no_such_manifold")


def test_explicit_entries_and_theta():
    manifold = parse_spec(
        spec(
            """
            metric:
              "1,1": 1 + x2^2
              "2,2": 1
              "3,3": 1
              "4,4": 2
              "2,1": 0.1*x3
            theta:
              "1,2": x4
            sampling:
              points: 4
              tolerance: 1e-8
            expect:
              psi_bar[+-]: FAIL
            """
        ),
        "explicit",
    )
    data = manifold.to_dict()
    assert data["metric"]["2,1"] == "(0.1 * x3)"
    assert data["theta"] == {"1,2": "x4"}
    assert manifold.expect == {"psi_bar[+-]": Expectation.FAIL}
    assert manifold.metric.at([0.0, 0.5, 0.0, 0.0]).g[0, 0] == pytest.approx(1.25)
    assert manifold.metric.at([0.0, 0.0, 0.0, 0.5]).theta[0, 1] == pytest.approx(0.5)


def test_untwisted_drops_theta_and_expectations():
    manifold = load_spec("flat4_theta")
    plain = manifold.untwisted()
    assert plain.name == "flat4_theta_untwisted"
    assert plain.expect == {}
    assert plain.metric.at([0.5, 0.0, 0.0, 0.0]).theta.max() == 0.0
    assert manifold.metric.at([0.5, 0.0, 0.0, 0.0]).theta[1, 2] == pytest.approx(0.5)


@pytest.mark.parametrize(
    "body, message",
    [
        ("metric:\n  conformal: 1\nextras: 1\n", "unknown sections"),
        ("metric:\n  conformal: 1\nsampling:\n  budget: 3\n", "unknown sampling keys"),
        ('metric:\n  "1,1": 1\n  "2,2": 1\n  "3,3": 1\n  "4,4": 1\n  "1,2": 0.1\n', "lower triangle"),
        ('metric:\n  "1,1": 1\n  "2,2": 1\n  "3,3": 1\n', "diagonal entries are required"),
        ('metric:\n  conformal: 1\ntheta:\n  "2,1": x1\n', "strict upper triangle"),
        ('metric:\n  conformal: 1\ntheta:\n  "1,7": x1\n', "outside"),
        ('metric:\n  conformal: 1\ntheta:\n  "one": x1\n', "not of the form"),
        ("metric:\n  conformal: x1\n", "positive definite at"),
        ("metric:\n  conformal: 1\nexpect:\n  theorem1[++]: maybe\n", "pass or fail"),
        ("metric: [1, 2\n", "not valid YAML"),
        ("metric:\n  conformal: 1\n  \"1,1\": 2\n", "cannot be combined"),
    ],
)
def test_spec_errors(body, message):
    with pytest.raises(SpecError, match=message):
        parse_spec(spec(body))


def test_chart_errors():
    with pytest.raises(SpecError, match="invalid chart"):
        parse_spec("chart:\n  coordinates: [x1, x2, x3]\nmetric:\n  conformal: 1\n")
    with pytest.raises(SpecError, match="coordinates"):
        parse_spec("chart: {}\nmetric:\n  conformal: 1\n")


def test_expression_errors_propagate():
    with pytest.raises(UnknownIdentifierError):
        parse_spec(spec("metric:\n  conformal: 1 + x7\n"))


def test_overflowing_metric_is_a_spec_error():
    text = "chart:\n  coordinates: [x1, x2]\n  box: [1, 20]\nmetric:\n  conformal: exp(x1^3)\n"
    with pytest.raises(SpecError, match="numerical overflow"):
        parse_spec(text)


def test_config_precedence(monkeypatch):
    monkeypatch.delenv(THREADS_VARIABLE, raising=False)
    config = CheckConfig.resolve({"points": 4, "seed": 9, "tolerance": "1e-8"}, seed=11, fibers=None, threads=2)
    assert (config.points, config.seed, config.fibers, config.tolerance, config.threads) == (4, 11, 8, 1e-8, 2)
    sampling = config.sampling
    assert (sampling.seed, sampling.fibers, sampling.tolerance, sampling.threads) == (11, 8, 1e-8, 2)


def test_config_thread_cap(monkeypatch):
    monkeypatch.setenv(THREADS_VARIABLE, "1")
    assert CheckConfig.resolve(None, threads=8).threads == 1


@pytest.mark.parametrize(
    "options",
    [{"points": 0}, {"points": 5000}, {"fibers": 257}, {"probes": 0}, {"tolerance": 2.0}, {"seed": -1}],
)
def test_config_ranges(monkeypatch, options):
    monkeypatch.delenv(THREADS_VARIABLE, raising=False)
    with pytest.raises(ConfigError):
        CheckConfig.resolve(None, threads=1, **options)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown configuration keys"):
        CheckConfig.resolve(None, budget=3, threads=1)


def test_config_rejects_bad_tolerance_text():
    with pytest.raises(ConfigError, match="tolerance must be a number"):
        CheckConfig.resolve({"tolerance": "small"}, threads=1)
