import json

import pytest
from typer.testing import CliRunner

from gentwist import __version__
from gentwist.cli import app

runner = CliRunner()

SMALL = ["--points", "2", "--fibers", "2", "--probes", "2", "--threads", "1"]


@pytest.fixture(autouse=True)
def no_thread_override(monkeypatch):
    monkeypatch.delenv("GENTWIST_THREADS", raising=False)


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"gentwist v{__version__}" in result.output


def test_fixtures():
    result = runner.invoke(app, ["fixtures"])
    assert result.exit_code == 0
    for name in ("flat4", "flat4_theta", "sphere4", "hyperbolic4"):
        assert name in result.output
    assert "dimension 4" in result.output


def test_show_json():
    result = runner.invoke(app, ["show", "flat4_theta", "--format", "json"])
    assert result.exit_code == 0
    assert "theta" in result.output


def test_show_unknown():
    assert runner.invoke(app, ["show", "klein_bottle"]).exit_code == 2


def test_check_writes_json(tmp_path):
    path = tmp_path / "report.json"
    result = runner.invoke(app, ["check", "flat4", "--suite", "curvature", "--json", str(path), *SMALL])
    assert result.exit_code == 0
    data = json.loads(path.read_text())
    assert [suite["name"] for suite in data["suites"]] == ["curvature"]
    assert all(verdict["pass"] for verdict in data["suites"][0]["verdicts"])
    assert "elapsed_ms" not in data["suites"][0]


def test_check_timings(tmp_path):
    path = tmp_path / "report.json"
    result = runner.invoke(app, ["check", "flat4", "-s", "linalg", "--timings", "--json", str(path), *SMALL])
    assert result.exit_code == 0
    assert "elapsed_ms" in json.loads(path.read_text())["suites"][0]


def test_check_unexpected_verdict(tmp_path):
    spec = tmp_path / "flat.yaml"
    spec.write_text(
        "chart:\n  coordinates: [x1, x2, x3, x4]\nmetric:\n  conformal: 1\nexpect:\n  theorem1[++]: fail\n",
        encoding="utf-8",
    )
    result = runner.invoke(app, ["check", str(spec), "--suite", "theorems", *SMALL])
    assert result.exit_code == 1


@pytest.mark.parametrize(
    "args",
    [
        ["check", "klein_bottle"],
        ["check", "flat4", "--points", "0"],
        ["check", "flat4", "--threads", "0"],
        ["check", "flat4", "--partner", "klein_bottle"],
    ],
)
def test_check_user_errors(args):
    assert runner.invoke(app, args).exit_code == 2


def test_check_bad_spec(tmp_path):
    spec = tmp_path / "broken.yaml"
    spec.write_text("chart:\n  coordinates: [x1, x2]\nmetric:\n  conformal: 1 + y\n", encoding="utf-8")
    assert runner.invoke(app, ["check", str(spec)]).exit_code == 2


def test_check_overflowing_metric(tmp_path):
    spec = tmp_path / "steep.yaml"
    spec.write_text(
        "chart:\n  coordinates: [x1, x2]\n  box: [1, 20]\nmetric:\n  conformal: exp(x1^3)\n", encoding="utf-8"
    )
    assert runner.invoke(app, ["check", str(spec)]).exit_code == 2
