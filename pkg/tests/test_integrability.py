import numpy as np
import pytest
from numpy.testing import assert_allclose

from gentwist.errors import PreconditionError, ValidationError
from gentwist.fields import Chart, FieldGenMetric
from gentwist.integrability import (
    Sampling,
    Verdict,
    b_transform_equivalence,
    direct_horizontal_nijenhuis,
    horizontal_nijenhuis,
    horizontal_witness_search,
    jklr_residual,
    jklr_witness_fiber,
    mixed_covector_nijenhuis,
    mixed_nijenhuis,
    nijenhuis_components,
    nonintegrability_witness,
    point_geometry,
    psi_bar_agreement,
    psi_bar_condition,
    theorem1_predicate,
    theorem2_predicate,
    vertical_nijenhuis,
)
from gentwist.linalg import GenMetric, orthonormal_frame
from gentwist.sampling import random_element, random_gen_metric
from gentwist.twistor import VertCovec, fiber_metric, random_fiber_point, random_vertical
from gentwist.types import Component, Expectation

from .conftest import SPHERE

PERTURBED = "4*(1+0.1*x1)/(1+x1^2+x2^2+x3^2+x4^2)^2"

POINTS = [np.array([0.1, 0.2, -0.1, 0.3]), np.array([-0.4, 0.3, 0.2, -0.1])]
SAMPLING = Sampling(fibers=2, probes=2, tolerance=1e-6)


def geometries(gm, points=POINTS):
    return [point_geometry(gm, point) for point in points]


def by_name(verdicts):
    return {verdict.predicate: verdict for verdict in verdicts}


def test_verdict_from_residual():
    passed = Verdict.from_residual("bianchi", 1e-9, 4, 1e-6, witness={"point": [0.0]})
    assert passed.passed and passed.witness is None and passed.label == "bianchi"

    failed = Verdict.from_residual("psi_bar", 0.5, 4, 1e-6, Component.PM, {"point": [0.0]}, "curvature")
    assert failed.passed is False
    assert failed.label == "psi_bar[+-]"
    assert not failed.as_expected
    failed.expected = Expectation.FAIL
    assert failed.as_expected


def test_verdict_dictionary_round_trip():
    verdict = Verdict.from_residual("theorem1", 0.25, 8, 1e-6, Component.MM, {"point": [0.1, 0.2]}, "dΘ ≠ 0")
    data = verdict.to_dict()
    assert data["pass"] is False
    assert data["component"] == "--"
    assert data["reason"] == "dΘ ≠ 0"
    assert Verdict.from_dict(data) == verdict


def test_not_applicable_verdict():
    verdict = Verdict.not_applicable("theorem1", Component.PP, 1e-6, "dimension 2 is not divisible by 4")
    assert verdict.passed is None
    assert verdict.as_expected
    assert verdict.to_dict()["pass"] is None


def test_point_geometry(flat4, twisted4):
    flat = point_geometry(flat4, POINTS[0])
    assert flat.closed == 0.0
    assert_allclose(flat.curvature, 0.0)
    assert point_geometry(twisted4, POINTS[0]).closed == pytest.approx(1.0)


@pytest.mark.parametrize("component", list(Component))
def test_horizontal_formula_matches_courant_bracket(rng, chart4, component):
    gm = FieldGenMetric.conformal(chart4, SPHERE, {(1, 2): "x1", (0, 3): "x2*x3"})
    geometry = point_geometry(gm, POINTS[0])
    fp = random_fiber_point(geometry.metric, component, rng, geometry.point)
    for _ in range(3):
        a, b = random_element(rng, 4), random_element(rng, 4)
        direct = direct_horizontal_nijenhuis(gm, POINTS[0], fp, a, b)
        assert (horizontal_nijenhuis(geometry, fp, a, b) - direct).norm() < 1e-7


def test_horizontal_part_vanishes_for_closed_twist(rng, sphere4, twisted4):
    closed = point_geometry(sphere4, POINTS[0])
    fp = random_fiber_point(closed.metric, Component.PP, rng)
    a, b = random_element(rng, 4), random_element(rng, 4)
    assert horizontal_nijenhuis(closed, fp, a, b).norm() < 1e-10

    worst, witness = horizontal_witness_search(geometries(twisted4), SAMPLING)
    assert worst > 1e-3
    assert "component" in witness


def test_first_structure_has_no_mixed_or_covector_part(rng, sphere4):
    geometry = point_geometry(sphere4, POINTS[1])
    fp = random_fiber_point(geometry.metric, Component.MP, rng)
    a, b = random_element(rng, 4), random_element(rng, 4)
    assert mixed_nijenhuis(fp, a, random_vertical(rng, fp), 1).norm() < 1e-12
    assert nijenhuis_components(geometry, fp, a, b, 1).vertstar.norm() < 1e-12


@pytest.mark.parametrize("metric", [GenMetric.euclidean(4), GenMetric.euclidean(8)])
def test_nonintegrability_witness(metric):
    residuals = nonintegrability_witness(metric)
    assert set(residuals) == {2, 3, 4}
    assert max(residuals.values()) < 1e-9


def test_nonintegrability_witness_with_random_metric(rng):
    assert max(nonintegrability_witness(random_gen_metric(rng, 4)).values()) < 1e-9


def test_nonintegrability_witness_needs_dimension_four():
    with pytest.raises(PreconditionError):
        nonintegrability_witness(GenMetric.euclidean(2))


def test_jklr_identity(rng, flat4, sphere4, twisted4):
    x, y, z, u = np.eye(4)
    flat = point_geometry(flat4, POINTS[0])
    fp = random_fiber_point(flat.metric, Component.PP, rng)
    assert jklr_residual(flat, fp, 1, 1, 2, x, y, z, u) == 0.0

    sphere = point_geometry(sphere4, np.zeros(4))
    witness = jklr_witness_fiber(sphere.metric, Component.PP)
    assert witness.component is Component.PP
    frame = orthonormal_frame(sphere.metric.g)
    assert jklr_residual(sphere, witness, 1, 1, 2, *frame.T) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        jklr_residual(sphere, witness, 1, 3, 2, x, y, z, u)
    with pytest.raises(PreconditionError, match="dΘ ≠ 0"):
        jklr_residual(point_geometry(twisted4, POINTS[0]), fp, 1, 1, 2, x, y, z, u)


def test_jklr_witness_fiber_components():
    metric = GenMetric.euclidean(4)
    assert jklr_witness_fiber(metric, Component.MM).component is Component.MM
    with pytest.raises(ValidationError):
        jklr_witness_fiber(metric, Component.PM)


@pytest.mark.parametrize("component", [Component.PP, Component.MM])
def test_theorem1_on_flat_space(flat4, component):
    verdicts = by_name(theorem1_predicate(geometries(flat4), component, SAMPLING))
    assert set(verdicts) == {"theorem1", "theorem1_jklr", "theorem1_agreement"}
    assert all(verdict.passed for verdict in verdicts.values())


def test_theorem1_on_the_sphere(sphere4):
    verdicts = by_name(theorem1_predicate(geometries(sphere4), Component.PP, SAMPLING))
    assert verdicts["theorem1"].passed is False
    assert verdicts["theorem1_jklr"].passed is False
    assert verdicts["theorem1_agreement"].passed


@pytest.mark.parametrize("component", [Component.PM, Component.MP])
def test_theorem2_on_the_sphere(sphere4, component):
    verdicts = theorem2_predicate(geometries(sphere4), component, SAMPLING)
    assert all(verdict.passed for verdict in verdicts)


def test_theorems_short_circuit_on_non_closed_twist(twisted4):
    verdicts = by_name(theorem1_predicate(geometries(twisted4), Component.PP, SAMPLING))
    assert verdicts["theorem1"].passed is False
    assert verdicts["theorem1"].reason == "dΘ ≠ 0"
    assert verdicts["theorem1"].max_residual == pytest.approx(1.0)
    assert verdicts["theorem1_agreement"].passed


def test_theorems_reject_the_wrong_component(flat4):
    with pytest.raises(ValidationError):
        theorem1_predicate(geometries(flat4), Component.PM, SAMPLING)
    with pytest.raises(ValidationError):
        theorem2_predicate(geometries(flat4), Component.PP, SAMPLING)


def test_theorems_in_dimension_two():
    flat2 = FieldGenMetric.conformal(Chart.cube(2), "1")
    sample = [point_geometry(flat2, [0.1, 0.2])]
    for verdict in theorem1_predicate(sample, Component.PP, SAMPLING) + theorem2_predicate(
        sample, Component.PM, SAMPLING
    ):
        assert verdict.passed is None
        assert "not divisible by 4" in verdict.reason
    assert psi_bar_condition(sample, Component.PP, SAMPLING).passed is None


def test_psi_bar(flat4, sphere4):
    assert psi_bar_condition(geometries(flat4), Component.PM, SAMPLING).passed
    verdict = psi_bar_condition(geometries(sphere4), Component.PP, SAMPLING)
    assert verdict.passed is False
    assert "point" in verdict.witness


def test_b_transform_with_closed_difference(chart4, flat4):
    shifted = FieldGenMetric.conformal(chart4, "1", {(0, 1): 1.0, (2, 3): 0.5})
    verdicts = b_transform_equivalence(geometries(shifted), geometries(flat4), SAMPLING)
    assert [verdict.component for verdict in verdicts] == list(Component)
    assert all(verdict.passed for verdict in verdicts)


def test_b_transform_rejections(flat4, sphere4, twisted4):
    verdicts = b_transform_equivalence(geometries(twisted4), geometries(flat4), SAMPLING)
    assert all(verdict.reason == "dΨ ≠ 0" for verdict in verdicts)
    verdicts = b_transform_equivalence(geometries(sphere4), geometries(flat4), SAMPLING)
    assert all(verdict.reason == "metrics differ" for verdict in verdicts)


def test_vertical_part_on_the_sphere(rng, sphere4):
    geometry = point_geometry(sphere4, POINTS[0])
    worst = 0.0
    for _ in range(3):
        fp = random_fiber_point(geometry.metric, Component.PP, rng, geometry.point)
        a, b = random_element(rng, 4), random_element(rng, 4)
        vertical, covector = vertical_nijenhuis(geometry, fp, a, b, 1)
        assert covector.norm() < 1e-12
        worst = max(worst, vertical.norm())
    assert worst > 1e-3


def test_covector_part_on_flat_space(rng, flat4):
    geometry = point_geometry(flat4, POINTS[1])
    worst = 0.0
    for _ in range(3):
        fp = random_fiber_point(geometry.metric, Component.PM, rng, geometry.point)
        a, b = random_element(rng, 4), random_element(rng, 4)
        assert vertical_nijenhuis(geometry, fp, a, b, 1)[1].norm() < 1e-12
        vertical, covector = vertical_nijenhuis(geometry, fp, a, b, 2)
        assert vertical.norm() < 1e-12
        worst = max(worst, covector.norm())
    assert worst > 1e-3


@pytest.mark.parametrize("eps", [1, 2, 3, 4])
def test_mixed_covector_part(rng, flat4, sphere4, eps):
    flat = point_geometry(flat4, POINTS[0])
    fp = random_fiber_point(flat.metric, Component.PP, rng, flat.point)
    a, other = random_element(rng, 4), random_element(rng, 4)
    phi = VertCovec(random_vertical(rng, fp))
    assert mixed_covector_nijenhuis(flat, fp, a, phi, eps, other) == pytest.approx(0.0, abs=1e-12)

    sphere = point_geometry(sphere4, POINTS[0])
    fp = random_fiber_point(sphere.metric, Component.PP, rng, sphere.point)
    vertical, _ = vertical_nijenhuis(sphere, fp, a, other, eps)
    assert mixed_covector_nijenhuis(sphere, fp, a, VertCovec(vertical * 0.0), eps, other) == 0.0
    expected = -0.5 * fiber_metric(vertical, vertical)
    assert mixed_covector_nijenhuis(sphere, fp, a, VertCovec(vertical), eps, other) == pytest.approx(expected)


def test_theorem2_on_a_perturbed_sphere(chart4):
    perturbed = FieldGenMetric.conformal(chart4, PERTURBED)
    verdicts = by_name(theorem2_predicate(geometries(perturbed), Component.PM, SAMPLING))
    assert verdicts["theorem2"].passed is False
    assert verdicts["theorem2_jklr"].passed is False
    assert "point" in verdicts["theorem2_jklr"].witness
    assert verdicts["theorem2_agreement"].passed


@pytest.mark.parametrize("component", list(Component))
def test_psi_bar_matches_the_curvature_pattern(flat4, sphere4, component):
    for gm in (flat4, sphere4):
        sample = geometries(gm)
        agreement = psi_bar_agreement(sample, psi_bar_condition(sample, component, SAMPLING), SAMPLING)
        assert agreement.predicate == "psi_bar_agreement"
        assert agreement.component is component
        assert agreement.passed


def test_psi_bar_disagreement_is_reported(sphere4):
    sample = geometries(sphere4)
    claimed = Verdict.from_residual("psi_bar", 0.0, len(sample), SAMPLING.tolerance, Component.PP)
    agreement = psi_bar_agreement(sample, claimed, SAMPLING)
    assert agreement.passed is False
    assert agreement.witness["psi_bar"] is True
    assert agreement.witness["curvature"] is False


def test_psi_bar_agreement_outside_dimension_four():
    flat2 = FieldGenMetric.conformal(Chart.cube(2), "1")
    sample = [point_geometry(flat2, [0.1, 0.2])]
    verdict = psi_bar_agreement(sample, psi_bar_condition(sample, Component.PM, SAMPLING), SAMPLING)
    assert verdict.passed is None
