import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gentwist.errors import ValidationError
from gentwist.expr import BinOp, evaluate
from gentwist.fields import (
    Chart,
    FieldEndo,
    FieldGenMetric,
    FieldGenSection,
    courant_bracket,
    courant_props_check,
    exterior_d,
    exterior_dd,
    lie_bracket,
    nijenhuis_field,
    pairing_jet,
)
from gentwist.linalg import GenElement, from_complex, from_complex_bivector, pairing, standard_complex_structure
from gentwist.sampling import fan_out, halton_points, random_polynomial, random_section, random_two_form

POINT4 = np.array([0.2, -0.3, 0.4, 0.1])


def symplectic_field(chart, factor):
    """Generalized complex structure of ω = f dx1∧dx2 + dx3∧dx4."""
    rows = [["0"] * 8 for _ in range(8)]
    rows[0][5], rows[1][4] = f"1/({factor})", f"-1/({factor})"
    rows[2][7], rows[3][6] = "1", "-1"
    rows[4][1], rows[5][0] = factor, f"-({factor})"
    rows[6][3], rows[7][2] = "1", "-1"
    return FieldEndo.from_strings(chart, rows)


def basis_sections(chart):
    return [FieldGenSection.constant(chart, GenElement.from_array(np.eye(2 * chart.n)[k])) for k in range(2 * chart.n)]


def largest_nijenhuis(endo, chart, point):
    sections = basis_sections(chart)
    return max(nijenhuis_field(endo, a, b, point).norm() for a, b in itertools.combinations(sections, 2))


def test_lie_bracket_examples(chart2):
    d1 = FieldGenSection.from_strings(chart2, vec=[1, 0])
    x1_d2 = FieldGenSection.from_strings(chart2, vec=[0, "x1"])
    assert_allclose(lie_bracket(d1, x1_d2, [0.3, 0.5]), [0.0, 1.0])

    x2_d1 = FieldGenSection.from_strings(chart2, vec=["x2", 0])
    assert_allclose(lie_bracket(x2_d1, x1_d2, [1.0, 1.0]), [-1.0, 1.0])


def test_courant_bracket_examples(chart2):
    d1 = FieldGenSection.from_strings(chart2, vec=[1, 0])
    d2 = FieldGenSection.from_strings(chart2, vec=[0, 1])
    x1_dx2 = FieldGenSection.from_strings(chart2, cov=[0, "x1"])
    x2_dx1 = FieldGenSection.from_strings(chart2, cov=["x2", 0])
    point = [0.3, -0.4]

    assert_allclose(courant_bracket(d1, x1_dx2, point).as_array(), [0, 0, 0, 1], atol=1e-14)
    assert_allclose(courant_bracket(x2_dx1, d2, point).as_array(), [0, 0, -1, 0], atol=1e-14)
    assert courant_bracket(d1, d2, point).norm() == 0.0


def test_courant_identities(rng, chart4):
    a, b, c = (random_section(rng, chart4) for _ in range(3))
    function = random_polynomial(rng, chart4)
    theta = random_two_form(rng, chart4)
    residuals = courant_props_check(a, b, c, function, halton_points(chart4, 3), theta)
    assert residuals.worst < 1e-8


def test_pairing_jet_matches_finite_differences(rng, chart4):
    a, b = random_section(rng, chart4), random_section(rng, chart4)
    jet = pairing_jet(a.jet1(POINT4), b.jet1(POINT4))
    h = 1e-6
    expected = []
    for k in range(4):
        step = np.zeros(4)
        step[k] = h
        forward = pairing(a.value(POINT4 + step), b.value(POINT4 + step))
        backward = pairing(a.value(POINT4 - step), b.value(POINT4 - step))
        expected.append((forward - backward) / (2 * h))
    assert_allclose(jet.grad, expected, rtol=1e-6, atol=1e-7)


def test_exterior_derivative_of_one_form(chart2):
    form = np.array([chart2.parse(0), chart2.parse("x1")], dtype=object)
    assert_allclose(exterior_d(form, [0.5, 0.5]), [[0.0, 1.0], [-1.0, 0.0]])


def test_exterior_derivative_of_function(chart2):
    assert_allclose(exterior_d(chart2.parse("x1*x2"), [2.0, 3.0]), [3.0, 2.0])


def test_exterior_derivative_of_two_form(chart4):
    theta = FieldGenMetric.conformal(chart4, "1", {(1, 2): "x1"}).theta_exprs
    h = exterior_d(theta, POINT4)
    expected = np.zeros((4, 4, 4))
    for (i, j, k), sign in zip(itertools.permutations(range(3)), [1, -1, -1, 1, 1, -1]):
        expected[i, j, k] = sign
    assert_allclose(h, expected)


def test_constant_form_is_closed(chart4):
    form = FieldGenMetric.constant(chart4, np.eye(4), standard_complex_structure(4)).theta_exprs
    assert_allclose(exterior_d(form, POINT4), 0.0)


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_d_squared_vanishes(rng, chart4, degree):
    if degree == 0:
        form = chart4.parse("sin(x1*x2)*exp(x3) + x4^3")
    elif degree == 1:
        texts = ["x2^2*x3", "cos(x1+x4)", "x1*x2*x3*x4", "exp(x2)"]
        form = np.array([chart4.parse(text) for text in texts], dtype=object)
    else:
        form = random_two_form(rng, chart4, degree=3)
    assert np.max(np.abs(exterior_dd(form, POINT4))) < 1e-12


def test_exterior_derivative_rejects_symmetric_coefficients(chart2):
    form = np.array([[chart2.parse("x1"), chart2.parse(0)], [chart2.parse(0), chart2.parse(0)]], dtype=object)
    with pytest.raises(ValidationError, match="antisymmetric"):
        exterior_d(form, [0.5, 0.5])


def test_constant_structures_are_integrable(chart4):
    j = standard_complex_structure(4)
    u, v = np.array([1, -1j, 0, 0]), np.array([0, 0, 1, -1j])
    for structure in (from_complex(j), from_complex_bivector(j, np.outer(u, v) - np.outer(v, u))):
        endo = FieldEndo.constant(chart4, structure.m)
        assert largest_nijenhuis(endo, chart4, POINT4) < 1e-12


def test_nijenhuis_of_symplectic_fields(chart4):
    assert largest_nijenhuis(symplectic_field(chart4, "exp(x1)"), chart4, POINT4) < 1e-10
    assert largest_nijenhuis(symplectic_field(chart4, "exp(x3)"), chart4, POINT4) > 1e-3


def test_nijenhuis_is_tensorial(rng, chart4):
    endo = symplectic_field(chart4, "exp(x3)")
    a, b = random_section(rng, chart4), random_section(rng, chart4)
    function = chart4.parse("1 + x1*x4 - x2^2")
    scaled = FieldGenSection(chart4, np.array([BinOp("*", function, entry) for entry in a.exprs], dtype=object))
    base = nijenhuis_field(endo, a, b, POINT4).as_array()
    factor = evaluate(function, POINT4)
    assert_allclose(nijenhuis_field(endo, scaled, b, POINT4).as_array(), factor * base, atol=1e-9)
    swapped = nijenhuis_field(endo, b, a, POINT4).as_array()
    assert_allclose(nijenhuis_field(endo, b, scaled, POINT4).as_array(), factor * swapped, atol=1e-9)


def test_chart_validation():
    with pytest.raises(ValidationError, match="even"):
        Chart(("x1", "x2", "x3"), ((0, 1),) * 3)
    with pytest.raises(ValidationError, match="degenerate"):
        Chart(("x1", "x2"), ((0, 1), (1, 1)))
    with pytest.raises(ValidationError, match="point has 3 coordinates"):
        FieldGenSection.from_strings(Chart.cube(2), vec=[1, 0]).value([0.0, 0.0, 0.0])


def test_metric_jets_are_shared_across_threads(chart4):
    gm = FieldGenMetric.conformal(chart4, "exp(x1*x2)", {(0, 1): "x3"})
    jets = fan_out(lambda _: gm.jets(POINT4), range(16), 4)
    assert all(jet is jets[0] for jet in jets)
    assert gm.jets(POINT4.copy()) is jets[0]
