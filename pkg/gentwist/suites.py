"""
gentwist suites library.

One battery of verdicts per suite. Every check runs over the low-discrepancy base points of the spec and draws
its random inputs from a generator keyed on (seed, check name, point index), so reports do not depend on the
fan-out width.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

import time
import zlib
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from .connections import (
    courant_connection_check,
    generalized_connection,
    levi_civita,
    lift_section,
    parallel_extension,
    torsion_connection,
)
from .console import log
from .curvature import (
    bianchi_residual,
    constant_curvature_residual,
    operator_constant_residual,
    pair_symmetry_residual,
    self_dual_projectors,
)
from .errors import ConfigError
from .expr import eval_jet
from .fields import (
    Chart,
    FieldEndo,
    SectionJet,
    courant_props_check,
    exterior_dd,
    nijenhuis_jets,
    pairing_jet,
)
from .integrability import (
    PointGeometry,
    Verdict,
    b_transform_equivalence,
    direct_horizontal_nijenhuis,
    horizontal_nijenhuis,
    horizontal_witness_search,
    mixed_covector_nijenhuis,
    mixed_nijenhuis,
    nijenhuis_components,
    nonintegrability_witness,
    point_geometry,
    psi_bar_agreement,
    psi_bar_condition,
    theorem1_predicate,
    theorem2_predicate,
)
from .linalg import (
    GenElement,
    GenMetric,
    classify_component,
    compatibility_residuals,
    conjugate,
    extract_pair,
    pairing,
    project,
    second_structure,
    structure_residuals,
)
from .report import Report, SuiteResult
from .sampling import (
    fan_out,
    halton_points,
    random_element,
    random_gen_metric,
    random_polynomial,
    random_section,
    random_two_form,
    random_vector,
    random_vector_field,
    rng_for,
)
from .spec_file import CheckConfig, ManifoldSpec
from .twistor import (
    FiberPoint,
    Jeps_action,
    K_eps,
    VertCovec,
    fiber_involution,
    fiber_metric,
    fiber_swap,
    natural_pairing,
    random_fiber_point,
    random_tangent,
    random_vertical,
)
from .types import Component, Expectation, Matrix, Point, Side, Suite

Check = Callable[[PointGeometry, np.random.Generator], float]

EPSILONS = (1, 2, 3, 4)


def _stream(name: str) -> int:
    return zlib.crc32(name.encode())


def _gap(first: Matrix, second: Matrix) -> float:
    return float(np.max(np.abs(np.asarray(first) - np.asarray(second))))


@dataclass
class SuiteContext:
    """Spec, configuration and the per-point geometry shared by the suites of one run."""

    spec: ManifoldSpec
    config: CheckConfig
    partner: ManifoldSpec | None = None

    @cached_property
    def points(self) -> list[Point]:
        """Base points in the chart box."""
        return halton_points(self.spec.chart, self.config.points, seed=self.config.seed)

    def _geometries(self, spec: ManifoldSpec) -> list[PointGeometry]:
        metric, orientation = spec.metric, spec.chart.orientation
        return fan_out(lambda point: point_geometry(metric, point, orientation), self.points, self.config.threads)

    @cached_property
    def geometries(self) -> list[PointGeometry]:
        """Pointwise data of the spec's generalized metric."""
        return self._geometries(self.spec)

    @cached_property
    def partner_geometries(self) -> list[PointGeometry]:
        """Pointwise data of the comparison metric (Θ̂ = 0 unless a partner spec is given)."""
        partner = self.partner or self.spec.untwisted()
        if partner.chart.coords != self.spec.chart.coords:
            raise ConfigError(f"partner {partner.name} uses another chart than {self.spec.name}")
        return self._geometries(partner)

    @property
    def chart(self) -> Chart:
        """The spec's chart."""
        return self.spec.chart

    @property
    def components(self) -> list[Component]:
        """Non-empty fiber components in this dimension."""
        return [component for component in Component if component.mixed or self.spec.n % 4 == 0]

    def fibers(self, geometry: PointGeometry, rng: np.random.Generator) -> Iterable[FiberPoint]:
        """Random fiber points cycling through the non-empty components."""
        components = self.components
        for index in range(self.config.fibers):
            component = components[index % len(components)]
            yield random_fiber_point(geometry.metric, component, rng, geometry.point, geometry.orientation)

    def pointwise(
        self,
        predicate: str,
        check: Check,
        per_point: int = 1,
        component: Component | None = None,
        expected: Expectation = Expectation.PASS,
    ) -> Verdict:
        """Max residual of a check over the base points."""
        stream = _stream(f"{predicate}[{component.value if component else ''}]")
        seed = self.config.seed

        def task(item: tuple[int, PointGeometry]) -> float:
            index, geometry = item
            return float(check(geometry, rng_for(seed, stream, index)))

        residuals = fan_out(task, list(enumerate(self.geometries)), self.config.threads)
        worst = int(np.argmax(residuals)) if residuals else 0
        verdict = Verdict.from_residual(
            predicate,
            residuals[worst] if residuals else 0.0,
            len(residuals) * per_point,
            self.config.tolerance,
            component,
            self.geometries[worst].witness() if residuals else None,
        )
        verdict.expected = expected
        return verdict


def linalg_suite(context: SuiteContext) -> list[Verdict]:
    """Pointwise algebra of compatible generalized complex structures."""
    fibers, probes = context.config.fibers, context.config.probes

    def structure(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            worst = max(worst, *structure_residuals(fp.structure.m), *compatibility_residuals(fp.metric, fp.structure))
        return worst

    def roundtrip(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            j1, j2 = extract_pair(fp.metric, fp.structure)
            worst = max(worst, _gap(j1, fp.j1), _gap(j2, fp.j2))
        return worst

    def projection(geometry: PointGeometry, rng: np.random.Generator) -> float:
        metric = geometry.metric
        n = metric.n
        lifts = np.hstack([metric.lift_plus, metric.lift_minus])
        worst = 0.0
        for _ in range(probes):
            a = random_element(rng, n)
            plus, minus = project(metric, a)
            oracle = np.linalg.solve(lifts, a.as_array())
            worst = max(worst, _gap(plus.vec, oracle[:n]), _gap(minus.vec, oracle[n:]), (plus + minus - a).norm())
        return worst

    def second(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            j1, j2 = extract_pair(fp.metric, second_structure(fp.metric, fp.structure))
            worst = max(worst, _gap(j1, fp.j1), _gap(j2, -fp.j2))
        return worst

    def b_transform(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            b = rng.standard_normal((fp.n, fp.n))
            b = b - b.T
            shifted = GenMetric(fp.metric.g, fp.metric.theta + b)
            j1, j2 = extract_pair(shifted, conjugate(b, fp.structure))
            worst = max(worst, _gap(j1, fp.j1), _gap(j2, fp.j2))
        return worst

    def classification(geometry: PointGeometry, rng: np.random.Generator) -> float:
        for fp in context.fibers(geometry, rng):
            if classify_component(fp.metric, fp.structure, fp.orientation) is not fp.component:
                return 1.0
        return 0.0

    return [
        context.pointwise("assemble_structure", structure, fibers),
        context.pointwise("pair_roundtrip", roundtrip, fibers),
        context.pointwise("projection_oracle", projection, probes),
        context.pointwise("second_structure", second, fibers),
        context.pointwise("b_transform_compatible", b_transform, fibers),
        context.pointwise("classification", classification, fibers),
    ]


def _symplectic_structure(chart: Chart, factor: str, inverse: str) -> FieldEndo:
    """Generalized complex structure of ω = f dx¹∧dx² + dx³∧dx⁴ + ..., f and 1/f given as expression texts."""
    n = chart.n
    rows: list[list[str | float]] = [[0.0] * (2 * n) for _ in range(2 * n)]
    # upper right block (ωᵀ)⁻¹, lower left block −ωᵀ = ω
    rows[0][n + 1], rows[1][n] = inverse, f"-{inverse}"
    rows[n][1], rows[n + 1][0] = factor, f"-{factor}"
    for k in range(2, n, 2):
        rows[k][n + k + 1], rows[k + 1][n + k] = 1.0, -1.0
        rows[n + k][k + 1], rows[n + k + 1][k] = 1.0, -1.0
    return FieldEndo.from_strings(chart, rows)


def _basis_nijenhuis(endo: FieldEndo, point: Point) -> float:
    jet = endo.jet1(point)
    size = 2 * endo.chart.n
    basis = [SectionJet.constant(GenElement.from_array(column)) for column in np.eye(size)]
    return max(
        nijenhuis_jets(jet, basis[first], basis[second]).norm()
        for first in range(size)
        for second in range(first + 1, size)
    )


def courant_suite(context: SuiteContext) -> list[Verdict]:
    """Courant bracket identities, Nijenhuis tensoriality and the symplectic examples."""
    chart = context.chart
    n = chart.n
    fibers = context.config.fibers

    def identities(geometry: PointGeometry, rng: np.random.Generator) -> float:
        a, b, c = (random_section(rng, chart) for _ in range(3))
        theta = random_two_form(rng, chart)
        return courant_props_check(a, b, c, random_polynomial(rng, chart), [geometry.point], theta).worst

    def tensoriality(geometry: PointGeometry, rng: np.random.Generator) -> float:
        point = geometry.point
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            j = parallel_extension(context.spec.metric, fp.structure, point).jet1(point)
            a, b = random_section(rng, chart).jet1(point), random_section(rng, chart).jet1(point)
            f = eval_jet(random_polynomial(rng, chart), point)
            base = nijenhuis_jets(j, a, b)
            worst = max(
                worst,
                (nijenhuis_jets(j, a, b.scaled(f)) - base * f.val).norm(),
                (nijenhuis_jets(j, a.scaled(f), b) - base * f.val).norm(),
            )
        return worst

    def constant_structure(geometry: PointGeometry, rng: np.random.Generator) -> float:
        metric = random_gen_metric(rng, n)
        fp = random_fiber_point(metric, context.components[0], rng)
        endo = FieldEndo.constant(chart, fp.structure.m).jet1(geometry.point)
        worst = 0.0
        for _ in range(fibers):
            a, b = random_section(rng, chart).jet1(geometry.point), random_section(rng, chart).jet1(geometry.point)
            worst = max(worst, nijenhuis_jets(endo, a, b).norm())
        return worst

    def dd(geometry: PointGeometry, rng: np.random.Generator) -> float:
        one_form = np.array([random_polynomial(rng, chart, degree=3) for _ in range(n)], dtype=object)
        forms = (random_polynomial(rng, chart, degree=3), one_form, random_two_form(rng, chart, degree=3))
        return max(float(np.max(np.abs(exterior_dd(form, geometry.point)))) for form in forms)

    verdicts = [
        context.pointwise("courant_identities", identities),
        context.pointwise("nijenhuis_tensorial", tensoriality, fibers),
        context.pointwise("constant_structure_integrable", constant_structure, fibers),
        context.pointwise("dd_zero", dd, 3),
    ]

    tolerance = context.config.tolerance
    if n < 4:
        reason = "the symplectic examples need dimension at least 4"
        verdicts.append(Verdict.not_applicable("symplectic_nijenhuis_vanishes", None, tolerance, reason))
        verdicts.append(Verdict.not_applicable("closed_symplectic_nijenhuis_vanishes", None, tolerance, reason))
        return verdicts

    first, third = chart.coords[0], chart.coords[2]
    open_form = _symplectic_structure(chart, f"exp({third})", f"exp(-{third})")
    closed_form = _symplectic_structure(chart, f"exp({first})", f"exp(-{first})")
    verdicts.append(
        context.pointwise(
            "symplectic_nijenhuis_vanishes",
            lambda geometry, _: _basis_nijenhuis(open_form, geometry.point),
            expected=Expectation.FAIL,
        )
    )
    verdicts.append(
        context.pointwise(
            "closed_symplectic_nijenhuis_vanishes", lambda geometry, _: _basis_nijenhuis(closed_form, geometry.point)
        )
    )
    return verdicts


def connection_suite(context: SuiteContext) -> list[Verdict]:
    """Levi-Civita, skew-torsion and generalized connections at the base points."""
    gm, chart = context.spec.metric, context.chart
    n = chart.n
    probes = context.config.probes

    def levi(geometry: PointGeometry, _: np.random.Generator) -> float:
        g, _ = gm.jets(geometry.point)
        return levi_civita(gm, geometry.point).metric_residual(g.val, g.grad)

    def torsion(geometry: PointGeometry, _: np.random.Generator) -> float:
        connection = torsion_connection(gm, geometry.point)
        lowered = np.einsum("ijk,kl->ijl", connection.torsion, geometry.metric.g)
        return _gap(lowered, connection.three_form)

    def torsion_metric(geometry: PointGeometry, _: np.random.Generator) -> float:
        g, _ = gm.jets(geometry.point)
        connection = torsion_connection(gm, geometry.point)
        return max(
            connection.nabla.metric_residual(g.val, g.grad), connection.nabla_opposite.metric_residual(g.val, g.grad)
        )

    def averaging(geometry: PointGeometry, _: np.random.Generator) -> float:
        return torsion_connection(gm, geometry.point).averaging_residual

    def courant(geometry: PointGeometry, rng: np.random.Generator) -> float:
        section = lift_section(gm, random_vector_field(rng, chart), Side.PLUS)
        return courant_connection_check(gm, random_vector(rng, n), section, geometry.point)

    def pairing_compatible(geometry: PointGeometry, rng: np.random.Generator) -> float:
        point = geometry.point
        coefficients = generalized_connection(gm, point)
        worst = 0.0
        for _ in range(probes):
            a, b = random_section(rng, chart).jet1(point), random_section(rng, chart).jet1(point)
            z = random_vector(rng, n)
            da = GenElement.from_array(coefficients.derivative(z, a.val, a.grad))
            db = GenElement.from_array(coefficients.derivative(z, b.val, b.grad))
            derivative = float(pairing_jet(a, b).grad @ z)
            worst = max(worst, abs(derivative - pairing(da, b.element) - pairing(a.element, db)))
        return worst

    def preserves(geometry: PointGeometry, rng: np.random.Generator) -> float:
        point = geometry.point
        coefficients = generalized_connection(gm, point)
        worst = 0.0
        for side, other in ((Side.PLUS, 1), (Side.MINUS, 0)):
            section = lift_section(gm, random_vector_field(rng, chart), side).jet1(point)
            derivative = coefficients.derivative(random_vector(rng, n), section.val, section.grad)
            worst = max(worst, project(geometry.metric, GenElement.from_array(derivative))[other].norm())
        return worst

    def extension(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            value = parallel_extension(gm, fp.structure, geometry.point).value_at(geometry.point)
            worst = max(worst, _gap(value.m, fp.structure.m))
        return worst

    return [
        context.pointwise("levi_civita_metric", levi),
        context.pointwise("torsion_identity", torsion),
        context.pointwise("torsion_connection_metric", torsion_metric),
        context.pointwise("torsion_averaging", averaging),
        context.pointwise("courant_connection", courant),
        context.pointwise("generalized_connection_metric", pairing_compatible, probes),
        context.pointwise("generalized_connection_preserves_eigenbundles", preserves, 2),
        context.pointwise("parallel_extension_base", extension, context.config.fibers),
    ]


def curvature_suite(context: SuiteContext) -> list[Verdict]:
    """Symmetries and decomposition of the Riemann tensor of g."""
    tolerance = context.config.tolerance

    def bianchi(geometry: PointGeometry, _: np.random.Generator) -> float:
        return bianchi_residual(geometry.levi_civita_curvature)

    def symmetry(geometry: PointGeometry, _: np.random.Generator) -> float:
        return pair_symmetry_residual(geometry.levi_civita_curvature, geometry.metric.g)

    def reassembly(geometry: PointGeometry, _: np.random.Generator) -> float:
        return geometry.decomposition.reassembly_residual(geometry.operator)

    def orthogonality(geometry: PointGeometry, _: np.random.Generator) -> float:
        return geometry.decomposition.orthogonality_residual()

    def detectors(geometry: PointGeometry, _: np.random.Generator) -> float:
        tensor = constant_curvature_residual(geometry.levi_civita_curvature, geometry.metric.g) <= tolerance
        operator = operator_constant_residual(geometry.operator) <= tolerance
        return 0.0 if tensor == operator else 1.0

    verdicts = [
        context.pointwise("bianchi", bianchi),
        context.pointwise("pair_symmetry", symmetry),
        context.pointwise("decomposition_reassembly", reassembly),
        context.pointwise("decomposition_orthogonality", orthogonality),
        context.pointwise("constant_curvature_detectors", detectors),
    ]
    if context.spec.n != 4:
        return verdicts

    def swaps_duality(geometry: PointGeometry, _: np.random.Generator) -> float:
        plus, minus = self_dual_projectors(4, geometry.orientation)
        b_op = geometry.decomposition.b_op
        return max(float(np.max(np.abs(plus @ b_op @ plus))), float(np.max(np.abs(minus @ b_op @ minus))))

    def weyl_traces(geometry: PointGeometry, _: np.random.Generator) -> float:
        parts = geometry.decomposition
        return max(abs(float(np.trace(parts.w_plus))), abs(float(np.trace(parts.w_minus))))

    verdicts.append(context.pointwise("traceless_ricci_swaps_duality", swaps_duality))
    verdicts.append(context.pointwise("weyl_halves_trace_free", weyl_traces))
    return verdicts


def twistor_suite(context: SuiteContext) -> list[Verdict]:
    """Fiber algebra of the generalized twistor space and the Nijenhuis components of J_ε."""
    gm = context.spec.metric
    fibers = context.config.fibers

    def k_square(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            v, w = random_vertical(rng, fp), random_vertical(rng, fp)
            for eps in EPSILONS:
                kv, kw = K_eps(fp, v, eps), K_eps(fp, w, eps)
                worst = max(
                    worst,
                    (K_eps(fp, kv, eps) + v).norm(),
                    abs(fiber_metric(kv, kw) - fiber_metric(v, w)),
                    kv.residual(fp),
                )
        return worst

    def j_square(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            t, s = random_tangent(rng, fp), random_tangent(rng, fp)
            for eps in EPSILONS:
                jt, js = Jeps_action(fp, t, eps), Jeps_action(fp, s, eps)
                square = Jeps_action(fp, jt, eps)
                skew = pairing(jt.h, s.h) + pairing(t.h, js.h)
                skew += natural_pairing((jt.v, jt.vstar), (s.v, s.vstar))
                skew += natural_pairing((t.v, t.vstar), (js.v, js.vstar))
                worst = max(worst, (square - (-t)).norm(), abs(skew))
        return worst

    def involutions(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            flipped = fiber_involution(fp).structure.m
            worst = max(worst, _gap(flipped, second_structure(fp.metric, fp.structure).m))
            first, second = fp.component.signs
            if fiber_swap(fp).component is not Component.from_signs(second, first):
                return 1.0
            if classify_component(fp.metric, fp.structure, fp.orientation) is not fp.component:
                return 1.0
        return worst

    def witness(geometry: PointGeometry, _: np.random.Generator) -> float:
        if geometry.n < 4:
            return 0.0
        return max(nonintegrability_witness(geometry.metric, geometry.orientation).values())

    def crosscheck(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            a, b = random_element(rng, fp.n), random_element(rng, fp.n)
            closed = horizontal_nijenhuis(geometry, fp, a, b)
            direct = direct_horizontal_nijenhuis(gm, geometry.point, fp, a, b)
            worst = max(worst, (closed - direct).norm())
        return worst

    def antisymmetry(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            a, b = random_element(rng, fp.n), random_element(rng, fp.n)
            for eps in EPSILONS:
                forward = nijenhuis_components(geometry, fp, a, b, eps)
                backward = nijenhuis_components(geometry, fp, b, a, eps)
                worst = max(
                    worst,
                    (forward.hor + backward.hor).norm(),
                    (forward.vert + backward.vert).norm(),
                    (forward.vertstar + backward.vertstar).norm(),
                )
        return worst

    def bilinearity(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            a, a2, b = (random_element(rng, fp.n) for _ in range(3))
            scale = float(rng.normal())
            for eps in EPSILONS:
                combined = nijenhuis_components(geometry, fp, a + a2 * scale, b, eps)
                first = nijenhuis_components(geometry, fp, a, b, eps)
                second = nijenhuis_components(geometry, fp, a2, b, eps)
                worst = max(
                    worst,
                    (combined.hor - first.hor - second.hor * scale).norm(),
                    (combined.vert - first.vert - second.vert * scale).norm(),
                    (combined.vertstar - first.vertstar - second.vertstar * scale).norm(),
                )
        return worst

    def eps_independence(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            a, b = random_element(rng, fp.n), random_element(rng, fp.n)
            reference = nijenhuis_components(geometry, fp, a, b, 1).hor
            for eps in EPSILONS[1:]:
                worst = max(worst, (nijenhuis_components(geometry, fp, a, b, eps).hor - reference).norm())
        return worst

    def mixed_first(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            worst = max(worst, mixed_nijenhuis(fp, random_element(rng, fp.n), random_vertical(rng, fp), 1).norm())
        return worst

    def covector(geometry: PointGeometry, rng: np.random.Generator) -> float:
        worst = 0.0
        for fp in context.fibers(geometry, rng):
            a, probe = random_element(rng, fp.n), random_element(rng, fp.n)
            phi, psi = VertCovec(random_vertical(rng, fp)), VertCovec(random_vertical(rng, fp))
            zero = VertCovec(random_vertical(rng, fp) * 0.0)
            for eps in EPSILONS:
                total = mixed_covector_nijenhuis(geometry, fp, a, phi + psi, eps, probe)
                parts = mixed_covector_nijenhuis(geometry, fp, a, phi, eps, probe)
                parts += mixed_covector_nijenhuis(geometry, fp, a, psi, eps, probe)
                worst = max(worst, abs(total - parts), abs(mixed_covector_nijenhuis(geometry, fp, a, zero, eps, probe)))
        return worst

    residual, where = horizontal_witness_search(context.geometries, context.config.sampling)
    vanishing = Verdict.from_residual(
        "horizontal_nijenhuis_vanishes",
        residual,
        len(context.geometries) * fibers * context.config.probes,
        context.config.tolerance,
        witness=where,
    )

    return [
        context.pointwise("fiber_structures", k_square, fibers),
        context.pointwise("twistor_structures", j_square, fibers),
        context.pointwise("fiber_involutions", involutions, fibers),
        context.pointwise("nonintegrability_witness", witness),
        context.pointwise("horizontal_crosscheck", crosscheck, fibers),
        vanishing,
        context.pointwise("nijenhuis_antisymmetry", antisymmetry, fibers),
        context.pointwise("nijenhuis_bilinearity", bilinearity, fibers),
        context.pointwise("horizontal_eps_independence", eps_independence, fibers),
        context.pointwise("mixed_nijenhuis_first_structure", mixed_first, fibers),
        context.pointwise("mixed_covector_consistency", covector, fibers),
    ]


def theorems_suite(context: SuiteContext) -> list[Verdict]:
    """Curvature criteria for the integrability of J₁ and J₄ on each fiber component."""
    geometries, sampling = context.geometries, context.config.sampling
    verdicts: list[Verdict] = []
    for component in (Component.PP, Component.MM):
        verdicts.extend(theorem1_predicate(geometries, component, sampling))
    for component in (Component.PM, Component.MP):
        verdicts.extend(theorem2_predicate(geometries, component, sampling))
    for component in Component:
        psi_bar = psi_bar_condition(geometries, component, sampling)
        verdicts.extend([psi_bar, psi_bar_agreement(geometries, psi_bar, sampling)])
    return verdicts


def equivalence_suite(context: SuiteContext) -> list[Verdict]:
    """B-transform equivalence with the partner metric."""
    return b_transform_equivalence(context.geometries, context.partner_geometries, context.config.sampling)


BATTERIES: dict[Suite, Callable[[SuiteContext], list[Verdict]]] = {
    Suite.LINALG: linalg_suite,
    Suite.COURANT: courant_suite,
    Suite.CONNECTION: connection_suite,
    Suite.CURVATURE: curvature_suite,
    Suite.TWISTOR: twistor_suite,
    Suite.THEOREMS: theorems_suite,
    Suite.EQUIVALENCE: equivalence_suite,
}


def _suite(name: Suite | str) -> Suite:
    try:
        return Suite(name)
    except ValueError as error:
        known = ", ".join(suite.value for suite in Suite)
        raise ConfigError(f"unknown suite {name!r} (known: {known})") from error


def run_suite(context: SuiteContext, suite: Suite | str) -> SuiteResult:
    """Run one battery and apply the spec's expectations."""
    suite = _suite(suite)
    log.info(":microscope: running %s on %s", suite.value, context.spec.name)
    start = time.perf_counter()
    verdicts = BATTERIES[suite](context)
    for verdict in verdicts:
        if verdict.label in context.spec.expect:
            verdict.expected = context.spec.expect[verdict.label]
    elapsed = round((time.perf_counter() - start) * 1000, 3)
    failed = [verdict.label for verdict in verdicts if not verdict.as_expected]
    if failed:
        log.info(":x: %s: unexpected %s", suite.value, ", ".join(failed))
    else:
        log.info(":white_check_mark: %s: %s verdicts as expected", suite.value, len(verdicts))
    return SuiteResult(suite.value, verdicts, elapsed)


def run_suites(
    spec: ManifoldSpec,
    suites: Iterable[Suite | str],
    config: CheckConfig,
    partner: ManifoldSpec | None = None,
    on_suite: Callable[[SuiteResult], None] | None = None,
) -> Report:
    """Run suites in the given order into one report."""
    suites = [_suite(name) for name in suites]
    context = SuiteContext(spec, config, partner)
    report = Report(spec.spec_hash, config.seed)
    for suite in suites:
        result = run_suite(context, suite)
        report.suites.append(result)
        if on_suite is not None:
            on_suite(result)
    return report
