"""
gentwist integrability library.

Nijenhuis components of the generalized almost complex structures J_ε on the generalized twistor space at a point
(J over p), and the integrability predicates built on them.

Everything here is algebraic in the data at p: the metric, the torsion T of ∇ (g(T(X,Y),Z) = dΘ(X,Y,Z)) and the
curvature of ∇, collected once per point in a PointGeometry.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from .connections import parallel_extension, torsion_connection
from .console import log
from .curvature import (
    CurvDecomp,
    CurvOp,
    bivector,
    curvature_action,
    curvature_form,
    curvature_operator,
    decompose,
    lower,
    riemann,
)
from .errors import PreconditionError, ValidationError
from .fields import FieldGenMetric, SectionJet, nijenhuis_jets
from .linalg import (
    GenComplex,
    GenElement,
    GenMetric,
    classify_component,
    conjugate,
    exp_b,
    extract_pair,
    lift,
    orthonormal_frame,
    standard_complex_structure,
    untwisted_structure,
)
from .sampling import fan_out, random_element, random_vector, rng_for
from .twistor import (
    FiberPoint,
    K_eps,
    VertCovec,
    VertVec,
    frame_generator,
    omega_eps,
    random_fiber_point,
    random_vertical,
    vertical_endomorphism,
)
from .types import Component, ConnectionKind, Expectation, JSONDict, Matrix, Point, Side


@dataclass
class Verdict:
    """Outcome of one predicate: fails exactly when the max residual exceeds the tolerance."""

    predicate: str
    component: Component | None
    passed: bool | None
    max_residual: float
    samples: int
    tolerance: float
    witness: JSONDict | None = None
    reason: str | None = None
    expected: Expectation = Expectation.PASS

    @classmethod
    def from_residual(
        cls,
        predicate: str,
        residual: float,
        samples: int,
        tolerance: float,
        component: Component | None = None,
        witness: JSONDict | None = None,
        reason: str | None = None,
    ) -> Verdict:
        """Verdict for a max residual; the witness is kept only on failure."""
        passed = bool(residual <= tolerance)
        return cls(
            predicate=predicate,
            component=component,
            passed=passed,
            max_residual=float(residual),
            samples=samples,
            tolerance=tolerance,
            witness=None if passed else witness,
            reason=None if passed else reason,
        )

    @classmethod
    def not_applicable(cls, predicate: str, component: Component | None, tolerance: float, reason: str) -> Verdict:
        """Verdict for a predicate that has no meaning for the input."""
        return cls(predicate, component, None, 0.0, 0, tolerance, reason=reason)

    @property
    def label(self) -> str:
        """predicate[component]."""
        return f"{self.predicate}[{self.component.value}]" if self.component else self.predicate

    @property
    def as_expected(self) -> bool:
        """Whether the outcome matches the expectation; not-applicable verdicts always match."""
        if self.passed is None:
            return True
        return self.passed == (self.expected is Expectation.PASS)

    def to_dict(self) -> JSONDict:
        """JSON form; ``pass`` is null for not-applicable verdicts."""
        data: JSONDict = {
            "predicate": self.predicate,
            "component": self.component.value if self.component else None,
            "pass": self.passed,
            "max_residual": self.max_residual,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "expected": self.expected.value,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        if self.reason is not None:
            data["reason"] = self.reason
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Verdict:
        """Inverse of to_dict."""
        return cls(
            predicate=data["predicate"],
            component=Component(data["component"]) if data.get("component") else None,
            passed=data["pass"],
            max_residual=float(data["max_residual"]),
            samples=int(data["samples"]),
            tolerance=float(data["tolerance"]),
            witness=data.get("witness"),
            reason=data.get("reason"),
            expected=Expectation(data.get("expected", Expectation.PASS.value)),
        )


@dataclass(frozen=True, eq=False)
class NijComponents:
    """Horizontal, vertical and vertical-covector parts of N_ε(A^h, B^h)."""

    hor: GenElement
    vert: VertVec
    vertstar: VertCovec

    def norm(self) -> float:
        """Max-abs norm over the parts."""
        return max(self.hor.norm(), self.vert.norm(), self.vertstar.norm())


@dataclass(frozen=True, eq=False)
class PointGeometry:
    """Pointwise data of a generalized metric field used by every Nijenhuis formula."""

    point: Point
    metric: GenMetric
    torsion: Matrix
    three_form: Matrix
    curvature: Matrix
    levi_civita_curvature: Matrix
    orientation: int = 1

    @property
    def n(self) -> int:
        """Dimension."""
        return self.metric.n

    @property
    def closed(self) -> float:
        """Max |dΘ| at the point."""
        return float(np.max(np.abs(self.three_form))) if self.three_form.size else 0.0

    @cached_property
    def lowered(self) -> Matrix:
        """Lowered Levi-Civita curvature."""
        return lower(self.levi_civita_curvature, self.metric.g)

    @cached_property
    def operator(self) -> CurvOp:
        """Curvature operator of g."""
        return curvature_operator(self.levi_civita_curvature, self.metric.g)

    @cached_property
    def decomposition(self) -> CurvDecomp:
        """Splitting of the curvature operator."""
        return decompose(self.operator, self.orientation)

    def witness(self, **extra: Any) -> JSONDict:
        """Witness record anchored at this point."""
        return {"point": [float(value) for value in self.point], **extra}


def point_geometry(gm: FieldGenMetric, point: Point, orientation: int = 1) -> PointGeometry:
    """Collect metric, torsion and curvature at a point."""
    point = np.asarray(point, dtype=float)
    connection = torsion_connection(gm, point)
    return PointGeometry(
        point=point,
        metric=gm.at(point),
        torsion=connection.torsion,
        three_form=connection.three_form,
        curvature=riemann(gm, point, ConnectionKind.TORSION),
        levi_civita_curvature=riemann(gm, point, ConnectionKind.LEVI_CIVITA),
        orientation=orientation,
    )


def _torsion_vector(torsion: Matrix, x: Matrix, y: Matrix) -> Matrix:
    return np.einsum("ijk,i,j->k", torsion, x, y)


def _form_torsion(torsion: Matrix, alpha: Matrix, y: Matrix) -> Matrix:
    # Z ↦ α(T(Y, Z))
    return np.einsum("k,jzk,j->z", alpha, torsion, y)


def _untwisted_torsion(torsion: Matrix, a: Matrix, b: Matrix) -> Matrix:
    """−[A₀, B₀] at p for ∇-parallel sections: T(X,Y) + α(i_Y T) − β(i_X T)."""
    n = torsion.shape[0]
    x, alpha, y, beta = a[:n], a[n:], b[:n], b[n:]
    cov = _form_torsion(torsion, alpha, y) - _form_torsion(torsion, beta, x)
    return np.concatenate([_torsion_vector(torsion, x, y), cov])


def _three_form_defect(three_form: Matrix, x: Matrix, y: Matrix) -> Matrix:
    # H(Y, X, ·)
    return np.einsum("abc,a,b->c", three_form, y, x)


def horizontal_nijenhuis(geometry: PointGeometry, fp: FiberPoint, a: GenElement, b: GenElement) -> GenElement:
    """
    Horizontal part of N_ε(A^h, B^h) from the torsion of ∇ and dΘ; the same for every ε.

    With A₀ = e^{−Θ}A, K the untwisted structure of (g, J₁, J₂) and  = KA₀:
    N_K(A₀,B₀) = t(A₀,B₀) − t(Â,B̂) + K t(Â,B₀) + K t(A₀,B̂), t(A,B) = T(X,Y) + α(i_Y T) − β(i_X T);
    the result is e^Θ N_K plus the dΘ terms H(Y,X,·) − H(Ŷ,X̂,·) + 𝒥(H(Y,X̂,·) + H(Ŷ,X,·)).
    """
    metric = geometry.metric
    n = metric.n
    twist = exp_b(metric.theta)
    k = untwisted_structure(metric.g, fp.j1, fp.j2)
    a0 = exp_b(-metric.theta) @ a.as_array()
    b0 = exp_b(-metric.theta) @ b.as_array()
    a_hat, b_hat = k @ a0, k @ b0
    torsion = geometry.torsion

    n_k = (
        _untwisted_torsion(torsion, a0, b0)
        - _untwisted_torsion(torsion, a_hat, b_hat)
        + k @ (_untwisted_torsion(torsion, a_hat, b0) + _untwisted_torsion(torsion, a0, b_hat))
    )

    h = geometry.three_form
    x, y, x_hat, y_hat = a0[:n], b0[:n], a_hat[:n], b_hat[:n]
    defect = _three_form_defect(h, x, y) - _three_form_defect(h, x_hat, y_hat)
    crossed = _three_form_defect(h, x_hat, y) + _three_form_defect(h, x, y_hat)
    zero = np.zeros(n)
    result = (
        twist @ n_k
        + np.concatenate([zero, defect])
        + twist @ k @ np.concatenate([zero, crossed])
    )
    return GenElement.from_array(result)


def direct_horizontal_nijenhuis(
    gm: FieldGenMetric, point: Point, fp: FiberPoint, a: GenElement, b: GenElement
) -> GenElement:
    """Courant-bracket Nijenhuis tensor at p of a D-parallel extension of 𝒥, on constant sections."""
    extension = parallel_extension(gm, fp.structure, point)
    return nijenhuis_jets(extension.jet1(point), SectionJet.constant(a), SectionJet.constant(b))


def vertical_nijenhuis(
    geometry: PointGeometry, fp: FiberPoint, a: GenElement, b: GenElement, eps: int
) -> tuple[VertVec, VertCovec]:
    """
    Vertical and vertical-covector parts of N_ε(A^h, B^h).

    −R(X,Y)J + R(X̃,Ỹ)J − K_ε R(X̃,Y)J − K_ε R(X,Ỹ)J with X, Y, X̃, Ỹ the tangent parts of A, B, 𝒥A, 𝒥B,
    and the covector −ω^ε_{A,B}.
    """
    structure = fp.structure
    x, y = a.vec, b.vec
    x_j, y_j = structure.apply(a).vec, structure.apply(b).vec
    curvature = geometry.curvature

    def action(first: Matrix, second: Matrix) -> VertVec:
        return curvature_action(curvature, first, second, fp)

    vertical = (
        -action(x, y)
        + action(x_j, y_j)
        - K_eps(fp, action(x_j, y), eps)
        - K_eps(fp, action(x, y_j), eps)
    )
    return vertical, -omega_eps(fp, a, b, eps)


def mixed_nijenhuis(fp: FiberPoint, a: GenElement, v: VertVec, eps: int) -> GenElement:
    """N_ε(A^h, V) = (−(K_εV)A + (K₁V)A)^h."""
    difference = K_eps(fp, v, 1) - K_eps(fp, v, eps)
    return GenElement.from_array(vertical_endomorphism(fp, difference) @ a.as_array())


def mixed_covector_nijenhuis(
    geometry: PointGeometry, fp: FiberPoint, a: GenElement, phi: VertCovec, eps: int, probe: GenElement
) -> float:
    """⟨π_* N_ε(A^h, φ), B⟩ = −½ φ(𝒱 N_ε(A^h, B^h))."""
    vertical, _ = vertical_nijenhuis(geometry, fp, a, probe, eps)
    return -0.5 * phi.evaluate(vertical)


def nijenhuis_components(
    geometry: PointGeometry, fp: FiberPoint, a: GenElement, b: GenElement, eps: int
) -> NijComponents:
    """All parts of N_ε(A^h, B^h)."""
    vertical, covector = vertical_nijenhuis(geometry, fp, a, b, eps)
    return NijComponents(horizontal_nijenhuis(geometry, fp, a, b), vertical, covector)


def _require_closed(geometry: PointGeometry, tolerance: float) -> None:
    if geometry.closed > tolerance:
        raise PreconditionError(f"dΘ ≠ 0 at the point (max |dΘ| = {geometry.closed:.3e})")


def jklr_residual(
    geometry: PointGeometry,
    fp: FiberPoint,
    j: int,
    l: int,  # noqa: E741
    r: int,
    x: Matrix,
    y: Matrix,
    z: Matrix,
    u: Matrix,
    tolerance: float = 1e-9,
) -> float:
    """
    |g(ℛ(X∧Y − J_jX∧J_lY), Z∧U − J_rZ∧J_rU) − g(ℛ(J_jX∧Y + X∧J_lY), J_rZ∧U + Z∧J_rU)|.

    Only meaningful when dΘ = 0 at the point.
    """
    _require_closed(geometry, tolerance)
    structures = {1: fp.j1, 2: fp.j2}
    if {j, l, r} - set(structures):
        raise ValidationError(f"structure indices must be 1 or 2, got ({j}, {l}, {r})")
    jj, jl, jr = structures[j], structures[l], structures[r]
    lowered = geometry.lowered
    first = curvature_form(
        lowered, bivector(x, y) - bivector(jj @ x, jl @ y), bivector(z, u) - bivector(jr @ z, jr @ u)
    )
    second = curvature_form(
        lowered, bivector(jj @ x, y) + bivector(x, jl @ y), bivector(jr @ z, u) + bivector(z, jr @ u)
    )
    return abs(first - second)


def jklr_witness_fiber(metric: GenMetric, component: Component, orientation: int = 1) -> FiberPoint:
    """
    Fiber point in a same-orientation component on which constant curvature violates the (j,l,r) = (1,1,2) identity.

    In an orthonormal frame E: J₁E₁ = E₃, J₁E₂ = −E₄ and J₂E₁ = E₄, J₂E₂ = E₃. When this lands in the other
    same-orientation component the frame has its last vector reversed.
    """
    if component.mixed:
        raise ValidationError(f"the witness lives in ++ or --, got {component.value}")
    n = metric.n
    first = np.zeros((n, n))
    second = np.zeros((n, n))
    for (source, target), sign in (((0, 2), 1.0), ((1, 3), -1.0)):
        first[target, source] = sign
        first[source, target] = -sign
    for (source, target), sign in (((0, 3), 1.0), ((1, 2), 1.0)):
        second[target, source] = sign
        second[source, target] = -sign
    for start in range(4, n, 2):
        first[start + 1, start] = second[start + 1, start] = 1.0
        first[start, start + 1] = second[start, start + 1] = -1.0
    frame = orthonormal_frame(metric.g)
    reflected = frame.copy()
    reflected[:, -1] = -reflected[:, -1]
    for basis in (frame, reflected):
        inverse = np.linalg.inv(basis)
        fp = FiberPoint(metric, basis @ first @ inverse, basis @ second @ inverse, orientation=orientation)
        if fp.component is component:
            break
    return fp


def _jklr_scan(
    geometry: PointGeometry, component: Component, fibers: int, probes: int, rng: np.random.Generator
) -> tuple[float, JSONDict | None]:
    n = geometry.n
    points = [random_fiber_point(geometry.metric, component, rng, geometry.point, geometry.orientation)
              for _ in range(fibers)]
    if not component.mixed:
        points.insert(0, jklr_witness_fiber(geometry.metric, component, geometry.orientation))
    frame = orthonormal_frame(geometry.metric.g)
    worst, witness = 0.0, None
    for index, fp in enumerate(points):
        vectors = [tuple(frame[:, column] for column in range(4))]
        vectors += [tuple(random_vector(rng, n) for _ in range(4)) for _ in range(probes)]
        for (x, y, z, u), (j, l, r) in product(vectors, product((1, 2), repeat=3)):
            residual = jklr_residual(geometry, fp, j, l, r, x, y, z, u, tolerance=np.inf)
            if residual > worst:
                worst = residual
                witness = geometry.witness(fiber=index, indices=[j, l, r])
    return worst, witness


@dataclass(frozen=True)
class Sampling:
    """Sampling budget shared by the predicates."""

    fibers: int = 8
    probes: int = 24
    seed: int = 0
    tolerance: float = 1e-6
    threads: int = 1


def _inapplicable(geometries: Sequence[PointGeometry]) -> str | None:
    n = geometries[0].n if geometries else 0
    return f"dimension {n} is not divisible by 4" if n % 4 else None


def _closed_failure(geometries: Sequence[PointGeometry]) -> tuple[float, JSONDict | None]:
    worst, witness = 0.0, None
    for geometry in geometries:
        if geometry.closed > worst:
            worst, witness = geometry.closed, geometry.witness()
    return worst, witness


def _scan(
    geometries: Sequence[PointGeometry],
    evaluate: Callable[[tuple[int, PointGeometry]], tuple[float, JSONDict | None]],
    threads: int,
) -> tuple[float, JSONDict | None]:
    worst, witness = 0.0, None
    for residual, candidate in fan_out(evaluate, list(enumerate(geometries)), threads):
        if residual > worst:
            worst, witness = residual, candidate
    return worst, witness


def _theorem_verdicts(
    predicate: str,
    component: Component,
    geometries: Sequence[PointGeometry],
    sampling: Sampling,
    curvature_residual: Callable[[Sequence[PointGeometry]], tuple[float, JSONDict | None]],
    salt: int,
) -> list[Verdict]:
    tolerance = sampling.tolerance
    names = (predicate, f"{predicate}_jklr", f"{predicate}_agreement")
    reason = _inapplicable(geometries)
    if reason is not None:
        return [Verdict.not_applicable(name, component, tolerance, reason) for name in names]

    samples = len(geometries)
    closed, where = _closed_failure(geometries)
    if closed > tolerance:
        log.debug(":warning: %s[%s] short-circuits on dΘ ≠ 0", predicate, component.value)
        main = Verdict.from_residual(predicate, closed, samples, tolerance, component, where, "dΘ ≠ 0")
        jklr = Verdict.from_residual(names[1], closed, samples, tolerance, component, where, "dΘ ≠ 0")
    else:
        residual, witness = curvature_residual(geometries)
        main = Verdict.from_residual(predicate, residual, samples, tolerance, component, witness)

        def scan(task: tuple[int, PointGeometry]) -> tuple[float, JSONDict | None]:
            index, geometry = task
            rng = rng_for(sampling.seed, salt, index)
            return _jklr_scan(geometry, component, sampling.fibers, sampling.probes, rng)

        residual, witness = _scan(geometries, scan, sampling.threads)
        jklr = Verdict.from_residual(names[1], residual, samples * sampling.fibers, tolerance, component, witness)

    agree = main.passed == jklr.passed
    agreement = Verdict.from_residual(
        names[2], 0.0 if agree else 1.0, samples, tolerance, component, {"theorem": main.passed, "jklr": jklr.passed}
    )
    return [main, jklr, agreement]


def _max_over(
    geometries: Sequence[PointGeometry], value: Callable[[PointGeometry], float]
) -> tuple[float, JSONDict | None]:
    worst, witness = 0.0, None
    for geometry in geometries:
        residual = value(geometry)
        if residual > worst:
            worst, witness = residual, geometry.witness()
    return worst, witness


def _half_weyl_ricci(geometry: PointGeometry, component: Component) -> float:
    # 𝒲₊ and Ricci for ++, 𝒲₋ and Ricci for −−
    parts = geometry.decomposition
    weyl = parts.w_plus if component is Component.PP else parts.w_minus
    return max(float(np.max(np.abs(weyl))), float(np.max(np.abs(parts.ricci))))


def theorem1_predicate(geometries: Sequence[PointGeometry], component: Component, sampling: Sampling) -> list[Verdict]:
    """
    Integrability of J₁ or J₄ on a same-orientation component.

    Dimension 4: 𝒲₊ = 0 (for ++) or 𝒲₋ = 0 (for −−) together with Ricci = 0. Dimension ≥ 8: flatness.
    Returns the verdict, the sampled identity verdict and their agreement.
    """
    if component.mixed:
        raise ValidationError(f"theorem1 applies to ++ and --, got {component.value}")

    def residual(sample: Sequence[PointGeometry]) -> tuple[float, JSONDict | None]:
        if sample and sample[0].n == 4:
            return _max_over(sample, lambda geometry: _half_weyl_ricci(geometry, component))
        return _max_over(sample, lambda geometry: float(np.max(np.abs(geometry.operator.matrix))))

    return _theorem_verdicts("theorem1", component, geometries, sampling, residual, salt=1)


def theorem2_predicate(geometries: Sequence[PointGeometry], component: Component, sampling: Sampling) -> list[Verdict]:
    """Integrability on a mixed component: constant sectional curvature, with s constant across the samples."""
    if not component.mixed:
        raise ValidationError(f"theorem2 applies to +- and -+, got {component.value}")

    def residual(sample: Sequence[PointGeometry]) -> tuple[float, JSONDict | None]:
        worst, witness = _max_over(
            sample,
            lambda geometry: float(np.max(np.abs(geometry.operator.matrix - geometry.decomposition.scalar_part))),
        )
        scalars = [geometry.decomposition.scalar for geometry in sample]
        spread = max(scalars) - min(scalars) if scalars else 0.0
        if spread > worst:
            worst, witness = spread, {"scalar_curvature": [min(scalars), max(scalars)]}
        return worst, witness

    return _theorem_verdicts("theorem2", component, geometries, sampling, residual, salt=2)


def psi_bar_condition(geometries: Sequence[PointGeometry], component: Component, sampling: Sampling) -> Verdict:
    """g(ℛ(X∧Y), J_kZ∧U + Z∧J_kU) = 0 for k = 1, 2 over sampled fiber points and vectors."""
    tolerance = sampling.tolerance
    n = geometries[0].n if geometries else 0
    if n % 4 == 2 and not component.mixed:
        return Verdict.not_applicable("psi_bar", component, tolerance, f"component is empty in dimension {n}")

    def scan(task: tuple[int, PointGeometry]) -> tuple[float, JSONDict | None]:
        index, geometry = task
        rng = rng_for(sampling.seed, 3, index)
        worst, witness = 0.0, None
        for fiber in range(sampling.fibers):
            fp = random_fiber_point(geometry.metric, component, rng, geometry.point, geometry.orientation)
            for _ in range(sampling.probes):
                x, y, z, u = (random_vector(rng, n) for _ in range(4))
                for k, j in enumerate(fp.slots(), start=1):
                    pair = bivector(j @ z, u) + bivector(z, j @ u)
                    value = abs(curvature_form(geometry.lowered, bivector(x, y), pair))
                    if value > worst:
                        worst, witness = value, geometry.witness(fiber=fiber, k=k)
        return worst, witness

    residual, witness = _scan(geometries, scan, sampling.threads)
    return Verdict.from_residual(
        "psi_bar", residual, len(geometries) * sampling.fibers, tolerance, component, witness
    )


def psi_bar_agreement(geometries: Sequence[PointGeometry], psi_bar: Verdict, sampling: Sampling) -> Verdict:
    """
    Dimension 4: the Ψ̄ verdict of a component passes exactly when the curvature has the matching shape.

    Ricci-flat with 𝒲₊ = 0 for ++ (𝒲₋ = 0 for −−), flat for the mixed components.
    """
    component, tolerance = psi_bar.component, sampling.tolerance
    name = "psi_bar_agreement"
    n = geometries[0].n if geometries else 0
    if n != 4:
        return Verdict.not_applicable(name, component, tolerance, f"no curvature pattern in dimension {n}")
    if psi_bar.passed is None:
        return Verdict.not_applicable(name, component, tolerance, psi_bar.reason or "psi_bar is not applicable")

    if component.mixed:
        residual, _ = _max_over(geometries, lambda geometry: float(np.max(np.abs(geometry.operator.matrix))))
    else:
        residual, _ = _max_over(geometries, lambda geometry: _half_weyl_ricci(geometry, component))
    shaped = residual <= tolerance
    witness = {"psi_bar": psi_bar.passed, "curvature": shaped, "curvature_residual": residual}
    return Verdict.from_residual(
        name, 0.0 if shaped == psi_bar.passed else 1.0, len(geometries), tolerance, component, witness
    )


def b_transform_equivalence(
    geometries: Sequence[PointGeometry], partners: Sequence[PointGeometry], sampling: Sampling
) -> list[Verdict]:
    """
    Compare the Nijenhuis components of (g, Θ) and (g, Θ̂) along J ↦ e^Ψ J e^{−Ψ}, Ψ = Θ̂ − Θ.

    One verdict per fiber component; the residual collects the intertwining defects of every part and a
    classification mismatch counts as residual 1.
    """
    tolerance = sampling.tolerance
    samples = len(geometries)
    components = [
        component for component in Component if component.mixed or not geometries or geometries[0].n % 4 == 0
    ]

    metric_gap, where = 0.0, None
    for geometry, partner in zip(geometries, partners):
        gap = float(np.max(np.abs(geometry.metric.g - partner.metric.g)))
        if gap > metric_gap:
            metric_gap, where = gap, geometry.witness()
    if metric_gap > tolerance:
        return [
            Verdict.from_residual("b_transform", metric_gap, samples, tolerance, component, where, "metrics differ")
            for component in components
        ]

    closed_gap, where = 0.0, None
    for geometry, partner in zip(geometries, partners):
        gap = float(np.max(np.abs(partner.three_form - geometry.three_form)))
        if gap > closed_gap:
            closed_gap, where = gap, geometry.witness()
    if closed_gap > tolerance:
        return [
            Verdict.from_residual("b_transform", closed_gap, samples, tolerance, component, where, "dΨ ≠ 0")
            for component in components
        ]

    verdicts = []
    for salt, component in enumerate(components):

        def scan(task: tuple[int, PointGeometry], component: Component = component, salt: int = salt):
            index, geometry = task
            return _intertwining(geometry, partners[index], component, sampling, rng_for(sampling.seed, 4, salt, index))

        residual, witness = _scan(geometries, scan, sampling.threads)
        verdicts.append(
            Verdict.from_residual(
                "b_transform", residual, samples * sampling.fibers * sampling.probes, tolerance, component, witness
            )
        )
    return verdicts


def _intertwining(
    geometry: PointGeometry,
    partner: PointGeometry,
    component: Component,
    sampling: Sampling,
    rng: np.random.Generator,
) -> tuple[float, JSONDict | None]:
    n = geometry.n
    psi = partner.metric.theta - geometry.metric.theta
    shift = exp_b(psi)
    worst, witness = 0.0, None
    for fiber in range(sampling.fibers):
        fp = random_fiber_point(geometry.metric, component, rng, geometry.point, geometry.orientation)
        image: GenComplex = conjugate(psi, fp.structure)
        mapped = FiberPoint(partner.metric, *extract_pair(partner.metric, image), partner.point, partner.orientation)
        if classify_component(partner.metric, image, partner.orientation) is not component:
            return 1.0, geometry.witness(fiber=fiber, reason="component not preserved")
        structure_gap = float(np.max(np.abs(mapped.structure.m - image.m)))
        if structure_gap > worst:
            worst, witness = structure_gap, geometry.witness(fiber=fiber, part="structure")
        for probe in range(sampling.probes):
            a, b = random_element(rng, n), random_element(rng, n)
            a_mapped = GenElement.from_array(shift @ a.as_array())
            b_mapped = GenElement.from_array(shift @ b.as_array())
            horizontal = horizontal_nijenhuis(geometry, fp, a, b)
            gaps = {
                "horizontal": float(
                    np.max(np.abs(horizontal_nijenhuis(partner, mapped, a_mapped, b_mapped).as_array()
                                  - shift @ horizontal.as_array()))
                )
            }
            for eps in (1, 2, 3, 4):
                vertical, covector = vertical_nijenhuis(geometry, fp, a, b, eps)
                vertical_mapped, covector_mapped = vertical_nijenhuis(partner, mapped, a_mapped, b_mapped, eps)
                v = random_vertical(rng, fp)
                gaps[f"vertical[{eps}]"] = (vertical - vertical_mapped).norm()
                gaps[f"covector[{eps}]"] = (covector - covector_mapped).norm()
                gaps[f"mixed[{eps}]"] = float(
                    np.max(np.abs(mixed_nijenhuis(mapped, a_mapped, v, eps).as_array()
                                  - shift @ mixed_nijenhuis(fp, a, v, eps).as_array()))
                )
            part, gap = max(gaps.items(), key=lambda item: item[1])
            if gap > worst:
                worst, witness = gap, geometry.witness(fiber=fiber, probe=probe, part=part)
    return worst, witness


def nonintegrability_witness(metric: GenMetric, orientation: int = 1) -> dict[int, float]:
    """
    Residuals of the explicit non-integrability witnesses for ε = 2, 3, 4 at a point.

    With J₁ = J₂ the standard structure in an orthonormal frame Q and V = S₁₃ + S₄₂:
    N₂(Q₁″, V″) = N₄(Q₁″, V″) = 2Q₄″ and N₃(Q₁′, V′) = 2Q₄′.
    """
    n = metric.n
    if n < 4:
        raise PreconditionError(f"the witness needs dimension at least 4, got {n}")
    frame = orthonormal_frame(metric.g)
    j = frame @ standard_complex_structure(n) @ np.linalg.inv(frame)
    fp = FiberPoint(metric, j, j, orientation=orientation)
    generator = frame_generator(frame, 1, 3) + frame_generator(frame, 4, 2)
    zero = np.zeros((n, n))
    first, fourth = frame[:, 0], frame[:, 3]

    residuals = {}
    for eps, side, vector in ((2, Side.MINUS, VertVec(zero, generator)), (3, Side.PLUS, VertVec(generator, zero)),
                              (4, Side.MINUS, VertVec(zero, generator))):
        value = mixed_nijenhuis(fp, lift(metric, first, side), vector, eps)
        residuals[eps] = (value - 2.0 * lift(metric, fourth, side)).norm()
    return residuals


def horizontal_witness_search(
    geometries: Sequence[PointGeometry], sampling: Sampling
) -> tuple[float, JSONDict | None]:
    """Largest horizontal Nijenhuis norm over sampled fiber points and probe pairs."""

    def scan(task: tuple[int, PointGeometry]) -> tuple[float, JSONDict | None]:
        index, geometry = task
        rng = rng_for(sampling.seed, 5, index)
        components = [component for component in Component if component.mixed or geometry.n % 4 == 0]
        worst, witness = 0.0, None
        for fiber in range(sampling.fibers):
            component = components[fiber % len(components)]
            fp = random_fiber_point(geometry.metric, component, rng, geometry.point, geometry.orientation)
            for probe in range(sampling.probes):
                a, b = random_element(rng, geometry.n), random_element(rng, geometry.n)
                value = horizontal_nijenhuis(geometry, fp, a, b).norm()
                if value > worst:
                    worst, witness = value, geometry.witness(component=component.value, fiber=fiber, probe=probe)
        return worst, witness

    return _scan(geometries, scan, sampling.threads)
