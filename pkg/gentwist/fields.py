"""
gentwist fields library.

Tensor fields on a single coordinate chart, the Lie and Courant brackets, the exterior derivative and the
Nijenhuis tensor of a generalized almost complex structure field.

Every bracket works on first jets at a point. Anything exposing ``jet1(point)`` (Expr fields, lifted
sections, parallel extensions) can be bracketed.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import numpy as np

from .errors import ValidationError
from .expr import ArrayJet, Expr, Jet2, Neg, Num, constant, eval_array, eval_jet, parse
from .linalg import TOLERANCE, GenElement, GenMetric, exp_b, pairing
from .types import Matrix, Point

ZERO = Num(0.0)


@dataclass(frozen=True)
class Chart:
    """Coordinate chart with a sampling box."""

    coords: tuple[str, ...]
    box: tuple[tuple[float, float], ...]
    orientation: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "box", tuple((float(low), float(high)) for low, high in self.box))
        if len(self.coords) % 2 or not self.coords:
            raise ValidationError(f"chart dimension must be even and positive, got {len(self.coords)}")
        if len(set(self.coords)) != len(self.coords):
            raise ValidationError(f"duplicate coordinate names: {list(self.coords)}")
        if len(self.box) != len(self.coords):
            raise ValidationError(f"box has {len(self.box)} intervals for {len(self.coords)} coordinates")
        if any(low >= high for low, high in self.box):
            raise ValidationError(f"degenerate box interval in {list(self.box)}")
        if self.orientation not in (1, -1):
            raise ValidationError(f"orientation must be +1 or -1, got {self.orientation}")

    @classmethod
    def cube(cls, n: int, low: float = -1.0, high: float = 1.0) -> Chart:
        """Chart x1..xn on [low, high]^n."""
        return cls(tuple(f"x{index}" for index in range(1, n + 1)), tuple((low, high) for _ in range(n)))

    @property
    def n(self) -> int:
        """Dimension."""
        return len(self.coords)

    @property
    def lower(self) -> Matrix:
        """Lower box corner."""
        return np.array([low for low, _ in self.box])

    @property
    def upper(self) -> Matrix:
        """Upper box corner."""
        return np.array([high for _, high in self.box])

    @property
    def center(self) -> Point:
        """Box center."""
        return (self.lower + self.upper) / 2

    def parse(self, text: str | float) -> Expr:
        """Parse an expression over the chart coordinates."""
        if isinstance(text, (int, float)):
            return constant(float(text))
        return parse(str(text), self.coords)


def _point(point: Point, n: int) -> Point:
    point = np.asarray(point, dtype=float).reshape(-1)
    if point.size != n:
        raise ValidationError(f"point has {point.size} coordinates, chart has {n}")
    return point


@dataclass(frozen=True, eq=False)
class SectionJet:
    """First jet of a section of TM⊕T*M: value (2n,) and partial derivatives (2n, n)."""

    val: Matrix
    grad: Matrix

    @property
    def n(self) -> int:
        """Chart dimension."""
        return self.val.size // 2

    @property
    def element(self) -> GenElement:
        """Value at the point."""
        return GenElement.from_array(self.val)

    def __add__(self, other: SectionJet) -> SectionJet:
        return SectionJet(self.val + other.val, self.grad + other.grad)

    def __sub__(self, other: SectionJet) -> SectionJet:
        return SectionJet(self.val - other.val, self.grad - other.grad)

    def __neg__(self) -> SectionJet:
        return SectionJet(-self.val, -self.grad)

    def scaled(self, function: Jet2) -> SectionJet:
        """Jet of f·A."""
        return SectionJet(function.val * self.val, function.val * self.grad + np.outer(self.val, function.grad))

    @classmethod
    def constant(cls, element: GenElement) -> SectionJet:
        """Jet of a constant-coefficient section."""
        val = element.as_array()
        return cls(val, np.zeros((val.size, val.size // 2)))


@dataclass(frozen=True, eq=False)
class EndoJet:
    """First jet of an endomorphism field: value (2n, 2n) and partial derivatives (2n, 2n, n)."""

    val: Matrix
    grad: Matrix

    def apply(self, section: SectionJet) -> SectionJet:
        """Jet of the section 𝒥A."""
        return SectionJet(
            self.val @ section.val,
            np.einsum("ijk,j->ik", self.grad, section.val) + self.val @ section.grad,
        )


class SectionField(Protocol):
    """Anything that yields first jets of a section."""

    def jet1(self, point: Point) -> SectionJet:
        """First jet at a point."""


class EndoField(Protocol):
    """Anything that yields first jets of an endomorphism field."""

    def jet1(self, point: Point) -> EndoJet:
        """First jet at a point."""


@dataclass(frozen=True, eq=False)
class FieldGenSection:
    """Section X+α of TM⊕T*M with Expr components."""

    chart: Chart
    exprs: np.ndarray

    def __post_init__(self) -> None:
        exprs = np.asarray(self.exprs, dtype=object).reshape(-1)
        if exprs.size != 2 * self.chart.n:
            raise ValidationError(f"section needs {2 * self.chart.n} components, got {exprs.size}")
        object.__setattr__(self, "exprs", exprs)

    @classmethod
    def from_strings(
        cls, chart: Chart, vec: Sequence[str | float] | None = None, cov: Sequence[str | float] | None = None
    ) -> FieldGenSection:
        """Build from tangent and cotangent component texts (missing parts are zero)."""
        vec = vec if vec is not None else [0.0] * chart.n
        cov = cov if cov is not None else [0.0] * chart.n
        return cls(chart, np.array([chart.parse(text) for text in [*vec, *cov]], dtype=object))

    @classmethod
    def constant(cls, chart: Chart, element: GenElement) -> FieldGenSection:
        """Constant-coefficient section."""
        return cls(chart, np.array([constant(value) for value in element.as_array()], dtype=object))

    def jet1(self, point: Point) -> SectionJet:
        """First jet at a point."""
        jets = eval_array(self.exprs, _point(point, self.chart.n))
        return SectionJet(jets.val, jets.grad)

    def value(self, point: Point) -> GenElement:
        """Value at a point."""
        return self.jet1(point).element


@dataclass(frozen=True, eq=False)
class FieldEndo:
    """Endomorphism field of TM⊕T*M with Expr entries."""

    chart: Chart
    exprs: np.ndarray

    def __post_init__(self) -> None:
        exprs = np.asarray(self.exprs, dtype=object)
        size = 2 * self.chart.n
        if exprs.shape != (size, size):
            raise ValidationError(f"endomorphism field needs {size}×{size} entries, got {exprs.shape}")
        object.__setattr__(self, "exprs", exprs)

    @classmethod
    def from_strings(cls, chart: Chart, rows: Sequence[Sequence[str | float]]) -> FieldEndo:
        """Build from a matrix of expression texts."""
        return cls(chart, np.array([[chart.parse(text) for text in row] for row in rows], dtype=object))

    @classmethod
    def constant(cls, chart: Chart, matrix: Matrix) -> FieldEndo:
        """Constant endomorphism field."""
        matrix = np.asarray(matrix, dtype=float)
        return cls(chart, np.vectorize(constant, otypes=[object])(matrix))

    def jet1(self, point: Point) -> EndoJet:
        """First jet at a point."""
        jets = eval_array(self.exprs, _point(point, self.chart.n))
        return EndoJet(jets.val, jets.grad)

    def value(self, point: Point) -> Matrix:
        """Value at a point."""
        return self.jet1(point).val


def _symmetric_exprs(chart: Chart, entries: Mapping[tuple[int, int], str | float], antisymmetric: bool) -> np.ndarray:
    n = chart.n
    exprs = np.full((n, n), ZERO, dtype=object)
    for (row, column), text in entries.items():
        if not (0 <= row < n and 0 <= column < n):
            raise ValidationError(f"entry ({row + 1}, {column + 1}) outside a {n}×{n} matrix")
        expression = chart.parse(text)
        exprs[row, column] = expression
        if row != column:
            exprs[column, row] = Neg(expression) if antisymmetric else expression
        elif antisymmetric:
            raise ValidationError(f"diagonal entry ({row + 1}, {row + 1}) of a 2-form")
    return exprs


@dataclass(frozen=True, eq=False)
class FieldGenMetric:
    """Generalized metric field (g, Θ) with Expr entries."""

    chart: Chart
    g_exprs: np.ndarray
    theta_exprs: np.ndarray
    _memo: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_entries(
        cls,
        chart: Chart,
        g: Mapping[tuple[int, int], str | float],
        theta: Mapping[tuple[int, int], str | float] | None = None,
    ) -> FieldGenMetric:
        """Build from 0-based (row, column) entries; symmetry of g and antisymmetry of Θ are completed."""
        return cls(chart, _symmetric_exprs(chart, g, False), _symmetric_exprs(chart, theta or {}, True))

    @classmethod
    def conformal(
        cls, chart: Chart, factor: str, theta: Mapping[tuple[int, int], str | float] | None = None
    ) -> FieldGenMetric:
        """Metric factor·δ."""
        return cls.from_entries(chart, {(index, index): factor for index in range(chart.n)}, theta)

    @classmethod
    def constant(cls, chart: Chart, g: Matrix, theta: Matrix | None = None) -> FieldGenMetric:
        """Constant generalized metric field."""
        n = chart.n
        theta = np.zeros((n, n)) if theta is None else np.asarray(theta, dtype=float)
        g = np.asarray(g, dtype=float)
        return cls.from_entries(
            chart,
            {(i, j): float(g[i, j]) for i in range(n) for j in range(i + 1)},
            {(i, j): float(theta[i, j]) for i in range(n) for j in range(i + 1, n) if theta[i, j]},
        )

    @property
    def n(self) -> int:
        """Dimension."""
        return self.chart.n

    def jets(self, point: Point) -> tuple[ArrayJet, ArrayJet]:
        """Second jets of g and Θ at a point."""
        point = _point(point, self.n)
        key = point.tobytes()
        cached = self._memo.get(key)
        if cached is None:
            # fan_out workers may race here; setdefault keeps the first entry so every caller shares it
            cached = self._memo.setdefault(key, (eval_array(self.g_exprs, point), eval_array(self.theta_exprs, point)))
        return cached

    def at(self, point: Point) -> GenMetric:
        """Generalized metric at a point."""
        g, theta = self.jets(point)
        return GenMetric(g.val, theta.val)

    def with_theta(self, theta_exprs: np.ndarray) -> FieldGenMetric:
        """Same metric with another 2-form."""
        return FieldGenMetric(self.chart, self.g_exprs, theta_exprs)


def lie_bracket(x: SectionField, y: SectionField, point: Point) -> Matrix:
    """Lie bracket of the tangent parts of two sections at a point."""
    a, b = x.jet1(point), y.jet1(point)
    n = a.n
    return b.grad[:n] @ a.val[:n] - a.grad[:n] @ b.val[:n]


def courant_bracket_jets(a: SectionJet, b: SectionJet) -> GenElement:
    """[X+α, Y+β] = [X,Y] + L_Xβ − L_Yα − ½d(i_Xβ − i_Yα) from first jets."""
    n = a.n
    x, alpha, dx, dalpha = a.val[:n], a.val[n:], a.grad[:n], a.grad[n:]
    y, beta, dy, dbeta = b.val[:n], b.val[n:], b.grad[:n], b.grad[n:]

    lie = dy @ x - dx @ y
    lie_x_beta = dbeta @ x + dx.T @ beta
    lie_y_alpha = dalpha @ y + dy.T @ alpha
    d_x_beta = dx.T @ beta + dbeta.T @ x
    d_y_alpha = dy.T @ alpha + dalpha.T @ y
    return GenElement(lie, (lie_x_beta - lie_y_alpha) - 0.5 * (d_x_beta - d_y_alpha))


def courant_bracket(a: SectionField, b: SectionField, point: Point) -> GenElement:
    """Courant bracket of two sections at a point."""
    return courant_bracket_jets(a.jet1(point), b.jet1(point))


def nijenhuis_jets(j: EndoJet, a: SectionJet, b: SectionJet) -> GenElement:
    """N(A,B) = −[A,B] + [𝒥A,𝒥B] − 𝒥[𝒥A,B] − 𝒥[A,𝒥B] from first jets."""
    ja, jb = j.apply(a), j.apply(b)
    inner = courant_bracket_jets(ja, b).as_array() + courant_bracket_jets(a, jb).as_array()
    total = (
        -courant_bracket_jets(a, b).as_array() + courant_bracket_jets(ja, jb).as_array() - j.val @ inner
    )
    return GenElement.from_array(total)


def nijenhuis_field(j: EndoField, a: SectionField, b: SectionField, point: Point) -> GenElement:
    """Nijenhuis tensor of a generalized almost complex structure field at a point."""
    return nijenhuis_jets(j.jet1(point), a.jet1(point), b.jet1(point))


def alternate(partials: Matrix, rank: int) -> Matrix:
    """Σ_a (−1)^a ∂_{i_a} ω_{i_0..î_a..i_k}, the derivative index being axis 0 of ``partials``."""
    return sum((-1) ** position * np.moveaxis(partials, 0, position) for position in range(rank + 1))


def exterior_derivative(grad: Matrix) -> Matrix:
    """Coefficients of dω from the partial derivatives of a k-form's coefficients (derivative axis last)."""
    rank = grad.ndim - 1
    return alternate(np.moveaxis(grad, -1, 0), rank)


def exterior_derivative_jet(grad: Matrix, hess: Matrix) -> tuple[Matrix, Matrix]:
    """Coefficients of dω and their partial derivatives (derivative axis last) from second jets."""
    rank = grad.ndim - 1
    return exterior_derivative(grad), alternate(np.moveaxis(hess, -2, 0), rank)


def _form_jets(form: Expr | np.ndarray, point: Point, n: int) -> ArrayJet:
    form = np.asarray(form, dtype=object)
    rank = form.ndim
    if rank > 3:
        raise ValidationError(f"exterior derivative supports forms of degree at most 3, got {rank}")
    if any(size != n for size in form.shape):
        raise ValidationError(f"form coefficients must have shape {(n,) * rank}, got {form.shape}")
    jets = eval_array(form, point)
    for axis in range(rank - 1):
        swapped = np.swapaxes(jets.val, axis, axis + 1)
        residual = float(np.max(np.abs(jets.val + swapped))) if jets.val.size else 0.0
        if residual > TOLERANCE * max(1.0, float(np.max(np.abs(jets.val)))):
            raise ValidationError("form coefficients are antisymmetric", residual)
    return jets


def exterior_d(form: Expr | np.ndarray, point: Point) -> Matrix:
    """Coefficients of the exterior derivative of a k-form (k ≤ 3) with Expr coefficients at a point."""
    point = np.asarray(point, dtype=float).reshape(-1)
    return exterior_derivative(_form_jets(form, point, point.size).grad)


def exterior_dd(form: Expr | np.ndarray, point: Point) -> Matrix:
    """Coefficients of d(dω) at a point, from second jets."""
    point = np.asarray(point, dtype=float).reshape(-1)
    jets = _form_jets(form, point, point.size)
    _, d_partials = exterior_derivative_jet(jets.grad, jets.hess)
    return exterior_derivative(d_partials)


def interior_pair(three_form: Matrix, x: Matrix, y: Matrix) -> Matrix:
    """i_X i_Y H, the 1-form H(Y, X, ·)."""
    return np.einsum("abc,a,b->c", three_form, y, x)


def twist_jet(section: SectionJet, theta: ArrayJet) -> SectionJet:
    """Jet of e^Θ A for a 2-form field Θ given by its jets."""
    n = section.n
    x, dx = section.val[:n], section.grad[:n]
    theta_map = theta.val.T
    d_theta_map = np.swapaxes(theta.grad, 0, 1)
    cov = section.val[n:] + theta_map @ x
    d_cov = section.grad[n:] + np.einsum("ijk,j->ik", d_theta_map, x) + theta_map @ dx
    return SectionJet(np.concatenate([x, cov]), np.vstack([dx, d_cov]))


def pairing_jet(a: SectionJet, b: SectionJet) -> Jet2:
    """First jet of the function ⟨A, B⟩ (Hessian left zero)."""
    n = a.n
    value = pairing(a.element, b.element)
    alpha_y = a.grad[n:].T @ b.val[:n] + b.grad[:n].T @ a.val[n:]
    beta_x = b.grad[n:].T @ a.val[:n] + a.grad[:n].T @ b.val[n:]
    grad = 0.5 * (alpha_y + beta_x)
    return Jet2(value, grad, np.zeros((n, n)))


def push_forward_jet(section: SectionJet, linear: Matrix) -> SectionJet:
    """Jet of the pushforward of a section along y = Lx + c, in y-coordinates at the image point."""
    n = section.n
    inverse = np.linalg.inv(linear)
    transform = np.block([[linear, np.zeros((n, n))], [np.zeros((n, n)), inverse.T]])
    return SectionJet(transform @ section.val, transform @ section.grad @ inverse)


@dataclass(frozen=True)
class PropResiduals:
    """Max residuals of the Courant bracket identities."""

    antisymmetry: float
    leibniz: float
    automorphism: float
    pushforward: float
    metric_derivative: float

    @property
    def worst(self) -> float:
        """Largest residual."""
        return max(self.antisymmetry, self.leibniz, self.automorphism, self.pushforward, self.metric_derivative)


def courant_props_check(
    a: SectionField,
    b: SectionField,
    c: SectionField,
    function: Expr,
    points: Sequence[Point],
    theta: np.ndarray,
    linear: Matrix | None = None,
) -> PropResiduals:
    """
    Evaluate the Courant bracket identities on sample points.

    leibniz:           [A,fB] − f[A,B] − (Xf)B + ⟨A,B⟩df
    automorphism:      [e^ΘA, e^ΘB] − e^Θ[A,B] + i_X i_Y dΘ
    pushforward:       [φ_*A, φ_*B] − φ_*[A,B] for the affine map φ(x) = Lx
    metric_derivative: X⟨B,C⟩ − ⟨[A,B] + d⟨A,B⟩, C⟩ − ⟨B, [A,C] + d⟨A,C⟩⟩
    """
    worst = dict(antisymmetry=0.0, leibniz=0.0, automorphism=0.0, pushforward=0.0, metric_derivative=0.0)

    for point in points:
        point = np.asarray(point, dtype=float)
        n = point.size
        ja, jb, jc = a.jet1(point), b.jet1(point), c.jet1(point)
        f = eval_jet(function, point)
        x = ja.val[:n]
        ab = courant_bracket_jets(ja, jb)

        worst["antisymmetry"] = max(worst["antisymmetry"], (ab + courant_bracket_jets(jb, ja)).norm())

        df = GenElement.cotangent(f.grad)
        leibniz = (
            courant_bracket_jets(ja, jb.scaled(f))
            - ab * float(f.val)
            - float(x @ f.grad) * jb.element
            + pairing(ja.element, jb.element) * df
        )
        worst["leibniz"] = max(worst["leibniz"], leibniz.norm())

        theta_jets = eval_array(theta, point)
        h = exterior_derivative(theta_jets.grad)
        twisted = courant_bracket_jets(twist_jet(ja, theta_jets), twist_jet(jb, theta_jets))
        expected = GenElement.from_array(exp_b(theta_jets.val) @ ab.as_array())
        defect = twisted - expected + GenElement.cotangent(interior_pair(h, x, jb.val[:n]))
        worst["automorphism"] = max(worst["automorphism"], defect.norm())

        transform = np.eye(n) + 0.25 * np.triu(np.ones((n, n)), 1) if linear is None else np.asarray(linear)
        pushed = courant_bracket_jets(push_forward_jet(ja, transform), push_forward_jet(jb, transform))
        image = push_forward_jet(SectionJet(ab.as_array(), np.zeros((2 * n, n))), transform).element
        worst["pushforward"] = max(worst["pushforward"], (pushed - image).norm())

        ac = courant_bracket_jets(ja, jc)
        d_ab = GenElement.cotangent(pairing_jet(ja, jb).grad)
        d_ac = GenElement.cotangent(pairing_jet(ja, jc).grad)
        derivative = float(x @ pairing_jet(jb, jc).grad)
        residual = derivative - pairing(ab + d_ab, jc.element) - pairing(jb.element, ac + d_ac)
        worst["metric_derivative"] = max(worst["metric_derivative"], abs(residual))

    return PropResiduals(**worst)
