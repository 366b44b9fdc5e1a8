"""
gentwist twistor library.

The fiber of the generalized twistor space over a point: pairs (J₁, J₂) of g-orthogonal complex structures,
vertical vectors (V₁, V₂) anticommuting with them, the four fiber complex structures K₁..K₄, the trace
metric G and the action of J_ε on generalized tangent vectors.

Covectors on the vertical space are stored as their G-dual vertical vectors.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .errors import PreconditionError, ValidationError
from .linalg import (
    TOLERANCE,
    GenComplex,
    GenElement,
    GenMetric,
    assemble,
    check_complex_structure,
    check_orthogonal,
    g_operator,
    orientation_sign,
    orthonormal_frame,
    pairing,
    standard_complex_structure,
)
from .types import Component, Matrix, Point


@dataclass(frozen=True, eq=False)
class FiberPoint:
    """A point (J₁, J₂) of the fiber over a base point."""

    metric: GenMetric
    j1: Matrix
    j2: Matrix
    base: Point | None = None
    orientation: int = 1

    def __post_init__(self) -> None:
        g = self.metric.g
        object.__setattr__(self, "j1", check_orthogonal(g, check_complex_structure(self.j1, "J₁"), "J₁"))
        object.__setattr__(self, "j2", check_orthogonal(g, check_complex_structure(self.j2, "J₂"), "J₂"))

    @property
    def n(self) -> int:
        """Base dimension."""
        return self.metric.n

    @cached_property
    def structure(self) -> GenComplex:
        """The compatible generalized complex structure with this pair."""
        return assemble(self.metric, self.j1, self.j2)

    @cached_property
    def frame(self) -> Matrix:
        """Oriented g-orthonormal frame at the base point."""
        return orthonormal_frame(self.metric.g)

    @property
    def component(self) -> Component:
        """Connected component of the fiber containing this point."""
        return Component.from_signs(
            orientation_sign(self.metric.g, self.j1, self.orientation),
            orientation_sign(self.metric.g, self.j2, self.orientation),
        )

    def slots(self) -> tuple[Matrix, Matrix]:
        """(J₁, J₂)."""
        return self.j1, self.j2


@dataclass(frozen=True, eq=False)
class VertVec:
    """Vertical vector (V₁, V₂) at a fiber point."""

    v1: Matrix
    v2: Matrix

    @classmethod
    def zero(cls, n: int) -> VertVec:
        """The zero vertical vector."""
        return cls(np.zeros((n, n)), np.zeros((n, n)))

    def as_array(self) -> Matrix:
        """Flattened (V₁, V₂)."""
        return np.concatenate([np.asarray(self.v1).ravel(), np.asarray(self.v2).ravel()])

    def norm(self) -> float:
        """Max-abs norm."""
        return float(np.max(np.abs(self.as_array())))

    def __add__(self, other: VertVec) -> VertVec:
        return VertVec(self.v1 + other.v1, self.v2 + other.v2)

    def __sub__(self, other: VertVec) -> VertVec:
        return VertVec(self.v1 - other.v1, self.v2 - other.v2)

    def __neg__(self) -> VertVec:
        return VertVec(-self.v1, -self.v2)

    def __mul__(self, scalar: float) -> VertVec:
        return VertVec(scalar * self.v1, scalar * self.v2)

    __rmul__ = __mul__

    def residual(self, fp: FiberPoint) -> float:
        """Largest violation of VᵢJᵢ + JᵢVᵢ = 0 and g-skewness."""
        g = fp.metric.g
        worst = 0.0
        for v, j in ((self.v1, fp.j1), (self.v2, fp.j2)):
            worst = max(worst, float(np.max(np.abs(v @ j + j @ v))))
            worst = max(worst, float(np.max(np.abs(g @ v + (g @ v).T))))
        return worst


@dataclass(frozen=True, eq=False)
class VertCovec:
    """Element of the dual of the vertical space, stored as its G-dual vertical vector."""

    dual: VertVec

    def evaluate(self, v: VertVec) -> float:
        """φ(V) = G(dual, V)."""
        return fiber_metric(self.dual, v)

    def norm(self) -> float:
        """Max-abs norm of the dual."""
        return self.dual.norm()

    def __add__(self, other: VertCovec) -> VertCovec:
        return VertCovec(self.dual + other.dual)

    def __sub__(self, other: VertCovec) -> VertCovec:
        return VertCovec(self.dual - other.dual)

    def __neg__(self) -> VertCovec:
        return VertCovec(-self.dual)

    def __mul__(self, scalar: float) -> VertCovec:
        return VertCovec(self.dual * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GenTwistorTangent:
    """Generalized tangent vector of the twistor space: horizontal part, vertical vector, vertical covector."""

    h: GenElement
    v: VertVec
    vstar: VertCovec

    def norm(self) -> float:
        """Max-abs norm over the three parts."""
        return max(self.h.norm(), self.v.norm(), self.vstar.norm())

    def __sub__(self, other: GenTwistorTangent) -> GenTwistorTangent:
        return GenTwistorTangent(self.h - other.h, self.v - other.v, self.vstar - other.vstar)

    def __neg__(self) -> GenTwistorTangent:
        return GenTwistorTangent(-self.h, -self.v, -self.vstar)


def fiber_metric(a: VertVec, b: VertVec) -> float:
    """G(a, b) = −½tr(V₁W₁) − ½tr(V₂W₂)."""
    return float(-0.5 * np.trace(a.v1 @ b.v1) - 0.5 * np.trace(a.v2 @ b.v2))


def _check_eps(eps: int) -> None:
    if eps not in (1, 2, 3, 4):
        raise ValidationError(f"ε must be one of 1, 2, 3, 4, got {eps}")


def K_eps(fp: FiberPoint, v: VertVec, eps: int) -> VertVec:  # pylint: disable=invalid-name
    """The fiber complex structures K₁ = (J₁V₁, J₂V₂), K₂ = (J₁V₁, −J₂V₂), K₃ = −K₂, K₄ = −K₁."""
    _check_eps(eps)
    first, second = fp.j1 @ v.v1, fp.j2 @ v.v2
    if eps in (2, 3):
        second = -second
    if eps in (3, 4):
        first, second = -first, -second
    return VertVec(first, second)


def vertical_endomorphism(fp: FiberPoint, v: VertVec) -> Matrix:
    """
    The 2n×2n endomorphism of T⊕T* acting as V₁ on E′ and V₂ on E″.

    V′(X + g(X) + Θ(X)) = V₁X + g(V₁X) + Θ(V₁X) and likewise on E″ with −g.
    """
    n = fp.n
    metric = fp.metric
    g_op = g_operator(metric).m
    identity = np.eye(2 * n)
    plus = 0.5 * (identity + g_op)
    minus = 0.5 * (identity - g_op)
    return metric.lift_plus @ v.v1 @ plus[:n] + metric.lift_minus @ v.v2 @ minus[:n]


def vertical_basis(fp: FiberPoint) -> list[VertVec]:
    """G-orthonormal basis of the vertical space at fp: slot-one vectors first, then slot-two vectors."""
    n = fp.n
    frame = fp.frame
    inverse = np.linalg.inv(frame)
    generators = [_skew_unit(n, i, j) for i in range(n) for j in range(i + 1, n)]
    basis: list[VertVec] = []
    for slot, j in enumerate(fp.slots()):
        local = inverse @ j @ frame
        projected = np.stack([0.5 * (s + local @ s @ local) for s in generators]).reshape(len(generators), -1)
        span = sla.orth(projected.T)
        for column in span.T:
            matrix = np.sqrt(2.0) * frame @ column.reshape(n, n) @ inverse
            zero = np.zeros((n, n))
            basis.append(VertVec(matrix, zero) if slot == 0 else VertVec(zero, matrix))
    return basis


def _skew_unit(n: int, i: int, j: int) -> Matrix:
    # e_i ↦ e_j, e_j ↦ −e_i
    s = np.zeros((n, n))
    s[j, i] = 1.0
    s[i, j] = -1.0
    return s


def frame_generator(frame: Matrix, i: int, j: int) -> Matrix:
    """The generator S_ij (1-based) with S_ij E_k = δ_ik E_j − δ_kj E_i in the frame E, as a coordinate matrix."""
    frame = np.asarray(frame, dtype=float)
    n = frame.shape[0]
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValidationError(f"generator indices must be distinct and within 1..{n}, got ({i}, {j})")
    return frame @ _skew_unit(n, i - 1, j - 1) @ np.linalg.inv(frame)


def covector_from(fp: FiberPoint, functional: Callable[[VertVec], float]) -> VertCovec:
    """The vertical covector given by a linear functional, as its G-dual Σ φ(B_s)B_s."""
    dual = VertVec.zero(fp.n)
    for vector in vertical_basis(fp):
        dual = dual + functional(vector) * vector
    return VertCovec(dual)


def natural_pairing(a: tuple[VertVec, VertCovec], b: tuple[VertVec, VertCovec]) -> float:
    """⟨v + φ, w + ψ⟩ = ½(φ(w) + ψ(v)) on the vertical part of the generalized tangent space."""
    return 0.5 * (a[1].evaluate(b[0]) + b[1].evaluate(a[0]))


def Jeps_action(fp: FiberPoint, t: GenTwistorTangent, eps: int) -> GenTwistorTangent:  # pylint: disable=invalid-name
    """J_ε: 𝒥 on the horizontal part, K_ε on vertical vectors and −K_ε* on vertical covectors."""
    horizontal = fp.structure.apply(t.h)
    # the dual of −φ∘K_ε is K_ε applied to the dual of φ
    return GenTwistorTangent(horizontal, K_eps(fp, t.v, eps), VertCovec(K_eps(fp, t.vstar.dual, eps)))


def omega_eps(fp: FiberPoint, a: GenElement, b: GenElement, eps: int) -> VertCovec:
    """ω^ε_{A,B}(W) = ⟨(K₁W − K_εW)A, B⟩ − ⟨(K₁W − K_εW)B, A⟩."""
    _check_eps(eps)

    def functional(w: VertVec) -> float:
        difference = vertical_endomorphism(fp, K_eps(fp, w, 1) - K_eps(fp, w, eps))
        image_a = GenElement.from_array(difference @ a.as_array())
        image_b = GenElement.from_array(difference @ b.as_array())
        return pairing(image_a, b) - pairing(image_b, a)

    return covector_from(fp, functional)


def fiber_involution(fp: FiberPoint) -> FiberPoint:
    """(J₁, J₂) ↦ (J₁, −J₂)."""
    return replace(fp, j2=-fp.j2)


def fiber_swap(fp: FiberPoint) -> FiberPoint:
    """(J₁, J₂) ↦ (J₂, J₁)."""
    return replace(fp, j1=fp.j2, j2=fp.j1)


def _random_rotation(rng: np.random.Generator, n: int) -> Matrix:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_orthogonal_complex(
    rng: np.random.Generator, metric: GenMetric, sign: int, orientation: int = 1
) -> Matrix:
    """A random g-orthogonal complex structure inducing the given orientation sign."""
    n = metric.n
    frame = orthonormal_frame(metric.g)
    rotation = _random_rotation(rng, n)
    local = rotation @ standard_complex_structure(n) @ rotation.T
    j = frame @ local @ np.linalg.inv(frame)
    if orientation_sign(metric.g, j, orientation) != sign:
        flip = np.eye(n)
        flip[0, 0] = -1.0
        j = frame @ (flip @ local @ flip) @ np.linalg.inv(frame)
    return j


def random_fiber_point(
    metric: GenMetric,
    component: Component,
    seed: int | np.random.Generator,
    base: Point | None = None,
    orientation: int = 1,
) -> FiberPoint:
    """A fiber point in the requested component, deterministic in the seed."""
    n = metric.n
    if n % 4 == 2 and not component.mixed:
        raise PreconditionError(
            f"component {component.value} is empty in dimension {n}: when n ≡ 2 mod 4 the two complex structures "
            "of a compatible pair induce opposite orientations"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    first, second = component.signs
    j1 = random_orthogonal_complex(rng, metric, first, orientation)
    j2 = random_orthogonal_complex(rng, metric, second, orientation)
    return FiberPoint(metric, j1, j2, base, orientation)


def random_vertical(rng: np.random.Generator, fp: FiberPoint) -> VertVec:
    """Gaussian combination of the vertical basis."""
    result = VertVec.zero(fp.n)
    for vector in vertical_basis(fp):
        result = result + float(rng.standard_normal()) * vector
    return result


def random_tangent(rng: np.random.Generator, fp: FiberPoint) -> GenTwistorTangent:
    """Random generalized tangent vector of the twistor space at fp."""
    n = fp.n
    return GenTwistorTangent(
        GenElement.from_array(rng.standard_normal(2 * n)),
        random_vertical(rng, fp),
        VertCovec(random_vertical(rng, fp)),
    )


def fiber_residual(fp: FiberPoint) -> float:
    """Largest violation of Jᵢ² = −Id and g-orthogonality."""
    g = fp.metric.g
    identity = np.eye(fp.n)
    worst = 0.0
    for j in fp.slots():
        worst = max(worst, float(np.max(np.abs(j @ j + identity))), float(np.max(np.abs(j.T @ g @ j - g))))
    return worst


def is_vertical(fp: FiberPoint, v: VertVec, tolerance: float = TOLERANCE) -> bool:
    """Whether v is tangent to the fiber at fp."""
    return v.residual(fp) <= tolerance * max(1.0, v.norm())
