"""
gentwist linear algebra library.

Pointwise algebra of T⊕T*: the neutral pairing, generalized metrics, compatible generalized complex
structures and B-transforms.

A generalized element X+α is a single 2n coefficient vector with the tangent block first, every
2n×2n matrix uses the same block order. A 2-form B is stored by its coefficient matrix
B[i, j] = B(∂i, ∂j); the map X ↦ i_X B then has matrix Bᵀ.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg as sla

from .errors import NumericalError, ValidationError
from .types import Component, Matrix, Side

TOLERANCE = 1e-9


def _max_abs(array: Matrix) -> float:
    return float(np.max(np.abs(array))) if np.size(array) else 0.0


def _scale(matrix: Matrix) -> float:
    """Tolerance scale for identities quadratic in the matrix entries."""
    return max(1.0, _max_abs(matrix)) ** 2


def _block(top_left: Matrix, top_right: Matrix, bottom_left: Matrix, bottom_right: Matrix) -> Matrix:
    return np.block([[top_left, top_right], [bottom_left, bottom_right]])


@dataclass(frozen=True, eq=False)
class GenElement:
    """Element X+α of T_p⊕T*_p."""

    vec: Matrix
    cov: Matrix

    def __post_init__(self) -> None:
        vec = np.asarray(self.vec, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float).reshape(-1)
        if vec.shape != cov.shape:
            raise ValidationError(f"tangent and cotangent parts differ in length ({vec.size} != {cov.size})")
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def from_array(cls, array: Matrix) -> GenElement:
        """Split a 2n coefficient vector."""
        array = np.asarray(array, dtype=float).reshape(-1)
        if array.size % 2:
            raise ValidationError(f"generalized element needs an even number of coefficients, got {array.size}")
        half = array.size // 2
        return cls(array[:half], array[half:])

    @classmethod
    def tangent(cls, vec: Matrix) -> GenElement:
        """Pure vector."""
        vec = np.asarray(vec, dtype=float)
        return cls(vec, np.zeros_like(vec))

    @classmethod
    def cotangent(cls, cov: Matrix) -> GenElement:
        """Pure form."""
        cov = np.asarray(cov, dtype=float)
        return cls(np.zeros_like(cov), cov)

    @property
    def n(self) -> int:
        """Chart dimension."""
        return self.vec.size

    def as_array(self) -> Matrix:
        """Return the 2n coefficient vector."""
        return np.concatenate([self.vec, self.cov])

    def norm(self) -> float:
        """Max-abs norm."""
        return _max_abs(self.as_array())

    def __add__(self, other: GenElement) -> GenElement:
        _check_dimensions(self.n, other.n)
        return GenElement(self.vec + other.vec, self.cov + other.cov)

    def __sub__(self, other: GenElement) -> GenElement:
        _check_dimensions(self.n, other.n)
        return GenElement(self.vec - other.vec, self.cov - other.cov)

    def __neg__(self) -> GenElement:
        return GenElement(-self.vec, -self.cov)

    def __mul__(self, scalar: float) -> GenElement:
        return GenElement(scalar * self.vec, scalar * self.cov)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"GenElement(vec={self.vec.tolist()}, cov={self.cov.tolist()})"


def _check_dimensions(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise ValidationError(f"dimension mismatch: {sorted(set(dims))}")


@dataclass(frozen=True, eq=False)
class GenMetric:
    """Generalized metric E = {X + g(X) + Θ(X)} given by (g, Θ) at a point."""

    g: Matrix
    theta: Matrix

    def __post_init__(self) -> None:
        g = np.array(self.g, dtype=float)
        theta = np.array(self.theta, dtype=float)

        if g.ndim != 2 or g.shape[0] != g.shape[1] or theta.shape != g.shape:
            raise ValidationError(f"g and theta must be square matrices of equal size, got {g.shape} and {theta.shape}")

        asymmetry = _max_abs(g - g.T)
        if asymmetry > TOLERANCE * _scale(g) ** 0.5:
            raise ValidationError("g = gᵀ", asymmetry)
        g = (g + g.T) / 2

        smallest = float(np.linalg.eigvalsh(g)[0])
        if smallest <= 0:
            raise ValidationError("g is positive definite", smallest)

        object.__setattr__(self, "g", g)
        object.__setattr__(self, "theta", (theta - theta.T) / 2)

    @classmethod
    def euclidean(cls, n: int) -> GenMetric:
        """Generalized metric of the flat metric with Θ = 0."""
        return cls(np.eye(n), np.zeros((n, n)))

    @property
    def n(self) -> int:
        """Dimension."""
        return self.g.shape[0]

    @cached_property
    def g_inv(self) -> Matrix:
        """Inverse metric."""
        return np.linalg.inv(self.g)

    @property
    def theta_map(self) -> Matrix:
        """Matrix of X ↦ i_X Θ."""
        return self.theta.T

    @cached_property
    def lift_plus(self) -> Matrix:
        """2n×n matrix of X ↦ X + g(X) + Θ(X), the inverse of pr_T restricted to E′."""
        return np.vstack([np.eye(self.n), self.g + self.theta_map])

    @cached_property
    def lift_minus(self) -> Matrix:
        """2n×n matrix of X ↦ X − g(X) + Θ(X), the inverse of pr_T restricted to E″."""
        return np.vstack([np.eye(self.n), -self.g + self.theta_map])

    def lift_matrix(self, side: Side) -> Matrix:
        """Lift matrix onto E′ or E″."""
        return self.lift_plus if side == Side.PLUS else self.lift_minus


@dataclass(frozen=True, eq=False)
class GenComplex:
    """Generalized complex structure on T_p⊕T*_p."""

    m: Matrix

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValidationError(f"generalized complex structure must be 2n×2n, got {m.shape}")
        object.__setattr__(self, "m", m)

        square, skew = structure_residuals(m)
        if square > TOLERANCE * _scale(m):
            raise ValidationError("𝒥² = −Id", square)
        if skew > TOLERANCE * _scale(m):
            raise ValidationError("⟨𝒥a, b⟩ + ⟨a, 𝒥b⟩ = 0", skew)

    @property
    def n(self) -> int:
        """Chart dimension."""
        return self.m.shape[0] // 2

    def apply(self, a: GenElement) -> GenElement:
        """Return 𝒥a."""
        _check_dimensions(self.n, a.n)
        return GenElement.from_array(self.m @ a.as_array())


@dataclass(frozen=True, eq=False)
class GOperator:
    """The involution 𝒢 with +1-eigenspace E′ and −1-eigenspace E″."""

    m: Matrix

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=float)
        object.__setattr__(self, "m", m)
        pairing = pairing_matrix(m.shape[0] // 2)

        square = _max_abs(m @ m - np.eye(m.shape[0]))
        if square > TOLERANCE * _scale(m):
            raise ValidationError("𝒢² = Id", square)
        orthogonal = _max_abs(m.T @ pairing @ m - pairing)
        if orthogonal > TOLERANCE * _scale(m):
            raise ValidationError("⟨𝒢a, 𝒢b⟩ = ⟨a, b⟩", orthogonal)
        smallest = float(np.linalg.eigvalsh((pairing @ m + m.T @ pairing) / 2)[0])
        if smallest <= 0:
            raise ValidationError("⟨𝒢a, a⟩ > 0", smallest)

    def apply(self, a: GenElement) -> GenElement:
        """Return 𝒢a."""
        return GenElement.from_array(self.m @ a.as_array())


def pairing_matrix(n: int) -> Matrix:
    """Gram matrix of the neutral pairing ⟨X+α, Y+β⟩ = ½[α(Y) + β(X)]."""
    identity = np.eye(n)
    zero = np.zeros((n, n))
    return 0.5 * _block(zero, identity, identity, zero)


def structure_residuals(m: Matrix) -> tuple[float, float]:
    """Return the 𝒥² = −Id and pairing-skewness residuals of a 2n×2n matrix."""
    pairing = pairing_matrix(m.shape[0] // 2)
    square = _max_abs(m @ m + np.eye(m.shape[0]))
    skew = _max_abs(m.T @ pairing + pairing @ m)
    return square, skew


def pairing(a: GenElement, b: GenElement) -> float:
    """Neutral pairing ⟨a, b⟩."""
    _check_dimensions(a.n, b.n)
    return 0.5 * float(a.cov @ b.vec + b.cov @ a.vec)


def exp_b(b: Matrix) -> Matrix:
    """Matrix of the B-transform e^B for the 2-form with coefficient matrix b."""
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    return _block(np.eye(n), np.zeros((n, n)), b.T, np.eye(n))


def _antisymmetric(b: Matrix) -> Matrix:
    b = np.asarray(b, dtype=float)
    residual = _max_abs(b + b.T)
    if residual > TOLERANCE * max(1.0, _max_abs(b)):
        raise ValidationError("B = −Bᵀ", residual)
    return b


def b_transform(b: Matrix, a: GenElement) -> GenElement:
    """Return e^B(X+α) = X + α + i_X B."""
    b = _antisymmetric(b)
    _check_dimensions(b.shape[0], a.n)
    return GenElement(a.vec, a.cov + b.T @ a.vec)


def conjugate(b: Matrix, j: GenComplex) -> GenComplex:
    """Return e^B 𝒥 e^{−B}."""
    b = _antisymmetric(b)
    _check_dimensions(b.shape[0], j.n)
    return GenComplex(exp_b(b) @ j.m @ exp_b(-b))


def lift(gm: GenMetric, vec: Matrix, side: Side = Side.PLUS) -> GenElement:
    """Return the E′ (or E″) element whose tangent part is the given vector."""
    return GenElement.from_array(gm.lift_matrix(side) @ np.asarray(vec, dtype=float))


def project(gm: GenMetric, a: GenElement) -> tuple[GenElement, GenElement]:
    """Split a into its E′ and E″ components."""
    _check_dimensions(gm.n, a.n)
    shift = gm.g_inv @ (a.cov - gm.theta_map @ a.vec)
    plus = 0.5 * (a.vec + shift)
    minus = 0.5 * (a.vec - shift)
    return lift(gm, plus, Side.PLUS), lift(gm, minus, Side.MINUS)


def g_operator(gm: GenMetric) -> GOperator:
    """Return 𝒢 = e^Θ [[0, g⁻¹], [g, 0]] e^{−Θ}."""
    n = gm.n
    untwisted = _block(np.zeros((n, n)), gm.g_inv, gm.g, np.zeros((n, n)))
    return GOperator(exp_b(gm.theta) @ untwisted @ exp_b(-gm.theta))


def check_complex_structure(j: Matrix, name: str = "J") -> Matrix:
    """Validate J² = −Id."""
    j = np.asarray(j, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise ValidationError(f"{name} must be square, got {j.shape}")
    residual = _max_abs(j @ j + np.eye(j.shape[0]))
    if residual > TOLERANCE * _scale(j):
        raise ValidationError(f"{name}² = −Id", residual)
    return j


def check_orthogonal(g: Matrix, j: Matrix, name: str = "J") -> Matrix:
    """Validate g(JX, JY) = g(X, Y)."""
    residual = _max_abs(j.T @ g @ j - g)
    if residual > TOLERANCE * _scale(j) * max(1.0, _max_abs(g)):
        raise ValidationError(f"g({name}X, {name}Y) = g(X, Y)", residual)
    return j


def from_complex(j: Matrix) -> GenComplex:
    """Generalized complex structure diag(J, −Jᵀ) of a complex structure J."""
    j = check_complex_structure(j)
    n = j.shape[0]
    return GenComplex(_block(j, np.zeros((n, n)), np.zeros((n, n)), -j.T))


def from_symplectic(w: Matrix) -> GenComplex:
    """Generalized complex structure X ↦ −w(X), α ↦ w⁻¹(α) of a symplectic form."""
    w = _antisymmetric(w)
    n = w.shape[0]
    try:
        if np.linalg.cond(w) > 1 / TOLERANCE:
            raise np.linalg.LinAlgError
        w_inv = np.linalg.inv(w.T)
    except np.linalg.LinAlgError as error:
        raise ValidationError("not symplectic: w is singular") from error
    return GenComplex(_block(np.zeros((n, n)), w_inv, -w.T, np.zeros((n, n))))


def from_complex_bivector(j: Matrix, pi: Matrix) -> GenComplex:
    """
    Generalized complex structure of a complex structure J and a complex bivector π.

    Only the Λ²T^{1,0} component of π enters: the upper-right block is 2·Im(π♯) of that component.
    """
    j = check_complex_structure(j)
    pi = np.asarray(pi, dtype=complex)
    n = j.shape[0]
    if pi.shape != (n, n):
        raise ValidationError(f"bivector must be {n}×{n}, got {pi.shape}")

    holomorphic = 0.5 * (np.eye(n) - 1j * j)
    pi_20 = holomorphic @ ((pi - pi.T) / 2) @ holomorphic.T
    upper = 2 * pi_20.imag.T

    m = _block(j, upper, np.zeros((n, n)), -j.T)
    square, skew = structure_residuals(m)
    if max(square, skew) > TOLERANCE * _scale(m):
        raise ValidationError("incompatible bivector", max(square, skew))
    return GenComplex(m)


def direct_sum(first: GenComplex, second: GenComplex) -> GenComplex:
    """Generalized complex structure on T₁⊕T₂ in the combined chart order (T₁, T₂, T₁*, T₂*)."""
    n1, n2 = first.n, second.n
    n = n1 + n2
    index_first = np.concatenate([np.arange(n1), n + np.arange(n1)])
    index_second = np.concatenate([n1 + np.arange(n2), n + n1 + np.arange(n2)])

    m = np.zeros((2 * n, 2 * n))
    m[np.ix_(index_first, index_first)] = first.m
    m[np.ix_(index_second, index_second)] = second.m
    return GenComplex(m)


def untwisted_structure(g: Matrix, j1: Matrix, j2: Matrix) -> Matrix:
    """Block matrix ½[[J₁+J₂, ω₁⁻¹−ω₂⁻¹], [−(ω₁−ω₂), −(J₁ᵀ+J₂ᵀ)]] with ω_k = −g∘J_k."""
    omega1 = -g @ j1
    omega2 = -g @ j2
    return 0.5 * _block(
        j1 + j2,
        np.linalg.inv(omega1) - np.linalg.inv(omega2),
        -(omega1 - omega2),
        -(j1.T + j2.T),
    )


def assemble(gm: GenMetric, j1: Matrix, j2: Matrix) -> GenComplex:
    """Compatible generalized complex structure determined by (g, Θ, J₁, J₂)."""
    j1 = check_orthogonal(gm.g, check_complex_structure(j1, "J₁"), "J₁")
    j2 = check_orthogonal(gm.g, check_complex_structure(j2, "J₂"), "J₂")
    _check_dimensions(gm.n, j1.shape[0], j2.shape[0])
    return GenComplex(exp_b(gm.theta) @ untwisted_structure(gm.g, j1, j2) @ exp_b(-gm.theta))


def compatibility_residuals(gm: GenMetric, j: GenComplex) -> tuple[float, float]:
    """Return the 𝒥E′ ⊆ E′ residual and the [𝒥, 𝒢] residual."""
    _check_dimensions(gm.n, j.n)
    g_op = g_operator(gm).m
    image = j.m @ gm.lift_plus
    leaving = image - 0.5 * (image + g_op @ image)
    return _max_abs(leaving), _max_abs(j.m @ g_op - g_op @ j.m)


def is_compatible(gm: GenMetric, j: GenComplex) -> bool:
    """Return whether 𝒥 preserves E′, cross-checked against [𝒥, 𝒢] = 0."""
    preserves, commutes = compatibility_residuals(gm, j)
    tolerance = TOLERANCE * _scale(j.m) * max(1.0, _max_abs(gm.g), _max_abs(gm.g_inv)) ** 2
    preserved = preserves <= tolerance
    commuting = commutes <= tolerance
    if preserved != commuting:
        raise NumericalError(
            f"compatibility checks disagree (𝒥E′ residual {preserves:.3e}, [𝒥, 𝒢] residual {commutes:.3e})"
        )
    return preserved


def commutes_with_metric(g: Matrix, j: GenComplex) -> bool:
    """Return whether 𝒥 commutes with g⊕g*, viewed as X+α ↦ g⁻¹α + gX."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    metric = _block(np.zeros((n, n)), np.linalg.inv(g), g, np.zeros((n, n)))
    residual = _max_abs(j.m @ metric - metric @ j.m)
    return residual <= TOLERANCE * _scale(j.m) * max(1.0, _max_abs(g), _max_abs(np.linalg.inv(g))) ** 2


def _require_compatible(gm: GenMetric, j: GenComplex) -> None:
    if not is_compatible(gm, j):
        raise ValidationError("𝒥E′ ⊆ E′", compatibility_residuals(gm, j)[0])


def extract_pair(gm: GenMetric, j: GenComplex) -> tuple[Matrix, Matrix]:
    """Return (J₁, J₂), the structures induced on T through pr_T restricted to E′ and E″."""
    _require_compatible(gm, j)
    n = gm.n
    return (j.m @ gm.lift_plus)[:n], (j.m @ gm.lift_minus)[:n]


def second_structure(gm: GenMetric, j: GenComplex) -> GenComplex:
    """Return 𝒢∘𝒥, the compatible structure determined by (g, Θ, J₁, −J₂)."""
    _require_compatible(gm, j)
    return GenComplex(g_operator(gm).m @ j.m)


def pfaffian(a: Matrix) -> float:
    """Pfaffian of an antisymmetric matrix by recursive expansion along the first row."""
    a = np.asarray(a, dtype=float)
    size = a.shape[0]
    if size == 0:
        return 1.0
    if size % 2:
        return 0.0
    total = 0.0
    rest = np.arange(1, size)
    for position, column in enumerate(rest):
        if a[0, column] == 0:
            continue
        keep = np.delete(rest, position)
        total += (-1) ** position * a[0, column] * pfaffian(a[np.ix_(keep, keep)])
    return total


def orientation_sign(g: Matrix, j: Matrix, orientation: int = 1) -> int:
    """Orientation induced by a g-orthogonal J: the sign of Pf(ω), ω_ij = g(Je_i, e_j), against the chart."""
    g = np.asarray(g, dtype=float)
    omega = np.asarray(j, dtype=float).T @ g
    value = pfaffian((omega - omega.T) / 2)
    if abs(value) < 1e-6 * np.sqrt(abs(np.linalg.det(g))):
        raise NumericalError(f"near-zero Pfaffian {value:.3e}: input is not a g-orthogonal complex structure")
    return orientation * (1 if value > 0 else -1)


def classify_component(gm: GenMetric, j: GenComplex, orientation: int = 1) -> Component:
    """Return the component of the generalized twistor fiber containing 𝒥."""
    j1, j2 = extract_pair(gm, j)
    return Component.from_signs(orientation_sign(gm.g, j1, orientation), orientation_sign(gm.g, j2, orientation))


def orthonormal_frame(g: Matrix) -> Matrix:
    """Gram-Schmidt of the coordinate frame in the metric g; columns form an oriented g-orthonormal frame."""
    upper = sla.cholesky(np.asarray(g, dtype=float), lower=False)
    return sla.solve_triangular(upper, np.eye(upper.shape[0]), lower=False)


def standard_complex_structure(n: int) -> Matrix:
    """The complex structure e₂ₖ₋₁ ↦ e₂ₖ, e₂ₖ ↦ −e₂ₖ₋₁."""
    j = np.zeros((n, n))
    for k in range(0, n, 2):
        j[k + 1, k] = 1.0
        j[k, k + 1] = -1.0
    return j
