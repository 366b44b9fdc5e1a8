"""
gentwist curvature library.

Curvature of the Levi-Civita and torsion connections, the curvature operator on Λ² in an orthonormal frame and
its splitting into scalar, traceless-Ricci and Weyl parts (with the self-dual/anti-self-dual refinement in
dimension 4).

Sign convention: R(X, Y) = ∇_{[X,Y]} − [∇_X, ∇_Y], so the unit sphere has g(R(X,Y)X, Y) = +1 for orthonormal X, Y
and the curvature operator of the unit sphere is the identity.
"""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .connections import connection_jet
from .errors import ValidationError
from .fields import FieldGenMetric
from .linalg import orthonormal_frame
from .twistor import FiberPoint, VertVec
from .types import ConnectionKind, Matrix, Point

# relative asymmetry of ℛ above which the input is rejected
SYMMETRY_TOLERANCE = 1e-7


@dataclass(frozen=True)
class Lambda2Basis:
    """Index pairs (i, j), i < j, in lexicographic order."""

    n: int

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Ordered index pairs."""
        return list(combinations(range(self.n), 2))

    @property
    def size(self) -> int:
        """n(n−1)/2."""
        return self.n * (self.n - 1) // 2

    def gram(self, g: Matrix) -> Matrix:
        """g(e_i∧e_j, e_k∧e_l) = g_ik g_jl − g_il g_jk on the coordinate bivectors."""
        g = np.asarray(g, dtype=float)
        return np.array(
            [[g[i, k] * g[j, l] - g[i, l] * g[j, k] for k, l in self.pairs] for i, j in self.pairs]
        )

    def to_matrix(self, tensor: Matrix) -> Matrix:
        """Restrict a 4-index tensor antisymmetric in both index pairs to the pair basis."""
        pairs = self.pairs
        return np.array([[tensor[i, j, k, l] for k, l in pairs] for i, j in pairs])

    def to_tensor(self, matrix: Matrix) -> Matrix:
        """Extend a pair-basis matrix to the 4-index tensor antisymmetric in both pairs."""
        n = self.n
        tensor = np.zeros((n, n, n, n))
        for row, (i, j) in enumerate(self.pairs):
            for column, (k, l) in enumerate(self.pairs):
                value = matrix[row, column]
                tensor[i, j, k, l] = value
                tensor[j, i, k, l] = -value
                tensor[i, j, l, k] = -value
                tensor[j, i, l, k] = value
        return tensor


@dataclass(frozen=True, eq=False)
class CurvOp:
    """Curvature operator as a matrix in the orthonormal Λ² frame E_a∧E_b."""

    matrix: Matrix
    n: int
    connection: ConnectionKind = ConnectionKind.LEVI_CIVITA

    @property
    def basis(self) -> Lambda2Basis:
        """Pair basis."""
        return Lambda2Basis(self.n)

    def tensor(self) -> Matrix:
        """R_o[a, b, c, d] = g(R(E_a, E_b)E_c, E_d)."""
        return self.basis.to_tensor(self.matrix)


@dataclass(frozen=True, eq=False)
class CurvDecomp:
    """ℛ = s/(n(n−1))·Id + ℬ + 𝒲, with 𝒲 = 𝒲₊ + 𝒲₋ in dimension 4."""

    scalar: float
    ricci: Matrix
    scalar_part: Matrix
    b_op: Matrix
    w_op: Matrix
    w_plus: Matrix | None = None
    w_minus: Matrix | None = None
    hodge: Matrix | None = None

    def reassembly_residual(self, cop: CurvOp) -> float:
        """Max |ℛ − s/(n(n−1))Id − ℬ − 𝒲|."""
        return float(np.max(np.abs(cop.matrix - self.scalar_part - self.b_op - self.w_op)))

    def orthogonality_residual(self) -> float:
        """Largest trace inner product between two of the three parts."""
        parts = (self.scalar_part, self.b_op, self.w_op)
        return max(abs(float(np.trace(a.T @ b))) for a, b in combinations(parts, 2))


def riemann(gm: FieldGenMetric, point: Point, connection: ConnectionKind = ConnectionKind.LEVI_CIVITA) -> Matrix:
    """R[a, b, c, d], the d-th component of R(∂a, ∂b)∂c."""
    coeffs, d_gamma = connection_jet(gm, point, connection)
    gamma = coeffs.gamma
    standard = (
        d_gamma
        - np.transpose(d_gamma, (1, 0, 2, 3))
        + np.einsum("bce,aed->abcd", gamma, gamma)
        - np.einsum("ace,bed->abcd", gamma, gamma)
    )
    return -standard


def lower(curvature: Matrix, g: Matrix) -> Matrix:
    """Rl[a, b, c, d] = g(R(∂a, ∂b)∂c, ∂d)."""
    return np.einsum("abce,ed->abcd", curvature, g)


def bianchi_residual(curvature: Matrix) -> float:
    """Max |R(X,Y)Z + R(Y,Z)X + R(Z,X)Y|."""
    cyclic = curvature + np.transpose(curvature, (1, 2, 0, 3)) + np.transpose(curvature, (2, 0, 1, 3))
    return float(np.max(np.abs(cyclic)))


def pair_symmetry_residual(curvature: Matrix, g: Matrix) -> float:
    """Max |R_abcd − R_cdab| of the lowered tensor."""
    lowered = lower(curvature, g)
    return float(np.max(np.abs(lowered - np.transpose(lowered, (2, 3, 0, 1)))))


def to_orthonormal(curvature: Matrix, g: Matrix) -> Matrix:
    """R_o[a, b, c, d] = g(R(E_a, E_b)E_c, E_d) in the oriented orthonormal frame E."""
    frame = orthonormal_frame(g)
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", lower(curvature, g), frame, frame, frame, frame)


def curvature_operator(
    curvature: Matrix, g: Matrix, connection: ConnectionKind = ConnectionKind.LEVI_CIVITA
) -> CurvOp:
    """ℛ with g(ℛ(X∧Y), Z∧U) = g(R(X,Y)Z, U), as a matrix in the orthonormal Λ² frame."""
    n = curvature.shape[0]
    matrix = Lambda2Basis(n).to_matrix(to_orthonormal(curvature, g))
    asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(matrix)))):
        raise ValidationError("curvature operator is self-adjoint", asymmetry)
    return CurvOp(0.5 * (matrix + matrix.T), n, connection)


def hodge_star(n: int, orientation: int = 1) -> Matrix:
    """Hodge star on Λ² in the orthonormal pair basis (dimension 4 only)."""
    if n != 4:
        raise ValidationError(f"Hodge star on Λ² is implemented in dimension 4, got {n}")
    pairs = Lambda2Basis(4).pairs
    star = np.zeros((6, 6))
    for row, (i, j) in enumerate(pairs):
        k, l = (index for index in range(4) if index not in (i, j))
        # e_i∧e_j∧e_k∧e_l = sign · e_1∧e_2∧e_3∧e_4
        sign = np.linalg.det(np.eye(4)[[i, j, k, l]])
        star[pairs.index((k, l)), row] = sign * orientation
    return star


def self_dual_projectors(n: int, orientation: int = 1) -> tuple[Matrix, Matrix]:
    """P± = ½(I ± ∗) onto Λ²₊ and Λ²₋."""
    star = hodge_star(n, orientation)
    identity = np.eye(star.shape[0])
    return 0.5 * (identity + star), 0.5 * (identity - star)


def _ricci_from_tensor(tensor: Matrix) -> Matrix:
    return np.einsum("abac->bc", tensor)


def decompose(cop: CurvOp, orientation: int = 1) -> CurvDecomp:
    """Split ℛ into its scalar, traceless-Ricci and Weyl parts (and 𝒲± in dimension 4)."""
    n = cop.n
    basis = cop.basis
    ricci_op = _ricci_from_tensor(cop.tensor())
    scalar = float(np.trace(ricci_op))
    identity = np.eye(basis.size)
    scalar_part = scalar / (n * (n - 1)) * identity if n > 1 else np.zeros_like(cop.matrix)

    if n > 2:
        delta = np.eye(n)
        traceless = ricci_op - scalar / n * delta
        kulkarni = (
            np.einsum("ac,bd->abcd", traceless, delta)
            - np.einsum("ad,bc->abcd", traceless, delta)
            + np.einsum("ac,bd->abcd", delta, traceless)
            - np.einsum("ad,bc->abcd", delta, traceless)
        )
        b_op = basis.to_matrix(kulkarni) / (n - 2)
        w_op = cop.matrix - scalar_part - b_op
    else:
        b_op = np.zeros_like(cop.matrix)
        w_op = np.zeros_like(cop.matrix)

    if n != 4:
        return CurvDecomp(scalar, ricci_op, scalar_part, b_op, w_op)

    plus, minus = self_dual_projectors(n, orientation)
    return CurvDecomp(
        scalar,
        ricci_op,
        scalar_part,
        b_op,
        w_op,
        w_plus=plus @ w_op @ plus,
        w_minus=minus @ w_op @ minus,
        hodge=hodge_star(n, orientation),
    )


def ricci(curvature: Matrix, g: Matrix) -> Matrix:
    """Ric(∂b, ∂c) = Σ_a g(R(E_a, ∂b)E_a, ∂c), positive on spheres."""
    g_inv = np.linalg.inv(g)
    return np.einsum("ik,ibkc->bc", g_inv, lower(curvature, g))


def scalar_curvature(curvature: Matrix, g: Matrix) -> float:
    """s = tr_g Ric."""
    return float(np.einsum("bc,bc->", np.linalg.inv(g), ricci(curvature, g)))


def sectional_curvature(curvature: Matrix, g: Matrix, x: Matrix, y: Matrix) -> float:
    """K(X, Y) = g(R(X,Y)X, Y) / |X∧Y|²."""
    g = np.asarray(g, dtype=float)
    area = float((x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2)
    if area <= 0:
        raise ValidationError("sectional curvature needs linearly independent vectors")
    return float(np.einsum("abcd,a,b,c,d->", lower(curvature, g), x, y, x, y)) / area


def constant_curvature_residual(curvature: Matrix, g: Matrix) -> float:
    """
    Distance of R to the constant-curvature tensor with the same scalar curvature.

    Compared in the orthonormal frame, where the model is K(δ_ac δ_bd − δ_bc δ_ad) with K = s/(n(n−1)).
    """
    n = curvature.shape[0]
    tensor = to_orthonormal(curvature, g)
    constant = scalar_curvature(curvature, g) / (n * (n - 1))
    delta = np.eye(n)
    model = constant * (np.einsum("ac,bd->abcd", delta, delta) - np.einsum("bc,ad->abcd", delta, delta))
    return float(np.max(np.abs(tensor - model)))


def operator_constant_residual(cop: CurvOp) -> float:
    """‖ℛ − s/(n(n−1))Id‖∞."""
    decomposition = decompose(cop)
    return float(np.max(np.abs(cop.matrix - decomposition.scalar_part)))


def bivector(x: Matrix, y: Matrix) -> Matrix:
    """X∧Y as the antisymmetric tensor X^a Y^b − X^b Y^a."""
    return np.outer(x, y) - np.outer(y, x)


def curvature_form(lowered: Matrix, xi: Matrix, eta: Matrix) -> float:
    """g(ℛ(ξ), η) = ¼ Σ Rl[a, b, c, d] ξ^{ab} η^{cd} for bivectors given as antisymmetric tensors."""
    return 0.25 * float(np.einsum("abcd,ab,cd->", lowered, xi, eta))


def endomorphism(curvature: Matrix, x: Matrix, y: Matrix) -> Matrix:
    """Matrix of Z ↦ R(X, Y)Z."""
    return np.einsum("abcd,a,b->dc", curvature, x, y)


def conn_curvature_action(gm: FieldGenMetric, point: Point, x: Matrix, y: Matrix, fp: FiberPoint) -> VertVec:
    """([R(X,Y), J₁], [R(X,Y), J₂]) for the curvature R of the torsion connection ∇."""
    return curvature_action(riemann(gm, point, ConnectionKind.TORSION), x, y, fp)


def curvature_action(curvature: Matrix, x: Matrix, y: Matrix, fp: FiberPoint) -> VertVec:
    """Commutator action of R(X, Y) on the pair (J₁, J₂) for a precomputed curvature tensor."""
    matrix = endomorphism(curvature, x, y)
    return VertVec(matrix @ fp.j1 - fp.j1 @ matrix, matrix @ fp.j2 - fp.j2 @ matrix)
