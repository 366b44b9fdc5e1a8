"""gentwist connections library."""

from __future__ import annotations

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"

from dataclasses import dataclass

import numpy as np

from .errors import DomainRestrictionError, PreconditionError
from .fields import (
    EndoJet,
    FieldGenMetric,
    FieldGenSection,
    SectionField,
    SectionJet,
    courant_bracket_jets,
    exterior_derivative,
    exterior_derivative_jet,
)
from .linalg import (
    TOLERANCE,
    GenComplex,
    GenElement,
    GenMetric,
    assemble,
    extract_pair,
    orthonormal_frame,
    project,
)
from .types import ConnectionKind, Matrix, Point, Side

# largest coordinate offset at which a parallel extension is evaluated
EXTENSION_RADIUS = 0.25


@dataclass(frozen=True, eq=False)
class ConnCoeffs:
    """
    Connection coefficients at a point.

    For connections on TM, ``gamma[i, j, k]`` is the k-th component of ∇_{∂i}∂j.
    For the generalized connection D, ``gamma[k]`` is the 2n×2n matrix acting on sections
    in the direction ∂k, so that D_Z A = Z^k (∂k A + gamma[k] A).
    """

    kind: ConnectionKind
    gamma: Matrix

    @property
    def n(self) -> int:
        """Chart dimension."""
        return self.gamma.shape[0]

    @property
    def matrices(self) -> Matrix:
        """Per-direction matrices M_k with ∇_{∂k} v = ∂k v + M_k v."""
        if self.kind is ConnectionKind.GENERALIZED:
            return self.gamma
        return np.swapaxes(self.gamma, 1, 2)

    def derivative(self, direction: Matrix, value: Matrix, grad: Matrix) -> Matrix:
        """Covariant derivative of a field given by its value and partial derivatives."""
        direction = np.asarray(direction, dtype=float)
        return grad @ direction + np.einsum("k,kij,j->i", direction, self.matrices, value)

    def torsion(self) -> Matrix:
        """T[i, j] = ∇_{∂i}∂j − ∇_{∂j}∂i."""
        if self.kind is ConnectionKind.GENERALIZED:
            raise PreconditionError("torsion is defined for connections on TM")
        return self.gamma - np.swapaxes(self.gamma, 0, 1)

    def metric_residual(self, g: Matrix, dg: Matrix) -> float:
        """Max |∇g| given g and its partial derivatives dg[i, j, k] = ∂k g_ij."""
        residual = np.stack([dg[..., k] - m.T @ g - g @ m for k, m in enumerate(self.matrices)])
        return float(np.max(np.abs(residual)))


@dataclass(frozen=True, eq=False)
class TorsionConnection:
    """The metric connections ∇ and ∇″ with totally skew torsion ±dΘ, and the torsion of ∇."""

    nabla: ConnCoeffs
    nabla_opposite: ConnCoeffs
    torsion: Matrix
    three_form: Matrix
    averaging_residual: float


def _christoffel_first_kind(dg: Matrix) -> Matrix:
    # Γ_{ijl} = ½(∂i g_jl + ∂j g_il − ∂l g_ij)
    return 0.5 * (np.transpose(dg, (2, 0, 1)) + np.transpose(dg, (0, 2, 1)) - dg)


def _christoffel_first_kind_derivative(hg: Matrix) -> Matrix:
    return 0.5 * (np.transpose(hg, (2, 0, 1, 3)) + np.transpose(hg, (0, 2, 1, 3)) - hg)


def levi_civita(gm: FieldGenMetric, point: Point) -> ConnCoeffs:
    """Levi-Civita connection of g at a point."""
    g, _ = gm.jets(point)
    g_inv = gm.at(point).g_inv
    gamma = np.einsum("kl,ijl->ijk", g_inv, _christoffel_first_kind(g.grad))
    return ConnCoeffs(ConnectionKind.LEVI_CIVITA, gamma)


def _three_form(gm: FieldGenMetric, point: Point) -> Matrix:
    _, theta = gm.jets(point)
    return exterior_derivative(theta.grad)


def torsion_connection(gm: FieldGenMetric, point: Point) -> TorsionConnection:
    """g(∇_X Y, Z) = g(∇^g_X Y, Z) + ½dΘ(X, Y, Z) and ∇″ with the opposite sign."""
    levi = levi_civita(gm, point)
    h = _three_form(gm, point)
    shift = 0.5 * np.einsum("kl,ijl->ijk", gm.at(point).g_inv, h)
    nabla = ConnCoeffs(ConnectionKind.TORSION, levi.gamma + shift)
    opposite = ConnCoeffs(ConnectionKind.TORSION_OPPOSITE, levi.gamma - shift)
    average = 0.5 * (nabla.gamma + opposite.gamma)
    return TorsionConnection(
        nabla=nabla,
        nabla_opposite=opposite,
        torsion=nabla.torsion(),
        three_form=h,
        averaging_residual=float(np.max(np.abs(average - levi.gamma))),
    )


def connection_jet(gm: FieldGenMetric, point: Point, kind: ConnectionKind) -> tuple[ConnCoeffs, Matrix]:
    """Connection coefficients and their partial derivatives, dgamma[m, i, j, k] = ∂m gamma[i, j, k]."""
    g, theta = gm.jets(point)
    g_inv = gm.at(point).g_inv
    d_g_inv = -np.einsum("ka,abm,bl->klm", g_inv, g.grad, g_inv)

    first = _christoffel_first_kind(g.grad)
    d_first = _christoffel_first_kind_derivative(g.hess)
    gamma = np.einsum("kl,ijl->ijk", g_inv, first)
    d_gamma = np.einsum("klm,ijl->mijk", d_g_inv, first) + np.einsum("kl,ijlm->mijk", g_inv, d_first)

    if kind in (ConnectionKind.TORSION, ConnectionKind.TORSION_OPPOSITE):
        sign = 0.5 if kind is ConnectionKind.TORSION else -0.5
        h, d_h = exterior_derivative_jet(theta.grad, theta.hess)
        gamma = gamma + sign * np.einsum("kl,ijl->ijk", g_inv, h)
        d_gamma = d_gamma + sign * (
            np.einsum("klm,ijl->mijk", d_g_inv, h) + np.einsum("kl,ijlm->mijk", g_inv, d_h)
        )
    elif kind is not ConnectionKind.LEVI_CIVITA:
        raise PreconditionError(f"no coefficient jet for the {kind.value} connection")

    return ConnCoeffs(kind, gamma), d_gamma


def generalized_connection(gm: FieldGenMetric, point: Point) -> ConnCoeffs:
    """
    The connection D on TM⊕T*M: transport of ∇ ⊕ ∇* through e^Θ.

    In the direction ∂k it acts by the block matrix [[Γ_k, 0], [∇_kΘ, −Γ_kᵀ]].
    """
    _, theta = gm.jets(point)
    nabla = torsion_connection(gm, point).nabla
    n = gm.n
    blocks = np.zeros((n, 2 * n, 2 * n))
    for k, gamma_k in enumerate(nabla.matrices):
        covariant_theta = theta.grad[..., k] - gamma_k.T @ theta.val - theta.val @ gamma_k
        blocks[k, :n, :n] = gamma_k
        blocks[k, n:, :n] = covariant_theta
        blocks[k, n:, n:] = -gamma_k.T
    return ConnCoeffs(ConnectionKind.GENERALIZED, blocks)


def connection_D(gm: FieldGenMetric, direction: Matrix, section: SectionField, point: Point) -> GenElement:
    """D_Z A at a point."""
    jet = section.jet1(point)
    return GenElement.from_array(generalized_connection(gm, point).derivative(direction, jet.val, jet.grad))


def connection_on_sections(
    gm: FieldGenMetric, direction: Matrix, section: SectionField, point: Point
) -> tuple[Matrix, Matrix]:
    """The pair (∇_Z X, ∇_Z ξ) for the E′-section S = X + ξ, computed as pr_T and pr_T* of D_Z S."""
    result = connection_D(gm, direction, section, point)
    return result.vec, result.cov


@dataclass(frozen=True, eq=False)
class LiftedSection:
    """The section X ↦ X + (±g + Θ)(X) of E′ or E″ over a vector field."""

    metric: FieldGenMetric
    vector: SectionField
    side: Side = Side.PLUS

    def jet1(self, point: Point) -> SectionJet:
        """First jet at a point."""
        g, theta = self.metric.jets(point)
        n = self.metric.n
        jet = self.vector.jet1(point)
        x, dx = jet.val[:n], jet.grad[:n]
        sign = 1.0 if self.side is Side.PLUS else -1.0
        graph = sign * g.val + theta.val.T
        d_graph = sign * g.grad + np.swapaxes(theta.grad, 0, 1)
        cov = graph @ x
        d_cov = np.einsum("ijk,j->ik", d_graph, x) + graph @ dx
        return SectionJet(np.concatenate([x, cov]), np.vstack([dx, d_cov]))


def lift_section(gm: FieldGenMetric, vector: SectionField, side: Side = Side.PLUS) -> LiftedSection:
    """Lift a vector field to a section of E′ (or E″)."""
    return LiftedSection(gm, vector, side)


def courant_connection_check(gm: FieldGenMetric, direction: Matrix, section: SectionField, point: Point) -> float:
    """
    Residual of pr_E′[X″, S] = D_X S, where X″ is the E″ lift of the constant field X.

    ``section`` must take values in E′ at the point.
    """
    point = np.asarray(point, dtype=float)
    metric = gm.at(point)
    jet = section.jet1(point)
    leftover = project(metric, jet.element)[1]
    if leftover.norm() > 1e3 * TOLERANCE * max(1.0, jet.element.norm()):
        raise PreconditionError(f"section is not in E′ at the point (E″ part {leftover.norm():.3e})")

    constant = FieldGenSection.constant(gm.chart, GenElement.tangent(direction))
    lifted = lift_section(gm, constant, Side.MINUS).jet1(point)
    projected = project(metric, courant_bracket_jets(lifted, jet))[0]
    return (projected - connection_D(gm, direction, section, point)).norm()


def _polar_complex(j: Matrix, frame: Matrix) -> Matrix:
    """Nearest orthogonal complex structure to an approximately orthogonal one, in the metric with frame L."""
    inverse = np.linalg.inv(frame)
    local = inverse @ j @ frame
    skew = 0.5 * (local - local.T)
    eigenvalues, eigenvectors = np.linalg.eigh(-skew @ skew)
    if eigenvalues.min() < 0.25:
        raise DomainRestrictionError(f"parallel extension degenerates (eigenvalue {eigenvalues.min():.3e})")
    inverse_root = eigenvectors @ np.diag(eigenvalues ** -0.5) @ eigenvectors.T
    return frame @ (skew @ inverse_root) @ inverse


@dataclass(frozen=True, eq=False)
class ParallelExtension:
    """Local extension of 𝒥_p with D𝒥 = 0 at p; values are defined near p only."""

    metric: FieldGenMetric
    point: Point
    j1: Matrix
    j2: Matrix
    value_at_point: Matrix
    directions: Matrix
    transport: Matrix

    def jet1(self, point: Point) -> EndoJet:
        """First jet; only available at the base point."""
        point = np.asarray(point, dtype=float)
        if not np.allclose(point, self.point, rtol=0.0, atol=1e-12):
            raise DomainRestrictionError("the first jet of a parallel extension exists at its base point only")
        s = self.value_at_point
        grad = np.stack([s @ m - m @ s for m in self.directions], axis=-1)
        return EndoJet(s, grad)

    def value_at(self, point: Point) -> GenComplex:
        """The compatible structure assembled from ∇-transported J₁, J₂ at a nearby point."""
        point = np.asarray(point, dtype=float)
        offset = point - self.point
        if np.max(np.abs(offset)) > EXTENSION_RADIUS:
            raise DomainRestrictionError(f"point is {np.max(np.abs(offset)):.3f} away from the base point")
        metric = self.metric.at(point)
        frame = orthonormal_frame(metric.g)
        structures = []
        for j in (self.j1, self.j2):
            moved = j - np.einsum("k,kij->ij", offset, np.stack([m @ j - j @ m for m in self.transport]))
            structures.append(_polar_complex(moved, frame))
        return assemble(metric, *structures)


def parallel_extension(gm: FieldGenMetric, j: GenComplex, point: Point) -> ParallelExtension:
    """Extend a compatible 𝒥 at p to a neighbourhood with vanishing D-derivative at p."""
    point = np.asarray(point, dtype=float)
    metric: GenMetric = gm.at(point)
    j1, j2 = extract_pair(metric, j)
    return ParallelExtension(
        metric=gm,
        point=point,
        j1=j1,
        j2=j2,
        value_at_point=j.m,
        directions=generalized_connection(gm, point).matrices,
        transport=torsion_connection(gm, point).nabla.matrices,
    )
