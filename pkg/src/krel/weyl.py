"""Boundary-image families of eigen-graphs and their verification suite.

For a boundary pair the family M(z) collects the boundary images of the
eigen-graph vectors of the domain relation at the spectral parameter z.  Its
adjoint is computable along three independent routes:

  (a) the plain Hilbert adjoint of M(z) inside the boundary space,
  (b) the kernel of the metric adjoint of the restricted boundary relation,
  (c) the image of the conjugate-point eigen-graph of the upper relation
      under the inverse of the metric adjoint of the full boundary relation.

Route (b) uses the metric adjoint of the restriction, route (c) the metric
adjoint of the whole relation; their agreement is a nontrivial collapse and
is exercised as a standing test rather than assumed.

The boundary doubled space C^(2d) is identified with the graph space of
relations in C^d by the global block convention (first d coordinates form
the input block).  Points too close to the real axis are rejected because
the eigenspace decomposition and the dissipativity identity degenerate
there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .krein import BoundaryPair, krein_adjoint
from .relations import (
    LinearRelation,
    adjoint,
    apply_to_subspace,
    dissipative_class,
    eigenspace,
    inverse,
    mul,
    operator_matrix,
    part,
    shift,
)
from .subspaces import Subspace, combine, compare, complement, span

__all__ = [
    "DELTA_IMAG",
    "DefectDecomposition",
    "GridError",
    "NevanlinnaReport",
    "NevanlinnaRow",
    "RealAxisError",
    "SimplicityProbe",
    "WeylReport",
    "cr_residual",
    "defect_decomposition",
    "gamma_restrict",
    "mul_invariant",
    "nevanlinna_verify",
    "resolvent_matrix",
    "simplicity_probe",
    "weyl_adjoint_three_ways",
    "weyl_family",
    "weyl_operator_matrix",
]

DELTA_IMAG = 1e-6


class RealAxisError(ValueError):
    """Raised for spectral points inside the guarded band around the real axis."""


class GridError(ValueError):
    """Raised for malformed evaluation grids."""


def _check_off_axis(z: complex) -> complex:
    z = complex(z)
    if abs(z.imag) < DELTA_IMAG:
        raise RealAxisError(f"point {z} is within {DELTA_IMAG} of the real axis")
    return z


def _as_boundary_relation(space: Subspace, base_dim: int) -> LinearRelation:
    """Reinterpret a subspace of the doubled boundary space as a relation."""
    return LinearRelation(base_dim, base_dim, space)


def _lift_to_graph_space(space: Subspace, pair: BoundaryPair) -> Subspace:
    """Embed V x (full boundary doubled space) into the graph space of gamma."""
    n2 = pair.spec.doubled_in
    m2 = pair.spec.doubled_out
    lift = np.zeros((n2 + m2, space.dim + m2), dtype=np.complex128)
    lift[:n2, : space.dim] = space.basis
    lift[n2:, space.dim :] = np.eye(m2)
    return Subspace(n2 + m2, lift)


def gamma_restrict(pair: BoundaryPair, z: complex) -> LinearRelation:
    """Restriction of the boundary relation to the eigen-graph at z.

    The graph of the restriction is the intersection of gamma's graph with
    (eigen-graph at z) x (boundary doubled space); it is always contained in
    gamma.
    """
    z = _check_off_axis(z)
    hat = eigenspace(pair.a_star_lower, z).graph_space
    lifted = _lift_to_graph_space(hat, pair)
    graph = combine(pair.gamma.graph, lifted, "intersect")
    return LinearRelation(pair.spec.doubled_in, pair.spec.doubled_out, graph)


def weyl_family(pair: BoundaryPair, z: complex) -> LinearRelation:
    """The member M(z): range of the restricted boundary relation.

    The range, a subspace of the boundary doubled space, is read as the graph
    of a relation in the boundary base space.
    """
    restricted = gamma_restrict(pair, z)
    return _as_boundary_relation(part(restricted, "ran"), pair.spec.base_dim_out)


def _upper_eigen_graph(pair: BoundaryPair, z: complex) -> Subspace:
    """Eigen-graph of the upper relation (double adjoint of the domain) at z."""
    return eigenspace(pair.a_upper, z).graph_space


@dataclass(frozen=True, eq=False)
class WeylReport:
    """One family member with its three adjoint computations and diagnostics."""

    z: complex
    m: LinearRelation
    adj_direct: LinearRelation
    adj_kernel: LinearRelation
    adj_theorem: LinearRelation
    dissipative: bool
    maximal: bool
    mul_invariant_residual: float
    symmetry_residual: float
    agreement_residuals: dict[str, float]

    @property
    def max_agreement_residual(self) -> float:
        return max(self.agreement_residuals.values())


def weyl_adjoint_three_ways(pair: BoundaryPair, z: complex) -> WeylReport:
    """Compute M(z)* along the three routes and collect diagnostics."""
    z = _check_off_axis(z)
    d = pair.spec.base_dim_out
    restricted = gamma_restrict(pair, z)
    m = _as_boundary_relation(part(restricted, "ran"), d)

    adj_direct = adjoint(m)

    restricted_adjoint = krein_adjoint(restricted, pair.spec)
    adj_kernel = _as_boundary_relation(part(restricted_adjoint, "ker"), d)

    upper_hat = _upper_eigen_graph(pair, np.conjugate(z))
    image = apply_to_subspace(inverse(pair.gamma_krein_adjoint), upper_hat)
    adj_theorem = _as_boundary_relation(image, d)

    agreement = {
        "direct_vs_kernel": compare(adj_direct.graph, adj_kernel.graph).distance,
        "direct_vs_theorem": compare(adj_direct.graph, adj_theorem.graph).distance,
        "kernel_vs_theorem": compare(adj_kernel.graph, adj_theorem.graph).distance,
    }
    sign = "upper" if z.imag > 0 else "lower"
    diss = dissipative_class(m, sign)
    m_conj = weyl_family(pair, np.conjugate(z))
    symmetry_residual = compare(adj_direct.graph, m_conj.graph).distance
    return WeylReport(
        z=z,
        m=m,
        adj_direct=adj_direct,
        adj_kernel=adj_kernel,
        adj_theorem=adj_theorem,
        dissipative=diss.dissipative,
        maximal=diss.maximal,
        mul_invariant_residual=mul_invariant(pair, z),
        symmetry_residual=symmetry_residual,
        agreement_residuals=agreement,
    )


@dataclass(frozen=True, eq=False)
class DefectDecomposition:
    """Metric-orthogonal complement of the eigen-graph and its decomposition.

    ``lhs`` is the metric-orthogonal complement of the eigen-graph of the
    domain relation at z.  ``rhs`` is the graph sum of the conjugate-point
    eigen-graph of the upper relation with ``o_space``, which itself is the
    graph sum of conj(z) times the identity restricted to the orthogonal
    complement of the conjugate-point kernel with {0} x (orthogonal
    complement of the kernel at z).  Equality of lhs and rhs holds for every
    boundary pair in finite dimensions.
    """

    z: complex
    lhs: Subspace
    rhs: Subspace
    o_space: Subspace
    residual: float
    equals: bool


def defect_decomposition(pair: BoundaryPair, z: complex) -> DefectDecomposition:
    """Decompose the metric complement of the eigen-graph at z."""
    z = _check_off_axis(z)
    spec = pair.spec
    n = spec.base_dim_in
    zbar = np.conjugate(z)

    lower_pair = eigenspace(pair.a_star_lower, z)
    j_image = span(spec.j_in @ lower_pair.graph_space.basis, ambient_dim=spec.doubled_in)
    lhs = complement(j_image)

    lower_kernel = lower_pair.kernel_vectors()
    upper_pair = eigenspace(pair.a_upper, zbar)
    upper_kernel = upper_pair.kernel_vectors()

    upper_kernel_perp = complement(upper_kernel)
    scale = 1.0 / np.sqrt(1.0 + abs(zbar) ** 2)
    restricted_identity = Subspace(
        spec.doubled_in,
        np.vstack([upper_kernel_perp.basis, zbar * upper_kernel_perp.basis]) * scale,
    )
    lower_kernel_perp = complement(lower_kernel)
    graph_zero_block = Subspace(
        spec.doubled_in,
        np.vstack(
            [np.zeros((n, lower_kernel_perp.dim), dtype=np.complex128), lower_kernel_perp.basis]
        ),
    )
    o_space = combine(restricted_identity, graph_zero_block, "sum")
    rhs = combine(upper_pair.graph_space, o_space, "sum")
    comparison = compare(lhs, rhs)
    return DefectDecomposition(
        z=z,
        lhs=lhs,
        rhs=rhs,
        o_space=o_space,
        residual=comparison.distance,
        equals=comparison.equals,
    )


def mul_invariant(pair: BoundaryPair, z: complex) -> float:
    """Distance between M(z) intersected with M(z)* and mul(gamma).

    Both sides are subspaces of the boundary doubled space; the identity
    holds for every isometric pair away from the real axis.
    """
    z = _check_off_axis(z)
    d = pair.spec.base_dim_out
    m = weyl_family(pair, z)
    m_adj = adjoint(m)
    inter = combine(m.graph, m_adj.graph, "intersect")
    gamma_mul = mul(pair.gamma)
    return compare(inter, gamma_mul).distance


def resolvent_matrix(m: LinearRelation, w: complex) -> np.ndarray:
    """Matrix of (M + w)^(-1) when it is an everywhere-defined operator."""
    return operator_matrix(inverse(shift(m, -w)))


def weyl_operator_matrix(pair: BoundaryPair, z: complex) -> np.ndarray:
    """Matrix of M(z) when it is an everywhere-defined single-valued operator."""
    return operator_matrix(weyl_family(pair, z))


def cr_residual(evaluate: Callable[[complex], np.ndarray], z: complex, step: float) -> float:
    """Central-difference conjugate-derivative magnitude of a matrix function.

    Approximates the Wirtinger derivative with respect to conj(z) by central
    differences; for an analytic function the residual scales as step^2.
    """
    z = complex(z)
    fx1 = evaluate(z + step)
    fx0 = evaluate(z - step)
    fy1 = evaluate(z + 1j * step)
    fy0 = evaluate(z - 1j * step)
    dx = (fx1 - fx0) / (2.0 * step)
    dy = (fy1 - fy0) / (2.0 * step)
    dzbar = 0.5 * (dx + 1j * dy)
    sing = np.linalg.svd(np.atleast_2d(dzbar), compute_uv=False)
    return float(sing[0]) if sing.size else 0.0


@dataclass(frozen=True, eq=False)
class NevanlinnaRow:
    """Per-point diagnostics of the family verification sweep."""

    z: complex
    dim_m: int
    dissipative: bool
    maximal: bool
    maximality_criteria_agree: bool
    is_operator: bool
    symmetry_residual: float
    mul_residual: float
    cr_residual: float


@dataclass(frozen=True, eq=False)
class NevanlinnaReport:
    rows: tuple[NevanlinnaRow, ...]
    fd_step: float

    @property
    def max_symmetry_residual(self) -> float:
        return max((row.symmetry_residual for row in self.rows), default=0.0)

    @property
    def all_dissipative(self) -> bool:
        return all(row.dissipative for row in self.rows)

    @property
    def all_maximal(self) -> bool:
        return all(row.maximal for row in self.rows)


def _validate_grid(grid: Sequence[complex]) -> tuple[complex, ...]:
    points = tuple(complex(z) for z in grid)
    if not points:
        raise GridError("grid must be nonempty")
    for z in points:
        _check_off_axis(z)
    for z in points:
        if not any(abs(np.conjugate(z) - other) < 1e-12 for other in points):
            raise GridError(f"grid is not closed under conjugation: missing conjugate of {z}")
    return points


def nevanlinna_verify(
    pair: BoundaryPair, grid: Sequence[complex], fd_step: float = 1e-3
) -> NevanlinnaReport:
    """Verify family membership diagnostics over a conjugation-closed grid.

    Per point: dissipative/accumulative classification with the sign of the
    imaginary part, maximality by the dimension criterion cross-checked
    against the range criterion, the adjoint-symmetry residual against the
    conjugate point, the shared-multivalued-part residual, and (where the
    member is an operator with a bounded resolvent) the central-difference
    analyticity residual of z -> (M(z) + w)^(-1) with w = +/- i matched to
    the half-plane.  Multivalued members are reported, not differentiated.
    """
    points = _validate_grid(grid)
    rows = []
    for z in points:
        m = weyl_family(pair, z)
        sign = "upper" if z.imag > 0 else "lower"
        diss = dissipative_class(m, sign)
        m_adj = adjoint(m)
        m_conj = weyl_family(pair, np.conjugate(z))
        symmetry = compare(m_adj.graph, m_conj.graph).distance
        mul_res = mul_invariant(pair, z)
        is_operator = mul(m).dim == 0
        cr = float("nan")
        if is_operator:
            w = 1j if z.imag > 0 else -1j

            def evaluate(point: complex) -> np.ndarray:
                return resolvent_matrix(weyl_family(pair, point), w)

            try:
                cr = cr_residual(evaluate, z, fd_step)
            except (ValueError, np.linalg.LinAlgError):
                cr = float("nan")
        rows.append(
            NevanlinnaRow(
                z=z,
                dim_m=m.graph_dim,
                dissipative=diss.dissipative,
                maximal=diss.maximal,
                maximality_criteria_agree=diss.maximal == (diss.dissipative and diss.defect_range_full),
                is_operator=is_operator,
                symmetry_residual=symmetry,
                mul_residual=mul_res,
                cr_residual=cr,
            )
        )
    return NevanlinnaReport(rows=tuple(rows), fd_step=fd_step)


@dataclass(frozen=True, eq=False)
class SimplicityProbe:
    """Common orthogonal complement of the domain kernels over a grid.

    A nonzero common part certifies a reducing selfadjoint piece (the pair is
    definitely not simple); a zero common part over a finite grid only means
    simplicity was not refuted.
    """

    m_common: Subspace
    simple: bool
    grid_size: int


def simplicity_probe(pair: BoundaryPair, grid: Sequence[complex]) -> SimplicityProbe:
    """Intersect the kernel complements of the domain relation over a grid."""
    points = tuple(complex(z) for z in grid)
    if not points:
        raise GridError("grid must be nonempty")
    for z in points:
        _check_off_axis(z)
    common: Subspace | None = None
    for z in points:
        kernel_space = eigenspace(pair.a_star_lower, z).kernel_vectors()
        piece = complement(kernel_space)
        common = piece if common is None else combine(common, piece, "intersect")
    assert common is not None
    return SimplicityProbe(m_common=common, simple=common.dim == 0, grid_size=len(points))
