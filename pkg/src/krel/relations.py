"""Linear relations as subspaces of graph space.

A linear relation T from C^in to C^out is a subspace of C^(in+out); vectors
are ordered input block first, output block second.  Relations generalize
operator graphs and may be multivalued, so everything here works on the graph
subspace directly and never assumes an operator fast path.

All inner products are conjugate-linear in the first argument.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .subspaces import (
    Subspace,
    as_complex_vector,
    combine,
    compare,
    kernel,
    span,
)

__all__ = [
    "DissipativityReport",
    "EigenPair",
    "LinearRelation",
    "adjoint",
    "apply_to_subspace",
    "componentwise_sum",
    "compose",
    "dissipative_class",
    "dom",
    "eigenspace",
    "full_relation",
    "graph_of_matrix",
    "identity_relation",
    "inverse",
    "ker",
    "make_relation",
    "mul",
    "operator_matrix",
    "part",
    "ran",
    "relations_equal",
    "shift",
    "zero_relation",
]


@dataclass(frozen=True, eq=False)
class LinearRelation:
    """A relation C^in -> C^out stored as its graph subspace."""

    in_dim: int
    out_dim: int
    graph: Subspace

    def __post_init__(self) -> None:
        if self.in_dim < 0 or self.out_dim < 0:
            raise ValueError("dimensions must be nonnegative")
        if self.graph.ambient_dim != self.in_dim + self.out_dim:
            raise ValueError(
                f"graph lives in C^{self.graph.ambient_dim}, expected C^{self.in_dim + self.out_dim}"
            )

    @property
    def graph_dim(self) -> int:
        return self.graph.dim

    @property
    def input_block(self) -> np.ndarray:
        """Input components of the graph basis (in_dim x graph_dim)."""
        return self.graph.basis[: self.in_dim, :]

    @property
    def output_block(self) -> np.ndarray:
        """Output components of the graph basis (out_dim x graph_dim)."""
        return self.graph.basis[self.in_dim :, :]

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"LinearRelation(in_dim={self.in_dim}, out_dim={self.out_dim}, "
            f"graph_dim={self.graph_dim})"
        )


def make_relation(in_dim: int, out_dim: int, spanning_pairs, tol: float = 0.0) -> LinearRelation:
    """Relation spanned by (input, output) vector pairs."""
    columns = []
    for pair in spanning_pairs:
        x, y = pair
        x = as_complex_vector(x, dim=in_dim)
        y = as_complex_vector(y, dim=out_dim)
        columns.append(np.concatenate([x, y]))
    graph = span(columns, ambient_dim=in_dim + out_dim, tol=tol)
    return LinearRelation(in_dim, out_dim, graph)


def graph_of_matrix(matrix) -> LinearRelation:
    """Graph of a matrix acting as an everywhere-defined operator."""
    mat = np.asarray(matrix, dtype=np.complex128)
    if mat.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    out_dim, in_dim = mat.shape
    pairs = [(np.eye(in_dim)[:, k], mat[:, k]) for k in range(in_dim)]
    return make_relation(in_dim, out_dim, pairs)


def identity_relation(n: int) -> LinearRelation:
    return graph_of_matrix(np.eye(n))


def zero_relation(in_dim: int, out_dim: int) -> LinearRelation:
    return LinearRelation(in_dim, out_dim, Subspace.zero(in_dim + out_dim))


def full_relation(in_dim: int, out_dim: int) -> LinearRelation:
    return LinearRelation(in_dim, out_dim, Subspace.full(in_dim + out_dim))


def _coordinate_block(in_dim: int, out_dim: int, which: str) -> Subspace:
    total = in_dim + out_dim
    basis = np.zeros((total, in_dim if which == "in" else out_dim), dtype=np.complex128)
    if which == "in":
        basis[:in_dim, :] = np.eye(in_dim)
    else:
        basis[in_dim:, :] = np.eye(out_dim)
    return Subspace(total, basis)


def part(rel: LinearRelation, which: str) -> Subspace:
    """Domain, range, kernel or multivalued part of a relation.

    dom and ran are the block projections of the graph; ker collects inputs
    paired with zero output and mul collects outputs paired with zero input,
    both obtained by intersecting the graph with a coordinate block.
    """
    n, m = rel.in_dim, rel.out_dim
    if which == "dom":
        return span(rel.input_block, ambient_dim=n)
    if which == "ran":
        return span(rel.output_block, ambient_dim=m)
    if which == "ker":
        inter = combine(rel.graph, _coordinate_block(n, m, "in"), "intersect")
        return span(inter.basis[:n, :], ambient_dim=n)
    if which == "mul":
        inter = combine(rel.graph, _coordinate_block(n, m, "out"), "intersect")
        return span(inter.basis[n:, :], ambient_dim=m)
    raise ValueError(f"which must be one of dom/ran/ker/mul, got {which!r}")


def dom(rel: LinearRelation) -> Subspace:
    return part(rel, "dom")


def ran(rel: LinearRelation) -> Subspace:
    return part(rel, "ran")


def ker(rel: LinearRelation) -> Subspace:
    return part(rel, "ker")


def mul(rel: LinearRelation) -> Subspace:
    return part(rel, "mul")


def inverse(rel: LinearRelation) -> LinearRelation:
    """Swap input and output blocks."""
    basis = np.vstack([rel.output_block, rel.input_block])
    return LinearRelation(rel.out_dim, rel.in_dim, Subspace(rel.in_dim + rel.out_dim, basis))


def compose(outer: LinearRelation, inner: LinearRelation) -> LinearRelation:
    """Relation composition: pairs (f, h) with (f, g) in inner, (g, h) in outer."""
    if inner.out_dim != outer.in_dim:
        raise ValueError(
            f"cannot compose: inner produces C^{inner.out_dim}, outer consumes C^{outer.in_dim}"
        )
    a, b, c = inner.in_dim, inner.out_dim, outer.out_dim
    total = a + b + c
    k_inner, k_outer = inner.graph_dim, outer.graph_dim

    left = np.zeros((total, k_inner + c), dtype=np.complex128)
    left[: a + b, :k_inner] = inner.graph.basis
    left[a + b :, k_inner:] = np.eye(c)
    right = np.zeros((total, a + k_outer), dtype=np.complex128)
    right[:a, :a] = np.eye(a)
    right[a:, a:] = outer.graph.basis

    inter = combine(Subspace(total, left), Subspace(total, right), "intersect")
    stacked = np.vstack([inter.basis[:a, :], inter.basis[a + b :, :]])
    return LinearRelation(a, c, span(stacked, ambient_dim=a + c))


def shift(rel: LinearRelation, z: complex) -> LinearRelation:
    """The relation {(f, f' - z f) : (f, f') in T}; requires square block sizes."""
    if rel.in_dim != rel.out_dim:
        raise ValueError("shift requires in_dim == out_dim")
    top = rel.input_block
    bottom = rel.output_block - z * rel.input_block
    return LinearRelation(
        rel.in_dim, rel.out_dim, span(np.vstack([top, bottom]), ambient_dim=rel.in_dim * 2)
    )


def adjoint(rel: LinearRelation) -> LinearRelation:
    """Hilbert-space adjoint {(g, g') : <f', g> = <f, g'> for all (f, f') in T}.

    Realized as the kernel of the Gram system built from the graph basis with
    the blocks twisted; in finite dimensions the double adjoint returns the
    relation itself.
    """
    n, m = rel.in_dim, rel.out_dim
    if rel.graph_dim == 0:
        return LinearRelation(m, n, Subspace.full(m + n))
    rows = np.hstack([rel.output_block.conj().T, -rel.input_block.conj().T])
    return LinearRelation(m, n, kernel(rows))


def componentwise_sum(t: LinearRelation, s: LinearRelation) -> LinearRelation:
    """Graph sum of two relations with identical block dimensions."""
    if (t.in_dim, t.out_dim) != (s.in_dim, s.out_dim):
        raise ValueError("componentwise sum requires identical in/out dimensions")
    return LinearRelation(t.in_dim, t.out_dim, combine(t.graph, s.graph, "sum"))


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Graph vectors (f, z f) of a relation at the point z."""

    z: complex
    graph_space: Subspace

    @property
    def dim(self) -> int:
        return self.graph_space.dim

    def kernel_vectors(self) -> Subspace:
        """The f components, a subspace of the underlying space."""
        n = self.graph_space.ambient_dim // 2
        return span(self.graph_space.basis[:n, :], ambient_dim=n)


def eigenspace(rel: LinearRelation, z: complex) -> EigenPair:
    """Intersection of the graph with the graph of multiplication by z."""
    if rel.in_dim != rel.out_dim:
        raise ValueError("eigenspace requires in_dim == out_dim")
    n = rel.in_dim
    scale = 1.0 / np.sqrt(1.0 + abs(z) ** 2)
    basis = np.vstack([np.eye(n), z * np.eye(n)]) * scale
    zgraph = Subspace(2 * n, basis.astype(np.complex128))
    return EigenPair(z=complex(z), graph_space=combine(rel.graph, zgraph, "intersect"))


@dataclass(frozen=True, eq=False)
class DissipativityReport:
    """Semidefiniteness of Im<h, h'> on a relation's graph.

    ``maximal`` uses the dimension criterion (graph dimension equals the
    space dimension); ``defect_range_full`` is the independent range
    criterion ran(T + w) = C^d at w = i (upper) or w = -i (lower), which must
    agree with ``maximal`` for dissipative relations.
    """

    dissipative: bool
    maximal: bool
    witness: np.ndarray | None
    min_eigenvalue: float
    defect_range_full: bool


def dissipative_class(rel: LinearRelation, sign: str = "upper") -> DissipativityReport:
    """Classify a relation in C^d as dissipative/accumulative and maximal.

    Upper means Im<h, h'> >= 0 on the graph, lower means <= 0.  The witness,
    when returned, is a graph vector violating semidefiniteness.
    """
    if rel.in_dim != rel.out_dim:
        raise ValueError("dissipative_class requires in_dim == out_dim")
    if sign not in ("upper", "lower"):
        raise ValueError(f"sign must be 'upper' or 'lower', got {sign!r}")
    d = rel.in_dim
    h = rel.input_block
    hp = rel.output_block
    form = (h.conj().T @ hp - hp.conj().T @ h) / 2j
    form = (form + form.conj().T) / 2.0
    if sign == "lower":
        form = -form

    if rel.graph_dim == 0:
        min_eig = 0.0
        dissipative = True
        witness = None
    else:
        eigvals, eigvecs = np.linalg.eigh(form)
        min_eig = float(eigvals[0])
        tol = 1e-10 * (1.0 + float(np.max(np.abs(eigvals))))
        dissipative = min_eig >= -tol
        witness = None if dissipative else rel.graph.basis @ eigvecs[:, 0]

    w = 1j if sign == "upper" else -1j
    defect_range_full = part(shift(rel, -w), "ran").dim == d
    maximal = dissipative and rel.graph_dim == d
    return DissipativityReport(
        dissipative=dissipative,
        maximal=maximal,
        witness=witness,
        min_eigenvalue=min_eig,
        defect_range_full=defect_range_full,
    )


def operator_matrix(rel: LinearRelation) -> np.ndarray:
    """Matrix of an everywhere-defined single-valued relation.

    Raises ValueError when the domain is not the whole input space or the
    relation is multivalued.
    """
    d = rel.in_dim
    if rel.graph_dim != d or part(rel, "dom").dim != d:
        raise ValueError("relation is not an everywhere-defined single-valued operator")
    top = rel.input_block
    bottom = rel.output_block
    return bottom @ np.linalg.inv(top)


def apply_to_subspace(rel: LinearRelation, v: Subspace) -> Subspace:
    """Image {y : exists x in v with (x, y) in T} of a subspace."""
    if v.ambient_dim != rel.in_dim:
        raise ValueError(f"subspace lives in C^{v.ambient_dim}, relation consumes C^{rel.in_dim}")
    total = rel.in_dim + rel.out_dim
    lift = np.zeros((total, v.dim + rel.out_dim), dtype=np.complex128)
    lift[: rel.in_dim, : v.dim] = v.basis
    lift[rel.in_dim :, v.dim :] = np.eye(rel.out_dim)
    inter = combine(rel.graph, Subspace(total, lift), "intersect")
    return span(inter.basis[rel.in_dim :, :], ambient_dim=rel.out_dim)


def relations_equal(t: LinearRelation, s: LinearRelation) -> bool:
    """Graph equality under the default subspace tolerance."""
    if (t.in_dim, t.out_dim) != (s.in_dim, s.out_dim):
        return False
    return compare(t.graph, s.graph).equals
