"""Indefinite-metric geometry on doubled spaces and boundary relations.

The doubled space C^(2n) carries the canonical symmetry J acting blockwise as
the second Pauli matrix, J(f, f') = (-i f', i f), and the indefinite metric

    [fh, gh] = <fh, J gh> = -i (<f, g'> - <f', g>)

with scalar products conjugate-linear in the first argument.  These two
conventions are locked globally; every sign in this module depends on them.

A boundary relation maps a doubled input space to a doubled boundary space.
It is isometric when the metric is preserved along its graph (equivalently
its inverse sits inside its metric adjoint) and unitary when inverse and
metric adjoint coincide.  In finite dimensions every relation is closed, so
essentially unitary coincides with unitary; classification reports state
this explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import rng as _rng
from .relations import (
    LinearRelation,
    adjoint,
    dom,
    inverse,
    ker,
    make_relation,
    mul,
    zero_relation,
)
from .subspaces import (
    Subspace,
    as_complex_vector,
    compare,
    containment_residual,
    kernel,
    span,
)

__all__ = [
    "BoundaryPair",
    "Classification",
    "KreinSpec",
    "SignatureRealizationError",
    "augment_multivalued",
    "classify",
    "green_residual",
    "identity_pair",
    "j_metric",
    "krein_adjoint",
    "krein_adjoint_via_hilbert",
    "pauli_doubled",
    "random_isometric",
    "random_unitary",
]


class SignatureRealizationError(RuntimeError):
    """Raised when no output family can realize a requested metric signature."""


def pauli_doubled(base_dim: int) -> np.ndarray:
    """Canonical symmetry of C^(2n): blockwise second Pauli matrix."""
    n = base_dim
    j = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    j[:n, n:] = -1j * np.eye(n)
    j[n:, :n] = 1j * np.eye(n)
    return j


@dataclass(frozen=True)
class KreinSpec:
    """Dimensions of the two base spaces whose doublings carry the metric."""

    base_dim_in: int
    base_dim_out: int

    def __post_init__(self) -> None:
        if self.base_dim_in < 1 or self.base_dim_out < 1:
            raise ValueError("base dimensions must be at least 1")

    @property
    def doubled_in(self) -> int:
        return 2 * self.base_dim_in

    @property
    def doubled_out(self) -> int:
        return 2 * self.base_dim_out

    @cached_property
    def j_in(self) -> np.ndarray:
        j = pauli_doubled(self.base_dim_in)
        j.setflags(write=False)
        return j

    @cached_property
    def j_out(self) -> np.ndarray:
        j = pauli_doubled(self.base_dim_out)
        j.setflags(write=False)
        return j


def j_metric(spec: KreinSpec, side: str, fhat, ghat) -> complex:
    """Indefinite metric [fh, gh] = <fh, J gh> on the chosen doubled space.

    Sesquilinear with conjugation on the first argument; Hermitian-symmetric
    in the sense [gh, fh] = conj([fh, gh]).
    """
    if side == "in":
        j = spec.j_in
    elif side == "out":
        j = spec.j_out
    else:
        raise ValueError(f"side must be 'in' or 'out', got {side!r}")
    f = as_complex_vector(fhat, dim=j.shape[0])
    g = as_complex_vector(ghat, dim=j.shape[0])
    return complex(np.vdot(f, j @ g))


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """A boundary relation together with the derived lower/upper relations.

    ``a_star_lower`` is the domain of the boundary relation viewed as a
    relation in the base input space; ``a_relation`` is its Hilbert adjoint
    (closed, and symmetric exactly when contained in its own adjoint, which
    the report tracks rather than enforces since degenerate pairs such as the
    zero relation violate it); ``a_upper`` is the double adjoint.  In finite
    dimensions the double adjoint reproduces the closure, so ``a_upper``
    equals ``a_star_lower`` and the density flag below is structurally true.
    """

    spec: KreinSpec
    gamma: LinearRelation

    def __post_init__(self) -> None:
        if self.gamma.in_dim != self.spec.doubled_in:
            raise ValueError(
                f"gamma consumes C^{self.gamma.in_dim}, expected C^{self.spec.doubled_in}"
            )
        if self.gamma.out_dim != self.spec.doubled_out:
            raise ValueError(
                f"gamma produces C^{self.gamma.out_dim}, expected C^{self.spec.doubled_out}"
            )

    @cached_property
    def a_star_lower(self) -> LinearRelation:
        """dom(gamma) as a relation in the base input space."""
        n = self.spec.base_dim_in
        return LinearRelation(n, n, dom(self.gamma))

    @cached_property
    def a_relation(self) -> LinearRelation:
        """Hilbert adjoint of ``a_star_lower``; the minimal relation of the pair."""
        return adjoint(self.a_star_lower)

    @cached_property
    def a_upper(self) -> LinearRelation:
        """Adjoint of ``a_relation``; equals the closure of ``a_star_lower``."""
        return adjoint(self.a_relation)

    @cached_property
    def kernel_relation(self) -> LinearRelation:
        """ker(gamma) as a relation in the base input space."""
        n = self.spec.base_dim_in
        return LinearRelation(n, n, ker(self.gamma))

    @cached_property
    def gamma_krein_adjoint(self) -> LinearRelation:
        return krein_adjoint(self.gamma, self.spec)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"BoundaryPair(base_dims=({self.spec.base_dim_in}, {self.spec.base_dim_out}), "
            f"graph_dim={self.gamma.graph_dim})"
        )


def identity_pair(base_dim: int) -> BoundaryPair:
    """The identity boundary relation on a doubled space; unitary."""
    spec = KreinSpec(base_dim, base_dim)
    basis = np.eye(2 * base_dim, dtype=np.complex128)
    pairs = [(basis[:, k], basis[:, k]) for k in range(2 * base_dim)]
    return BoundaryPair(spec, make_relation(2 * base_dim, 2 * base_dim, pairs))


def _metric_gram(rel: LinearRelation, spec: KreinSpec) -> np.ndarray:
    """Difference of input and output metric Gram matrices on the graph basis."""
    f = rel.input_block
    h = rel.output_block
    return f.conj().T @ spec.j_in @ f - h.conj().T @ spec.j_out @ h


def green_residual(pair_or_relation, spec: KreinSpec | None = None) -> float:
    """Largest violation of metric preservation over graph-basis pairs.

    Zero (to rounding) exactly when the relation is isometric; the value is
    the max-abs entry of the difference of the two metric Gram matrices in
    the stored orthonormal graph basis.
    """
    if isinstance(pair_or_relation, BoundaryPair):
        rel, spec = pair_or_relation.gamma, pair_or_relation.spec
    else:
        rel = pair_or_relation
        if spec is None:
            raise ValueError("spec is required when passing a bare relation")
    if rel.graph_dim == 0:
        return 0.0
    return float(np.max(np.abs(_metric_gram(rel, spec))))


def krein_adjoint(rel: LinearRelation, spec: KreinSpec) -> LinearRelation:
    """Metric adjoint: all pairs compatible with the relation under both metrics.

    Computed in one shot as the kernel of the linear system whose rows pair
    each graph-basis vector against the unknown (output, input) pair through
    the two canonical symmetries.  The dimension always satisfies
    dim + dim(adjoint) = doubled_in + doubled_out.
    """
    if rel.in_dim != spec.doubled_in or rel.out_dim != spec.doubled_out:
        raise ValueError("relation dimensions do not match the Krein spec")
    if rel.graph_dim == 0:
        return LinearRelation(
            spec.doubled_out, spec.doubled_in, Subspace.full(spec.doubled_out + spec.doubled_in)
        )
    f = rel.input_block
    h = rel.output_block
    rows = np.hstack([-(h.conj().T @ spec.j_out), f.conj().T @ spec.j_in])
    return LinearRelation(spec.doubled_out, spec.doubled_in, kernel(rows))


def krein_adjoint_via_hilbert(rel: LinearRelation, spec: KreinSpec) -> LinearRelation:
    """Metric adjoint through the Hilbert adjoint conjugated by the symmetries.

    Independent route kept alongside :func:`krein_adjoint`; equality of the
    two is a standing consistency test on the sign conventions.
    """
    adj = adjoint(rel)
    basis = adj.graph.basis
    top = spec.j_out @ basis[: spec.doubled_out, :]
    bottom = spec.j_in @ basis[spec.doubled_out :, :]
    graph = Subspace(spec.doubled_out + spec.doubled_in, np.vstack([top, bottom]))
    return LinearRelation(spec.doubled_out, spec.doubled_in, graph)


@dataclass(frozen=True, eq=False)
class Classification:
    """Classification flags and diagnostics for a boundary pair.

    ``essentially_unitary`` equals ``unitary`` because closures are exact in
    finite dimensions.  ``minimal_route_distance`` compares the two ways of
    producing the minimal relation (multivalued part of the metric adjoint
    versus Hilbert adjoint of the domain); ``dom_dense_in_upper`` records the
    density flag, which finite dimensions make structurally true.
    """

    isometric: bool
    unitary: bool
    essentially_unitary: bool
    symmetric_kernel: bool
    green_residual: float
    inverse_adjoint_distance: float
    isometry_containment_residual: float
    gamma_dim: int
    adjoint_dim: int
    minimal_route_distance: float
    a_symmetric: bool
    a_equals_kernel_distance: float
    dom_dense_in_upper: bool


def classify(pair: BoundaryPair) -> Classification:
    """Classify a boundary pair as isometric / unitary and report diagnostics."""
    gamma = pair.gamma
    adj = pair.gamma_krein_adjoint
    inv = inverse(gamma)
    cmp_inv_adj = compare(adj.graph, inv.graph)
    isometric = cmp_inv_adj.contains
    unitary = cmp_inv_adj.equals

    a_graph = pair.a_relation.graph
    a_route = mul(adj)
    minimal_route_distance = compare(a_graph, a_route).distance
    a_symmetric = compare(adjoint(pair.a_relation).graph, a_graph).contains
    s_graph = pair.kernel_relation.graph
    symmetric_kernel = compare(adjoint(pair.kernel_relation).graph, s_graph).contains
    a_equals_kernel_distance = compare(a_graph, s_graph).distance
    dom_dense = compare(pair.a_upper.graph, pair.a_star_lower.graph).equals

    return Classification(
        isometric=isometric,
        unitary=unitary,
        essentially_unitary=unitary,
        symmetric_kernel=symmetric_kernel,
        green_residual=green_residual(pair),
        inverse_adjoint_distance=cmp_inv_adj.distance,
        isometry_containment_residual=containment_residual(inv.graph, adj.graph),
        gamma_dim=gamma.graph_dim,
        adjoint_dim=adj.graph_dim,
        minimal_route_distance=minimal_route_distance,
        a_symmetric=a_symmetric,
        a_equals_kernel_distance=a_equals_kernel_distance,
        dom_dense_in_upper=dom_dense,
    )


def _j_eig_families(base_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Metric-orthonormal positive and negative families of the doubled space.

    Columns (e, i e)/sqrt(2) have metric +1, columns (e, -i e)/sqrt(2) have
    metric -1, and the families are mutually metric-orthogonal.
    """
    n = base_dim
    eye = np.eye(n, dtype=np.complex128)
    pos = np.vstack([eye, 1j * eye]) / np.sqrt(2.0)
    neg = np.vstack([eye, -1j * eye]) / np.sqrt(2.0)
    return pos, neg


def _realize_gram(gram: np.ndarray, spec: KreinSpec, *, margin: float = 1e-6) -> np.ndarray | None:
    """Output vectors whose metric Gram matrix equals ``gram``, or None.

    Diagonalizes the Hermitian Gram, classifies its signature, and realizes
    positive, negative and neutral directions from the metric eigenfamilies
    of the output doubled space.  Returns None when the signature does not
    fit or sits inside the ambiguity margin.
    """
    k = gram.shape[0]
    if k == 0:
        return np.zeros((spec.doubled_out, 0), dtype=np.complex128)
    eigvals, eigvecs = np.linalg.eigh((gram + gram.conj().T) / 2.0)
    scale = max(1.0, float(np.max(np.abs(eigvals))))
    tau = 1e-10 * scale
    if np.any((np.abs(eigvals) > tau) & (np.abs(eigvals) < margin * scale)):
        return None
    pos_count = int(np.sum(eigvals > tau))
    neg_count = int(np.sum(eigvals < -tau))
    if pos_count > spec.base_dim_out or neg_count > spec.base_dim_out:
        return None
    pos, neg = _j_eig_families(spec.base_dim_out)
    w0 = np.zeros((spec.doubled_out, k), dtype=np.complex128)
    p_used = n_used = 0
    for t, value in enumerate(eigvals):
        if value > tau:
            w0[:, t] = pos[:, p_used] * np.sqrt(value)
            p_used += 1
        elif value < -tau:
            w0[:, t] = neg[:, n_used] * np.sqrt(-value)
            n_used += 1
    return w0 @ eigvecs.conj().T


def random_isometric(
    spec: KreinSpec, graph_dim: int, seed: int, max_retries: int = 60
) -> BoundaryPair:
    """Random isometric boundary pair with a prescribed graph dimension.

    The domain is drawn as a random selfadjoint graph (a neutral subspace of
    full base dimension) extended by graph_dim - base_dim_in random
    directions.  The neutral core keeps the minimal relation symmetric, the
    standing assumption under which the adjoint computations of the
    boundary-image family are valid; a generic domain draw violates it and
    the adjoint formula genuinely fails on such pairs.  The extension's
    metric signature is balanced and fits the output space exactly when
    graph_dim <= base_dim_in + base_dim_out, so realizable graph dimensions
    are 0 (the zero relation) and the closed range
    [base_dim_in, base_dim_in + base_dim_out]; other requests exhaust the
    retry budget and raise an explicit error.
    """
    n, d = spec.base_dim_in, spec.base_dim_out
    if graph_dim < 0 or graph_dim > spec.doubled_in:
        raise ValueError(f"graph_dim must lie in [0, {spec.doubled_in}], got {graph_dim}")
    if graph_dim == 0:
        return BoundaryPair(spec, zero_relation(spec.doubled_in, spec.doubled_out))
    top = n + min(n, d)
    if graph_dim < n or graph_dim > top:
        raise SignatureRealizationError(
            f"graph_dim={graph_dim} admits no isometric pair with a symmetric minimal "
            f"relation for base dims ({n}, {d}); realizable values are 0 and {n}..{top}"
        )
    extra = graph_dim - n
    for attempt in range(max_retries):
        gen = _rng.generator(seed, 11, attempt)
        herm = _rng.complex_normal(gen, n, n)
        herm = (herm + herm.conj().T) / 2.0
        lagrangian = np.vstack([np.eye(n, dtype=np.complex128), herm])
        extras = _rng.complex_normal(gen, 2 * n, extra)
        domain = span(np.hstack([lagrangian, extras]), ambient_dim=2 * n)
        if domain.dim != graph_dim:
            continue
        b = domain.basis
        gram = b.conj().T @ spec.j_in @ b
        w = _realize_gram(gram, spec)
        if w is None:
            continue
        pairs = [(b[:, t], w[:, t]) for t in range(graph_dim)]
        pair = BoundaryPair(spec, make_relation(spec.doubled_in, spec.doubled_out, pairs))
        if pair.gamma.graph_dim == graph_dim:
            return pair
    raise SignatureRealizationError(
        f"no realizable signature for graph_dim={graph_dim} with base dims "
        f"({n}, {d}) after {max_retries} draws"
    )


def random_unitary(spec: KreinSpec, seed: int, max_retries: int = 60) -> BoundaryPair:
    """Random unitary boundary pair.

    A unitary relation between these doubled spaces has graph dimension
    base_dim_in + base_dim_out, which is the top of the realizable range of
    :func:`random_isometric`; at that dimension the inverse and the metric
    adjoint have equal dimension, so isometry upgrades to unitarity.  Output
    base dimensions larger than the input are reached by adjoining neutral
    multivalued boundary directions, which preserves unitarity.
    """
    n, d = spec.base_dim_in, spec.base_dim_out
    if d > n:
        pair = random_unitary(KreinSpec(n, n), seed)
        for t in range(d - n):
            pair = augment_multivalued(pair, seed=seed + 7919 * (t + 1))
        return pair
    return random_isometric(spec, n + d, seed, max_retries=max_retries)


def augment_multivalued(
    pair: BoundaryPair, seed: int = 0, direction: str = "kernel"
) -> BoundaryPair:
    """Enlarge the boundary space by one dimension and adjoin a multivalued vector.

    The boundary vectors are embedded into the enlarged doubled space and a
    neutral boundary vector supported on the new coordinate is adjoined with
    zero input: (e_new, 0) for ``direction="kernel"`` (the family members
    gain a kernel direction and stay operators) or (0, e_new) for
    ``direction="multivalued"`` (the family members become genuinely
    multivalued).  Either vector is metric orthogonal to the embedded range,
    so isometry is preserved exactly, the graph dimension grows by one, and a
    unitary input stays unitary while acquiring a nontrivial multivalued
    part.
    """
    if direction not in ("kernel", "multivalued"):
        raise ValueError(f"direction must be 'kernel' or 'multivalued', got {direction!r}")
    old = pair.spec
    new_spec = KreinSpec(old.base_dim_in, old.base_dim_out + 1)
    d_old, d_new = old.base_dim_out, old.base_dim_out + 1
    basis = pair.gamma.graph.basis
    k = pair.gamma.graph_dim
    total_new = new_spec.doubled_in + new_spec.doubled_out
    columns = np.zeros((total_new, k + 1), dtype=np.complex128)
    columns[: old.doubled_in, :k] = basis[: old.doubled_in, :]
    columns[old.doubled_in : old.doubled_in + d_old, :k] = basis[
        old.doubled_in : old.doubled_in + d_old, :
    ]
    columns[old.doubled_in + d_new : old.doubled_in + d_new + d_old, :k] = basis[
        old.doubled_in + d_old :, :
    ]
    phase = np.exp(2j * np.pi * _rng.generator(seed, 17).random())
    offset = d_new - 1 if direction == "kernel" else 2 * d_new - 1
    columns[old.doubled_in + offset, k] = phase
    graph = Subspace(total_new, columns)
    return BoundaryPair(new_spec, LinearRelation(new_spec.doubled_in, new_spec.doubled_out, graph))
