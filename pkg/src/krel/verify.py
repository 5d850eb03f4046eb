"""Property corpus and invariant suite for boundary pairs.

The corpus mixes three kinds of pairs per dimension combination: generic
isometric pairs of varying graph dimension, unitary pairs, and unitary pairs
augmented with a nontrivial multivalued boundary part.  The suite evaluates
every structural identity the package exposes: metric preservation, the two
metric-adjoint routes, the complement decomposition at each grid point, the
three adjoint routes of the boundary-image family, the shared-multivalued
invariant, the dissipativity identity, and for unitary pairs the adjoint
symmetry and maximality cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as _rng
from .krein import (
    BoundaryPair,
    KreinSpec,
    augment_multivalued,
    classify,
    green_residual,
    krein_adjoint,
    krein_adjoint_via_hilbert,
    random_isometric,
    random_unitary,
)
from .relations import LinearRelation, dissipative_class, inverse, mul
from .subspaces import compare, containment_residual, span
from .weyl import defect_decomposition, gamma_restrict, weyl_adjoint_three_ways

__all__ = [
    "CheckResult",
    "CorpusEntry",
    "STANDARD_GRID",
    "VerificationReport",
    "check_pair",
    "corpus",
    "run_verification",
]

STANDARD_GRID = (1j, -1j, 1 + 2j, 1 - 2j)

_DEFAULT_TOL = 1e-8
_IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    label: str
    check: str
    z: complex | None
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    label: str
    kind: str
    pair: BoundaryPair

    @property
    def has_multivalued_part(self) -> bool:
        return mul(self.pair.gamma).dim > 0


def _perturbed(pair: BoundaryPair, epsilon: float, seed: int) -> BoundaryPair:
    """Deliberately damage a pair's graph; used to demonstrate sensitivity."""
    gen = _rng.generator(seed, 29)
    basis = pair.gamma.graph.basis
    noise = _rng.complex_normal(gen, *basis.shape)
    graph = span(basis + epsilon * noise, ambient_dim=basis.shape[0])
    return BoundaryPair(
        pair.spec, LinearRelation(pair.gamma.in_dim, pair.gamma.out_dim, graph)
    )


def corpus(
    seed: int,
    max_base_in: int = 4,
    max_base_out: int = 3,
    total: int = 100,
    perturb: float = 0.0,
) -> list[CorpusEntry]:
    """Deterministic mixed corpus of isometric boundary pairs.

    Cases are distributed round-robin over all dimension combinations and
    cycle through generic isometric, unitary, and multivalued-augmented
    unitary pairs (the last only where the boundary dimension admits it).
    """
    combos = [
        (n_in, n_out)
        for n_in in range(1, max_base_in + 1)
        for n_out in range(1, max_base_out + 1)
    ]
    entries: list[CorpusEntry] = []
    case = 0
    while len(entries) < total:
        n_in, n_out = combos[case % len(combos)]
        spec = KreinSpec(n_in, n_out)
        kind_cycle = case // len(combos)
        gen = _rng.generator(seed, 31, case)
        if kind_cycle % 3 == 0:
            graph_dim = n_in + int(gen.integers(0, min(n_in, n_out) + 1))
            pair = random_isometric(spec, graph_dim, seed + case)
            kind = f"isometric(k={graph_dim})"
        elif kind_cycle % 3 == 1:
            pair = random_unitary(spec, seed + case)
            kind = "unitary"
        else:
            if n_out >= 2:
                base = random_unitary(KreinSpec(n_in, n_out - 1), seed + case)
                direction = "kernel" if case % 2 else "multivalued"
                pair = augment_multivalued(base, seed=seed + case, direction=direction)
                kind = f"unitary+mul({direction})"
            else:
                pair = random_unitary(spec, seed + case)
                kind = "unitary"
        if perturb > 0.0:
            pair = _perturbed(pair, perturb, seed + case)
        entries.append(CorpusEntry(label=f"b{n_in}x{n_out}/{kind}/case{case}", kind=kind, pair=pair))
        case += 1
    return entries


def check_pair(
    label: str,
    pair: BoundaryPair,
    grid: Sequence[complex] = STANDARD_GRID,
    tol: float = _DEFAULT_TOL,
) -> list[CheckResult]:
    """Run the full invariant suite on one pair over a grid."""
    results: list[CheckResult] = []

    def add(check: str, residual: float, z: complex | None = None, bound: float = tol) -> None:
        results.append(CheckResult(label=label, check=check, z=z, residual=float(residual), tol=bound))

    spec = pair.spec
    adjoint_direct = pair.gamma_krein_adjoint
    adjoint_hilbert_route = krein_adjoint_via_hilbert(pair.gamma, spec)
    inv = inverse(pair.gamma)

    add("green_identity", green_residual(pair))
    add(
        "metric_adjoint_routes",
        compare(adjoint_direct.graph, adjoint_hilbert_route.graph).distance,
    )
    add(
        "adjoint_dimension_formula",
        abs(pair.gamma.graph_dim + adjoint_direct.graph_dim - (spec.doubled_in + spec.doubled_out)),
        bound=0.5,
    )
    add("isometry_containment", containment_residual(inv.graph, adjoint_direct.graph))
    add(
        "minimal_relation_routes",
        compare(pair.a_relation.graph, mul(adjoint_direct)).distance,
    )

    classification = classify(pair)
    restrictions = {z: gamma_restrict(pair, z) for z in grid}
    restricted_adjoints = {z: krein_adjoint(restrictions[z], spec) for z in grid}
    for z in grid:
        report = weyl_adjoint_three_ways(pair, z)
        for name, value in report.agreement_residuals.items():
            add(f"adjoint_route_{name}", value, z=z)
        decomposition = defect_decomposition(pair, z)
        add("complement_decomposition", decomposition.residual, z=z)
        add(
            "neutral_block_in_mul",
            containment_residual(decomposition.o_space, mul(restricted_adjoints[z])),
            z=z,
        )
        add("mul_invariant", report.mul_invariant_residual, z=z)

        diss_sign = "upper" if z.imag > 0 else "lower"
        diss = dissipative_class(report.m, diss_sign)
        add("dissipative_sign", max(0.0, -diss.min_eigenvalue), z=z, bound=_IDENTITY_TOL * 10)
        add(
            "dissipativity_identity",
            _dissipativity_identity_residual(pair, restrictions[z], z),
            z=z,
            bound=_IDENTITY_TOL,
        )

        if classification.unitary:
            add("adjoint_symmetry", report.symmetry_residual, z=z)
            agreement = 0.0 if diss.maximal == (diss.dissipative and diss.defect_range_full) else 1.0
            add("maximality_criteria_agree", agreement, z=z, bound=0.5)
            add("maximal", 0.0 if diss.maximal else 1.0, z=z, bound=0.5)
    if classification.unitary:
        add(
            "minimal_equals_kernel",
            compare(pair.a_relation.graph, pair.kernel_relation.graph).distance,
        )
    for z in grid:
        for w in grid:
            add(
                "restricted_isometry_chain",
                containment_residual(inverse(restrictions[w]).graph, restricted_adjoints[z].graph),
                z=z,
            )
    return results


def _dissipativity_identity_residual(
    pair: BoundaryPair, restricted: LinearRelation, z: complex
) -> float:
    """Max defect of Im<h, h'> = (Im z) |f|^2 over restricted graph basis vectors."""
    n = pair.spec.base_dim_in
    d = pair.spec.base_dim_out
    basis = restricted.graph.basis
    worst = 0.0
    for t in range(basis.shape[1]):
        f = basis[:n, t]
        h = basis[2 * n : 2 * n + d, t]
        hp = basis[2 * n + d :, t]
        lhs = float(np.imag(np.vdot(h, hp)))
        rhs = z.imag * float(np.real(np.vdot(f, f)))
        worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True, eq=False)
class VerificationReport:
    seed: int
    count: int
    max_dim: int
    entries: tuple[CorpusEntry, ...]
    results: tuple[CheckResult, ...]

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(r for r in self.results if not r.passed)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_verification(
    seed: int,
    count: int,
    max_dim: int,
    perturb: float = 0.0,
    grid: Sequence[complex] = STANDARD_GRID,
) -> VerificationReport:
    """Generate ``count`` pairs per dimension combination and run the suite."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if not 1 <= max_dim <= 6:
        raise ValueError("max_dim must lie in [1, 6]")
    total = count * max_dim * max_dim
    entries = corpus(
        seed, max_base_in=max_dim, max_base_out=max_dim, total=total, perturb=perturb
    )
    results: list[CheckResult] = []
    for entry in entries:
        results.extend(check_pair(entry.label, entry.pair, grid=grid))
    return VerificationReport(
        seed=seed,
        count=count,
        max_dim=max_dim,
        entries=tuple(entries),
        results=tuple(results),
    )
