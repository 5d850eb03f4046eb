"""Truncated diagonal model with a finite-rank singular perturbation.

The base operator L is diagonal with real, strictly increasing eigenvalues.
A family of d component vectors phi_sigma defines generalized deficiency
elements

    g_sigma(z)_n = phi_(sigma,n) / (lambda_n - z),

and m distinct off-real interpolation points z_j produce the rank m*d
perturbation K of L: on the span of the deficiency elements g_alpha with
alpha = (sigma, j),

    K(u + k) = L u + sum_(alpha, alpha') C_(alpha alpha') <g_alpha', k> g_alpha,
    C_(sigma j, sigma' j') = z_j [G^(-1)]_(sigma j, sigma' j'),

where G is the Gram matrix of the g_alpha.  On that span K acts as
K g_sigma(z_j) = z_j g_sigma(z_j), equivalently (K - L) g_alpha = -phi_sigma.

The boundary relation attaches to each domain vector u + k the boundary pair
(c(k), <phi, u> + cM d(k)) built from the coefficient functionals d(k) =
G^(-1) <g, k> and the interpolation row cM = [R(z_1) ... R(z_m)] of the
regularized response matrix

    R(z) = E + sum_n conj(phi_n) phi_n (1 + lambda_n z) / ((lambda_n - z)(1 + lambda_n^2)),

with E a free Hermitian offset.  This regularization satisfies two exact
identities at every truncation level: Im R(z) = (Im z) Gram(g(z)) and
R(conj(z)) = R(z)^H.

The infinite model's smooth domain scale has no finite-dimensional
counterpart; it is represented by a small span of deterministically decaying
vectors (decay exponents m+2, m+3, ...).  Every assembly carries a note
flagging this surrogate.  A consequence of the truncation is that the
boundary-image family is exactly representable only at the interpolation
points and at the probe point used to build the mixed resolvent span; other
points are reported with a non-full domain flag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import rng as _rng
from .krein import BoundaryPair, KreinSpec, green_residual, krein_adjoint
from .relations import (
    LinearRelation,
    adjoint,
    make_relation,
    operator_matrix,
    relations_equal,
)
from .relations import dom as relation_dom
from .subspaces import as_complex_matrix, compare, kernel
from .weyl import DELTA_IMAG, RealAxisError, gamma_restrict, weyl_family, weyl_operator_matrix

__all__ = [
    "DESK_GRID",
    "DESK_POINTS",
    "DESK_PROBE",
    "AdjointConsistency",
    "ConvergenceRow",
    "ConvergenceTable",
    "DomainMembershipError",
    "DomainOverlapError",
    "ExplicitRestriction",
    "IllConditionedGramError",
    "ModelAssembly",
    "SpectralModel",
    "SpectrumCollisionError",
    "TailSignature",
    "adjoint_consistency",
    "apply_perturbed",
    "assemble",
    "boundary_form_residual",
    "boundary_values",
    "deficiency_combination",
    "deficiency_matrix",
    "desk_model",
    "explicit_gamma_z",
    "gram_at",
    "gram_matrix",
    "inverse_quadratic_tail",
    "lagrange_weights",
    "model_weyl_evaluator",
    "multipliers",
    "r_matrix",
    "random_domain_samples",
    "tail_signature",
    "truncate",
    "weyl_vs_r",
]

DESK_POINTS = (1j, 2j)
DESK_PROBE = 1 + 2j
DESK_GRID = (1j, -1j, 1 + 2j, 1 - 2j, -2 + 1j, -2 - 1j)

_GRAM_CONDITION_CAP = 1e12


class SpectrumCollisionError(ValueError):
    """Raised when a spectral parameter collides with a truncated eigenvalue."""


class IllConditionedGramError(ValueError):
    """Raised when the deficiency Gram matrix is numerically singular."""


class DomainOverlapError(ValueError):
    """Raised when the regular span and the deficiency span fail to be a direct sum."""


class DomainMembershipError(ValueError):
    """Raised when a sample vector is not in the assembled domain span."""


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Truncation-level snapshot of the diagonal model.

    ``eigenvalues`` has shape (N,), real and strictly increasing; ``phi`` has
    shape (d, N); ``points`` are the m pairwise-distinct off-real
    interpolation points; ``offset`` is the Hermitian d-by-d regularization
    offset and ``probe`` the off-real point, distinct from every
    interpolation point, used for the mixed resolvent span.
    """

    eigenvalues: np.ndarray
    phi: np.ndarray
    points: tuple[complex, ...]
    offset: np.ndarray
    probe: complex

    def __post_init__(self) -> None:
        lam = np.asarray(self.eigenvalues, dtype=np.float64).reshape(-1)
        if lam.size == 0:
            raise ValueError("at least one eigenvalue is required")
        if not np.all(np.isfinite(lam)):
            raise ValueError("eigenvalues must be finite")
        if lam.size > 1 and not np.all(np.diff(lam) > 0):
            raise ValueError("eigenvalues must be strictly increasing")
        lam = lam.copy()
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

        phi = as_complex_matrix(self.phi, cols=lam.size)
        phi = phi.copy()
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

        points = tuple(complex(z) for z in self.points)
        if not points:
            raise ValueError("at least one interpolation point is required")
        for j, zj in enumerate(points):
            if abs(zj.imag) < DELTA_IMAG:
                raise RealAxisError(f"interpolation point {zj} is too close to the real axis")
            for zk in points[j + 1 :]:
                if zj == zk:
                    raise ValueError(f"interpolation points must be pairwise distinct, {zj} repeats")
        object.__setattr__(self, "points", points)

        d = phi.shape[0]
        offset = as_complex_matrix(self.offset, rows=d, cols=d)
        if float(np.max(np.abs(offset - offset.conj().T), initial=0.0)) > 1e-12:
            raise ValueError("offset must be Hermitian")
        offset = offset.copy()
        offset.setflags(write=False)
        object.__setattr__(self, "offset", offset)

        probe = complex(self.probe)
        if abs(probe.imag) < DELTA_IMAG:
            raise RealAxisError(f"probe point {probe} is too close to the real axis")
        if any(probe == zj for zj in points):
            raise ValueError("probe point must differ from every interpolation point")
        object.__setattr__(self, "probe", probe)

    @property
    def level(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def defect(self) -> int:
        return int(self.phi.shape[0])

    @property
    def point_count(self) -> int:
        return len(self.points)

    @property
    def perturbation_rank(self) -> int:
        return self.defect * self.point_count

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"SpectralModel(level={self.level}, defect={self.defect}, "
            f"points={self.points}, probe={self.probe})"
        )


def desk_model(
    level: int,
    defect: int = 1,
    points: Sequence[complex] = DESK_POINTS,
    probe: complex = DESK_PROBE,
    offset: np.ndarray | None = None,
    phi: np.ndarray | None = None,
) -> SpectralModel:
    """Reference model: lambda_n = n with constant unit components."""
    lam = np.arange(1, level + 1, dtype=np.float64)
    if phi is None:
        phi_mat = np.ones((defect, level), dtype=np.complex128)
    else:
        phi_mat = as_complex_matrix(phi, rows=defect, cols=level)
    if offset is None:
        offset = np.zeros((defect, defect), dtype=np.complex128)
    return SpectralModel(lam, phi_mat, tuple(points), offset, probe)


def truncate(model: SpectralModel, level: int) -> SpectralModel:
    """Restrict the model to its first ``level`` eigenvalues."""
    if level < 1 or level > model.level:
        raise ValueError(f"level must lie in [1, {model.level}], got {level}")
    return SpectralModel(
        model.eigenvalues[:level],
        model.phi[:, :level],
        model.points,
        model.offset,
        model.probe,
    )


def _check_off_spectrum(model: SpectralModel, z: complex) -> complex:
    z = complex(z)
    gaps = np.abs(model.eigenvalues - z)
    nearest = int(np.argmin(gaps))
    if gaps[nearest] < 1e-9 * max(1.0, abs(z)):
        raise SpectrumCollisionError(
            f"point {z} collides with truncated eigenvalue lambda_{nearest + 1} = "
            f"{model.eigenvalues[nearest]}"
        )
    return z


def deficiency_matrix(model: SpectralModel, z: complex) -> np.ndarray:
    """Columns g_sigma(z) with components phi_(sigma,n) / (lambda_n - z)."""
    z = _check_off_spectrum(model, z)
    return (model.phi / (model.eigenvalues[None, :] - z)).T


def deficiency_combination(model: SpectralModel, z: complex, coefficients) -> np.ndarray:
    """The combination g_z(c) = sum_sigma c_sigma g_sigma(z)."""
    coeff = np.asarray(coefficients, dtype=np.complex128).reshape(-1)
    if coeff.size != model.defect:
        raise ValueError(f"expected {model.defect} coefficients, got {coeff.size}")
    return deficiency_matrix(model, z) @ coeff


def _deficiency_columns(model: SpectralModel) -> np.ndarray:
    """All g_alpha stacked point-major: column j*d + sigma is g_sigma(z_j)."""
    return np.hstack([deficiency_matrix(model, zj) for zj in model.points])


def gram_matrix(model: SpectralModel) -> np.ndarray:
    """Hermitian positive definite Gram matrix of the g_alpha family.

    Raises when the smallest eigenvalue is nonpositive or the condition
    number exceeds the cap, naming the closest interpolation-point cluster.
    """
    columns = _deficiency_columns(model)
    gram = columns.conj().T @ columns
    gram = (gram + gram.conj().T) / 2.0
    eigvals = np.linalg.eigvalsh(gram)
    smallest, largest = float(eigvals[0]), float(eigvals[-1])
    if smallest <= 0.0 or largest / max(smallest, 1e-300) > _GRAM_CONDITION_CAP:
        pts = model.points
        cluster = min(
            ((pts[a], pts[b]) for a in range(len(pts)) for b in range(a + 1, len(pts))),
            key=lambda pair: abs(pair[0] - pair[1]),
            default=(pts[0], pts[0]),
        )
        raise IllConditionedGramError(
            f"deficiency Gram matrix is numerically singular (min eig {smallest:.3e}, "
            f"max eig {largest:.3e}); closest point cluster {cluster[0]} and {cluster[1]}"
        )
    return gram


def gram_at(model: SpectralModel, z: complex) -> np.ndarray:
    """The d-by-d Gram matrix <g_sigma(z), g_sigma'(z)>."""
    g = deficiency_matrix(model, z)
    gram = g.conj().T @ g
    return (gram + gram.conj().T) / 2.0


def r_matrix(model: SpectralModel, z: complex) -> np.ndarray:
    """Regularized response matrix R(z).

    Satisfies R(conj(z)) = R(z)^H exactly and Im R(z) = (Im z) Gram(g(z)) at
    every truncation level; for off-spectrum real z the result is Hermitian.
    """
    z = _check_off_spectrum(model, z)
    lam = model.eigenvalues
    weight = (1.0 + lam * z) / ((lam - z) * (1.0 + lam**2))
    return model.offset + np.einsum("sn,n,tn->st", model.phi.conj(), weight, model.phi)


def multipliers(model: SpectralModel) -> np.ndarray:
    """Products b_j = prod_(j' != j) (z_j - z_j'); identically 1 for one point."""
    pts = model.points
    m = len(pts)
    if m == 1:
        return np.ones(1, dtype=np.complex128)
    out = np.empty(m, dtype=np.complex128)
    for j in range(m):
        out[j] = np.prod([pts[j] - pts[k] for k in range(m) if k != j])
    return out


def lagrange_weights(model: SpectralModel, z: complex) -> np.ndarray:
    """Interpolation weights prod_(j' != j)(z - z_j') / b_j; they sum to 1."""
    pts = model.points
    b = multipliers(model)
    m = len(pts)
    out = np.empty(m, dtype=np.complex128)
    for j in range(m):
        num = np.prod([z - pts[k] for k in range(m) if k != j]) if m > 1 else 1.0
        out[j] = num / b[j]
    return out


@dataclass(frozen=True, eq=False)
class ModelAssembly:
    """Assembled perturbation and boundary relation at one truncation level.

    ``dom_span`` stacks the regular span, the mixed resolvent span and the
    deficiency columns; ``k_action`` holds the perturbed images of the same
    columns, ``boundary0``/``boundary1`` their boundary components.  ``pair``
    is the resulting boundary pair, always isometric by construction.
    """

    model: SpectralModel
    deficiency_columns: np.ndarray
    gram: np.ndarray
    coupling: np.ndarray
    interpolation_row: np.ndarray
    regular_span: np.ndarray
    mixed_span: np.ndarray
    dom_span: np.ndarray
    k_action: np.ndarray
    boundary0: np.ndarray
    boundary1: np.ndarray
    gamma0: LinearRelation
    gamma1: LinearRelation
    pair: BoundaryPair
    notes: tuple[str, ...]

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if isinstance(value, np.ndarray):
                frozen = value.copy()
                frozen.setflags(write=False)
                object.__setattr__(self, name, frozen)

    @property
    def gamma(self) -> LinearRelation:
        return self.pair.gamma


def assemble(model: SpectralModel, regular_count: int = 3) -> ModelAssembly:
    """Build the perturbation, the boundary maps and the boundary relation.

    The regular span holds ``regular_count`` vectors with component decay
    lambda^-(m+2+t); the mixed span applies the multiplier-weighted resolvent
    sum at every interpolation point to the deficiency elements at the probe
    point.  The stacked domain span must have full column rank, otherwise the
    direct-sum structure is ill posed and an error is raised.
    """
    n, d, m = model.level, model.defect, model.point_count
    lam = model.eigenvalues
    min_columns = regular_count + d + m * d
    if regular_count < 1:
        raise ValueError("regular_count must be at least 1")
    if n < min_columns:
        raise ValueError(
            f"truncation level {n} is too small for {min_columns} domain columns"
        )

    columns = _deficiency_columns(model)
    gram = gram_matrix(model)
    gram_inverse = np.linalg.inv(gram)
    point_scale = np.repeat(np.asarray(model.points, dtype=np.complex128), d)
    coupling = point_scale[:, None] * gram_inverse
    interpolation_row = np.hstack([r_matrix(model, zj) for zj in model.points])

    # Decay (1 + lam^2)^(-(m+2+t)/2) ~ |lam|^-(m+2+t); valid for any real spectrum.
    regular = np.column_stack(
        [
            (1.0 + lam.astype(np.complex128) ** 2) ** (-(m + 2 + t) / 2.0)
            for t in range(regular_count)
        ]
    )

    b = multipliers(model)
    probe_columns = deficiency_matrix(model, model.probe)
    mixed = np.zeros((n, d), dtype=np.complex128)
    for j, zj in enumerate(model.points):
        mixed += (probe_columns / (lam[:, None] - zj)) / b[j]

    dom_span = np.hstack([regular, mixed, columns])
    total = dom_span.shape[1]
    normalized = dom_span / np.linalg.norm(dom_span, axis=0)
    if int(np.linalg.matrix_rank(normalized)) < total:
        raise DomainOverlapError(
            "regular span, mixed span and deficiency span do not form a direct sum"
        )

    k_action = np.empty_like(dom_span)
    k_action[:, : regular_count + d] = lam[:, None] * dom_span[:, : regular_count + d]
    k_action[:, regular_count + d :] = columns * point_scale[None, :]

    boundary0 = np.zeros((d, total), dtype=np.complex128)
    boundary1 = np.zeros((d, total), dtype=np.complex128)
    boundary1[:, : regular_count + d] = model.phi.conj() @ dom_span[:, : regular_count + d]
    for alpha in range(m * d):
        sigma = alpha % d
        boundary0[sigma, regular_count + d + alpha] = 1.0
        boundary1[:, regular_count + d + alpha] = interpolation_row[:, alpha]

    graph_pairs = [
        (
            np.concatenate([dom_span[:, t], k_action[:, t]]),
            np.concatenate([boundary0[:, t], boundary1[:, t]]),
        )
        for t in range(total)
    ]
    gamma = make_relation(2 * n, 2 * d, graph_pairs)
    if gamma.graph_dim != total:
        raise DomainOverlapError("boundary relation lost rank during assembly")
    gamma0 = make_relation(
        2 * n,
        d,
        [(np.concatenate([dom_span[:, t], k_action[:, t]]), boundary0[:, t]) for t in range(total)],
    )
    gamma1 = make_relation(
        2 * n,
        d,
        [(np.concatenate([dom_span[:, t], k_action[:, t]]), boundary1[:, t]) for t in range(total)],
    )
    pair = BoundaryPair(KreinSpec(n, d), gamma)
    notes = (
        "regular domain represented by a finite decaying span "
        f"(exponents {m + 2}..{m + 1 + regular_count}); exactness of the "
        "boundary-image family holds at the interpolation points and the probe point",
    )
    return ModelAssembly(
        model=model,
        deficiency_columns=columns,
        gram=gram,
        coupling=coupling,
        interpolation_row=interpolation_row,
        regular_span=regular,
        mixed_span=mixed,
        dom_span=dom_span,
        k_action=k_action,
        boundary0=boundary0,
        boundary1=boundary1,
        gamma0=gamma0,
        gamma1=gamma1,
        pair=pair,
        notes=notes,
    )


def _domain_coefficients(assembly: ModelAssembly, vector) -> np.ndarray:
    vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
    if vec.size != assembly.model.level:
        raise ValueError(f"sample must live in C^{assembly.model.level}")
    coeff, *_ = np.linalg.lstsq(assembly.dom_span, vec, rcond=None)
    residual = float(np.linalg.norm(assembly.dom_span @ coeff - vec))
    if residual > 1e-8 * max(1.0, float(np.linalg.norm(vec))):
        raise DomainMembershipError(
            f"sample is outside the assembled domain span (projection residual {residual:.3e})"
        )
    return coeff


def apply_perturbed(assembly: ModelAssembly, vector) -> np.ndarray:
    """Apply the perturbed operator to a domain-span vector."""
    return assembly.k_action @ _domain_coefficients(assembly, vector)


def boundary_values(assembly: ModelAssembly, vector) -> tuple[np.ndarray, np.ndarray]:
    """Boundary components (first, second) of a domain-span vector."""
    coeff = _domain_coefficients(assembly, vector)
    return assembly.boundary0 @ coeff, assembly.boundary1 @ coeff


def random_domain_samples(assembly: ModelAssembly, count: int, seed: int) -> list[np.ndarray]:
    """Seeded random vectors inside the assembled domain span."""
    gen = _rng.generator(seed, 23)
    total = assembly.dom_span.shape[1]
    coeffs = _rng.complex_normal(gen, total, count)
    return [assembly.dom_span @ coeffs[:, t] for t in range(count)]


def boundary_form_residual(assembly: ModelAssembly, samples: Sequence[np.ndarray]) -> float:
    """Largest defect of the boundary form identity over sample pairs.

    Checks <u, Kv> - <Ku, v> = <b0(u), b1(v)> - <b1(u), b0(v)> for every
    ordered pair drawn from ``samples``; the defect is conjugate
    antisymmetric under swapping the arguments.
    """
    prepared = []
    for sample in samples:
        coeff = _domain_coefficients(assembly, sample)
        prepared.append(
            (
                assembly.dom_span @ coeff,
                assembly.k_action @ coeff,
                assembly.boundary0 @ coeff,
                assembly.boundary1 @ coeff,
            )
        )
    worst = 0.0
    for u, ku, b0u, b1u in prepared:
        for v, kv, b0v, b1v in prepared:
            lhs = np.vdot(u, kv) - np.vdot(ku, v)
            rhs = np.vdot(b0u, b1v) - np.vdot(b1u, b0v)
            worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True, eq=False)
class AdjointConsistency:
    """Relation-level adjoint containments between K and the restricted L.

    The symmetric restriction of L to vectors annihilated by every component
    functional is contained in the Hilbert adjoint of the perturbed relation,
    and the perturbed relation is contained in the adjoint of the
    restriction.  At finite truncation the containments are strict because
    the surrogate domain span is not dense; the dimensions record the gap.
    """

    restriction_in_k_adjoint: bool
    k_in_restriction_adjoint: bool
    restriction_dim: int
    k_adjoint_dim: int
    k_dim: int
    restriction_adjoint_dim: int


def adjoint_consistency(assembly: ModelAssembly) -> AdjointConsistency:
    """Check the two adjoint containments between K and the restricted base."""
    model = assembly.model
    n = model.level
    k_relation = make_relation(
        n,
        n,
        [(assembly.dom_span[:, t], assembly.k_action[:, t]) for t in range(assembly.dom_span.shape[1])],
    )
    # Restriction of L to the kernel of the component functionals.
    functional_kernel = kernel(model.phi.conj())
    restriction = make_relation(
        n,
        n,
        [
            (functional_kernel.basis[:, t], model.eigenvalues * functional_kernel.basis[:, t])
            for t in range(functional_kernel.dim)
        ],
    )
    k_adjoint = adjoint(k_relation)
    restriction_adjoint = adjoint(restriction)
    return AdjointConsistency(
        restriction_in_k_adjoint=compare(k_adjoint.graph, restriction.graph).contains,
        k_in_restriction_adjoint=compare(restriction_adjoint.graph, k_relation.graph).contains,
        restriction_dim=restriction.graph_dim,
        k_adjoint_dim=k_adjoint.graph_dim,
        k_dim=k_relation.graph_dim,
        restriction_adjoint_dim=restriction_adjoint.graph_dim,
    )


@dataclass(frozen=True, eq=False)
class ExplicitRestriction:
    """Closed-form restricted boundary relation and its metric adjoint."""

    gamma_z: LinearRelation
    gamma_z_adjoint: LinearRelation
    matches_restriction: bool
    adjoint_distance: float


def explicit_gamma_z(model: SpectralModel, z: complex, regular_count: int = 3) -> ExplicitRestriction:
    """Build the restriction at z and its metric adjoint from closed formulas.

    The restriction is spanned by ((g_z(c), z g_z(c)), (c, R(z) c)); its
    metric adjoint is spanned by ((c, R(conj z) c), (0, 0)) together with
    ((0, <phi, u>), (0, (L - conj z) u)) for u in the truncated smooth space
    and ((0, 0), (g, conj(z) g)) for g in the base space.  Both are
    cross-checked against the subspace-arithmetic route.
    """
    z = _check_off_spectrum(model, complex(z))
    if abs(z.imag) < DELTA_IMAG:
        raise RealAxisError(f"point {z} is too close to the real axis")
    n, d = model.level, model.defect
    g = deficiency_matrix(model, z)
    r_here = r_matrix(model, z)
    pairs = []
    for sigma in range(d):
        inputs = np.concatenate([g[:, sigma], z * g[:, sigma]])
        outputs = np.concatenate([np.eye(d)[:, sigma], r_here[:, sigma]])
        pairs.append((inputs, outputs))
    gamma_z = make_relation(2 * n, 2 * d, pairs)

    zbar = np.conjugate(z)
    r_conj = r_matrix(model, zbar)
    adj_pairs = []
    for sigma in range(d):
        inputs = np.concatenate([np.eye(d)[:, sigma], r_conj[:, sigma]])
        adj_pairs.append((inputs, np.zeros(2 * n, dtype=np.complex128)))
    lam = model.eigenvalues
    for t in range(n):
        inputs = np.concatenate([np.zeros(d), model.phi[:, t].conj()])
        outputs = np.concatenate([np.zeros(n), (lam[t] - zbar) * np.eye(n)[:, t]])
        adj_pairs.append((inputs, outputs))
    for t in range(n):
        outputs = np.concatenate([np.eye(n)[:, t], zbar * np.eye(n)[:, t]])
        adj_pairs.append((np.zeros(2 * d, dtype=np.complex128), outputs))
    gamma_z_adjoint = make_relation(2 * d, 2 * n, adj_pairs)

    assembly = assemble(model, regular_count=regular_count)
    restriction = gamma_restrict(assembly.pair, z)
    matches = relations_equal(gamma_z, restriction)
    computed_adjoint = krein_adjoint(restriction, assembly.pair.spec)
    adjoint_distance = compare(gamma_z_adjoint.graph, computed_adjoint.graph).distance
    return ExplicitRestriction(
        gamma_z=gamma_z,
        gamma_z_adjoint=gamma_z_adjoint,
        matches_restriction=matches,
        adjoint_distance=adjoint_distance,
    )


@dataclass(frozen=True, eq=False)
class ConvergenceRow:
    level: int
    z: complex
    weyl_vs_r_residual: float
    r_drift: float
    green_residual: float
    im_r_residual: float
    dom_full: bool


@dataclass(frozen=True, eq=False)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]

    @property
    def drifts(self) -> tuple[float, ...]:
        return tuple(row.r_drift for row in self.rows if not math.isnan(row.r_drift))


def _opnorm(matrix: np.ndarray) -> float:
    sing = np.linalg.svd(np.atleast_2d(matrix), compute_uv=False)
    return float(sing[0]) if sing.size else 0.0


def weyl_vs_r(
    model: SpectralModel, z: complex, levels: Sequence[int], regular_count: int = 3
) -> ConvergenceTable:
    """Compare the boundary-image family against R across truncation levels.

    Per level: assemble the pair, extract the family member at z as a matrix
    (flagging the row when the domain is not full), and report its distance
    to R at the same level plus the cross-level drift of R.  Within-level
    agreement is exact up to solver tolerance; the drift decays with the
    level for component profiles of the singular class.
    """
    level_list = [int(v) for v in levels]
    if not level_list:
        raise ValueError("levels must be nonempty")
    if any(b <= a for a, b in zip(level_list, level_list[1:])):
        raise ValueError("levels must be strictly increasing")
    if level_list[-1] > model.level:
        raise ValueError(
            f"largest level {level_list[-1]} exceeds the model truncation {model.level}"
        )
    z = complex(z)
    rows = []
    previous_r: np.ndarray | None = None
    for level in level_list:
        sub = truncate(model, level)
        _check_off_spectrum(sub, z)
        assembly = assemble(sub, regular_count=regular_count)
        r_here = r_matrix(sub, z)
        member = weyl_family(assembly.pair, z)
        dom_full = relation_dom(member).dim == sub.defect
        if dom_full and member.graph_dim == sub.defect:
            residual = _opnorm(operator_matrix(member) - r_here)
        else:
            residual = float("nan")
        drift = float("nan") if previous_r is None else _opnorm(r_here - previous_r)
        im_r = _opnorm((r_here - r_here.conj().T) / 2j - z.imag * gram_at(sub, z))
        rows.append(
            ConvergenceRow(
                level=level,
                z=z,
                weyl_vs_r_residual=residual,
                r_drift=drift,
                green_residual=green_residual(assembly.pair),
                im_r_residual=im_r,
                dom_full=dom_full,
            )
        )
        previous_r = r_here
    return ConvergenceTable(rows=tuple(rows))


def model_weyl_evaluator(
    model: SpectralModel, regular_count: int = 3
) -> Callable[[complex], np.ndarray]:
    """Evaluator z -> matrix of M(z) with a per-point assembly.

    The mixed resolvent span is built at one probe point per assembly, so a
    fixed assembly represents the family exactly only at the interpolation
    points and the probe.  For derivative probes the assembly is rebuilt with
    the evaluation point as the probe, which is the faithful truncation of
    the level-independent family.
    """

    def evaluate(z: complex) -> np.ndarray:
        z = complex(z)
        probe_model = SpectralModel(
            model.eigenvalues, model.phi, model.points, model.offset, z
        )
        assembly = assemble(probe_model, regular_count=regular_count)
        return weyl_operator_matrix(assembly.pair, z)

    return evaluate


def inverse_quadratic_tail(level: int) -> float:
    """Tail sum of 1/(n^2 + 1) beyond ``level``.

    Integral-test value with curvature corrections; accurate to well below
    1e-10 for levels of a few dozen and beyond.
    """
    a = float(level + 1)
    value = a * a + 1.0
    f = 1.0 / value
    fp = -2.0 * a / value**2
    fppp = -24.0 * a * (a * a - 1.0) / value**4
    return math.atan2(1.0, a) + 0.5 * f - fp / 12.0 + fppp / 720.0


@dataclass(frozen=True)
class TailSignature:
    """Growth-rate signature of a component profile across levels.

    ``quadratic_ratios`` are successive increments of
    sum |phi_n|^2 / (1 + lambda_n^2) (they must shrink: the sum converges);
    ``linear_ratios`` are increments of sum |phi_n|^2 / (1 + |lambda_n|)
    (they must persist: the sum diverges).  Both together witness the
    borderline singular profile the model is designed around.
    """

    quadratic_ratios: tuple[float, ...]
    linear_ratios: tuple[float, ...]
    is_singular_profile: bool


def tail_signature(model: SpectralModel, levels: Sequence[int]) -> TailSignature:
    """Classify the component profile from partial-sum increments."""
    level_list = sorted(int(v) for v in levels)
    if len(level_list) < 3:
        raise ValueError("at least three levels are required")
    if level_list[-1] > model.level:
        raise ValueError("levels exceed the model truncation")
    lam = model.eigenvalues
    weight2 = np.sum(np.abs(model.phi) ** 2, axis=0) / (1.0 + lam**2)
    weight1 = np.sum(np.abs(model.phi) ** 2, axis=0) / (1.0 + np.abs(lam))
    inc2 = []
    inc1 = []
    for a, b in zip(level_list, level_list[1:]):
        inc2.append(float(np.sum(weight2[a:b])))
        inc1.append(float(np.sum(weight1[a:b])))
    ratios2 = tuple(later / max(earlier, 1e-300) for earlier, later in zip(inc2, inc2[1:]))
    ratios1 = tuple(later / max(earlier, 1e-300) for earlier, later in zip(inc1, inc1[1:]))
    singular = all(r <= 0.75 for r in ratios2) and all(r >= 0.5 for r in ratios1)
    return TailSignature(
        quadratic_ratios=ratios2, linear_ratios=ratios1, is_singular_profile=singular
    )
