"""Tolerance-aware dense complex subspace arithmetic.

A subspace of C^n is stored as an explicit orthonormal basis (columns of an
n-by-k matrix).  Every operation is a pure function on immutable values, so
the whole module is safe to use from concurrent callers.

Rank decisions use the threshold

    sigma >= max(rows, cols) * eps * sigma_max * multiplier

where ``multiplier`` is the user ``tol`` argument when positive and the
default policy multiplier otherwise.  The default multiplier (1e4, roughly a
5e-12 relative cutoff) treats directions that agree to better than about
twelve digits as dependent; pass ``tol=1.0`` for the strict machine-epsilon
policy.  The environment variable ``KREL_TOL_SCALE`` (mirrored by
:func:`set_tol_scale`) scales all thresholds globally.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Subspace",
    "SubspaceComparison",
    "as_complex_matrix",
    "as_complex_vector",
    "combine",
    "compare",
    "complement",
    "containment_residual",
    "kernel",
    "set_tol_scale",
    "span",
    "tol_scale",
]

_EPS = float(np.finfo(np.float64).eps)
_DEFAULT_RANK_MULTIPLIER = 1e4
_EQUALITY_RTOL = 1e-9
_ORTHONORMALITY_TOL = 1e-7

_tol_scale = float(os.environ.get("KREL_TOL_SCALE", "1.0"))


def tol_scale() -> float:
    """Current global tolerance multiplier."""
    return _tol_scale


def set_tol_scale(value: float) -> None:
    """Set the global tolerance multiplier (process wide)."""
    global _tol_scale
    value = float(value)
    if not value > 0.0 or not np.isfinite(value):
        raise ValueError(f"tolerance scale must be a positive finite number, got {value}")
    _tol_scale = value


def as_complex_matrix(values, *, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Validate and convert to a 2-D complex128 array with finite entries."""
    mat = np.asarray(values, dtype=np.complex128)
    if mat.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got array of ndim {mat.ndim}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix entries must be finite (no NaN or Inf)")
    if rows is not None and mat.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {mat.shape[0]}")
    if cols is not None and mat.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {mat.shape[1]}")
    return mat


def as_complex_vector(values, *, dim: int | None = None) -> np.ndarray:
    """Validate and convert to a 1-D complex128 array with finite entries."""
    vec = np.asarray(values, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(vec)):
        raise ValueError("vector entries must be finite (no NaN or Inf)")
    if dim is not None and vec.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}, got {vec.shape[0]}")
    return vec


def _rank_threshold(shape: tuple[int, int], sigma_max: float, tol: float) -> float:
    multiplier = tol if tol > 0 else _DEFAULT_RANK_MULTIPLIER
    return max(shape) * _EPS * sigma_max * multiplier * _tol_scale


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^n held as an orthonormal column basis.

    ``basis`` has shape (ambient_dim, dim) and satisfies
    ``basis.conj().T @ basis == I`` up to tolerance.  The zero subspace is
    represented by a basis with zero columns.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self) -> None:
        mat = as_complex_matrix(self.basis, rows=self.ambient_dim)
        if mat.shape[1] > self.ambient_dim:
            raise ValueError(
                f"basis has {mat.shape[1]} columns but the ambient dimension is {self.ambient_dim}"
            )
        if mat.shape[1]:
            gram = mat.conj().T @ mat
            defect = np.max(np.abs(gram - np.eye(mat.shape[1])))
            if defect > _ORTHONORMALITY_TOL * _tol_scale:
                raise ValueError(f"basis columns are not orthonormal (defect {defect:.3e})")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "basis", mat)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=np.complex128))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace."""
        return self.basis @ self.basis.conj().T

    def project(self, vector) -> np.ndarray:
        vec = as_complex_vector(vector, dim=self.ambient_dim)
        return self.basis @ (self.basis.conj().T @ vec)

    def contains_vector(self, vector, *, tol: float = 1e-8) -> bool:
        vec = as_complex_vector(vector, dim=self.ambient_dim)
        scale = max(1.0, float(np.linalg.norm(vec)))
        return float(np.linalg.norm(vec - self.project(vec))) <= tol * scale * _tol_scale

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def span(vectors, ambient_dim: int | None = None, tol: float = 0.0) -> Subspace:
    """Orthonormalized span of a family of vectors.

    ``vectors`` is either a sequence of 1-D vectors or a 2-D array whose
    columns are the vectors.  Columns are normalized before the rank decision
    so that very small but genuine directions are kept.  The dimension of the
    result is the numerical rank of the stacked matrix.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        mat = as_complex_matrix(vectors)
        if ambient_dim is not None and mat.shape[0] != ambient_dim:
            raise ValueError(f"vectors live in C^{mat.shape[0]}, expected C^{ambient_dim}")
    else:
        rows = [as_complex_vector(v) for v in vectors]
        if rows:
            length = rows[0].shape[0]
            for v in rows:
                if v.shape[0] != length:
                    raise ValueError(
                        f"all vectors must share one ambient dimension, got {length} and {v.shape[0]}"
                    )
            if ambient_dim is not None and length != ambient_dim:
                raise ValueError(f"vectors live in C^{length}, expected C^{ambient_dim}")
            mat = np.column_stack(rows)
        else:
            if ambient_dim is None:
                raise ValueError("ambient_dim is required for an empty spanning set")
            mat = np.zeros((ambient_dim, 0), dtype=np.complex128)
    n = mat.shape[0]
    if mat.shape[1] == 0:
        return Subspace.zero(n)
    norms = np.linalg.norm(mat, axis=0)
    keep = norms > 0.0
    if not np.any(keep):
        return Subspace.zero(n)
    mat = mat[:, keep] / norms[keep]
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    thresh = _rank_threshold(mat.shape, float(s[0]) if s.size else 0.0, tol)
    rank = int(np.sum(s > thresh))
    return Subspace(n, u[:, :rank])


def kernel(matrix, tol: float = 0.0) -> Subspace:
    """Null space {x : m @ x = 0} of a nonempty matrix."""
    mat = as_complex_matrix(matrix)
    if mat.shape[0] == 0 or mat.shape[1] == 0:
        raise ValueError("kernel requires a nonempty matrix")
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    thresh = _rank_threshold(mat.shape, float(s[0]) if s.size else 0.0, tol)
    rank = int(np.sum(s > thresh))
    return Subspace(mat.shape[1], vh[rank:].conj().T)


def combine(v: Subspace, w: Subspace, mode: str, tol: float = 0.0) -> Subspace:
    """Sum or intersection of two subspaces of the same ambient space.

    The intersection is computed from the kernel of ``[B_v | -B_w]`` mapped
    back through ``B_v``, which avoids the round-off of a double complement.
    """
    if v.ambient_dim != w.ambient_dim:
        raise ValueError(f"ambient mismatch: {v.ambient_dim} vs {w.ambient_dim}")
    if mode == "sum":
        return span(np.hstack([v.basis, w.basis]), ambient_dim=v.ambient_dim, tol=tol)
    if mode == "intersect":
        if v.is_zero or w.is_zero:
            return Subspace.zero(v.ambient_dim)
        coeffs = kernel(np.hstack([v.basis, -w.basis]), tol=tol)
        if coeffs.is_zero:
            return Subspace.zero(v.ambient_dim)
        vectors = v.basis @ coeffs.basis[: v.dim, :]
        return span(vectors, ambient_dim=v.ambient_dim, tol=tol)
    raise ValueError(f"mode must be 'sum' or 'intersect', got {mode!r}")


def complement(v: Subspace) -> Subspace:
    """Orthogonal complement; satisfies v + complement(v) = ambient space."""
    if v.is_zero:
        return Subspace.full(v.ambient_dim)
    u, s, _ = np.linalg.svd(v.basis, full_matrices=True)
    thresh = _rank_threshold(v.basis.shape, float(s[0]), 0.0)
    rank = int(np.sum(s > thresh))
    return Subspace(v.ambient_dim, u[:, rank:])


@dataclass(frozen=True)
class SubspaceComparison:
    """Distances and containment flags for a pair of subspaces.

    ``distance`` is the operator norm of the difference of orthogonal
    projectors and ``frobenius_distance`` its Frobenius norm.  ``contains``
    means the second operand lies inside the first (the dimension does not
    grow when its basis is adjoined); ``equals`` gates the Frobenius distance
    at ``1e-9 * sqrt(ambient_dim)`` unless overridden.
    """

    distance: float
    frobenius_distance: float
    contains: bool
    equals: bool


def compare(v: Subspace, w: Subspace, eq_tol: float | None = None) -> SubspaceComparison:
    """Compare two subspaces of the same ambient space."""
    if v.ambient_dim != w.ambient_dim:
        raise ValueError(f"ambient mismatch: {v.ambient_dim} vs {w.ambient_dim}")
    diff = v.projector() - w.projector()
    if diff.size:
        sing = np.linalg.svd(diff, compute_uv=False)
        distance = float(sing[0]) if sing.size else 0.0
        frobenius = float(np.sqrt(np.sum(sing**2)))
    else:
        distance = frobenius = 0.0
    if eq_tol is None:
        eq_tol = float(_EQUALITY_RTOL * np.sqrt(max(1, v.ambient_dim)) * _tol_scale)
    joined = combine(v, w, "sum")
    return SubspaceComparison(
        distance=distance,
        frobenius_distance=frobenius,
        contains=bool(joined.dim == v.dim),
        equals=bool(frobenius <= eq_tol),
    )


def containment_residual(inner: Subspace, outer: Subspace) -> float:
    """How far ``inner`` sticks out of ``outer`` (0 when contained).

    Returns the operator norm of ``(I - P_outer) B_inner``, a continuous
    companion to the integer-valued ``compare(...).contains`` flag.
    """
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError(f"ambient mismatch: {inner.ambient_dim} vs {outer.ambient_dim}")
    if inner.is_zero:
        return 0.0
    residual = inner.basis - outer.basis @ (outer.basis.conj().T @ inner.basis)
    sing = np.linalg.svd(residual, compute_uv=False)
    return float(sing[0]) if sing.size else 0.0
