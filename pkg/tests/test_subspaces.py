import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krel.rng import complex_normal, generator
from krel.subspaces import (
    Subspace,
    combine,
    compare,
    complement,
    containment_residual,
    kernel,
    set_tol_scale,
    span,
    tol_scale,
)


def two_by_two_singular_values(a):
    """Closed-form singular values of a 2x2 complex matrix via the normal equations."""
    a = np.asarray(a, dtype=complex)
    g = a.conj().T @ a
    tr = g[0, 0].real + g[1, 1].real
    det = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]).real
    disc = math.sqrt(max(tr * tr / 4.0 - det, 0.0))
    lam = sorted([tr / 2.0 + disc, tr / 2.0 - disc], reverse=True)
    return [math.sqrt(max(v, 0.0)) for v in lam]


def test_span_collinear_vectors():
    s = span([(1, 0), (2, 0)])
    assert s.ambient_dim == 2
    assert s.dim == 1
    assert s.contains_vector([1, 0])


def test_span_empty_list_gives_zero_subspace():
    s = span([], ambient_dim=3)
    assert s.dim == 0
    assert s.is_zero


def test_span_requires_matching_dimensions():
    with pytest.raises(ValueError):
        span([(1, 0), (1, 0, 0)])


def test_span_near_collinear_default_policy():
    # Singular values by the 2x2 oracle: sqrt(2) and sqrt(2)*eps_dir.
    eps_dir = 1e-13
    mat = np.array([[1.0, 1.0], [eps_dir, -eps_dir]])
    sigma = two_by_two_singular_values(mat)
    assert sigma[0] == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert sigma[1] == pytest.approx(math.sqrt(2.0) * eps_dir, rel=1e-6)
    # Default policy collapses the 1e-13 direction; the strict policy keeps it.
    assert span([(1, eps_dir), (1, -eps_dir)]).dim == 1
    assert span([(1, eps_dir), (1, -eps_dir)], tol=1.0).dim == 2


def test_kernel_identity_is_zero():
    assert kernel(np.eye(3)).dim == 0


def test_kernel_zero_matrix_is_full():
    k = kernel(np.zeros((2, 4)))
    assert k.dim == 4


def test_kernel_rank_one_matrix():
    # [[1,1],[1,1]] has rank 1; kernel spanned by (1,-1)/sqrt(2).
    k = kernel([[1, 1], [1, 1]])
    assert k.dim == 1
    expected = span([(1, -1)])
    assert compare(k, expected).equals


def test_kernel_requires_nonempty():
    with pytest.raises(ValueError):
        kernel(np.zeros((0, 3)))


def test_combine_coordinate_axes():
    v = span([(1, 0)])
    w = span([(0, 1)])
    assert combine(v, w, "sum").dim == 2
    assert combine(v, w, "intersect").dim == 0


def test_combine_idempotent():
    v = span([(1, 2, 3), (0, 1, 0)])
    assert compare(combine(v, v, "sum"), v).equals
    assert compare(combine(v, v, "intersect"), v).equals


def test_combine_hand_solved_three_dim():
    # In C^3 the system a(e1+e2) = b(e1-e2) forces a = b = 0, so the
    # intersection is trivial and the sum has dimension 2.
    v = span([(1, 1, 0)])
    w = span([(1, -1, 0)])
    assert combine(v, w, "intersect").dim == 0
    assert combine(v, w, "sum").dim == 2


def test_combine_ambient_mismatch():
    with pytest.raises(ValueError):
        combine(span([(1, 0)]), span([(1, 0, 0)]), "sum")


def test_complement_axis():
    c = complement(span([(1, 0)]))
    assert compare(c, span([(0, 1)])).equals


def test_complement_full_space_is_zero():
    assert complement(Subspace.full(3)).dim == 0


def test_complement_phase_line():
    v = span([(1 / math.sqrt(2), 1j / math.sqrt(2))])
    expected = span([(1 / math.sqrt(2), -1j / math.sqrt(2))])
    assert compare(complement(v), expected).equals


def test_compare_equal_subspaces():
    v = span([(1, 1, 0), (0, 0, 1)])
    result = compare(v, v)
    assert result.distance == 0.0
    assert result.equals
    assert result.contains


def test_compare_orthogonal_lines():
    # Projectors diag(1,0) and diag(0,1): difference has eigenvalues +/-1,
    # so the operator-norm distance is 1 and the Frobenius distance sqrt(2).
    result = compare(span([(1, 0)]), span([(0, 1)]))
    assert result.distance == pytest.approx(1.0, abs=1e-12)
    assert result.frobenius_distance == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert not result.equals
    assert not result.contains


def test_zero_subspace_contained_in_anything():
    v = span([(1, 2), (3, 4j)])
    assert compare(v, Subspace.zero(2)).contains
    assert containment_residual(Subspace.zero(2), v) == 0.0


def test_containment_residual_detects_escape():
    v = span([(1, 0, 0)])
    w = span([(0, 1, 0)])
    assert containment_residual(w, v) == pytest.approx(1.0, abs=1e-12)


def _random_subspace(seed: int, ambient: int, dim_cap: int) -> Subspace:
    gen = generator(seed, ambient, dim_cap)
    k = int(gen.integers(0, dim_cap + 1))
    return span(complex_normal(gen, ambient, k) if k else [], ambient_dim=ambient)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2**32 - 1), ambient=st.integers(1, 6))
def test_projector_idempotent_and_hermitian(seed, ambient):
    v = _random_subspace(seed, ambient, ambient)
    p = v.projector()
    assert np.max(np.abs(p @ p - p), initial=0.0) <= 1e-10
    assert np.max(np.abs(p - p.conj().T), initial=0.0) <= 1e-10


@settings(max_examples=60, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2**32 - 1), ambient=st.integers(1, 6))
def test_dimension_formula(seed, ambient):
    v = _random_subspace(seed, ambient, ambient)
    w = _random_subspace(seed + 1, ambient, ambient)
    total = combine(v, w, "sum").dim + combine(v, w, "intersect").dim
    assert total == v.dim + w.dim


@settings(max_examples=60, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2**32 - 1), ambient=st.integers(1, 6))
def test_double_complement(seed, ambient):
    v = _random_subspace(seed, ambient, ambient)
    assert compare(complement(complement(v)), v).equals


@settings(max_examples=60, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2**32 - 1), ambient=st.integers(1, 6))
def test_orthonormalize_idempotent(seed, ambient):
    v = _random_subspace(seed, ambient, ambient)
    again = span(v.basis, ambient_dim=ambient)
    assert again.dim == v.dim
    assert compare(again, v).equals


def test_tol_scale_roundtrip():
    original = tol_scale()
    try:
        set_tol_scale(2.5)
        assert tol_scale() == 2.5
        with pytest.raises(ValueError):
            set_tol_scale(0.0)
    finally:
        set_tol_scale(original)


def test_subspace_rejects_nonorthonormal_basis():
    with pytest.raises(ValueError):
        Subspace(2, np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_subspace_rejects_nonfinite():
    with pytest.raises(ValueError):
        span([(np.nan, 0.0)])
