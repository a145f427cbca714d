from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicelab.algebra.field import GF2, GF3, GF5, QQ, FieldSpec
from slicelab.algebra.linalg import (
    Subspace,
    annihilator,
    complement_through,
    enumerate_shard,
    enumerate_subspaces,
    gaussian_binomial,
    grassmannian_shards,
    left_kernel,
    nullspace,
    rank,
    rref,
    rref_canonicalize,
    shard_batches,
    span_intersect,
    span_sum,
)
from slicelab.services.fixture_service import random_full_rank
from slicelab.utils.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    FieldError,
    NonTrivialIntersectionError,
    NotContainedError,
)


def rows_strategy(p: int, ncols: int, max_rows: int = 4):
    return st.lists(
        st.lists(st.integers(0, p - 1), min_size=ncols, max_size=ncols), min_size=0, max_size=max_rows
    )


def test_rref_over_gf5():
    R, pivots = rref(GF5.array([[2, 4], [1, 3]]), GF5)
    assert R.tolist() == [[1, 0], [0, 1]]
    assert pivots == [0, 1]


def test_rank_depends_on_characteristic():
    M = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert rank(GF2.array(M), GF2) == 2
    assert rank(GF3.array(M), GF3) == 3
    assert rank(QQ.array(M), QQ) == 3


def test_rref_over_rationals_is_exact():
    R, _ = rref(QQ.array([[2, 1], [4, 3]]), QQ)
    assert R.tolist() == [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    R, _ = rref(QQ.array([[3, 1]]), QQ)
    assert R[0, 1] == Fraction(1, 3)


@settings(max_examples=60, deadline=None)
@given(rows_strategy(3, 5))
def test_nullspace_vectors_are_annihilated(rows):
    M = GF3.array(rows, ncols=5) if rows else GF3.zeros((0, 5))
    K = nullspace(M, GF3)
    assert K.shape[0] == 5 - rank(M, GF3)
    if rows and K.shape[0]:
        assert not GF3.reduce(M.dot(K.T)).any()


def test_left_kernel():
    M = GF2.array([[1, 0], [0, 1], [1, 1]])
    K = left_kernel(M, GF2)
    assert K.tolist() == [[1, 1, 1]]


@settings(max_examples=60, deadline=None)
@given(rows_strategy(3, 4))
def test_canonical_form_ignores_presentation(rows):
    S = rref_canonicalize(rows, GF3, 4)
    shuffled = list(reversed(rows)) + [[(a + b) % 3 for a, b in zip(rows[0], rows[-1])]] if rows else []
    assert rref_canonicalize(shuffled, GF3, 4) == S


@settings(max_examples=60, deadline=None)
@given(rows_strategy(2, 5), rows_strategy(2, 5))
def test_sum_and_intersection_dimension_formula(a, b):
    A = rref_canonicalize(a, GF2, 5)
    B = rref_canonicalize(b, GF2, 5)
    S = span_sum(A, B)
    I = span_intersect(A, B)
    assert S.dim + I.dim == A.dim + B.dim
    assert A.contains(I) and B.contains(I)
    assert S.contains(A) and S.contains(B)


@settings(max_examples=40, deadline=None)
@given(rows_strategy(5, 4))
def test_annihilator_is_orthogonal_complement(rows):
    S = rref_canonicalize(rows, GF5, 4)
    U = annihilator(S)
    assert U.dim == 4 - S.dim
    if S.dim and U.dim:
        assert not GF5.reduce(S.matrix.dot(U.matrix.T)).any()


def test_contains_vector_and_mismatch():
    S = Subspace.coordinate(GF3, 3, [0, 2])
    assert S.contains([2, 0, 1])
    assert not S.contains([0, 1, 0])
    with pytest.raises(DimensionMismatchError):
        S.contains([1, 0])
    with pytest.raises(DimensionMismatchError):
        span_sum(S, Subspace.zero(GF5, 3))


def test_complement_through():
    Q = Subspace.full(GF3, 4)
    A = Subspace.coordinate(GF3, 4, [0])
    T = rref_canonicalize([[0, 1, 1, 0]], GF3, 4)
    C = complement_through(Q, A, T)
    assert C.dim == 3
    assert C.contains(T)
    assert span_intersect(A, C).is_zero
    assert span_sum(A, C) == Q


def test_complement_through_preconditions():
    Q = Subspace.coordinate(GF2, 4, [0, 1])
    A = Subspace.coordinate(GF2, 4, [0])
    with pytest.raises(NotContainedError):
        complement_through(Q, A, Subspace.coordinate(GF2, 4, [2]))
    with pytest.raises(NonTrivialIntersectionError):
        complement_through(Q, A, A)


def random_complement_triple(rng: np.random.Generator, field):
    """Q with A spanned by part of a basis of Q, T meeting A only in zero."""
    n = int(rng.integers(1, 7))
    q = int(rng.integers(0, n + 1))
    a = int(rng.integers(0, q + 1))
    t = int(rng.integers(0, q - a + 1))
    basis = random_full_rank(rng, q, n, field)
    Q = rref_canonicalize(basis.tolist(), field, n)
    A = rref_canonicalize(basis[:a].tolist(), field, n)
    coeffs = np.hstack([field.random_array(rng, (t, a)), random_full_rank(rng, t, q - a, field)])
    T = rref_canonicalize(field.reduce(coeffs.dot(basis)).tolist(), field, n) if t else Subspace.zero(field, n)
    return Q, A, T


@pytest.mark.parametrize("field,count", [(GF2, 400), (GF5, 350), (QQ, 250)])
def test_complement_through_postcondition_on_random_triples(field, count):
    rng = np.random.default_rng(field.characteristic)
    for _ in range(count):
        Q, A, T = random_complement_triple(rng, field)
        C = complement_through(Q, A, T)
        assert C.contains(T)
        assert Q.contains(C)
        assert span_intersect(A, C).is_zero
        assert span_sum(A, C) == Q
        assert A.dim + C.dim == Q.dim


@pytest.mark.parametrize(
    "n,k,q,count",
    [(10, 3, 2, 6347715), (4, 2, 2, 35), (3, 1, 3, 13), (5, 0, 2, 1), (5, 5, 3, 1), (3, 4, 2, 0)],
)
def test_gaussian_binomial(n, k, q, count):
    assert gaussian_binomial(n, k, q) == count


@pytest.mark.parametrize("n,k,field", [(4, 2, GF2), (3, 1, GF3), (4, 0, GF2), (3, 3, GF3), (5, 2, GF2)])
def test_enumeration_lists_each_subspace_once(n, k, field):
    spaces = list(enumerate_subspaces(n, k, field))
    assert len(spaces) == gaussian_binomial(n, k, field.order)
    assert len(set(spaces)) == len(spaces)
    assert all(S.dim == k for S in spaces)
    assert all(rref_canonicalize(S.rows(), field, n) == S for S in spaces)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", range(0, 7))
def test_enumeration_matches_gaussian_binomial(n, q):
    field = FieldSpec(q)
    for k in range(n + 1):
        spaces = list(enumerate_subspaces(n, k, field))
        assert len(spaces) == gaussian_binomial(n, k, q)
        assert len(set(spaces)) == len(spaces)
        assert all(S.dim == k and S.ambient_dim == n for S in spaces)


def test_shard_batches_match_shard_order():
    n, q = 5, 2
    for pivots in grassmannian_shards(n, 2):
        expected = [S.matrix.tolist() for S in enumerate_shard(n, 2, GF2, pivots)]
        batches = list(shard_batches(n, pivots, q, chunk_size=3))
        got = [m.tolist() for b in batches for m in b]
        assert got == expected
        sliced = [m.tolist() for b in shard_batches(n, pivots, q, 2, start=1, stop=4) for m in b]
        assert sliced == expected[1:4]


def test_enumeration_budget_and_field_checks():
    with pytest.raises(BudgetExceededError):
        enumerate_subspaces(6, 3, GF2, max_count=100)
    with pytest.raises(FieldError):
        enumerate_subspaces(3, 1, QQ)


def test_sort_key_orders_by_dimension_then_pivots():
    a = Subspace.coordinate(GF2, 3, [1])
    b = Subspace.coordinate(GF2, 3, [0])
    c = Subspace.coordinate(GF2, 3, [0, 1])
    assert sorted([c, a, b], key=Subspace.sort_key) == [b, a, c]


def test_subspace_matrix_over_rationals():
    S = rref_canonicalize([[2, 4]], QQ, 2)
    assert S.basis == ((Fraction(1), Fraction(2)),)
    assert isinstance(S.matrix, np.ndarray)
