import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicelab.algebra.field import GF2, GF3, GF5, QQ
from slicelab.algebra.idealcalc import (
    GradedSubspace,
    LinearIdealFamily,
    brute_force_graded_intersection_oracle,
    common_intersection,
    contains_graded,
    depends_only_on,
    essential_variable_count,
    generator_count,
    graded_of_polynomial,
    ideal_membership,
    intersect_family_graded,
    intersect_family_graded_iterated,
    linear_ideal_graded,
    quadratic_generator_count,
)
from slicelab.algebra.linalg import Subspace, rref_canonicalize
from slicelab.algebra.polyalg import Polynomial
from slicelab.services.fixture_service import (
    build_fn,
    build_lemma22_config,
    random_family,
    random_form,
    random_full_rank,
    segre_minor_span,
    segre_triple,
)
from slicelab.utils.errors import (
    BudgetExceededError,
    DegreeError,
    DimensionMismatchError,
    EmptyFamilyError,
    FieldError,
)


def var(field, n, i):
    return Polynomial.variable(field, n, i)


@pytest.mark.parametrize("field", [GF2, GF5, QQ])
def test_linear_ideal_dimension_formula(field):
    rng = np.random.default_rng(11)
    for n in range(1, 9):
        for p in range(n + 1):
            rows = random_full_rank(rng, p, n, field).tolist() if p else []
            P = rref_canonicalize(rows, field, n)
            assert linear_ideal_graded(P, 2).dim == p * n - math.comb(p, 2)


def test_linear_ideal_in_degree_one_is_the_space():
    P = Subspace.coordinate(GF3, 4, [1, 3])
    assert linear_ideal_graded(P, 1).space == P
    with pytest.raises(DegreeError):
        linear_ideal_graded(P, 0)


@pytest.mark.parametrize("field", [GF2, GF5, QQ])
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_normal_form_triple_intersection(field, r):
    for k in range(r + 1):
        assert intersect_family_graded(build_lemma22_config(r, k, field), 2).dim == math.comb(k, 2)


@pytest.mark.parametrize("field", [GF5, QQ])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_segre_minors_span_the_triple_intersection(field, k):
    assert intersect_family_graded(segre_triple(k, field), 2) == segre_minor_span(k, field)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([GF2, GF3]), st.integers(2, 3))
def test_chart_kernel_matches_iterated_intersection(seed, field, d):
    F = random_family(seed, 3, 2, 4, field)
    assert intersect_family_graded(F, d) == intersect_family_graded_iterated(F, d)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_oracle_agrees_over_gf2(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    F = random_family([seed, 1], int(rng.integers(1, 4)), n, n, GF2)
    assert intersect_family_graded(F, 2).dim == brute_force_graded_intersection_oracle(F, 2)


def test_oracle_limits():
    F = build_lemma22_config(2, 1, GF5)
    with pytest.raises(FieldError):
        brute_force_graded_intersection_oracle(F, 2)
    big = build_lemma22_config(3, 0, GF2)
    with pytest.raises(BudgetExceededError):
        brute_force_graded_intersection_oracle(big, 2)


def test_family_dedupes_and_rejects_empty():
    P = Subspace.coordinate(GF2, 3, [0])
    F = LinearIdealFamily(GF2, 3, (P, P, Subspace.coordinate(GF2, 3, [1, 2])))
    assert F.s == 2
    assert F.r == 2
    assert F.span() == Subspace.full(GF2, 3)
    with pytest.raises(EmptyFamilyError):
        LinearIdealFamily(GF2, 3, ())
    with pytest.raises(DimensionMismatchError):
        LinearIdealFamily(GF2, 3, (Subspace.coordinate(GF2, 4, [0]),))


def test_common_intersection_and_degree_one_generators():
    F = LinearIdealFamily.from_rows(GF3, 3, [[[1, 0, 0], [0, 1, 0]], [[1, 0, 0], [0, 0, 1]]])
    assert common_intersection(F) == Subspace.coordinate(GF3, 3, [0])
    assert generator_count(F, 1) == 1
    # (x1) + x2*x3 generate (x1, x2) ∩ (x1, x3)
    assert intersect_family_graded(F, 2).dim == 3 + 1
    assert quadratic_generator_count(F) == 1


def test_coordinate_configurations():
    # (x1) ∩ (x2) = (x1 x2)
    F = LinearIdealFamily.from_rows(GF2, 2, [[[1, 0]], [[0, 1]]])
    assert quadratic_generator_count(F) == 1
    assert generator_count(F, 3) == 0
    # three coordinate lines: x_i x_j generate, and x1 x2 x3 is a product
    G = LinearIdealFamily.from_rows(GF2, 3, [[[1, 0, 0]], [[0, 1, 0]], [[0, 0, 1]]])
    assert quadratic_generator_count(G) == 0
    assert intersect_family_graded(G, 3).dim == 1
    assert generator_count(G, 3) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_membership_matches_graded_piece(seed):
    rng = np.random.default_rng(seed)
    field = GF3
    n = 4
    f = random_form(rng, n, 3, field)
    k = int(rng.integers(1, 4))
    P = rref_canonicalize(field.random_array(rng, (k, n)).tolist(), field, n)
    expected = linear_ideal_graded(P, 3).contains_polynomial(f) if not P.is_zero else f.is_zero
    assert ideal_membership(f, P) == expected


@pytest.mark.parametrize(
    "rows,member",
    [
        ([[0, 0, 1]], True),
        ([[0, 1, 0]], True),
        ([[1, 1, 0]], False),
    ],
)
def test_f2_membership(rows, member):
    f = build_fn(2, GF2)
    assert ideal_membership(f, rref_canonicalize(rows, GF2, 3)) is member


def test_membership_examples():
    x13 = var(GF2, 2, 0) ** 3
    assert not ideal_membership(x13, Subspace.coordinate(GF2, 2, [1]))
    f4 = build_fn(4, GF2)
    # y12, x3, x4 in the order x1..x4, y12, y13, y14, y23, y24, y34
    P = Subspace.coordinate(GF2, 10, [4, 2, 3])
    assert ideal_membership(f4, P)
    assert ideal_membership(Polynomial.zero(GF2, 10, 3), Subspace.zero(GF2, 10))
    with pytest.raises(DimensionMismatchError):
        ideal_membership(f4, Subspace.zero(GF2, 3))


def test_contains_graded_and_graded_of_polynomial():
    P = Subspace.coordinate(GF5, 3, [0])
    f = var(GF5, 3, 0) * var(GF5, 3, 1)
    assert contains_graded(linear_ideal_graded(P, 2), graded_of_polynomial(f))
    assert not contains_graded(graded_of_polynomial(f), linear_ideal_graded(P, 2))
    with pytest.raises(DimensionMismatchError):
        contains_graded(linear_ideal_graded(P, 2), linear_ideal_graded(P, 3))


def test_graded_subspace_checks_ambient():
    with pytest.raises(DimensionMismatchError):
        GradedSubspace(GF2, 3, 2, Subspace.zero(GF2, 5))
    G = GradedSubspace.full(GF2, 2, 2)
    assert G.dim == 3
    assert len(G.polynomials()) == 3


def test_essential_variables_by_derivatives():
    x1, x2, x3, x4 = (var(GF5, 4, i) for i in range(4))
    f = (x1 + x2) ** 3 + (x1 + x2) * x3 * x3
    m, V = essential_variable_count(f)
    assert m == 2
    assert depends_only_on(f, V)
    assert essential_variable_count(Polynomial.zero(GF5, 4, 3))[0] == 0


def test_essential_variables_in_small_characteristic():
    x1, x2, x3 = (var(GF2, 3, i) for i in range(3))
    # (x1 + x2)^2 x3 = x1^2 x3 + x2^2 x3 depends on two forms
    f = (x1 + x2) ** 2 * x3
    m, V = essential_variable_count(f)
    assert m == 2
    assert depends_only_on(f, V)
    g = x1 * x2 * x3
    assert essential_variable_count(g)[0] == 3
    with pytest.raises(BudgetExceededError):
        essential_variable_count(g, max_visits=3)


def test_essential_variables_of_fn_over_rationals():
    f = build_fn(3, QQ)
    m, _ = essential_variable_count(f)
    assert m == 6


def test_depends_only_on():
    x1, x2, x3 = (var(GF3, 3, i) for i in range(3))
    f = x1 * x1 * x2
    assert depends_only_on(f, Subspace.coordinate(GF3, 3, [0, 1]))
    assert not depends_only_on(f, Subspace.coordinate(GF3, 3, [0, 2]))
