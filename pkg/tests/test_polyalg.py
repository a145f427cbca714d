import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicelab.algebra.field import GF2, GF3, GF5, QQ
from slicelab.algebra.polyalg import (
    Polynomial,
    chart_images,
    divide_by_linear,
    embed,
    monomial_basis,
    monomial_count,
    monomial_from_index,
    monomial_index,
    partial_derivative,
    power_map,
    reduce_mod_linear,
    substitute,
    substitute_batch,
    substitute_matrix,
)
from slicelab.services.fixture_service import build_fn, fn_embedding, fn_restriction_images, random_form
from slicelab.utils.errors import (
    DimensionMismatchError,
    InhomogeneousError,
    UnassignedVariableError,
    ZeroLinearFormError,
)


def var(field, n, i):
    return Polynomial.variable(field, n, i)


def test_monomial_order_is_graded_lex():
    assert monomial_basis(3, 2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))
    assert monomial_count(3, 2) == 6
    assert monomial_count(10, 3) == 220


@pytest.mark.parametrize("n,d", [(3, 2), (4, 3), (1, 3), (5, 1)])
def test_monomial_index_round_trip(n, d):
    for i, mono in enumerate(monomial_basis(n, d)):
        assert monomial_index(mono, d, n) == i
        assert monomial_from_index(i, d, n) == mono


def test_mixed_degrees_are_rejected():
    with pytest.raises(InhomogeneousError):
        Polynomial(GF2, 2, 2, {(1, 0): 1, (1, 1): 1})
    with pytest.raises(InhomogeneousError):
        var(GF2, 2, 0) + var(GF2, 2, 0) * var(GF2, 2, 1)


def test_coefficients_reduce_and_vanish():
    f = Polynomial(GF3, 2, 2, {(2, 0): 4, (1, 1): 3})
    assert f.terms == {(2, 0): 1}
    assert (var(GF2, 2, 0) + var(GF2, 2, 0)).is_zero


def test_zero_polynomials_compare_equal_across_degrees():
    assert Polynomial.zero(GF2, 3, 3) == Polynomial.zero(GF2, 3, 1)
    assert Polynomial.zero(GF2, 3, 3) != Polynomial.zero(GF3, 3, 3)


def test_product_and_power():
    x, y = var(QQ, 2, 0), var(QQ, 2, 1)
    f = (x + y) ** 2
    assert f.terms == {(2, 0): Fraction(1), (1, 1): Fraction(2), (0, 2): Fraction(1)}
    g = (x + y) * (x - y)
    assert g == x * x - y * y


def test_freshman_dream_in_characteristic_two():
    x, y = var(GF2, 2, 0), var(GF2, 2, 1)
    assert (x + y) ** 2 == x * x + y * y


def test_to_text():
    f = build_fn(2, GF2)
    assert f.to_text(["x1", "x2", "y12"]) == "x1*x2*y12"
    g = Polynomial(QQ, 2, 3, {(3, 0): Fraction(-1, 2), (1, 2): 2})
    assert g.to_text() == "-1/2*x1^3 + 2*x1*x2^2"
    assert Polynomial.zero(GF5, 2, 3).to_text() == "0"


def test_partial_derivatives_of_fn():
    f = build_fn(3, GF5)
    # variables x1 x2 x3 y12 y13 y23
    d_y12 = partial_derivative(f, 3)
    assert d_y12 == var(GF5, 6, 0) * var(GF5, 6, 1)
    d_x1 = partial_derivative(f, 0)
    assert d_x1 == var(GF5, 6, 1) * var(GF5, 6, 3) + var(GF5, 6, 2) * var(GF5, 6, 4)


def test_derivative_picks_up_exponent_mod_p():
    f = var(GF3, 1, 0) ** 3
    assert partial_derivative(f, 0).is_zero
    g = var(GF5, 1, 0) ** 3
    assert partial_derivative(g, 0) == (var(GF5, 1, 0) ** 2).scale(3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([GF3, GF5]))
def test_euler_identity(seed, field):
    rng = np.random.default_rng(seed)
    n, d = 3, 3
    f = random_form(rng, n, d, field)
    total = Polynomial.zero(field, n, d)
    for i in range(n):
        total = total + var(field, n, i) * partial_derivative(f, i)
    assert total == f.scale(d)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_substitution_is_functorial(seed):
    rng = np.random.default_rng(seed)
    field = GF5
    f = random_form(rng, 3, 3, field)
    A = field.random_array(rng, (3, 4))
    B = field.random_array(rng, (4, 2))
    composed = field.reduce(A.dot(B))
    step = substitute_matrix(substitute_matrix(f, A), B)
    assert step == substitute_matrix(f, composed)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_batched_substitution_agrees_with_sparse(seed):
    rng = np.random.default_rng(seed)
    field = GF3
    f = random_form(rng, 4, 3, field)
    images = field.random_array(rng, (5, 4, 3))
    batch = substitute_batch(f, images)
    for t in range(5):
        sparse = substitute(f, [list(images[t, i]) for i in range(4)], num_vars=3)
        assert list(batch[t]) == list(sparse.coefficient_vector())


def test_power_map_rows_are_images_of_monomials():
    field = GF5
    images = field.array([[1, 2], [0, 3], [4, 1]])
    M = power_map(images, 2, field)
    for t, mono in enumerate(monomial_basis(3, 2)):
        image = substitute(Polynomial.monomial(field, 3, mono), [list(r) for r in images], num_vars=2)
        assert list(M[t]) == list(image.coefficient_vector())


def test_substitution_errors():
    f = var(GF2, 2, 0) * var(GF2, 2, 1)
    with pytest.raises(UnassignedVariableError):
        substitute(f, {0: [1, 0]})
    with pytest.raises(DimensionMismatchError):
        substitute(f, {0: [1, 0], 1: [1, 0, 0]})
    with pytest.raises(InhomogeneousError):
        substitute(f, {0: f, 1: [1, 0]})


def test_substitution_needs_an_image_for_every_variable():
    f = var(GF3, 3, 0) ** 3
    with pytest.raises(UnassignedVariableError) as exc:
        substitute(f, [[1, 0], [0, 1]])
    assert exc.value.details["variables"] == [2]
    with pytest.raises(DimensionMismatchError):
        substitute(f, {0: [1, 0], 1: [0, 1], 2: [0, 0], 3: [1, 1]})
    assert substitute(f, [[1, 0], [0, 1], [0, 0]]) == var(GF3, 2, 0) ** 3


def test_substitution_into_no_variables():
    f = var(GF2, 1, 0) ** 3
    images = np.zeros((4, 1, 0), dtype=np.int64)
    assert substitute_batch(f, images).shape == (4, 0)


def test_chart_images_solve_for_pivots():
    rows = GF3.array([[1, 0, 2], [0, 1, 1]])
    images = chart_images(rows, [0, 1], GF3)
    # x1 = -2 x3 = x3, x2 = -x3 = 2 x3
    assert images.tolist() == [[1], [2], [1]]


def test_reduce_mod_linear_kills_ideal_elements():
    x1, x2, x3 = (var(GF5, 3, i) for i in range(3))
    ell = x1 + x2.scale(2)
    q = x2 * x3 + x3 * x3
    assert reduce_mod_linear(ell * q, ell).is_zero
    assert not reduce_mod_linear(x2 * x2 * x3, x1).is_zero
    with pytest.raises(ZeroLinearFormError):
        reduce_mod_linear(q, [0, 0, 0])


@pytest.mark.parametrize("field", [GF2, GF5, QQ])
def test_divide_by_linear(field):
    rng = np.random.default_rng(7)
    f = random_form(rng, 3, 3, field)
    ell = Polynomial.linear_form(field, [0, 1, 2])
    q, rem = divide_by_linear(f, ell)
    assert ell * q + rem == f
    assert all(mono[1] == 0 for mono in rem.terms)


def test_embed():
    f = var(GF2, 2, 0) * var(GF2, 2, 1)
    g = embed(f, 4, [3, 1])
    assert g == var(GF2, 4, 3) * var(GF2, 4, 1)
    with pytest.raises(DimensionMismatchError):
        embed(f, 4, [1, 1])


def test_fn_restricts_to_previous_member():
    for n in range(3, 6):
        fn = build_fn(n, GF5)
        smaller = embed(build_fn(n - 1, GF5), fn.num_vars, fn_embedding(n))
        for coeffs in itertools.islice(itertools.product(range(5), repeat=n - 1), 0, 40, 7):
            images = fn_restriction_images(n, list(coeffs), GF5)
            assert substitute(fn, images, num_vars=fn.num_vars) == smaller
