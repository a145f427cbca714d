"""
Graded pieces of linear ideals and of their intersections.

A GradedSubspace is a Subspace of S_d in monomial_index coordinates.
Intersections are computed in quotient charts: (P)_d is the kernel of
S_d -> S_d(S/(P)), so I_d = ∩ (P_i)_d is one left kernel of the stacked
chart maps.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from slicelab.algebra.field import FieldSpec
from slicelab.algebra.linalg import (
    Subspace,
    annihilator,
    enumerate_subspaces,
    left_kernel,
    rref_canonicalize,
    span_intersect,
    span_of_matrix,
    span_sum,
)
from slicelab.algebra.polyalg import (
    Polynomial,
    chart_images,
    embed,
    monomial_basis,
    monomial_count,
    monomial_index,
    partial_derivative,
    power_map,
    substitute,
    substitute_batch,
)
from slicelab.utils.config import settings
from slicelab.utils.errors import (
    BudgetExceededError,
    DegreeError,
    DimensionMismatchError,
    EmptyFamilyError,
    FieldError,
)


@dataclass(frozen=True)
class GradedSubspace:
    """A subspace of the degree-d forms in num_vars variables."""

    field: FieldSpec
    num_vars: int
    degree: int
    space: Subspace

    def __post_init__(self):
        expected = monomial_count(self.num_vars, self.degree)
        if self.space.ambient_dim != expected:
            raise DimensionMismatchError(
                f"S_{self.degree} in {self.num_vars} variables has dimension {expected}, "
                f"got ambient {self.space.ambient_dim}"
            )
        if self.space.field != self.field:
            raise DimensionMismatchError("graded subspace over a different field")

    @property
    def dim(self) -> int:
        return self.space.dim

    @classmethod
    def zero(cls, field: FieldSpec, num_vars: int, degree: int) -> "GradedSubspace":
        return cls(field, num_vars, degree, Subspace.zero(field, monomial_count(num_vars, degree)))

    @classmethod
    def full(cls, field: FieldSpec, num_vars: int, degree: int) -> "GradedSubspace":
        return cls(field, num_vars, degree, Subspace.full(field, monomial_count(num_vars, degree)))

    @classmethod
    def span_of(cls, polys: Sequence[Polynomial], field: FieldSpec, num_vars: int, degree: int):
        rows = []
        for p in polys:
            if p.num_vars != num_vars or p.field != field:
                raise DimensionMismatchError("generator over a different ring")
            if not p.is_zero and p.degree != degree:
                raise DegreeError(f"generator of degree {p.degree} in degree {degree}")
            rows.append(list(p.coefficient_vector()) if not p.is_zero else None)
        rows = [r for r in rows if r is not None]
        space = rref_canonicalize(rows, field, monomial_count(num_vars, degree))
        return cls(field, num_vars, degree, space)

    def polynomials(self) -> List[Polynomial]:
        """The RREF basis as polynomials."""
        return [
            Polynomial.from_coefficient_vector(self.field, self.num_vars, self.degree, row)
            for row in self.space.basis
        ]

    def contains_polynomial(self, f: Polynomial) -> bool:
        if f.num_vars != self.num_vars or f.field != self.field:
            raise DimensionMismatchError("polynomial over a different ring")
        if f.is_zero:
            return True
        if f.degree != self.degree:
            return False
        return self.space.contains(f.coefficient_vector())


@dataclass(frozen=True)
class LinearIdealFamily:
    """
    Finitely many spaces of linear forms P_1..P_s in n variables.

    Members are kept in the given order with repeats removed.
    """

    field: FieldSpec
    num_vars: int
    members: Tuple[Subspace, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise EmptyFamilyError("a family needs at least one member")
        unique: List[Subspace] = []
        for P in members:
            if P.field != self.field or P.ambient_dim != self.num_vars:
                raise DimensionMismatchError(
                    f"member over {P.field}^{P.ambient_dim} in a family over "
                    f"{self.field}^{self.num_vars}"
                )
            if P not in unique:
                unique.append(P)
        object.__setattr__(self, "members", tuple(unique))

    @property
    def r(self) -> int:
        return max(P.dim for P in self.members)

    @property
    def s(self) -> int:
        return len(self.members)

    def span(self) -> Subspace:
        """W, the sum of all members."""
        W = Subspace.zero(self.field, self.num_vars)
        for P in self.members:
            W = span_sum(W, P)
        return W

    @classmethod
    def from_rows(
        cls, field: FieldSpec, num_vars: int, blocks: Sequence[Sequence[Sequence]]
    ) -> "LinearIdealFamily":
        return cls(field, num_vars, tuple(rref_canonicalize(b, field, num_vars) for b in blocks))


def _check_degree(d: int):
    if d < 1:
        raise DegreeError(f"degree must be at least 1, got {d}")


def linear_ideal_graded(P: Subspace, d: int) -> GradedSubspace:
    """(P)_d = P * S_{d-1}, spanned by the products of basis forms with monomials."""
    _check_degree(d)
    field, n = P.field, P.ambient_dim
    if d == 1:
        return GradedSubspace(field, n, 1, P)
    if P.is_zero:
        return GradedSubspace.zero(field, n, d)
    N = monomial_count(n, d)
    lower = monomial_basis(n, d - 1)
    rows = field.zeros((P.dim * len(lower), N))
    t = 0
    for vec in P.basis:
        support = [(j, c) for j, c in enumerate(vec) if c != 0]
        for mono in lower:
            for j, c in support:
                e = list(mono)
                e[j] += 1
                rows[t, monomial_index(e, d, n)] = c
            t += 1
    return GradedSubspace(field, n, d, span_of_matrix(rows, field, N))


def quotient_chart(P: Subspace) -> np.ndarray:
    """Images of the variables in S/(P), as an (n, n - dim P) matrix."""
    return chart_images(P.matrix, P.pivots, P.field)


def intersect_family_graded(F: LinearIdealFamily, d: int) -> GradedSubspace:
    """I_d for I = (P_1) ∩ ... ∩ (P_s), as one kernel of stacked chart maps."""
    _check_degree(d)
    field, n = F.field, F.num_vars
    N = monomial_count(n, d)
    blocks = [power_map(quotient_chart(P), d, field) for P in F.members]
    M = np.hstack(blocks) if blocks else field.zeros((N, 0))
    K = left_kernel(M, field)
    return GradedSubspace(field, n, d, span_of_matrix(K, field, N))


def intersect_family_graded_iterated(F: LinearIdealFamily, d: int) -> GradedSubspace:
    """Same as intersect_family_graded, by pairwise span_intersect of the (P_i)_d."""
    _check_degree(d)
    acc = linear_ideal_graded(F.members[0], d).space
    for P in F.members[1:]:
        acc = span_intersect(acc, linear_ideal_graded(P, d).space)
    return GradedSubspace(F.field, F.num_vars, d, acc)


def common_intersection(F: LinearIdealFamily) -> Subspace:
    """I_1 = P_1 ∩ ... ∩ P_s."""
    acc = F.members[0]
    for P in F.members[1:]:
        acc = span_intersect(acc, P)
    return acc


def multiply_by_linear(G: GradedSubspace) -> GradedSubspace:
    """S_1 * G inside degree d + 1."""
    n, d, field = G.num_vars, G.degree + 1, G.field
    gens = [x * g for g in G.polynomials() for x in (Polynomial.variable(field, n, i) for i in range(n))]
    return GradedSubspace.span_of(gens, field, n, d)


def generator_count(F: LinearIdealFamily, d: int) -> int:
    """dim I_d / (S_1 * I_{d-1}); I_0 is zero for a proper ideal."""
    _check_degree(d)
    top = intersect_family_graded(F, d)
    if d == 1:
        return top.dim
    if d == 2:
        below = linear_ideal_graded(common_intersection(F), 2)
    else:
        below = multiply_by_linear(intersect_family_graded(F, d - 1))
    return top.dim - below.dim


def quadratic_generator_count(F: LinearIdealFamily) -> int:
    return generator_count(F, 2)


def contains_graded(G: GradedSubspace, H: GradedSubspace) -> bool:
    """H ⊆ G."""
    if (G.field, G.num_vars, G.degree) != (H.field, H.num_vars, H.degree):
        raise DimensionMismatchError("graded subspaces of different rings or degrees")
    return G.space.contains(H.space)


def graded_of_polynomial(f: Polynomial) -> GradedSubspace:
    return GradedSubspace.span_of([f], f.field, f.num_vars, f.degree)


def ideal_membership(f: Polynomial, P: Subspace) -> bool:
    """f ∈ (P): f vanishes after solving for the pivot variables of P."""
    if f.num_vars != P.ambient_dim:
        raise DimensionMismatchError(
            f"polynomial in {f.num_vars} variables, subspace in ambient {P.ambient_dim}"
        )
    if f.field != P.field:
        raise DimensionMismatchError("polynomial and subspace over different fields")
    if f.is_zero:
        return True
    images = quotient_chart(P)
    return not np.any(substitute_batch(f, images[None, :, :]))


def depends_only_on(f: Polynomial, V: Subspace) -> bool:
    """
    f ∈ S(V): f is unchanged by translating x along every direction
    orthogonal to V. The check is a formal identity in an extra
    variable t, so it is valid in every characteristic.
    """
    n, field = f.num_vars, f.field
    lifted = embed(f, n + 1, list(range(n)))
    for u in annihilator(V).basis:
        shift = {}
        for i in range(n):
            row = [field.zero] * (n + 1)
            row[i] = field.one
            row[n] = u[i]
            shift[i] = row
        if substitute(f, shift, num_vars=n + 1) != lifted:
            return False
    return True


def essential_variable_count(f: Polynomial, max_visits: Optional[int] = None) -> Tuple[int, Subspace]:
    """
    The least m with f ∈ S(V) for an m-dimensional V, and such a V.

    In characteristic 0 or above deg f, V is the annihilator of the
    directions u with Σ u_i ∂f/∂x_i = 0. Otherwise subspaces are
    searched by increasing dimension, within max_visits.
    """
    field, n = f.field, f.num_vars
    if f.is_zero or f.degree == 0:
        return 0, Subspace.zero(field, n)

    if field.characteristic == 0 or field.characteristic > f.degree:
        D = field.zeros((n, monomial_count(n, f.degree - 1)))
        for i in range(n):
            D[i] = partial_derivative(f, i).coefficient_vector()
        K = span_of_matrix(left_kernel(D, field), field, n)
        V = annihilator(K)
        return V.dim, V

    if max_visits is None:
        max_visits = settings.essential_search_max_visits
    visited = 0
    for m in range(n + 1):
        remaining = max_visits - visited
        try:
            candidates = enumerate_subspaces(n, m, field, max_count=remaining)
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                f"essential-variable search exceeded {max_visits} subspaces at dimension {m}",
                requested=visited + (exc.requested or 0),
                cap=max_visits,
            ) from exc
        for V in candidates:
            visited += 1
            if depends_only_on(f, V):
                return m, V
    raise AssertionError("the full space always contains f")


def _bitmask(row: Sequence) -> int:
    return sum(1 << j for j, x in enumerate(row) if x)


def _span_set(rows: Sequence[Sequence]) -> set:
    elements = {0}
    for row in rows:
        mask = _bitmask(row)
        elements |= {e ^ mask for e in elements}
    return elements


def brute_force_graded_intersection_oracle(
    F: LinearIdealFamily, d: int, max_dim: Optional[int] = None
) -> int:
    """
    dim I_d over GF(2) by listing every element of each (P_i)_d as a
    bitmask and intersecting the sets.
    """
    if F.field.characteristic != 2:
        raise FieldError("the brute-force oracle works over GF(2) only")
    _check_degree(d)
    if max_dim is None:
        max_dim = settings.oracle_max_dim
    N = monomial_count(F.num_vars, d)
    if N > max_dim:
        raise BudgetExceededError(
            f"S_{d} has dimension {N}, oracle cap is {max_dim}", requested=2**N, cap=2**max_dim
        )
    common = None
    for P in F.members:
        elements = _span_set(linear_ideal_graded(P, d).space.basis)
        common = elements if common is None else common & elements
    return len(common).bit_length() - 1
