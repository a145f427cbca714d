"""
Sparse homogeneous polynomials over an exact field.

Monomials are exponent tuples. The coordinates of S_d are the degree-d
monomials in graded lex order; for a fixed degree that is exactly the
order in which itertools.combinations_with_replacement lists variable
multisets (x1^2, x1*x2, x1*x3, x2^2, ...).
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from slicelab.algebra.field import FieldSpec, Scalar
from slicelab.utils.errors import (
    DegreeError,
    DimensionMismatchError,
    InhomogeneousError,
    UnassignedVariableError,
    ZeroLinearFormError,
)

Monomial = Tuple[int, ...]


# Monomial indexing


def monomial_count(num_vars: int, degree: int) -> int:
    """dim S_d = C(n + d - 1, d)."""
    if degree < 0:
        return 0
    if num_vars == 0:
        return 1 if degree == 0 else 0
    return math.comb(num_vars + degree - 1, degree)


@lru_cache(maxsize=None)
def monomial_multisets(num_vars: int, degree: int) -> Tuple[Tuple[int, ...], ...]:
    """Sorted variable-index tuples of the degree-d monomials, in coordinate order."""
    return tuple(itertools.combinations_with_replacement(range(num_vars), degree))


@lru_cache(maxsize=None)
def monomial_basis(num_vars: int, degree: int) -> Tuple[Monomial, ...]:
    out = []
    for ms in monomial_multisets(num_vars, degree):
        e = [0] * num_vars
        for i in ms:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def _index_table(num_vars: int, degree: int) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomial_basis(num_vars, degree))}


def exponents_to_multiset(m: Monomial) -> Tuple[int, ...]:
    return tuple(i for i, e in enumerate(m) for _ in range(e))


def monomial_index(m: Sequence[int], degree: int, num_vars: int) -> int:
    """Position of a monomial among the degree-d monomials in n variables."""
    m = tuple(int(e) for e in m)
    if len(m) != num_vars:
        raise DimensionMismatchError(f"monomial has {len(m)} exponents, expected {num_vars}")
    if any(e < 0 for e in m) or sum(m) != degree:
        raise DegreeError(f"monomial {m} does not have degree {degree}")
    return _index_table(num_vars, degree)[m]


def monomial_from_index(index: int, degree: int, num_vars: int) -> Monomial:
    basis = monomial_basis(num_vars, degree)
    if not 0 <= index < len(basis):
        raise DimensionMismatchError(f"index {index} outside [0, {len(basis)})")
    return basis[index]


# Polynomials


@dataclass(frozen=True, eq=False)
class Polynomial:
    """
    Homogeneous polynomial of a fixed degree.

    ``terms`` maps exponent tuples to nonzero canonical scalars; zero
    coefficients are dropped and mixed degrees are rejected when the
    polynomial is built.
    """

    field: FieldSpec
    num_vars: int
    degree: int
    terms: Mapping[Monomial, Scalar]

    def __post_init__(self):
        if self.degree < 0:
            raise DegreeError(f"negative degree {self.degree}")
        clean: Dict[Monomial, Scalar] = {}
        for mono, coef in dict(self.terms).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.num_vars:
                raise DimensionMismatchError(
                    f"monomial {mono} has {len(mono)} exponents, expected {self.num_vars}"
                )
            if any(e < 0 for e in mono):
                raise DegreeError(f"negative exponent in {mono}")
            if sum(mono) != self.degree:
                raise InhomogeneousError(
                    f"term of degree {sum(mono)} in a polynomial of degree {self.degree}"
                )
            c = self.field.scalar(coef)
            if c != 0:
                clean[mono] = c
        object.__setattr__(self, "terms", clean)

    # constructors

    @classmethod
    def zero(cls, field: FieldSpec, num_vars: int, degree: int) -> "Polynomial":
        return cls(field, num_vars, degree, {})

    @classmethod
    def monomial(
        cls, field: FieldSpec, num_vars: int, exponents: Sequence[int], coef: Scalar = 1
    ) -> "Polynomial":
        exponents = tuple(exponents)
        return cls(field, num_vars, sum(exponents), {exponents: coef})

    @classmethod
    def constant(cls, field: FieldSpec, num_vars: int, value: Scalar) -> "Polynomial":
        return cls(field, num_vars, 0, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, field: FieldSpec, num_vars: int, index: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise DimensionMismatchError(f"variable index {index} out of range")
        e = [0] * num_vars
        e[index] = 1
        return cls(field, num_vars, 1, {tuple(e): 1})

    @classmethod
    def linear_form(cls, field: FieldSpec, vector: Sequence[Scalar]) -> "Polynomial":
        n = len(vector)
        terms = {}
        for i, c in enumerate(vector):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(field, n, 1, terms)

    @classmethod
    def from_coefficient_vector(
        cls, field: FieldSpec, num_vars: int, degree: int, vector: Iterable[Scalar]
    ) -> "Polynomial":
        vector = list(vector)
        basis = monomial_basis(num_vars, degree)
        if len(vector) != len(basis):
            raise DimensionMismatchError(
                f"coefficient vector of length {len(vector)}, S_{degree} has dimension {len(basis)}"
            )
        return cls(field, num_vars, degree, dict(zip(basis, vector)))

    # views

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient_vector(self) -> np.ndarray:
        """Coefficients in monomial_index coordinates, as a 1-d field array."""
        out = self.field.zeros(monomial_count(self.num_vars, self.degree))
        table = _index_table(self.num_vars, self.degree)
        for mono, c in self.terms.items():
            out[table[mono]] = c
        return out

    def linear_coefficients(self) -> Tuple[Scalar, ...]:
        """The vector of a linear form."""
        if self.is_zero:
            return (self.field.zero,) * self.num_vars
        if self.degree != 1:
            raise DegreeError("not a linear form")
        return self.field.to_tuple(self.coefficient_vector())

    def variables_used(self) -> List[int]:
        used = set()
        for mono in self.terms:
            used.update(i for i, e in enumerate(mono) if e)
        return sorted(used)

    # arithmetic

    def _check(self, other: "Polynomial"):
        if self.field != other.field or self.num_vars != other.num_vars:
            raise DimensionMismatchError("polynomials over different fields or variable sets")

    def _combine(self, other: "Polynomial", sign: int) -> "Polynomial":
        self._check(other)
        if other.is_zero and self.degree != other.degree:
            return self
        if self.is_zero and self.degree != other.degree:
            return other if sign > 0 else -other
        if self.degree != other.degree:
            raise InhomogeneousError(f"adding degree {self.degree} to degree {other.degree}")
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = self.field.scalar(terms.get(mono, 0) + sign * c)
        return Polynomial(self.field, self.num_vars, self.degree, terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return self._combine(other, 1)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self._combine(other, -1)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def scale(self, c: Scalar) -> "Polynomial":
        c = self.field.scalar(c)
        return Polynomial(
            self.field, self.num_vars, self.degree, {m: v * c for m, v in self.terms.items()}
        )

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        terms: Dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                terms[m] = terms.get(m, 0) + c1 * c2
        return Polynomial(self.field, self.num_vars, self.degree + other.degree, terms)

    def __rmul__(self, other: Scalar) -> "Polynomial":
        return self.scale(other)

    def __pow__(self, e: int) -> "Polynomial":
        out = Polynomial.constant(self.field, self.num_vars, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.field != other.field or self.num_vars != other.num_vars:
            return False
        if self.is_zero and other.is_zero:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self) -> int:
        if self.is_zero:
            return hash((self.field, self.num_vars))
        return hash((self.field, self.num_vars, self.degree, frozenset(self.terms.items())))

    # text

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        """Render in the ``2*x1^2*x3 + x2*y12`` grammar, terms in coordinate order."""
        if names is None:
            names = [f"x{i + 1}" for i in range(self.num_vars)]
        if len(names) != self.num_vars:
            raise DimensionMismatchError("wrong number of variable names")
        if self.is_zero:
            return "0"
        table = _index_table(self.num_vars, self.degree)
        pieces: List[str] = []
        for mono in sorted(self.terms, key=table.__getitem__):
            c = self.terms[mono]
            negative = self.field.characteristic == 0 and c < 0
            mag = -c if negative else c
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(mono) if e
            ]
            if mag != 1 or not factors:
                factors.insert(0, self.field.format_scalar(mag))
            body = "*".join(factors)
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self.field}, {self.to_text()})"


# Substitution and derivatives


def _as_image(value, field: FieldSpec, num_vars: Optional[int]) -> Polynomial:
    if not isinstance(value, Polynomial):
        value = Polynomial.linear_form(field, list(value))
    if value.field != field:
        raise DimensionMismatchError("substitution image over a different field")
    if value.is_zero:
        return Polynomial.zero(field, value.num_vars, 1)
    if value.degree != 1:
        raise InhomogeneousError(f"substitution image of degree {value.degree} is not linear")
    return value


def substitute(
    f: Polynomial,
    assignment: Union[Mapping[int, object], Sequence[object]],
    num_vars: Optional[int] = None,
) -> Polynomial:
    """
    Replace every variable of f by a linear form.

    ``assignment`` maps variable indices (or lists, by position) to
    linear forms given as Polynomials or coefficient sequences over the
    target variables. Every variable of f needs an image, used or not.
    """
    items = assignment.items() if isinstance(assignment, Mapping) else enumerate(assignment)
    images = {int(i): _as_image(v, f.field, num_vars) for i, v in items}
    stray = sorted(i for i in images if not 0 <= i < f.num_vars)
    if stray:
        raise DimensionMismatchError(f"images for variables {stray} outside 0..{f.num_vars - 1}")
    missing = [i for i in range(f.num_vars) if i not in images]
    if missing:
        raise UnassignedVariableError(f"no image for variables {missing}", variables=missing)
    widths = {img.num_vars for img in images.values()}
    if num_vars is not None:
        widths.add(num_vars)
    if len(widths) > 1:
        raise DimensionMismatchError(f"images live in different variable sets: {sorted(widths)}")
    m = widths.pop() if widths else f.num_vars

    powers: Dict[Tuple[int, int], Polynomial] = {}
    result = Polynomial.zero(f.field, m, f.degree)
    for mono, c in f.terms.items():
        term = Polynomial.constant(f.field, m, c)
        for i, e in enumerate(mono):
            if not e:
                continue
            if (i, e) not in powers:
                powers[(i, e)] = images[i] ** e
            term = term * powers[(i, e)]
        result = result + term
    return result


def partial_derivative(f: Polynomial, var: int) -> Polynomial:
    """Formal derivative; coefficients pick up the exponent reduced in the field."""
    if not 0 <= var < f.num_vars:
        raise DimensionMismatchError(f"variable index {var} out of range")
    if f.degree == 0:
        raise DegreeError("derivative of a constant")
    terms: Dict[Monomial, Scalar] = {}
    for mono, c in f.terms.items():
        e = mono[var]
        if e:
            lowered = list(mono)
            lowered[var] -= 1
            terms[tuple(lowered)] = c * e
    return Polynomial(f.field, f.num_vars, f.degree - 1, terms)


def chart_images(rows: np.ndarray, pivots: Sequence[int], field: FieldSpec) -> np.ndarray:
    """
    Images of x_1..x_n in the quotient by an RREF-presented space of
    linear forms: pivot variables are solved for, free variables become
    the new coordinates. Shape (n, n - k).
    """
    rows = np.asarray(rows)
    k, n = rows.shape
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    images = field.zeros((n, len(free)))
    for t, j in enumerate(free):
        images[j, t] = field.one
        for i, p in enumerate(pivots):
            images[p, t] = field.neg(rows[i, j])
    return images


def _monic_linear(ell, field: FieldSpec, num_vars: int) -> Tuple[np.ndarray, int, Scalar]:
    if isinstance(ell, Polynomial):
        coeffs = list(ell.linear_coefficients())
    else:
        coeffs = [field.scalar(c) for c in ell]
    if len(coeffs) != num_vars:
        raise DimensionMismatchError("linear form over a different variable set")
    pivot = next((j for j, c in enumerate(coeffs) if c != 0), None)
    if pivot is None:
        raise ZeroLinearFormError("linear form is zero")
    lead = coeffs[pivot]
    row = field.array([[field.div(c, lead) for c in coeffs]])
    return row, pivot, lead


def reduce_mod_linear(f: Polynomial, ell) -> Polynomial:
    """
    f modulo (ell), written in the remaining n - 1 variables.

    The first variable with a nonzero coefficient in ell is eliminated;
    the surviving variables keep their relative order.
    """
    row, pivot, _ = _monic_linear(ell, f.field, f.num_vars)
    return substitute_matrix(f, chart_images(row, [pivot], f.field))


def divide_by_linear(f: Polynomial, ell) -> Tuple[Polynomial, Polynomial]:
    """
    Split f = ell * q + rem where rem does not involve the pivot
    variable of ell.
    """
    if f.degree == 0:
        raise DegreeError("cannot divide a constant by a linear form")
    row, pivot, lead = _monic_linear(ell, f.field, f.num_vars)
    field = f.field
    monic = Polynomial.linear_form(field, field.to_tuple(row[0]))
    rem = dict(f.terms)
    quotient: Dict[Monomial, Scalar] = {}
    for level in range(f.degree, 0, -1):
        for mono in [m for m in rem if m[pivot] == level]:
            c = rem.pop(mono)
            lowered = list(mono)
            lowered[pivot] -= 1
            lowered = tuple(lowered)
            quotient[lowered] = field.scalar(quotient.get(lowered, 0) + c)
            for lin_mono, a in monic.terms.items():
                j = lin_mono.index(1)
                if j == pivot:
                    continue
                target = list(lowered)
                target[j] += 1
                target = tuple(target)
                rem[target] = field.scalar(rem.get(target, 0) - c * a)
    q = Polynomial(field, f.num_vars, f.degree - 1, quotient).scale(field.inv(lead))
    return q, Polynomial(field, f.num_vars, f.degree, rem)


def embed(f: Polynomial, num_vars: int, mapping: Sequence[int]) -> Polynomial:
    """Rename variable i of f to mapping[i] inside a set of num_vars variables."""
    if len(mapping) != f.num_vars:
        raise DimensionMismatchError("mapping must name a target for every variable")
    if len(set(mapping)) != len(mapping) or any(not 0 <= j < num_vars for j in mapping):
        raise DimensionMismatchError("mapping must be injective into the target variables")
    terms = {}
    for mono, c in f.terms.items():
        e = [0] * num_vars
        for i, x in enumerate(mono):
            e[mapping[i]] = x
        terms[tuple(e)] = c
    return Polynomial(f.field, num_vars, f.degree, terms)


# Dense maps between graded pieces


@lru_cache(maxsize=None)
def _symmetrization_plan(m: int, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    table = {ms: i for i, ms in enumerate(monomial_multisets(m, degree))}
    target = np.fromiter(
        (table[tuple(sorted(idx))] for idx in itertools.product(range(m), repeat=degree)),
        dtype=np.int64,
        count=m**degree,
    )
    order = np.argsort(target, kind="stable")
    starts = np.searchsorted(target[order], np.arange(len(table)))
    return order, starts


def symmetrize(tensor: np.ndarray, m: int, degree: int, field: FieldSpec) -> np.ndarray:
    """
    Collapse ordered-index coefficients (b, m**d), C order, onto the
    degree-d monomials of m variables (b, C(m + d - 1, d)).
    """
    tensor = np.asarray(tensor)
    b = tensor.shape[0]
    N = monomial_count(m, degree)
    if N == 0 or b == 0:
        return field.zeros((b, N))
    if degree <= 1:
        return field.reduce(tensor)
    order, starts = _symmetrization_plan(m, degree)
    return field.reduce(np.add.reduceat(tensor[:, order], starts, axis=1))


def power_map(images: np.ndarray, degree: int, field: FieldSpec) -> np.ndarray:
    """
    Matrix of S_d(n) -> S_d(m) induced by x_i -> images[i]; row t holds
    the image of the t-th monomial.
    """
    images = field.reduce(np.asarray(images, dtype=field.dtype))
    n, m = images.shape
    if degree == 0:
        out = field.zeros((1, 1))
        out[0, 0] = field.one
        return out
    ms = np.array(monomial_multisets(n, degree), dtype=np.int64).reshape(-1, degree)
    N = ms.shape[0]
    if m == 0 or N == 0:
        return field.zeros((N, monomial_count(m, degree)))
    A = images[ms[:, 0]]
    for t in range(1, degree):
        A = field.reduce((A[:, :, None] * images[ms[:, t]][:, None, :]).reshape(N, -1))
    return symmetrize(A, m, degree, field)


def substitute_batch(f: Polynomial, images: np.ndarray) -> np.ndarray:
    """
    Coefficient vectors of f under a batch of linear substitutions.

    ``images`` has shape (b, n, m): images[t, i] is the image of x_i in
    the t-th substitution. Returns shape (b, C(m + d - 1, d)).
    """
    field = f.field
    images = np.asarray(images)
    b, n, m = images.shape
    if n != f.num_vars:
        raise DimensionMismatchError(f"batch substitutes {n} variables, f has {f.num_vars}")
    d = f.degree
    if d == 0:
        out = field.zeros((b, 1))
        for c in f.terms.values():
            out[:, 0] = c
        return out
    if m == 0:
        return field.zeros((b, 0))
    T = field.zeros((b, m**d))
    for mono, c in f.terms.items():
        idx = exponents_to_multiset(mono)
        A = images[:, idx[0], :]
        for t in idx[1:]:
            A = field.reduce((A[:, :, None] * images[:, t, None, :]).reshape(b, -1))
        T = field.reduce(T + c * A)
    return symmetrize(T, m, d, field)


def substitute_matrix(f: Polynomial, images: np.ndarray) -> Polynomial:
    """substitute() with the images given as an (n, m) coefficient matrix."""
    images = np.asarray(images, dtype=f.field.dtype)
    m = images.shape[1]
    vec = substitute_batch(f, images[None, :, :])[0]
    return Polynomial.from_coefficient_vector(f.field, m, f.degree, vec)
