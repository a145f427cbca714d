"""
Canonical subspace linear algebra over GF(p) and QQ.

Every Subspace is stored by its reduced row-echelon basis, so two
subspaces are equal as sets exactly when their bases are identical.
Grassmannian enumeration walks RREF matrices shard by shard, a shard
being one pivot-column set.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from slicelab.algebra.field import FieldSpec, Scalar
from slicelab.utils.config import settings
from slicelab.utils.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    FieldError,
    NonTrivialIntersectionError,
    NotContainedError,
)

Vector = Tuple[Scalar, ...]


def rref(matrix: np.ndarray, field: FieldSpec) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row-echelon form by Gauss-Jordan elimination.

    Returns the nonzero rows of the RREF and the pivot column of each row.
    """
    M = field.reduce(np.array(matrix, dtype=field.dtype, copy=True))
    if M.ndim != 2:
        raise DimensionMismatchError("rref expects a 2-d matrix")
    nrows, ncols = M.shape
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        candidates = np.nonzero(M[r:, c])[0]
        if candidates.size == 0:
            continue
        i = r + int(candidates[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = field.inv(M[r, c])
        M[r] = field.reduce(M[r] * inv)
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        if others.size:
            M[others] = field.reduce(M[others] - np.outer(M[others, c], M[r]))
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(matrix: np.ndarray, field: FieldSpec) -> int:
    if np.asarray(matrix).size == 0:
        return 0
    return len(rref(matrix, field)[1])


def nullspace(matrix: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Basis (as rows) of the right kernel {x : M x = 0}."""
    M = np.asarray(matrix)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        out = field.zeros((ncols, ncols))
        for j in range(ncols):
            out[j, j] = field.one
        return out
    R, pivots = rref(M, field)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    out = field.zeros((len(free), ncols))
    for t, j in enumerate(free):
        out[t, j] = field.one
        for i, p in enumerate(pivots):
            out[t, p] = field.neg(R[i, j])
    return out


def left_kernel(matrix: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Basis (as rows) of {y : y M = 0}."""
    M = np.asarray(matrix)
    if M.shape[1] == 0:
        return nullspace(field.zeros((0, M.shape[0])), field)
    return nullspace(M.T, field)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of field^ambient_dim, stored as its RREF basis."""

    field: FieldSpec
    ambient_dim: int
    basis: Tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_zero(self) -> bool:
        return not self.basis

    @cached_property
    def matrix(self) -> np.ndarray:
        if not self.basis:
            return self.field.zeros((0, self.ambient_dim))
        return self.field.array(self.basis)

    @cached_property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x != 0) for row in self.basis)

    def sort_key(self) -> tuple:
        return (self.dim, self.pivots, self.basis)

    def rows(self) -> List[List[Scalar]]:
        return [list(row) for row in self.basis]

    @classmethod
    def zero(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, ())

    @classmethod
    def full(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls.coordinate(field, ambient_dim, range(ambient_dim))

    @classmethod
    def coordinate(cls, field: FieldSpec, ambient_dim: int, indices: Sequence[int]) -> "Subspace":
        """Span of the given standard basis vectors."""
        rows = []
        for i in sorted(set(indices)):
            row = [field.zero] * ambient_dim
            row[i] = field.one
            rows.append(tuple(row))
        return cls(field, ambient_dim, tuple(rows))

    @classmethod
    def from_rref(cls, field: FieldSpec, ambient_dim: int, R: np.ndarray) -> "Subspace":
        """Wrap a matrix already known to be in RREF."""
        return cls(field, ambient_dim, tuple(field.to_tuple(row) for row in R))

    def contains(self, other) -> bool:
        """Membership of a vector, or containment of a Subspace."""
        if isinstance(other, Subspace):
            _check_compatible(self, other)
            if other.dim > self.dim:
                return False
            return span_sum(self, other).dim == self.dim
        vec = self.field.array([other])
        if vec.shape[1] != self.ambient_dim:
            raise DimensionMismatchError("vector length differs from ambient dimension")
        stacked = np.vstack([self.matrix, vec]) if self.dim else vec
        return rank(stacked, self.field) == self.dim


def rref_canonicalize(rows: Sequence[Sequence], field: FieldSpec, ambient_dim: int) -> Subspace:
    """Canonical Subspace spanned by the given rows."""
    rows = [list(r) for r in rows]
    for r in rows:
        if len(r) != ambient_dim:
            raise DimensionMismatchError(
                f"row of length {len(r)} in ambient dimension {ambient_dim}",
            )
    if not rows:
        return Subspace.zero(field, ambient_dim)
    R, _ = rref(field.array(rows), field)
    return Subspace.from_rref(field, ambient_dim, R)


def span_of_matrix(M: np.ndarray, field: FieldSpec, ambient_dim: int) -> Subspace:
    if M.shape[0] == 0:
        return Subspace.zero(field, ambient_dim)
    R, _ = rref(M, field)
    return Subspace.from_rref(field, ambient_dim, R)


def _check_compatible(A: Subspace, B: Subspace):
    if A.field != B.field:
        raise DimensionMismatchError(f"field mismatch: {A.field} vs {B.field}")
    if A.ambient_dim != B.ambient_dim:
        raise DimensionMismatchError(f"ambient mismatch: {A.ambient_dim} vs {B.ambient_dim}")


def span_sum(A: Subspace, B: Subspace) -> Subspace:
    _check_compatible(A, B)
    if A.is_zero:
        return B
    if B.is_zero:
        return A
    return span_of_matrix(np.vstack([A.matrix, B.matrix]), A.field, A.ambient_dim)


def span_intersect(A: Subspace, B: Subspace) -> Subspace:
    """A ∩ B from the kernel of the stacked bases."""
    _check_compatible(A, B)
    field = A.field
    if A.is_zero or B.is_zero:
        return Subspace.zero(field, A.ambient_dim)
    K = left_kernel(np.vstack([A.matrix, B.matrix]), field)
    if K.shape[0] == 0:
        return Subspace.zero(field, A.ambient_dim)
    vectors = field.reduce(K[:, : A.dim].dot(A.matrix))
    return span_of_matrix(vectors, field, A.ambient_dim)


def annihilator(S: Subspace) -> Subspace:
    """Vectors u with <s, u> = 0 for all s in S."""
    if S.is_zero:
        return Subspace.full(S.field, S.ambient_dim)
    return span_of_matrix(nullspace(S.matrix, S.field), S.field, S.ambient_dim)


def complement_through(Q: Subspace, A: Subspace, T: Subspace) -> Subspace:
    """
    Pick C with A ⊕ C = Q and T ⊆ C.

    Requires A ⊆ Q, T ⊆ Q and A ∩ T = 0. C is grown from T by adding
    basis vectors of Q that stay independent of A + C.
    """
    _check_compatible(Q, A)
    _check_compatible(Q, T)
    if not Q.contains(A):
        raise NotContainedError("A is not contained in Q", which="A")
    if not Q.contains(T):
        raise NotContainedError("T is not contained in Q", which="T")
    if not span_intersect(A, T).is_zero:
        raise NonTrivialIntersectionError("A and T intersect nontrivially")

    field = Q.field
    chosen = [row for row in T.basis]
    current = rank(np.vstack([A.matrix, T.matrix]), field) if (A.dim + T.dim) else 0
    for row in Q.basis:
        if current == Q.dim:
            break
        trial = field.array([*A.basis, *chosen, row])
        r = rank(trial, field)
        if r > current:
            chosen.append(row)
            current = r
    return rref_canonicalize(chosen, field, Q.ambient_dim)


# Grassmannian enumeration


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def grassmannian_shards(n: int, k: int) -> List[Tuple[int, ...]]:
    """Pivot-column sets of k-subspaces of an n-space, in lexicographic order."""
    return list(itertools.combinations(range(n), k))


def free_positions(n: int, pivots: Sequence[int]) -> List[Tuple[int, int]]:
    """Entries of an RREF matrix with these pivots that may take any value, row-major."""
    pivot_set = set(pivots)
    return [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivot_set]


def shard_size(n: int, pivots: Sequence[int], q: int) -> int:
    return q ** len(free_positions(n, pivots))


def _pivot_template(n: int, pivots: Sequence[int]) -> np.ndarray:
    T = np.zeros((len(pivots), n), dtype=np.int64)
    for i, p in enumerate(pivots):
        T[i, p] = 1
    return T


def enumerate_shard(n: int, k: int, field: FieldSpec, pivots: Sequence[int]) -> Iterator[Subspace]:
    """All k-subspaces with the given pivot set, free entries in lexicographic order."""
    if len(pivots) != k:
        raise DimensionMismatchError("pivot set size differs from k")
    q = field.order
    positions = free_positions(n, pivots)
    template = _pivot_template(n, pivots)
    for values in itertools.product(range(q), repeat=len(positions)):
        M = template.copy()
        for (i, j), v in zip(positions, values):
            M[i, j] = v
        yield Subspace.from_rref(field, n, M)


def shard_batches(
    n: int,
    pivots: Sequence[int],
    q: int,
    chunk_size: int,
    start: int = 0,
    stop: Optional[int] = None,
) -> Iterator[np.ndarray]:
    """
    The RREF matrices of one shard as int64 arrays of shape (b, k, n),
    in the same order as enumerate_shard. ``start``/``stop`` select a
    slice of that order.
    """
    positions = free_positions(n, pivots)
    template = _pivot_template(n, pivots)
    F = len(positions)
    total = q**F if stop is None else min(stop, q**F)
    rows = np.array([i for i, _ in positions], dtype=np.int64)
    cols = np.array([j for _, j in positions], dtype=np.int64)
    place = q ** np.arange(F - 1, -1, -1, dtype=np.int64)
    for lo in range(start, total, chunk_size):
        t = np.arange(lo, min(lo + chunk_size, total), dtype=np.int64)
        batch = np.broadcast_to(template, (t.size, *template.shape)).copy()
        if F:
            digits = (t[:, None] // place[None, :]) % q
            batch[:, rows, cols] = digits
        yield batch


def enumerate_subspaces(
    ambient_dim: int, dim: int, field: FieldSpec, max_count: Optional[int] = None
) -> Iterator[Subspace]:
    """
    Every dim-subspace of F_q^ambient_dim exactly once, in (pivot set,
    free entries) lexicographic order. The budget is checked before the
    first subspace is produced.
    """
    if not field.is_finite:
        raise FieldError("Subspace enumeration needs a finite field")
    if not 0 <= dim <= ambient_dim:
        raise DimensionMismatchError(f"need 0 <= k <= n, got k={dim}, n={ambient_dim}")
    if max_count is None:
        max_count = settings.max_visits
    count = gaussian_binomial(ambient_dim, dim, field.order)
    if count > max_count:
        raise BudgetExceededError(
            f"{count} subspaces exceed the cap of {max_count}", requested=count, cap=max_count
        )

    def _walk() -> Iterator[Subspace]:
        for pivots in grassmannian_shards(ambient_dim, dim):
            yield from enumerate_shard(ambient_dim, dim, field, pivots)

    return _walk()
