"""
Fixture service for slicelab

Normal-form configurations, the f_n family, the rank-3 case table and
seeded random generators for the verification suites.
"""

import math
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from slicelab.algebra.field import FieldSpec
from slicelab.algebra.idealcalc import GradedSubspace, LinearIdealFamily, common_intersection
from slicelab.algebra.linalg import Subspace, rank, rref_canonicalize, span_sum
from slicelab.algebra.polyalg import Polynomial, monomial_count
from slicelab.models.verify import FixtureConfig
from slicelab.utils.config import settings
from slicelab.utils.errors import (
    DegreeError,
    HypothesisViolationError,
    InputError,
    ResampleCapError,
    UnknownFixtureError,
)

# Random family caps
MAX_MEMBERS = 8
MAX_RANK = 6
MAX_AMBIENT = 16


# Variable names


def fn_variable_names(n: int) -> List[str]:
    """x1..xn then y_ij for i < j in lex order."""
    sep = "" if n < 10 else "_"
    return [f"x{i}" for i in range(1, n + 1)] + [
        f"y{i}{sep}{j}" for i, j in combinations(range(1, n + 1), 2)
    ]


def lemma22_variable_names(r: int, k: int) -> List[str]:
    return (
        [f"x{i}" for i in range(1, r + 1)]
        + [f"y{i}" for i in range(1, r + 1)]
        + [f"z{i}" for i in range(1, r - k + 1)]
    )


def c3_variable_names(n: int) -> List[str]:
    return [f"x{i}" for i in range(1, n + 1)]


def _unit(n: int, *indices: int) -> List[int]:
    """Sum of the given 1-based coordinate vectors."""
    row = [0] * n
    for i in indices:
        row[i - 1] += 1
    return row


def _span(field: FieldSpec, n: int, *rows: Sequence[int]) -> Subspace:
    return rref_canonicalize(rows, field, n)


# Constructive fixtures


def build_lemma22_config(r: int, k: int, field: FieldSpec) -> LinearIdealFamily:
    """
    P1 = <x1..xr>, P2 = <y1..yr>, P3 = <x1+y1, .., xk+yk, z1..z_(r-k)>
    in n = 3r - k variables, ordered x, y, z.
    """
    if not 0 <= k <= r:
        raise DegreeError(f"need 0 <= k <= r, got r={r}, k={k}")
    n = 3 * r - k
    # 1-based positions: x_i -> i, y_i -> r + i, z_i -> 2r + i
    P1 = _span(field, n, *(_unit(n, i) for i in range(1, r + 1)))
    P2 = _span(field, n, *(_unit(n, r + i) for i in range(1, r + 1)))
    P3 = _span(
        field,
        n,
        *(_unit(n, i, r + i) for i in range(1, k + 1)),
        *(_unit(n, 2 * r + i) for i in range(1, r - k + 1)),
    )
    return LinearIdealFamily(field, n, (P1, P2, P3))


def segre_triple(k: int, field: FieldSpec) -> LinearIdealFamily:
    """(x1..xk), (y1..yk), (x1+y1..xk+yk) in 2k variables."""
    return build_lemma22_config(k, k, field)


def segre_minor_span(k: int, field: FieldSpec) -> GradedSubspace:
    """Span of the 2x2 minors x_i*y_j - x_j*y_i inside S_2 of x1..xk, y1..yk."""
    if k < 1:
        raise DegreeError(f"k must be positive, got {k}")
    n = 2 * k
    minors = []
    for i, j in combinations(range(k), 2):
        xi_yj = [0] * n
        xi_yj[i] += 1
        xi_yj[k + j] += 1
        xj_yi = [0] * n
        xj_yi[j] += 1
        xj_yi[k + i] += 1
        minors.append(Polynomial(field, n, 2, {tuple(xi_yj): 1, tuple(xj_yi): -1}))
    return GradedSubspace.span_of(minors, field, n, 2)


def build_fn(n: int, field: FieldSpec) -> Polynomial:
    """f_n = Σ_{i<j} x_i x_j y_ij in n + C(n,2) variables."""
    if n < 2:
        raise DegreeError(f"f_n needs n >= 2, got {n}")
    total = n + math.comb(n, 2)
    terms = {}
    for t, (i, j) in enumerate(combinations(range(n), 2)):
        e = [0] * total
        e[i] = e[j] = 1
        e[n + t] = 1
        terms[tuple(e)] = 1
    return Polynomial(field, total, 3, terms)


def fn_restriction_images(n: int, coeffs: Sequence[int], field: FieldSpec) -> Dict[int, List]:
    """
    Images in f_n's own variables for x_n -> Σ c_i x_i and y_in -> 0;
    every other variable is fixed.
    """
    total = n + math.comb(n, 2)
    images: Dict[int, List] = {}
    for v in range(total):
        row = [0] * total
        row[v] = 1
        images[v] = row
    images[n - 1] = list(coeffs) + [0] * (total - n + 1)
    for t, (i, j) in enumerate(combinations(range(n), 2)):
        if j == n - 1:
            images[n + t] = [0] * total
    return images


def fn_embedding(n: int) -> List[int]:
    """Indices of f_(n-1)'s variables inside f_n's variable list."""
    old_pairs = list(combinations(range(n - 1), 2))
    new_pairs = {p: t for t, p in enumerate(combinations(range(n), 2))}
    return list(range(n - 1)) + [n + new_pairs[p] for p in old_pairs]


# Rank-3 case table: (members as lists of rows, n, expected count, provenance, containment)
def _c3_cases() -> Dict[str, Tuple[List[List[List[int]]], int, int, str, Optional[List[int]]]]:
    def P1(n):
        return [_unit(n, 1), _unit(n, 2), _unit(n, 3)]

    def P2(n):
        return [_unit(n, 4), _unit(n, 5), _unit(n, 6)]

    return {
        "1b": (
            [P1(8), P2(8), [_unit(8, 1), _unit(8, 7), _unit(8, 8)]],
            8, 3, "rank-3 case 1.b: generators x1x4, x1x5, x1x6", None,
        ),
        "1c": (
            [P1(7), P2(7), [_unit(7, 1), _unit(7, 2, 4), _unit(7, 7)]],
            7, 3, "rank-3 case 1.c: I has 3 quadratic generators", None,
        ),
        "1d": (
            [P1(7), P2(7), [_unit(7, 1), _unit(7, 4), _unit(7, 7)]],
            7, 5, "rank-3 case 1.d: generators x1x4, x1x5, x1x6, x2x4, x3x4", None,
        ),
        "1e": (
            [P1(7), P2(7), [_unit(7, 1), _unit(7, 2), _unit(7, 7)]],
            7, 6, "rank-3 case 1.e: 6 quadratic generators, all in (x1, x2)", [1, 2],
        ),
        "1e_i": (
            [P1(8), P2(8), [_unit(8, 1), _unit(8, 2), _unit(8, 7)], [_unit(8, 4), _unit(8, 5), _unit(8, 8)]],
            8, 4, "rank-3 case 1.e.(i): 4 quadratic generators", None,
        ),
        "case2": (
            [[_unit(6, 1), _unit(6, 2), _unit(6, 3)], [_unit(6, 1), _unit(6, 4), _unit(6, 5)],
             [_unit(6, 2), _unit(6, 4), _unit(6, 6)]],
            6, 6, "rank-3 case 2: 6 quadratic generators", None,
        ),
    }


C3_CASE_IDS = ("1b", "1c", "1d", "1e", "1e_i", "case2")


def c3_fixture(case_id: str, field: Optional[FieldSpec] = None) -> FixtureConfig:
    """The coordinate configuration of one rank-3 case with its generator count."""
    cases = _c3_cases()
    if case_id not in cases:
        raise UnknownFixtureError(f"unknown rank-3 case {case_id!r}; known: {', '.join(C3_CASE_IDS)}")
    field = field or FieldSpec.parse(settings.default_field)
    blocks, n, expected, provenance, contain = cases[case_id]
    family = LinearIdealFamily.from_rows(field, n, blocks)
    containment = Subspace.coordinate(field, n, [i - 1 for i in contain]) if contain else None
    return FixtureConfig(
        id=f"c3:{case_id}",
        family=family,
        variable_names=c3_variable_names(n),
        expected=expected,
        provenance=provenance,
        containment=containment,
    )


def get_fixture(fixture_id: str, field: Optional[FieldSpec] = None) -> FixtureConfig:
    """
    Look up a fixture by id: ``c3:<case>``, ``lemma22:r<r>k<k>``, ``fn:<n>``.
    """
    field = field or FieldSpec.parse(settings.default_field)
    kind, _, arg = fixture_id.partition(":")
    try:
        if kind == "c3":
            return c3_fixture(arg, field)
        if kind == "lemma22":
            r_text, _, k_text = arg[1:].partition("k")
            r, k = int(r_text), int(k_text)
            return FixtureConfig(
                id=fixture_id,
                family=build_lemma22_config(r, k, field),
                variable_names=lemma22_variable_names(r, k),
                expected=math.comb(k, 2),
                provenance="normal-form triple: dim I_2 = C(k,2)",
            )
        if kind == "fn":
            n = int(arg)
            return FixtureConfig(
                id=fixture_id,
                polynomial=build_fn(n, field),
                variable_names=fn_variable_names(n),
                expected={"rank": n - 1, "l_dim": n + math.comb(n, 2)},
                provenance="test cubic f_n: rank n-1, dim L_f = n + C(n,2)",
            )
    except ValueError as e:
        raise UnknownFixtureError(f"malformed fixture id {fixture_id!r}") from e
    raise UnknownFixtureError(f"unknown fixture {fixture_id!r}")


# Pairwise-intersection lemma


def check_pairwise_lemma(collection: Sequence[Subspace]) -> str:
    """
    For 3-dimensional spaces meeting pairwise in dimension 2, report which
    alternative holds: "core" (common intersection of dim >= 2),
    "envelope" (sum of dim <= 4) or "neither".
    """
    if not collection:
        raise HypothesisViolationError("empty collection")
    for P in collection:
        if P.dim != 3:
            raise HypothesisViolationError(f"member of dimension {P.dim}, expected 3")
    for A, B in combinations(collection, 2):
        meet = A.dim + B.dim - span_sum(A, B).dim
        if meet != 2:
            raise HypothesisViolationError(f"two members meet in dimension {meet}, expected 2")
    family = LinearIdealFamily(collection[0].field, collection[0].ambient_dim, tuple(collection))
    if common_intersection(family).dim >= 2:
        return "core"
    if family.span().dim <= 4:
        return "envelope"
    return "neither"


# Random generators


def random_full_rank(rng: np.random.Generator, rows: int, cols: int, field: FieldSpec) -> np.ndarray:
    """Uniform random matrix of full row rank, by rejection."""
    for _ in range(settings.resample_cap):
        M = field.random_array(rng, (rows, cols))
        if rank(M, field) == rows:
            return M
    raise ResampleCapError(f"no full-rank {rows}x{cols} matrix in {settings.resample_cap} draws")


def random_invertible(rng: np.random.Generator, n: int, field: FieldSpec) -> np.ndarray:
    return random_full_rank(rng, n, n, field)


def transform_subspace(P: Subspace, A: np.ndarray) -> Subspace:
    """Image of P under v -> v A."""
    if P.is_zero:
        return P
    return rref_canonicalize(P.field.reduce(P.matrix.dot(A)).tolist(), P.field, P.ambient_dim)


def random_family(
    seed,
    s: int,
    r: int,
    n: int,
    field: FieldSpec,
    force_trivial_intersection: bool = False,
    resample_cap: Optional[int] = None,
) -> LinearIdealFamily:
    """
    Deterministic random family for a seed: each member takes a uniform
    dimension in [1, r] and a uniform random matrix of that many rows.
    With force_trivial_intersection, whole families are redrawn until
    the members meet in zero.
    """
    if not (1 <= s <= MAX_MEMBERS and 1 <= r <= MAX_RANK and 1 <= n <= MAX_AMBIENT):
        raise InputError(
            f"family parameters outside caps: s<={MAX_MEMBERS}, r<={MAX_RANK}, n<={MAX_AMBIENT}",
            s=s, r=r, n=n,
        )
    cap = settings.resample_cap if resample_cap is None else resample_cap
    rng = np.random.default_rng(seed)
    for _ in range(cap):
        members = []
        for _ in range(s):
            d = int(rng.integers(1, r + 1))
            M = field.random_array(rng, (d, n))
            members.append(rref_canonicalize(M.tolist(), field, n))
        members = [P for P in members if not P.is_zero] or [Subspace.coordinate(field, n, [0])]
        family = LinearIdealFamily(field, n, tuple(members))
        if not force_trivial_intersection or common_intersection(family).is_zero:
            return family
    raise ResampleCapError(
        f"no family with trivial intersection after {cap} draws", s=s, r=r, n=n
    )


def random_pairwise_collection(seed, field: FieldSpec, max_ambient: int = 8) -> Tuple[List[Subspace], str]:
    """
    3-dimensional spaces meeting pairwise in dimension 2, from one of two
    regimes picked with equal probability: a 2-dimensional core plus one
    vector each, or 3-dimensional subspaces of a 4-dimensional envelope.
    A random change of coordinates is applied at the end.

    Returns the collection and the regime it was built from.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, max_ambient + 1))
    size = int(rng.integers(3, 6))
    regime = "core" if rng.integers(0, 2) == 0 else "envelope"
    members: List[Subspace] = []
    if regime == "core":
        core = random_full_rank(rng, 2, n, field)
        attempts = 0
        while len(members) < size and attempts < settings.resample_cap:
            attempts += 1
            v = field.random_array(rng, (1, n))
            stacked = np.vstack([core, v])
            if rank(stacked, field) < 3:
                continue
            P = rref_canonicalize(stacked.tolist(), field, n)
            if P not in members:
                members.append(P)
    else:
        envelope = random_full_rank(rng, 4, n, field)
        attempts = 0
        while len(members) < size and attempts < settings.resample_cap:
            attempts += 1
            coords = field.random_array(rng, (3, 4))
            if rank(coords, field) < 3:
                continue
            P = rref_canonicalize(field.reduce(coords.dot(envelope)).tolist(), field, n)
            if P not in members:
                members.append(P)
    A = random_invertible(rng, n, field)
    return [transform_subspace(P, A) for P in members], regime


def random_rank1_cubic(rng: np.random.Generator, n: int, field: FieldSpec) -> Polynomial:
    """ℓ * q with random ℓ and q, redrawn until nonzero."""
    for _ in range(settings.resample_cap):
        ell = Polynomial.linear_form(field, field.random_array(rng, (n,)).tolist())
        q = random_form(rng, n, 2, field)
        f = ell * q
        if not f.is_zero:
            return f
    raise ResampleCapError("no nonzero rank-1 cubic drawn")


def random_form(rng: np.random.Generator, n: int, degree: int, field: FieldSpec) -> Polynomial:
    vec = field.random_array(rng, (monomial_count(n, degree),))
    return Polynomial.from_coefficient_vector(field, n, degree, vec.tolist())


def random_slice_sum(rng: np.random.Generator, n: int, terms: int, field: FieldSpec) -> Polynomial:
    """Σ ℓ_i q_i over ``terms`` random pairs."""
    f = Polynomial.zero(field, n, 3)
    for _ in range(terms):
        ell = Polynomial.linear_form(field, field.random_array(rng, (n,)).tolist())
        f = f + ell * random_form(rng, n, 2, field)
    return f


def sample_from_graded(G: GradedSubspace, rng: np.random.Generator) -> Polynomial:
    """Uniform random element of a graded subspace."""
    field = G.field
    if G.dim == 0:
        return Polynomial.zero(field, G.num_vars, G.degree)
    coefs = field.random_array(rng, (G.dim,))
    vec = field.reduce(coefs.dot(G.space.matrix))
    return Polynomial.from_coefficient_vector(field, G.num_vars, G.degree, vec.tolist())
