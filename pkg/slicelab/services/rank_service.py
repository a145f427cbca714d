"""
Slice rank service for slicelab

slice_rank, the set of minimal subspaces, L_f and the bound checks that
can be read off an L_f report.
"""

import itertools
import math
import time
from fractions import Fraction
from typing import List, Optional, Tuple

from slicelab.algebra.idealcalc import (
    LinearIdealFamily,
    essential_variable_count,
    ideal_membership,
    intersect_family_graded,
    quadratic_generator_count,
)
from slicelab.algebra.linalg import Subspace, span_intersect, span_sum
from slicelab.algebra.polyalg import Polynomial, divide_by_linear, reduce_mod_linear
from slicelab.models.rank import (
    BoundProfile,
    LfAnalysis,
    LfReport,
    SearchBudget,
    SearchStats,
    SliceCertificate,
)
from slicelab.services.search_service import SearchService
from slicelab.utils.errors import BudgetExceededError, DegreeError, FieldError
from slicelab.utils.logging import falsification_tracker, logger


def bound_profile(r: int) -> BoundProfile:
    """Exact rank-r bounds: n(r), both lower bounds for c(r), r(r+3)/2 and (r+1)^2/4 + r."""
    if r < 0:
        raise DegreeError(f"rank must be non-negative, got {r}")
    quarter = Fraction((r + 1) ** 2, 4)
    return BoundProfile(
        r=r,
        n_of_r=r * r + quarter + r,
        c_lower_intro=math.comb(r + 1, 2) + r,
        c_lower_fn=math.comb(r + 1, 2) + r + 1,
        estimate_r33=Fraction(r * (r + 3), 2),
        # dim W + C(k,2) peaks at k = 0 (3r) or k = r (r(r+3)/2); they agree at r = 3
        disjoint_triple_vars=max(Fraction(3 * r), Fraction(r * (r + 3), 2)),
        kp36_bound=quarter + r,
    )


def decompose(f: Polynomial, P: Subspace) -> List[Tuple[Polynomial, Polynomial]]:
    """
    Write f = Σ ℓ_i q_i with ℓ_i the RREF rows of P.

    Raises AssertionError if f is not in (P).
    """
    pairs = []
    rest = f
    for row in P.basis:
        ell = Polynomial.linear_form(f.field, row)
        q, rest = divide_by_linear(rest, ell)
        pairs.append((ell, q))
    assert rest.is_zero, "f is not in the ideal of the witness"
    return pairs


def _check_cubic(f: Polynomial):
    if not f.field.is_finite:
        raise FieldError("Slice rank is searched over finite fields only")
    if f.degree != 3 and not f.is_zero:
        raise DegreeError(f"slice rank search expects a cubic, got degree {f.degree}")


class RankService:
    """Service for slice rank and L_f computations."""

    @staticmethod
    def slice_rank(f: Polynomial, budget: Optional[SearchBudget] = None) -> SliceCertificate:
        """
        Minimal r with f in an ideal generated by r linear forms.

        Ranks are searched in increasing order; the first witness found
        at rank r is final because every smaller rank was exhausted.

        Args:
            f: Homogeneous cubic over a finite prime field
            budget: Search limits (defaults from settings)

        Returns:
            SliceCertificate with witness and decomposition

        Raises:
            BudgetExceededError: carries ranks_excluded
        """
        _check_cubic(f)
        budget = budget or SearchBudget()
        started = time.monotonic()
        stats = SearchStats()
        for k in range(f.num_vars + 1):
            scan = SearchService.scan_dimension(f, k, "first", budget, stats.visited, started)
            stats = stats.merge(scan.stats)
            if scan.witnesses:
                witness = scan.witnesses[0]
                stats = stats.model_copy(update={"wall_time": time.monotonic() - started})
                logger.log_search_event("rank_found", f.num_vars, k, str(f.field), visited=stats.visited)
                return SliceCertificate(
                    f=f,
                    field=f.field,
                    rank=k,
                    witness=witness,
                    decomposition=decompose(f, witness),
                    ranks_excluded=k - 1,
                    stats=stats,
                )
            logger.log_search_event("rank_excluded", f.num_vars, k, str(f.field), visited=stats.visited)
        raise AssertionError("the full space always contains f")

    @staticmethod
    def minimal_spaces(
        f: Polynomial, r: int, budget: Optional[SearchBudget] = None
    ) -> List[Subspace]:
        """Every r-dimensional P with f ∈ (P), in canonical order."""
        _check_cubic(f)
        scan = SearchService.scan_dimension(f, r, "all", budget or SearchBudget())
        return sorted(scan.witnesses, key=Subspace.sort_key)

    @staticmethod
    def l_space(f: Polynomial, budget: Optional[SearchBudget] = None) -> LfReport:
        """
        Rank, minimal spaces and their span L_f in one pass.

        Each rank is scanned completely, so the first rank with witnesses
        yields both r and the whole set of minimal spaces.
        """
        _check_cubic(f)
        budget = budget or SearchBudget()
        started = time.monotonic()
        stats = SearchStats()
        for k in range(f.num_vars + 1):
            scan = SearchService.scan_dimension(f, k, "all", budget, stats.visited, started)
            stats = stats.merge(scan.stats)
            if scan.witnesses:
                break
        stats = stats.model_copy(update={"wall_time": time.monotonic() - started})
        spaces = sorted(scan.witnesses, key=Subspace.sort_key)

        L = Subspace.zero(f.field, f.num_vars)
        for P in spaces:
            L = span_sum(L, P)
        bound = bound_profile(k).n_of_r
        certificate = SliceCertificate(
            f=f,
            field=f.field,
            rank=k,
            witness=spaces[0],
            decomposition=decompose(f, spaces[0]),
            ranks_excluded=k - 1,
            stats=stats,
        )
        report = LfReport(
            f=f,
            field=f.field,
            rank=k,
            minimal_spaces=spaces,
            l_space=L,
            l_dim=L.dim,
            bound_nr=bound,
            within_bound=L.dim <= bound,
            certificate=certificate,
            search_stats=stats,
        )
        if not report.within_bound:
            falsification_tracker.track("boundA", f.to_text(), f"l_dim <= {bound}", L.dim)
        logger.log_search_event(
            "l_space", f.num_vars, k, str(f.field), minimal_spaces=len(spaces), l_dim=L.dim
        )
        return report

    @staticmethod
    def analyze_report(report: LfReport, essential_budget: Optional[int] = None) -> LfAnalysis:
        """
        Bound checks on a computed set of minimal spaces.

        A greedy irredundant subcollection is taken in canonical order:
        a member is kept when it shrinks the running intersection, and
        the scan stops once the intersection is zero.
        """
        r = report.rank
        spaces = report.minimal_spaces
        profile = bound_profile(r)

        common = spaces[0]
        for P in spaces[1:]:
            common = span_intersect(common, P)

        chosen: List[Subspace] = [spaces[0]]
        running = spaces[0]
        for P in spaces[1:]:
            if running.is_zero:
                break
            meet = span_intersect(running, P)
            if meet.dim < running.dim:
                chosen.append(P)
                running = meet
        trivial = running.is_zero

        family = LinearIdealFamily(report.field, report.f.num_vars, tuple(chosen))
        W = family.span()
        i2_dim = intersect_family_graded(family, 2).dim
        if trivial:
            i2_ok = i2_dim <= r * r
        else:
            i2_ok = quadratic_generator_count(family) <= r * r

        try:
            essential, _ = essential_variable_count(report.f, max_visits=essential_budget)
        except BudgetExceededError:
            essential = None

        triple = RankService.has_disjoint_triple(spaces)
        return LfAnalysis(
            rank=r,
            common_dim=common.dim,
            irredundant=chosen,
            w_dim=W.dim,
            kp36_bound=profile.kp36_bound,
            kp36_ok=(W.dim <= profile.kp36_bound) if trivial else None,
            i2_dim=i2_dim,
            i2_ok=i2_ok,
            essential_vars=essential,
            qdec_ok=(essential <= W.dim + i2_dim) if (trivial and essential is not None) else None,
            disjoint_triple=triple,
            lemma41_ok=(essential <= profile.disjoint_triple_vars) if (triple and essential is not None) else None,
        )

    @staticmethod
    def has_disjoint_triple(spaces: List[Subspace]) -> bool:
        """Whether three members meet pairwise in zero."""
        m = len(spaces)
        disjoint = [[False] * m for _ in range(m)]
        for i, j in itertools.combinations(range(m), 2):
            d = span_sum(spaces[i], spaces[j]).dim
            disjoint[i][j] = disjoint[j][i] = d == spaces[i].dim + spaces[j].dim
        for i, j in itertools.combinations(range(m), 2):
            if not disjoint[i][j]:
                continue
            if any(disjoint[i][t] and disjoint[j][t] for t in range(j + 1, m)):
                return True
        return False

    @staticmethod
    def reduce_along_common_line(
        report: LfReport, budget: Optional[SearchBudget] = None
    ) -> Optional[Tuple[Polynomial, LfReport]]:
        """
        When all minimal spaces share a nonzero ℓ, return f mod ℓ and its
        report; then dim L_f = 1 + dim L_(f mod ℓ). None if they share nothing.
        """
        common = report.minimal_spaces[0]
        for P in report.minimal_spaces[1:]:
            common = span_intersect(common, P)
        if common.is_zero:
            return None
        g = reduce_mod_linear(report.f, common.basis[0])
        return g, RankService.l_space(g, budget)

    @staticmethod
    def verify_certificate(cert: SliceCertificate) -> bool:
        """Witness membership and exact decomposition."""
        if not ideal_membership(cert.f, cert.witness):
            return False
        total = Polynomial.zero(cert.f.field, cert.f.num_vars, cert.f.degree)
        for ell, q in cert.decomposition:
            if not cert.witness.contains(ell.linear_coefficients()):
                return False
            total = total + ell * q
        return total == cert.f
