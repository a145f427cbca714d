"""
Verification service for slicelab

Each suite is a list of independent cases. Seeded cases are derived from
(seed, case index) so a verdict does not depend on how cases are spread
over workers.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from slicelab.algebra.field import GF2, GF3, GF5, QQ
from slicelab.algebra.idealcalc import (
    LinearIdealFamily,
    brute_force_graded_intersection_oracle,
    common_intersection,
    contains_graded,
    essential_variable_count,
    intersect_family_graded,
    linear_ideal_graded,
    quadratic_generator_count,
)
from slicelab.algebra.linalg import gaussian_binomial
from slicelab.algebra.polyalg import Polynomial, embed, substitute
from slicelab.models.rank import LfReport, SearchBudget
from slicelab.models.verify import Falsification, SuiteVerdict
from slicelab.services.fixture_service import (
    C3_CASE_IDS,
    build_fn,
    build_lemma22_config,
    c3_fixture,
    check_pairwise_lemma,
    fn_embedding,
    fn_restriction_images,
    random_family,
    random_pairwise_collection,
    random_rank1_cubic,
    random_slice_sum,
    sample_from_graded,
    segre_minor_span,
    segre_triple,
)
from slicelab.services.rank_service import RankService, bound_profile
from slicelab.utils.config import settings
from slicelab.utils.errors import BudgetExceededError, ResampleCapError, UnknownSuiteError
from slicelab.utils.logging import falsification_tracker, logger


@dataclass
class CaseResult:
    """One checked case; ``skipped`` carries the reason when it did not run."""

    case_id: str
    expected: Any = None
    observed: Any = None
    ok: bool = True
    skipped: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)


def _map_cases(fn: Callable[[tuple], CaseResult], args: List[tuple], workers: int) -> List[CaseResult]:
    """Run cases in order, on a process pool when more than one worker is allowed."""
    if workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    chunksize = max(1, len(args) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args, chunksize=chunksize))


def _serial(budget: SearchBudget) -> SearchBudget:
    return budget.model_copy(update={"workers": 1, "checkpoint_url": None})


def _case_rng(seed: int, index: int, salt: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, index, salt])


# Family suites


def _lemma22_case(args) -> CaseResult:
    r, k, field = args
    F = build_lemma22_config(r, k, field)
    observed = intersect_family_graded(F, 2).dim
    expected = math.comb(k, 2)
    return CaseResult(f"lemma22:r{r}k{k}:{field.flag}", expected, observed, observed == expected)


def suite_lemma22(seed: int, budget: SearchBudget) -> List[CaseResult]:
    args = [(r, k, field) for field in (GF2, GF5, QQ) for r in range(1, 6) for k in range(r + 1)]
    return _map_cases(_lemma22_case, args, budget.workers)


def suite_segre(seed: int, budget: SearchBudget) -> List[CaseResult]:
    results = []
    for field in (GF5, QQ):
        for k in range(1, 5):
            minors = segre_minor_span(k, field)
            triple = intersect_family_graded(segre_triple(k, field), 2)
            results.append(
                CaseResult(
                    f"segre:k{k}:{field.flag}",
                    expected=math.comb(k, 2),
                    observed=minors.dim,
                    ok=minors == triple and minors.dim == math.comb(k, 2),
                    details={"triple_dim": triple.dim},
                )
            )
    return results


def _random_family_case(args) -> CaseResult:
    kind, seed, i = args
    rng = _case_rng(seed, i)
    r = int(rng.integers(1, 5))
    s = int(rng.integers(2, 6))
    n = int(rng.integers(r + 1, 13))
    case_id = f"{kind}:{i}"
    try:
        F = random_family([seed, i, 1], s, r, n, GF5, force_trivial_intersection=(kind == "thm21"))
    except ResampleCapError as e:
        return CaseResult(case_id, skipped=str(e))
    bound = F.r**2
    if kind == "thm21":
        observed = intersect_family_graded(F, 2).dim
    else:
        observed = quadratic_generator_count(F)
    return CaseResult(
        case_id, f"<= {bound}", observed, observed <= bound, details={"s": F.s, "r": F.r, "n": n}
    )


def suite_thm21(seed: int, budget: SearchBudget) -> List[CaseResult]:
    return _map_cases(_random_family_case, [("thm21", seed, i) for i in range(500)], budget.workers)


def suite_thmB(seed: int, budget: SearchBudget) -> List[CaseResult]:
    return _map_cases(_random_family_case, [("thmB", seed, i) for i in range(500)], budget.workers)


def _oracle_case(args) -> CaseResult:
    seed, i = args
    rng = _case_rng(seed, i)
    n = int(rng.integers(2, 6))
    s = int(rng.integers(1, 5))
    r = int(rng.integers(1, n + 1))
    F = random_family([seed, i, 1], s, r, n, GF2)
    fast = intersect_family_graded(F, 2).dim
    brute = brute_force_graded_intersection_oracle(F, 2)
    return CaseResult(f"oracle:{i}", brute, fast, fast == brute, details={"n": n, "s": F.s})


def suite_oracle(seed: int, budget: SearchBudget) -> List[CaseResult]:
    return _map_cases(_oracle_case, [(seed, i) for i in range(100)], budget.workers)


def suite_c3cases(seed: int, budget: SearchBudget) -> List[CaseResult]:
    results = []
    for case_id in C3_CASE_IDS:
        fixture = c3_fixture(case_id, GF2)
        count = quadratic_generator_count(fixture.family)
        ok = count == fixture.expected
        details = {"provenance": fixture.provenance}
        if fixture.containment is not None:
            I2 = intersect_family_graded(fixture.family, 2)
            contained = contains_graded(linear_ideal_graded(fixture.containment, 2), I2)
            details["generators_in_containment"] = contained
            ok = ok and contained
        results.append(CaseResult(fixture.id, fixture.expected, count, ok, details=details))
    return results


def _pairwise_case(args) -> CaseResult:
    seed, i = args
    collection, regime = random_pairwise_collection([seed, i], GF5)
    verdict = check_pairwise_lemma(collection)
    return CaseResult(
        f"pairwise:{i}", "core or envelope", verdict, verdict != "neither",
        details={"regime": regime, "size": len(collection)},
    )


def suite_pairwise(seed: int, budget: SearchBudget) -> List[CaseResult]:
    return _map_cases(_pairwise_case, [(seed, i) for i in range(300)], budget.workers)


def _qdec_case(args) -> CaseResult:
    seed, i = args
    rng = _case_rng(seed, i)
    r = int(rng.integers(1, 4))
    s = int(rng.integers(2, 5))
    n = int(rng.integers(r + 1, 9))
    case_id = f"qdec:{i}"
    try:
        F = random_family([seed, i, 1], s, r, n, GF5, force_trivial_intersection=True)
    except ResampleCapError as e:
        return CaseResult(case_id, skipped=str(e))
    f = sample_from_graded(intersect_family_graded(F, 3), _case_rng(seed, i, 2))
    m, _ = essential_variable_count(f)
    bound = F.span().dim + intersect_family_graded(F, 2).dim
    return CaseResult(case_id, f"<= {bound}", m, m <= bound, details={"s": F.s, "r": F.r, "n": n})


def suite_qdec(seed: int, budget: SearchBudget) -> List[CaseResult]:
    return _map_cases(_qdec_case, [(seed, i) for i in range(200)], budget.workers)


def suite_restrict(seed: int, budget: SearchBudget) -> List[CaseResult]:
    results = []
    rng = np.random.default_rng([seed, 8])
    for n in range(3, 7):
        fn = build_fn(n, GF5)
        smaller = embed(build_fn(n - 1, GF5), fn.num_vars, fn_embedding(n))
        for t in range(5):
            coeffs = [int(c) for c in rng.integers(0, 5, size=n - 1)]
            restricted = substitute(fn, fn_restriction_images(n, coeffs, GF5), num_vars=fn.num_vars)
            results.append(
                CaseResult(f"restrict:n{n}:{t}", "f_(n-1)", restricted == smaller, restricted == smaller,
                           details={"coefficients": coeffs})
            )
    return results


# Search suites


def _lspace_case(case_id: str, f: Polynomial, budget: SearchBudget, check) -> CaseResult:
    try:
        report = RankService.l_space(f, budget)
    except BudgetExceededError as e:
        return CaseResult(case_id, skipped=e.message)
    expected, observed, ok = check(report)
    return CaseResult(
        case_id, expected, observed, ok and report.within_bound,
        details={"rank": report.rank, "l_dim": report.l_dim, "minimal_spaces": len(report.minimal_spaces),
                 "field": str(report.field)},
    )


def suite_fn(seed: int, budget: SearchBudget) -> List[CaseResult]:
    results = []
    for field in (GF2, GF3):
        for n in (2, 3):
            expected = {"rank": n - 1, "l_dim": n + math.comb(n, 2)}
            results.append(
                _lspace_case(
                    f"fn:{n}:{field.flag}", build_fn(n, field), budget,
                    lambda rep, e=expected: (e, {"rank": rep.rank, "l_dim": rep.l_dim},
                                             {"rank": rep.rank, "l_dim": rep.l_dim} == e),
                )
            )
    needed = sum(gaussian_binomial(10, k, 2) for k in range(4))
    if needed > budget.max_visits:
        results.append(CaseResult("fn:4:gf2", skipped=f"needs {needed} visits, cap {budget.max_visits}"))
    else:
        results.extend(suite_headline(seed, budget))
    return results


def suite_headline(seed: int, budget: SearchBudget) -> List[CaseResult]:
    f4 = build_fn(4, GF2)
    profile = bound_profile(3)
    full = gaussian_binomial(10, 3, 2)

    def check(rep: LfReport):
        observed = {"rank": rep.rank, "l_dim": rep.l_dim, "rank3_visits": rep.search_stats.per_rank.get(3)}
        expected = {"rank": 3, "l_dim": 10, "rank3_visits": full}
        return expected, observed, observed == expected

    result = _lspace_case("fn:4:gf2", f4, budget, check)
    result.details.update(
        c_lower_intro=profile.c_lower_intro,
        c_lower_fn=profile.c_lower_fn,
        n_of_r=str(profile.n_of_r),
    )
    return [result]


def _c1_case(args) -> CaseResult:
    seed, i, budget = args
    rng = _case_rng(seed, i)
    n = int(rng.integers(3, 7))
    f = random_rank1_cubic(rng, n, GF2)
    return _lspace_case(
        f"c1:{i}", f, budget,
        lambda rep: ("rank 1, l_dim <= 3", {"rank": rep.rank, "l_dim": rep.l_dim}, rep.rank == 1 and rep.l_dim <= 3),
    )


def _rank2_sample(seed: int, i: int, budget: SearchBudget):
    """A random Σ ℓ_i q_i over GF(2) whose rank is certified to be 2, with its report."""
    rng = _case_rng(seed, i)
    for _ in range(settings.resample_cap):
        n = int(rng.integers(4, 7))
        f = random_slice_sum(rng, n, 2, GF2)
        if f.is_zero:
            continue
        report = RankService.l_space(f, budget)
        if report.rank == 2:
            return f, report
    raise ResampleCapError(f"no rank-2 cubic drawn for case {i}")


def _c2_case(args) -> CaseResult:
    seed, i, budget = args
    try:
        f, report = _rank2_sample(seed, i, budget)
    except (ResampleCapError, BudgetExceededError) as e:
        return CaseResult(f"c2:{i}", skipped=str(e))
    return CaseResult(
        f"c2:{i}", "l_dim <= 6", report.l_dim, report.l_dim <= 6 and report.within_bound,
        details={"polynomial": f.to_text(), "minimal_spaces": len(report.minimal_spaces)},
    )


def suite_c1(seed: int, budget: SearchBudget) -> List[CaseResult]:
    serial = _serial(budget)
    results = _map_cases(_c1_case, [(seed, i, serial) for i in range(200)], budget.workers)
    x1x2x3 = Polynomial.monomial(GF2, 3, (1, 1, 1))
    results.append(
        _lspace_case("c1:x1x2x3", x1x2x3, budget, lambda rep: (3, rep.l_dim, rep.l_dim == 3 and rep.rank == 1))
    )
    return results


def suite_c2(seed: int, budget: SearchBudget) -> List[CaseResult]:
    serial = _serial(budget)
    results = _map_cases(_c2_case, [(seed, i, serial) for i in range(50)], budget.workers)
    results.append(
        _lspace_case("c2:f3", build_fn(3, GF2), budget, lambda rep: (6, rep.l_dim, rep.l_dim == 6 and rep.rank == 2))
    )
    return results


def _sample_reports(seed: int, budget: SearchBudget, rank1: int, rank2: int) -> List[LfReport]:
    """Reports for x1x2x3, f_2, f_3 and a few seeded rank-1 and rank-2 cubics over GF(2)."""
    reports = [
        RankService.l_space(Polynomial.monomial(GF2, 3, (1, 1, 1)), budget),
        RankService.l_space(build_fn(2, GF2), budget),
        RankService.l_space(build_fn(3, GF2), budget),
    ]
    for i in range(rank1):
        rng = _case_rng(seed, i, 11)
        reports.append(RankService.l_space(random_rank1_cubic(rng, int(rng.integers(3, 7)), GF2), budget))
    for i in range(rank2):
        try:
            reports.append(_rank2_sample(seed, 1000 + i, budget)[1])
        except ResampleCapError:
            continue
    return reports


def suite_boundA(seed: int, budget: SearchBudget) -> List[CaseResult]:
    """n(r) spot values, then every bound readable off sampled reports."""
    results = []
    for r, value in ((0, "1/4"), (1, "3"), (2, "33/4"), (3, "16")):
        observed = str(bound_profile(r).n_of_r)
        results.append(CaseResult(f"boundA:n({r})", value, observed, observed == value))
    try:
        reports = _sample_reports(seed, _serial(budget), rank1=10, rank2=10)
    except BudgetExceededError as e:
        results.append(CaseResult("boundA:samples", skipped=e.message))
        return results
    for t, rep in enumerate(reports):
        case = f"boundA:{t}"
        results.append(CaseResult(f"{case}:theoremA", f"<= {rep.bound_nr}", rep.l_dim, rep.within_bound))
        analysis = RankService.analyze_report(rep)
        checks = {
            "kp36": (analysis.kp36_ok, f"dim W <= {analysis.kp36_bound}", analysis.w_dim),
            "gens": (analysis.i2_ok, f"<= {rep.rank ** 2}", analysis.i2_dim),
            "qdec": (analysis.qdec_ok, "<= dim W + dim I_2", analysis.essential_vars),
            "lemma41": (analysis.lemma41_ok, f"<= {bound_profile(rep.rank).disjoint_triple_vars}", analysis.essential_vars),
        }
        for name, (ok, expected, observed) in checks.items():
            if ok is not None:
                results.append(CaseResult(f"{case}:{name}", expected, observed, ok))
    return results


def suite_special(seed: int, budget: SearchBudget) -> List[CaseResult]:
    """
    For a trivial-intersection subcollection of minimal spaces with sum W,
    every minimal P whose degree-2 ideal piece contains I_2 lies in W.
    """
    results = []
    try:
        reports = _sample_reports(seed, _serial(budget), rank1=0, rank2=20)
    except BudgetExceededError as e:
        return [CaseResult("special:samples", skipped=e.message)]
    for t, rep in enumerate(reports):
        analysis = RankService.analyze_report(rep, essential_budget=0)
        family = LinearIdealFamily(rep.field, rep.f.num_vars, tuple(analysis.irredundant))
        if not common_intersection(family).is_zero:
            continue
        W = family.span()
        I2 = intersect_family_graded(family, 2)
        for j, P in enumerate(rep.minimal_spaces):
            if contains_graded(linear_ideal_graded(P, 2), I2):
                inside = W.contains(P)
                results.append(CaseResult(f"special:{t}:{j}", "P inside W", inside, inside))
    return results


def suite_reduce(seed: int, budget: SearchBudget) -> List[CaseResult]:
    """dim L_f = 1 + dim L_(f mod ℓ) whenever the minimal spaces share ℓ."""
    results = []
    try:
        reports = _sample_reports(seed, _serial(budget), rank1=10, rank2=20)
    except BudgetExceededError as e:
        return [CaseResult("reduce:samples", skipped=e.message)]
    for t, rep in enumerate(reports):
        if rep.rank == 0:
            continue
        reduced = RankService.reduce_along_common_line(rep, _serial(budget))
        if reduced is None:
            continue
        _, sub = reduced
        expected = {"l_dim": rep.l_dim - 1, "rank": rep.rank - 1}
        observed = {"l_dim": sub.l_dim, "rank": sub.rank}
        results.append(CaseResult(f"reduce:{t}", expected, observed, expected == observed))
    return results


SUITES: Dict[str, Callable[[int, SearchBudget], List[CaseResult]]] = {
    "lemma22": suite_lemma22,
    "segre": suite_segre,
    "thm21": suite_thm21,
    "thmB": suite_thmB,
    "fn": suite_fn,
    "c1": suite_c1,
    "c2": suite_c2,
    "c3cases": suite_c3cases,
    "pairwise": suite_pairwise,
    "qdec": suite_qdec,
    "oracle": suite_oracle,
    "boundA": suite_boundA,
    "restrict": suite_restrict,
    "special": suite_special,
    "reduce": suite_reduce,
    "headline": suite_headline,
}


class VerifyService:
    """Service for running verification suites."""

    @staticmethod
    def run_suite(suite_id: str, seed: Optional[int] = None, budget: Optional[SearchBudget] = None) -> SuiteVerdict:
        """
        Run one suite and fold its cases into a verdict.

        Args:
            suite_id: One of SUITES
            seed: Seed for randomized cases (defaults to settings.seed)
            budget: Search limits for suites that run rank searches

        Returns:
            SuiteVerdict; budget-limited cases are listed under ``skipped``

        Raises:
            UnknownSuiteError: If the suite id is not registered
        """
        if suite_id not in SUITES:
            raise UnknownSuiteError(f"unknown suite {suite_id!r}; known: {', '.join(SUITES)}")
        seed = settings.seed if seed is None else seed
        budget = budget or SearchBudget()
        started = time.monotonic()
        cases = SUITES[suite_id](seed, budget)

        falsifications: List[Falsification] = []
        skipped: List[str] = []
        details: List[Dict[str, Any]] = []
        run = passed = 0
        for case in cases:
            if case.skipped is not None:
                skipped.append(case.case_id)
                details.append({"case": case.case_id, "skipped": case.skipped})
                continue
            run += 1
            details.append({"case": case.case_id, "observed": case.observed, "ok": case.ok, **case.details})
            if case.ok:
                passed += 1
            else:
                falsifications.append(
                    Falsification(fixture_id=case.case_id, expected=case.expected, observed=case.observed)
                )
                falsification_tracker.track(suite_id, case.case_id, case.expected, case.observed)

        verdict = SuiteVerdict(
            suite_id=suite_id,
            cases_run=run,
            cases_passed=passed,
            falsifications=falsifications,
            skipped=skipped,
            seed=seed,
            wall_time=time.monotonic() - started,
            details=details,
        )
        logger.log_suite_verdict(verdict)
        return verdict
