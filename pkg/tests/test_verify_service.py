import pytest

from slicelab.models.rank import SearchBudget
from slicelab.models.verify import SuiteVerdict
from slicelab.services.verify_service import SUITES, VerifyService
from slicelab.utils.errors import UnknownSuiteError
from slicelab.utils.logging import falsification_tracker


@pytest.mark.parametrize("suite_id", ["lemma22", "segre", "c3cases", "restrict"])
def test_constructive_suites_pass(suite_id, serial_budget):
    verdict = VerifyService.run_suite(suite_id, seed=0, budget=serial_budget)
    assert isinstance(verdict, SuiteVerdict)
    assert verdict.all_passed, verdict.falsifications
    assert verdict.cases_run == verdict.cases_passed > 0
    assert verdict.skipped == []


def test_suite_case_counts(serial_budget):
    assert VerifyService.run_suite("lemma22", budget=serial_budget).cases_run == 3 * sum(r + 1 for r in range(1, 6))
    assert VerifyService.run_suite("segre", budget=serial_budget).cases_run == 8
    assert VerifyService.run_suite("c3cases", budget=serial_budget).cases_run == 6


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError) as exc:
        VerifyService.run_suite("nope")
    assert exc.value.exit_code == 4


def test_fn_suite_skips_f4_under_a_small_budget():
    budget = SearchBudget(workers=1, checkpoint_url=None, max_visits=20000, max_seconds=None)
    verdict = VerifyService.run_suite("fn", seed=0, budget=budget)
    assert verdict.all_passed, verdict.falsifications
    assert verdict.cases_run == 4
    assert verdict.skipped == ["fn:4:gf2"]


def test_verdicts_are_deterministic_for_a_seed(serial_budget):
    a = VerifyService.run_suite("pairwise", seed=3, budget=serial_budget)
    b = VerifyService.run_suite("pairwise", seed=3, budget=serial_budget)
    assert a.details == b.details
    assert a.all_passed


def test_verdict_counts_must_agree():
    with pytest.raises(ValueError):
        SuiteVerdict(suite_id="x", cases_run=2, cases_passed=1)


def test_passing_suite_tracks_no_falsifications(serial_budget):
    before = falsification_tracker.get_summary()
    VerifyService.run_suite("segre", budget=serial_budget)
    assert falsification_tracker.get_summary() == before


def test_every_suite_is_registered():
    assert set(SUITES) == {
        "lemma22", "segre", "thm21", "thmB", "fn", "c1", "c2", "c3cases", "pairwise",
        "qdec", "oracle", "boundA", "restrict", "special", "reduce", "headline",
    }


@pytest.mark.slow
@pytest.mark.parametrize("suite_id", ["thm21", "thmB", "oracle", "qdec", "c1", "c2", "boundA", "special", "reduce"])
def test_sampled_suites_pass(suite_id, serial_budget):
    verdict = VerifyService.run_suite(suite_id, seed=0, budget=serial_budget)
    assert verdict.all_passed, verdict.falsifications
