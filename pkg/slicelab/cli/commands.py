"""
Command handlers for slicelab
Each handler reads its inputs, calls one service and renders the output
"""

import argparse
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from slicelab.algebra.field import FieldSpec
from slicelab.algebra.idealcalc import (
    common_intersection,
    generator_count,
    intersect_family_graded,
    quadratic_generator_count,
)
from slicelab.cli.parsing import (
    format_family_file,
    format_polynomial_file,
    parse_family_file,
    parse_polynomial_file,
)
from slicelab.cli.report import build_report, emit_report
from slicelab.models.rank import SearchBudget
from slicelab.services.fixture_service import (
    build_fn,
    build_lemma22_config,
    c3_fixture,
    fn_variable_names,
    lemma22_variable_names,
)
from slicelab.services.rank_service import RankService, bound_profile
from slicelab.services.verify_service import VerifyService
from slicelab.utils.config import normalize_checkpoint_url, settings
from slicelab.utils.errors import InputError
from slicelab.utils.logging import log_run_event


@dataclass
class CommandOutcome:
    """Rendered output and the exit status it maps to."""

    text: str
    exit_code: int = 0


def read_input(path: str) -> str:
    """File contents; ``-`` reads standard input."""
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", path=path) from e


def field_of(args: argparse.Namespace) -> FieldSpec:
    return FieldSpec.parse(args.field or settings.default_field)


def seed_of(args: argparse.Namespace) -> int:
    return settings.seed if args.seed is None else args.seed


def budget_of(args: argparse.Namespace) -> SearchBudget:
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.max_visits is not None:
        overrides["max_visits"] = args.max_visits
    if args.max_seconds is not None:
        overrides["max_seconds"] = args.max_seconds
    if args.checkpoint is not None:
        overrides["checkpoint_url"] = normalize_checkpoint_url(args.checkpoint)
    return SearchBudget(**overrides)


def _report(args, field, result, contents=(), search_stats=None, names=None) -> str:
    report = build_report(
        args.argv, field, seed_of(args), result, contents=contents, search_stats=search_stats, names=names
    )
    return emit_report(report, args.format)


def _certificate_payload(cert, names) -> Dict:
    return {
        "rank": cert.rank,
        "ranks_excluded": cert.ranks_excluded,
        "witness": cert.witness,
        "decomposition": [[ell.to_text(names), q.to_text(names)] for ell, q in cert.decomposition],
        "certificate_valid": RankService.verify_certificate(cert),
        "field_note": cert.field_note,
    }


# Handlers


def run_rank(args: argparse.Namespace) -> CommandOutcome:
    field = field_of(args)
    content = read_input(args.file)
    f, names = parse_polynomial_file(content, field)
    cert = RankService.slice_rank(f, budget_of(args))
    result = {"polynomial": f.to_text(names), "variables": names, **_certificate_payload(cert, names)}
    return CommandOutcome(_report(args, field, result, [content], cert.stats, names))


def run_lspace(args: argparse.Namespace) -> CommandOutcome:
    field = field_of(args)
    content = read_input(args.file)
    f, names = parse_polynomial_file(content, field)
    report = RankService.l_space(f, budget_of(args))
    result = {
        "polynomial": f.to_text(names),
        "variables": names,
        "rank": report.rank,
        "l_dim": report.l_dim,
        "bound_nr": report.bound_nr,
        "within_bound": report.within_bound,
        "minimal_space_count": len(report.minimal_spaces),
        "minimal_spaces": report.minimal_spaces,
        "l_space": report.l_space,
        "field_note": report.field_note,
    }
    if args.analyze:
        result["analysis"] = RankService.analyze_report(report)
    exit_code = 0 if report.within_bound else 2
    return CommandOutcome(_report(args, field, result, [content], report.search_stats, names), exit_code)


def run_gens2(args: argparse.Namespace) -> CommandOutcome:
    field = field_of(args)
    content = read_input(args.file)
    family, names = parse_family_file(content, field)
    I2 = intersect_family_graded(family, 2)
    result = {
        "variables": names,
        "s": family.s,
        "r": family.r,
        "common_intersection_dim": common_intersection(family).dim,
        "i2_dim": I2.dim,
        "generator_count": quadratic_generator_count(family),
        "bound_r_squared": family.r**2,
        "i2": I2 if args.basis else None,
    }
    return CommandOutcome(_report(args, field, result, [content], names=names))


def run_dim(args: argparse.Namespace) -> CommandOutcome:
    field = field_of(args)
    content = read_input(args.file)
    family, names = parse_family_file(content, field)
    I_d = intersect_family_graded(family, args.degree)
    result = {
        "variables": names,
        "degree": args.degree,
        "dim": I_d.dim,
        "generator_count": generator_count(family, args.degree),
        "basis": I_d if args.basis else None,
    }
    return CommandOutcome(_report(args, field, result, [content], names=names))


def run_family(args: argparse.Namespace) -> CommandOutcome:
    """Print a named fixture in file format, ready for the other commands."""
    field = field_of(args)
    kind, params = args.kind, args.params
    if kind == "fn":
        n = _int_params(params, 1, "family fn <n>")[0]
        return CommandOutcome(format_polynomial_file(build_fn(n, field), fn_variable_names(n)))
    if kind == "lemma22":
        r, k = _int_params(params, 2, "family lemma22 <r> <k>")
        return CommandOutcome(format_family_file(build_lemma22_config(r, k, field), lemma22_variable_names(r, k)))
    if kind == "c3":
        if len(params) != 1:
            raise InputError("usage: family c3 <case>")
        fixture = c3_fixture(params[0], field)
        header = f"# {fixture.provenance}\n"
        return CommandOutcome(header + format_family_file(fixture.family, fixture.variable_names))
    raise InputError(f"unknown family {kind!r}; use fn, lemma22 or c3")


def _int_params(params: List[str], count: int, usage: str) -> Tuple[int, ...]:
    if len(params) != count:
        raise InputError(f"usage: {usage}")
    try:
        return tuple(int(p) for p in params)
    except ValueError as e:
        raise InputError(f"usage: {usage}") from e


def run_verify(args: argparse.Namespace) -> CommandOutcome:
    seed = seed_of(args)
    verdict = VerifyService.run_suite(args.suite, seed=seed, budget=budget_of(args))
    if verdict.falsifications:
        exit_code = 2
    elif verdict.skipped:
        exit_code = 3
    else:
        exit_code = 0
    result = {
        "verdict": verdict,
        "all_passed": verdict.all_passed,
    }
    stats = {"wall_time": verdict.wall_time}
    return CommandOutcome(_report(args, None, result, search_stats=stats), exit_code)


def run_bounds(args: argparse.Namespace) -> CommandOutcome:
    return CommandOutcome(_report(args, None, {"profile": bound_profile(args.r)}))


COMMANDS: Dict[str, Callable[[argparse.Namespace], CommandOutcome]] = {
    "rank": run_rank,
    "lspace": run_lspace,
    "gens2": run_gens2,
    "dim": run_dim,
    "family": run_family,
    "verify": run_verify,
    "bounds": run_bounds,
}


def dispatch(args: argparse.Namespace) -> CommandOutcome:
    log_run_event(" ".join(args.argv))
    return COMMANDS[args.command](args)
