"""
slicelab command line
Entry point, argument parsing and the global exit-code handler
"""

import argparse
import json
import sys
from typing import List, Optional

from slicelab import __version__
from slicelab.cli.commands import dispatch
from slicelab.cli.report import FORMATS
from slicelab.services.verify_service import SUITES
from slicelab.utils.errors import InputError, SliceLabError
from slicelab.utils.logging import logger


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 4), not argparse's exit 2."""

    def error(self, message: str):
        raise InputError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--field", help="gf2, gf3, gfp:<p> or rat (default: SLICERANK_DEFAULT_FIELD)")
    common.add_argument("--workers", type=int, help="Worker processes; 1 runs everything serially")
    common.add_argument("--max-visits", type=int, help="Cap on subspace visits")
    common.add_argument("--max-seconds", type=float, help="Wall-clock cap in seconds")
    common.add_argument("--checkpoint", help="SQLite file for resumable searches")
    common.add_argument("--format", choices=FORMATS, default="json", help="Report format")
    common.add_argument("--seed", type=int, help="Seed (default: SLICERANK_SEED)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="slicelab", description="Slice rank of cubics and graded intersections of linear ideals.")
    parser.add_argument("--version", action="version", version=f"slicelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rank", parents=[common], help="Slice rank with a certificate")
    p.add_argument("file", help="Polynomial file, or - for stdin")

    p = sub.add_parser("lspace", parents=[common], help="Minimal subspaces and their span L_f")
    p.add_argument("file", help="Polynomial file, or - for stdin")
    p.add_argument("--analyze", action="store_true", help="Also run the bound checks on the minimal subspaces")

    p = sub.add_parser("gens2", parents=[common], help="Quadratic generators of an intersection of linear ideals")
    p.add_argument("file", help="Family file, or - for stdin")
    p.add_argument("--basis", action="store_true", help="Include a basis of I_2")

    p = sub.add_parser("dim", parents=[common], help="dim I_d of an intersection of linear ideals")
    p.add_argument("file", help="Family file, or - for stdin")
    p.add_argument("--degree", type=int, required=True, help="Degree d")
    p.add_argument("--basis", action="store_true", help="Include a basis of I_d")

    p = sub.add_parser("family", parents=[common], help="Print a fixture in file format")
    p.add_argument("kind", choices=("fn", "lemma22", "c3"))
    p.add_argument("params", nargs="*", help="<n> | <r> <k> | <case>")

    p = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    p.add_argument("suite", choices=tuple(SUITES), help="Suite id")

    p = sub.add_parser("bounds", parents=[common], help="Exact rank-r bound values")
    p.add_argument("r", type=int, help="Slice rank")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        outcome = dispatch(args)
    except SliceLabError as e:
        sys.stderr.write(json.dumps(e.to_dict(), default=str) + "\n")
        return e.exit_code
    except KeyboardInterrupt:
        sys.stderr.write("interrupted\n")
        return 130
    except Exception as e:
        logger.log_error(e, {"argv": argv})
        return 1
    sys.stdout.write(outcome.text)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
