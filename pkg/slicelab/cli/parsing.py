"""
Text formats for slicelab
Polynomial files, family files and the polynomial grammar
"""

import re
from fractions import Fraction
from tokenize import TokenError
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import PolynomialError

from slicelab.algebra.field import FieldSpec
from slicelab.algebra.idealcalc import LinearIdealFamily
from slicelab.algebra.linalg import Subspace, rref_canonicalize
from slicelab.algebra.polyalg import Polynomial
from slicelab.utils.errors import (
    DegreeError,
    InhomogeneousError,
    ParseError,
    UndeclaredVariableError,
    ZeroLinearFormError,
)

_ALLOWED = re.compile(r"[A-Za-z0-9_+\-*^/() \t]")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_Y_PAIR = re.compile(r"^y(\d+)(_?)(\d+)$")
_TRANSFORMS = standard_transformations + (convert_xor,)

VARS_HEADER = "vars:"


def _natural_key(name: str) -> Tuple:
    return tuple(int(t) if t.isdigit() else t for t in re.findall(r"\d+|\D+", name))


def _resolve(name: str, declared: Dict[str, sympy.Symbol]) -> Optional[str]:
    """A declared name, accepting y_ji for a declared y_ij."""
    if name in declared:
        return name
    m = _Y_PAIR.match(name)
    if m:
        swapped = f"y{m.group(3)}{m.group(2)}{m.group(1)}"
        if swapped in declared:
            return swapped
    return None


def parse_polynomial(
    text: str,
    names: Sequence[str],
    field: FieldSpec,
    line: Optional[int] = None,
) -> Polynomial:
    """
    Parse ``2*x1^2*x3 + x2*y12`` into a homogeneous Polynomial.

    Args:
        text: Polynomial in the term grammar; coefficients may be integers or num/den
        names: Variable order
        field: Coefficient field; coefficients are reduced into it
        line: Line number reported in errors

    Returns:
        Polynomial in len(names) variables

    Raises:
        ParseError: Syntax error, with the character position
        UndeclaredVariableError: A name missing from ``names``
        InhomogeneousError: Terms of different degrees
    """
    if not names:
        raise ParseError("no variables declared", position=0, line=line)
    if not text.strip():
        raise ParseError("empty polynomial", position=0, line=line)
    for pos, ch in enumerate(text):
        if not _ALLOWED.match(ch):
            raise ParseError(f"unexpected character {ch!r}", position=pos, line=line)

    symbols = {name: sympy.Symbol(name) for name in names}
    local: Dict[str, sympy.Symbol] = dict(symbols)
    for m in _NAME.finditer(text):
        name = m.group()
        if m.start() > 0 and text[m.start() - 1].isdigit():
            raise ParseError(f"missing '*' before {name!r}", position=m.start(), line=line)
        target = _resolve(name, symbols)
        if target is None:
            raise UndeclaredVariableError(
                f"undeclared variable {name!r}", name=name, position=m.start(), line=line
            )
        local[name] = symbols[target]

    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
        poly = sympy.Poly(expr, *symbols.values())
    except (SyntaxError, TokenError) as e:
        offset = getattr(e, "offset", None)
        position = offset - 1 if isinstance(offset, int) and offset > 0 else None
        raise ParseError(f"syntax error in {text.strip()!r}", position=position, line=line) from e
    except (PolynomialError, TypeError, ValueError) as e:
        raise ParseError(f"not a polynomial: {text.strip()!r}", line=line) from e

    terms = {}
    degrees = set()
    for mono, coef in poly.terms():
        if coef == 0:
            continue
        rational = sympy.Rational(coef)
        terms[tuple(mono)] = field.scalar(Fraction(int(rational.p), int(rational.q)))
        degrees.add(sum(mono))
    if len(degrees) > 1:
        raise InhomogeneousError(
            f"terms of degrees {sorted(degrees)} in one polynomial", line=line
        )
    degree = degrees.pop() if degrees else 0
    return Polynomial(field, len(names), degree, terms)


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _content_lines(content: str) -> List[Tuple[int, str]]:
    """Numbered lines with comments removed; comment-only lines are dropped."""
    return [
        (i + 1, _strip_comment(raw))
        for i, raw in enumerate(content.splitlines())
        if not raw.lstrip().startswith("#")
    ]


def _split_names(header: str) -> List[str]:
    names = [t for t in re.split(r"[\s,]+", header.strip()) if t]
    if len(set(names)) != len(names):
        raise ParseError("repeated name in vars header")
    for name in names:
        if not _NAME.fullmatch(name):
            raise ParseError(f"bad variable name {name!r} in vars header")
    return names


def _header(lines: List[Tuple[int, str]]) -> Tuple[Optional[List[str]], List[Tuple[int, str]]]:
    for idx, (_, text) in enumerate(lines):
        if not text.strip():
            continue
        if text.strip().startswith(VARS_HEADER):
            return _split_names(text.strip()[len(VARS_HEADER):]), lines[idx + 1:]
        break
    return None, lines


def parse_polynomial_file(content: str, field: FieldSpec) -> Tuple[Polynomial, List[str]]:
    """
    A polynomial file: optional ``vars:`` header, ``#`` comments, and one
    polynomial that may run over several lines. Without a header the
    variables are the names used, in natural order.
    """
    lines = _content_lines(content)
    names, body = _header(lines)
    text = " ".join(t for _, t in body if t.strip())
    first = next((n for n, t in body if t.strip()), None)
    if names is None:
        names = sorted({m.group() for m in _NAME.finditer(text)}, key=_natural_key)
    return parse_polynomial(text, names, field, line=first), names


def parse_linear_form(text: str, names: Sequence[str], field: FieldSpec, line: Optional[int] = None) -> List:
    f = parse_polynomial(text, names, field, line=line)
    if f.is_zero:
        raise ZeroLinearFormError(f"zero linear form on line {line}", line=line)
    if f.degree != 1:
        raise DegreeError(f"expected a linear form, got degree {f.degree}", line=line)
    return list(f.linear_coefficients())


def parse_family_file(content: str, field: FieldSpec) -> Tuple[LinearIdealFamily, List[str]]:
    """
    A family file: a ``vars:`` header, then one subspace per block of
    linear forms, blocks separated by blank lines.
    """
    lines = _content_lines(content)
    names, body = _header(lines)
    if names is None:
        raise ParseError("family files need a 'vars:' header", line=1)

    blocks: List[List[Tuple[int, str]]] = [[]]
    for number, text in body:
        if text.strip():
            blocks[-1].append((number, text))
        elif blocks[-1]:
            blocks.append([])
    blocks = [b for b in blocks if b]
    if not blocks:
        raise ParseError("family file has no subspaces")

    members: List[Subspace] = []
    for block in blocks:
        rows = [parse_linear_form(text, names, field, line=number) for number, text in block]
        members.append(rref_canonicalize(rows, field, len(names)))
    return LinearIdealFamily(field, len(names), tuple(members)), names


def format_polynomial_file(f: Polynomial, names: Sequence[str]) -> str:
    return f"{VARS_HEADER} {' '.join(names)}\n{f.to_text(names)}\n"


def format_family_file(family: LinearIdealFamily, names: Sequence[str]) -> str:
    """Inverse of parse_family_file on canonical families: RREF rows as linear forms."""
    blocks = []
    for P in family.members:
        forms = [Polynomial.linear_form(family.field, row).to_text(names) for row in P.basis]
        blocks.append("\n".join(forms))
    return f"{VARS_HEADER} {' '.join(names)}\n" + "\n\n".join(blocks) + "\n"
