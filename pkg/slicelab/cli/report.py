"""
Report serialization for slicelab

Reports are plain trees of dicts, lists, strings and integers with a
stable key order. Subspaces become RREF rows, rationals become "num/den".
"""

import hashlib
import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pydantic
import sympy
from pydantic import BaseModel

from slicelab import __version__
from slicelab.algebra.field import FieldSpec
from slicelab.algebra.idealcalc import GradedSubspace, LinearIdealFamily
from slicelab.algebra.linalg import Subspace
from slicelab.algebra.polyalg import Polynomial
from slicelab.models.report import RunReport
from slicelab.utils.errors import InputError

FORMATS = ("json", "text")


def _scalar(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return int(x)


def subspace_rows(S: Subspace) -> List[List[Any]]:
    return [[_scalar(x) for x in row] for row in S.basis]


def to_plain(obj: Any, names: Optional[Sequence[str]] = None) -> Any:
    """
    Convert a result object into JSON-ready data.

    Polynomials print with ``names`` when they have that many variables.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, FieldSpec):
        return obj.flag
    if isinstance(obj, Polynomial):
        use = names if names is not None and len(names) == obj.num_vars else None
        return obj.to_text(use)
    if isinstance(obj, Subspace):
        return {"ambient_dim": obj.ambient_dim, "dim": obj.dim, "rows": subspace_rows(obj)}
    if isinstance(obj, GradedSubspace):
        return {
            "num_vars": obj.num_vars,
            "degree": obj.degree,
            "dim": obj.dim,
            "basis": [to_plain(p, names) for p in obj.polynomials()],
        }
    if isinstance(obj, LinearIdealFamily):
        return {"num_vars": obj.num_vars, "members": [to_plain(P, names) for P in obj.members]}
    if isinstance(obj, BaseModel):
        return {
            name: to_plain(getattr(obj, name), names)
            for name, info in type(obj).model_fields.items()
            if not info.exclude
        }
    if isinstance(obj, dict):
        return {str(k): to_plain(v, names) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, names) for v in obj]
    return str(obj)


def inputs_digest(argv: Sequence[str], contents: Sequence[str] = ()) -> str:
    h = hashlib.sha256()
    for part in list(argv) + list(contents):
        h.update(part.encode())
        h.update(b"\0")
    return h.hexdigest()


def library_versions() -> Dict[str, str]:
    return {
        "slicelab": __version__,
        "numpy": np.__version__,
        "sympy": sympy.__version__,
        "pydantic": pydantic.VERSION,
    }


def build_report(
    command: Sequence[str],
    field: Optional[FieldSpec],
    seed: int,
    result: Dict[str, Any],
    contents: Sequence[str] = (),
    search_stats: Any = None,
    names: Optional[Sequence[str]] = None,
) -> RunReport:
    return RunReport(
        command=list(command),
        field=field.flag if field else None,
        inputs_digest=inputs_digest(command, contents),
        seed=seed,
        result=to_plain(result, names),
        search_stats=to_plain(search_stats) if search_stats is not None else None,
        versions=library_versions(),
    )


def _render_text(value: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_atom(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict) and item:
                nested = _render_text(item, indent + 1)
                lines.append(f"{pad}- {nested[0].strip()}")
                lines.extend(nested[1:])
            elif isinstance(item, list) and item and all(not isinstance(x, (dict, list)) for x in item):
                lines.append(f"{pad}- [{', '.join(_atom(x) for x in item)}]")
            elif isinstance(item, list) and item:
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_atom(item)}")
    else:
        lines.append(f"{pad}{_atom(value)}")
    return lines


def _atom(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        return "{}" if isinstance(value, dict) else "[]"
    return str(value)


def emit_report(report: RunReport, fmt: str = "json") -> str:
    """Serialize a report; equal reports give equal text."""
    if fmt not in FORMATS:
        raise InputError(f"unknown format {fmt!r}; use one of {', '.join(FORMATS)}")
    data = to_plain(report)
    if fmt == "json":
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    return "\n".join(_render_text(data)) + "\n"
