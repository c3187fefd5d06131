"""JSON problem files.

Schemas (all rationals are ``"p/q"`` or integer strings):

* ``hrep``: ``{"A": [[...]], "b": [...], "nonneg": bool}``
* ``system``: ``{"M": [[...]], "x": [...]}``
* ``weights``: ``{"a": [...]}``
* ``monomial``: ``{"exponents": [k1, ...]}``
* ``polynomial``: ``{"terms": [{"coeff": "p/q", "exponents": [...]}, ...]}``
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, PolysplineError
from .exact import RatMatrix, RatVector, format_rat
from .integrate import Polynomial
from .polytope import HPolytope

KINDS = ("hrep", "system", "weights", "monomial", "polynomial")


def _rat(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ParseError(path, f"expected a rational string, got {value!r}")
    try:
        return Fraction(value.strip() if isinstance(value, str) else value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(path, f"malformed rational {value!r}") from None


def _list(value, path: str) -> list:
    if not isinstance(value, list) or not value:
        raise ParseError(path, "expected a non-empty array")
    return value


def _vector(value, path: str) -> RatVector:
    return tuple(_rat(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path)))


def _matrix(value, path: str) -> RatMatrix:
    rows = [_vector(r, f"{path}[{i}]") for i, r in enumerate(_list(value, path))]
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"{path}[{i}]", f"row has {len(r)} entries, expected {width}")
    return RatMatrix(tuple(rows))


def _field(doc: dict, key: str):
    if key not in doc:
        raise ParseError(f"$.{key}", "missing field")
    return doc[key]


def _exponent_list(value, path: str) -> tuple[int, ...]:
    out = []
    for i, e in enumerate(_list(value, path)):
        if isinstance(e, bool) or not isinstance(e, int) or e < 0:
            raise ParseError(f"{path}[{i}]", f"expected a nonnegative integer, got {e!r}")
        out.append(e)
    return tuple(out)


def parse_document(doc, kind: str):
    if kind not in KINDS:
        raise ValueError(f"unknown problem kind {kind!r}")
    if not isinstance(doc, dict):
        raise ParseError("$", "expected a JSON object")
    if kind == "hrep":
        A = _matrix(_field(doc, "A"), "$.A")
        b = _vector(_field(doc, "b"), "$.b")
        nonneg = doc.get("nonneg", False)
        if not isinstance(nonneg, bool):
            raise ParseError("$.nonneg", "expected a boolean")
        if len(b) != A.nrows:
            raise ParseError("$.b", f"has {len(b)} entries, A has {A.nrows} rows")
        try:
            return HPolytope(A, b, nonneg)
        except PolysplineError as exc:
            raise ParseError("$.A", str(exc)) from None
    if kind == "system":
        M = _matrix(_field(doc, "M"), "$.M")
        x = _vector(_field(doc, "x"), "$.x")
        if len(x) != M.nrows:
            raise ParseError("$.x", f"has {len(x)} entries, M has {M.nrows} rows")
        return M, x
    if kind == "weights":
        return _vector(_field(doc, "a"), "$.a")
    if kind == "monomial":
        return _exponent_list(_field(doc, "exponents"), "$.exponents")
    terms = []
    for i, t in enumerate(_list(_field(doc, "terms"), "$.terms")):
        path = f"$.terms[{i}]"
        if not isinstance(t, dict):
            raise ParseError(path, "expected an object")
        coeff = _rat(t.get("coeff"), f"{path}.coeff")
        terms.append((coeff, _exponent_list(t.get("exponents"), f"{path}.exponents")))
    try:
        return Polynomial.from_terms(terms)
    except PolysplineError as exc:
        raise ParseError("$.terms", str(exc)) from None


def parse_problem(path, kind: str):
    """Read and validate a UTF-8 JSON problem file of the given kind."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), exc.strerror or str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return parse_document(doc, kind)


def to_document(obj) -> dict:
    if isinstance(obj, HPolytope):
        return {"A": obj.A.to_strings(), "b": [format_rat(q) for q in obj.b], "nonneg": obj.nonneg}
    if isinstance(obj, Polynomial):
        return {"terms": [{"coeff": format_rat(c), "exponents": list(e)} for c, e in obj.terms]}
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], RatMatrix):
        return {"M": obj[0].to_strings(), "x": [format_rat(q) for q in obj[1]]}
    if isinstance(obj, tuple) and obj and all(isinstance(q, Fraction) for q in obj):
        return {"a": [format_rat(q) for q in obj]}
    if isinstance(obj, tuple) and all(isinstance(e, int) for e in obj):
        return {"exponents": list(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj) -> str:
    """Canonical text: one array row per line, trailing newline."""
    doc = to_document(obj)
    lines = ["{"]
    items = list(doc.items())
    for n, (key, value) in enumerate(items):
        comma = "," if n < len(items) - 1 else ""
        if isinstance(value, list) and value and isinstance(value[0], (list, dict)):
            inner = ",\n".join(f"    {json.dumps(r)}" for r in value)
            lines.append(f'  "{key}": [\n{inner}\n  ]{comma}')
        else:
            lines.append(f'  "{key}": {json.dumps(value)}{comma}')
    lines.append("}")
    return "\n".join(lines) + "\n"
