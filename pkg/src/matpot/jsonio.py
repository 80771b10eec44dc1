"""JSON schemas and a canonical serializer.

Matroids travel as {"type": "linear", "matrix": [[...]]} with exact entries
(integers or "p/q" strings) or {"type": "uniform", "l": ..., "n": ...}.
Subsets are sorted 1-based integer arrays, systems are multiplicity vectors,
complex numbers are [re, im] pairs.  ``dumps_canonical`` renders with sorted
keys and 17-significant-digit floats so identical inputs always produce
byte-identical output.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .errors import SchemaError
from .matroids import LinearMatroid, Matroid, UniformMatroid


def dumps_canonical(obj) -> str:
    pieces: list[str] = []
    _render(obj, pieces)
    return "".join(pieces)


def _render(obj, out: list[str]):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise SchemaError("cannot serialize non-finite float")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, complex):
        _render([obj.real, obj.imag], out)
    elif isinstance(obj, dict):
        out.append("{")
        for idx, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise SchemaError("JSON object keys must be strings")
            if idx:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _render(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for idx, item in enumerate(obj):
            if idx:
                out.append(",")
            _render(item, out)
        out.append("]")
    else:
        raise SchemaError(f"cannot serialize {type(obj).__name__}")


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("matrix entries must be integers or 'p/q' strings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational literal {value!r}") from exc
    raise SchemaError(f"matrix entries must be exact, got {value!r}")


def rational_to_json(value: Fraction):
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def matroid_from_json(obj) -> Matroid:
    if not isinstance(obj, dict) or "type" not in obj:
        raise SchemaError('matroid JSON needs a "type" field')
    kind = obj["type"]
    if kind == "linear":
        matrix = obj.get("matrix")
        if not isinstance(matrix, list) or not matrix:
            raise SchemaError('linear matroid needs a nonempty "matrix"')
        rows = [[parse_rational(v) for v in row] for row in matrix]
        return LinearMatroid(rows)
    if kind == "uniform":
        l, n = obj.get("l"), obj.get("n")
        if not isinstance(l, int) or not isinstance(n, int):
            raise SchemaError('uniform matroid needs integer "l" and "n"')
        return UniformMatroid(l, n)
    raise SchemaError(f"unknown matroid type {kind!r}")


def matroid_to_json(M: Matroid) -> dict:
    if isinstance(M, LinearMatroid):
        return {
            "type": "linear",
            "matrix": [[rational_to_json(v) for v in row] for row in M.rows],
        }
    if isinstance(M, UniformMatroid):
        return {"type": "uniform", "l": M.l, "n": M.ground.n}
    raise SchemaError(f"cannot serialize matroid {M!r}")


def subset_to_json(subset) -> list[int]:
    return sorted(subset)


def complex_to_json(value) -> list[float]:
    c = complex(value)
    return [c.real, c.imag]


def parse_complex(value) -> complex:
    if isinstance(value, bool):
        raise SchemaError("expected a number or [re, im] pair")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        re, im = value
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            return complex(re, im)
    raise SchemaError(f"expected a number or [re, im] pair, got {value!r}")


def mult_key(mult) -> str:
    return ",".join(str(int(v)) for v in mult)


def require(obj: dict, key: str, kind, what: str):
    if key not in obj:
        raise SchemaError(f"{what}: missing field {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{what}: field {key!r} must be an integer")
    if not isinstance(value, kind):
        raise SchemaError(f"{what}: field {key!r} has wrong type")
    return value
