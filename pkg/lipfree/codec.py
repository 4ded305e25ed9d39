"""
JSON formats
Rationals travel as "p/q" strings, renorm vectors as arrays of decimal
strings. Spaces, free vectors and functionals have one documented shape each.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .errors import ConfigError, MetricStructureError, ParameterError
from .free_space import FreeVector, LipschitzFunction
from .metric_core import MetricSpace, Point


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse "p/q", an integer or a terminating decimal string exactly."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ParameterError(f"Rationals must be given as strings or integers, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ParameterError(f"Not a rational number: {value!r}") from e


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def space_to_json(space: MetricSpace) -> Dict[str, Any]:
    points = []
    for point in space.points:
        entry: Dict[str, Any] = {"id": point.id}
        if point.label is not None:
            entry["label"] = point.label
        if point.coords is not None:
            entry["coords"] = [format_rational(c) for c in point.coords]
        points.append(entry)
    return {
        "base": space.base,
        "points": points,
        "dist": [[format_rational(value) for value in row] for row in space.dist],
    }


def space_from_json(data: Dict[str, Any]) -> MetricSpace:
    try:
        points = tuple(
            Point(
                str(entry["id"]),
                entry.get("label"),
                tuple(parse_rational(c) for c in entry["coords"]) if "coords" in entry else None,
            )
            for entry in data["points"]
        )
        dist = tuple(tuple(parse_rational(value) for value in row) for row in data["dist"])
        return MetricSpace(points, str(data["base"]), dist)
    except (KeyError, TypeError) as e:
        raise MetricStructureError(f"Malformed space document: {e}") from e


def vector_to_json(mu: FreeVector) -> Dict[str, Any]:
    return {"terms": [{"point": pid, "coeff": format_rational(c)} for pid, c in mu.terms]}


def vector_from_json(space: MetricSpace, data: Dict[str, Any]) -> FreeVector:
    try:
        mapping: Dict[str, Fraction] = {}
        for term in data["terms"]:
            mapping[term["point"]] = mapping.get(term["point"], Fraction(0)) + parse_rational(term["coeff"])
    except (KeyError, TypeError) as e:
        raise ParameterError(f"Malformed vector document: {e}") from e
    return FreeVector.of(space, mapping)


def function_to_json(f: LipschitzFunction) -> Dict[str, Any]:
    data: Dict[str, Any] = {"values": {pid: format_rational(v) for pid, v in f.values}}
    if f.weight:
        data["weight"] = True
    return data


def function_from_json(space: MetricSpace, data: Dict[str, Any]) -> LipschitzFunction:
    try:
        values = {pid: parse_rational(v) for pid, v in data["values"].items()}
    except (KeyError, AttributeError) as e:
        raise ParameterError(f"Malformed function document: {e}") from e
    return LipschitzFunction.of(space, values, bool(data.get("weight", False)))


def renorm_vector_from_json(data: List[Any]) -> np.ndarray:
    """Coordinates from an array of decimal strings (numbers are accepted too)."""
    if not isinstance(data, list):
        raise ParameterError("A renorm vector is a JSON array of decimal strings")
    try:
        return np.array([float(value) for value in data])
    except (TypeError, ValueError) as e:
        raise ParameterError(f"Malformed coordinate: {e}") from e


def renorm_vector_to_json(vector) -> List[str]:
    return [repr(float(value)) for value in vector]


def load_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}") from e


def dump_json(data: Any, path: Union[str, Path]):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
