"""Canonical JSON serialization for fans, functions, matroids and reports.

Numbers outside the double-safe range travel as decimal strings; rationals
as "p/q". Serialization is byte-stable: sorted keys, no float formatting.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .balance import Weight, orientation
from .errors import InvalidInput
from .fan import Fan, build_fan, cone_key
from .functions import ConewiseLinear
from .matroid import Matroid, from_bases

SAFE = 2 ** 53 - 1


def encode_number(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return encode_number(int(x))
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x if abs(x) <= SAFE else str(x)
    raise InvalidInput(f"cannot serialize {x!r} exactly")


def decode_number(x):
    if isinstance(x, bool):
        raise InvalidInput("booleans are not numbers here")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        if "/" in x:
            num, den = x.split("/", 1)
            return Fraction(int(num), int(den))
        return int(x)
    raise InvalidInput(f"expected an exact number, got {x!r}")


def jsonable(obj):
    """Recursively convert exact values into JSON-ready structures."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, frozenset):
        return sorted(obj)
    if isinstance(obj, Fraction):
        return encode_number(obj)
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return encode_number(obj)
    if isinstance(obj, str):
        return obj
    raise InvalidInput(f"cannot serialize {type(obj).__name__} into a report")


def canonical_dumps(obj):
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


# -- fans ----------------------------------------------------------------------


def fan_to_dict(fan: Fan, weight: Weight = None):
    maximal = [list(cone_key(c)) for c in fan.maximal_cones()]
    out = {
        "rank": fan.rank,
        "rays": [[encode_number(x) for x in fan.ray_vector(i)]
                 for i in range(fan.n_rays())],
        "cones": maximal,
    }
    if weight is not None:
        out["weights"] = [encode_number(weight(frozenset(c))) for c in maximal]
    return out


def fan_from_dict(data):
    try:
        rank = int(data["rank"])
        rays = [[int(decode_number(x)) for x in ray] for ray in data["rays"]]
        cones = [[int(i) for i in c] for c in data["cones"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed fan data: {exc}") from exc
    fan = build_fan(rank, rays, cones)
    weight = None
    if "weights" in data:
        vals = [int(decode_number(x)) for x in data["weights"]]
        if len(vals) != len(cones):
            raise InvalidInput("weights must parallel the cones list")
        values = {}
        for c, v in zip(cones, vals):
            values[frozenset(c)] = v
        weight = orientation(fan, values)
    return fan, weight


def weight_to_dict(w: Weight):
    return {
        "dimension": w.dimension,
        "entries": [[list(cone_key(c)), encode_number(v)]
                    for c, v in sorted(w.values.items(), key=lambda kv: cone_key(kv[0]))
                    if v != 0],
    }


def weight_from_dict(data):
    try:
        p = int(data["dimension"])
        values = {frozenset(int(i) for i in cone): int(decode_number(v))
                  for cone, v in data["entries"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed weight data: {exc}") from exc
    return Weight(p, values)


# -- functions -------------------------------------------------------------------


def function_to_dict(f: ConewiseLinear):
    return {"values": [encode_number(Fraction(v)) for v in f.values]}


def function_from_dict(data, fan: Fan):
    try:
        values = [Fraction(decode_number(v)) for v in data["values"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed function data: {exc}") from exc
    if len(values) != fan.n_rays():
        raise InvalidInput(
            f"function needs {fan.n_rays()} ray values, got {len(values)}")
    return ConewiseLinear(fan, tuple(values))


# -- matroids --------------------------------------------------------------------


def matroid_to_dict(m: Matroid):
    return {"ground": m.ground, "bases": [list(b) for b in m.sorted_bases()]}


def matroid_from_dict(data):
    try:
        ground = int(data["ground"])
        bases = [[int(i) for i in b] for b in data["bases"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed matroid data: {exc}") from exc
    return from_bases(ground, bases)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def save_json(path, obj):
    with open(path, "w") as fh:
        fh.write(canonical_dumps(obj))
