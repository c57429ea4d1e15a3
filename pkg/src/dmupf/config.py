"""On-disk run configuration (a single JSON document)."""

from __future__ import annotations

import json

import jsonschema

from .dmuss import AccessStructure
from .errors import UsageError
from .field import GF
from .pointfn import PointFunction
from .protocol import EXHAUSTIVE, ProtocolConfig

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["field", "T", "N", "access"],
    "properties": {
        "field": {
            "type": "object",
            "additionalProperties": False,
            "required": ["q"],
            "properties": {
                "q": {"type": "integer", "minimum": 2},
                "m": {"type": "integer", "minimum": 1},
                "modulus": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            },
        },
        "T": {"type": "integer", "minimum": 1},
        "N": {"type": "integer", "minimum": 1},
        "access": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        },
        "R": {"type": "array", "items": {"type": "integer"}},
        "functions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["X", "Z"],
                "properties": {
                    "X": {"type": "integer"},
                    "Z": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
                },
            },
        },
        "demands": {
            "oneOf": [
                {"type": "array", "items": {"type": "integer"}},
                {"const": EXHAUSTIVE},
            ]
        },
        "seed": {"type": "integer", "minimum": 0},
        "budget": {"type": "integer", "minimum": 1},
    },
}


def load_raw(path):
    try:
        with open(path, "rb") as fh:
            doc = json.loads(fh.read().decode("utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    validate_raw(doc)
    return doc


def validate_raw(doc):
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"invalid config at {where}: {exc.message}") from exc
    return doc


def field_of(doc):
    f = doc["field"]
    return GF(f["q"], f.get("m", 1), f.get("modulus"))


def access_of(doc):
    return AccessStructure(doc["N"], tuple(tuple(s) for s in doc["access"]))


def default_rates(acc):
    """When ``R`` is absent: all ones."""
    return (1,) * acc.K


def protocol_config(doc, seed=None):
    """Build a :class:`ProtocolConfig`; missing functions are drawn from the seed."""
    ctx = field_of(doc)
    acc = access_of(doc)
    R = tuple(doc.get("R") or default_rates(acc))
    seed = doc.get("seed", 0) if seed is None else seed
    demands = doc.get("demands", EXHAUSTIVE)
    if "functions" in doc:
        if len(doc["functions"]) != acc.K:
            raise UsageError(f"need {acc.K} functions, got {len(doc['functions'])}")
        functions = tuple(PointFunction(doc["T"], f["X"], tuple(f["Z"])) for f in doc["functions"])
        return ProtocolConfig(ctx, doc["T"], acc, R, seed, functions, demands)
    return ProtocolConfig.with_random_functions(ctx, doc["T"], acc, R, seed, demands)
