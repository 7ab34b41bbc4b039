"""jsonschema documents for every input file the command line reads."""
from typing import Any

from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from gelfkit.error import SchemaError

SCALAR = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^[0-9+\-/i ]+$"},
    ]
}

MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": SCALAR}}

INT_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

INDEX = {"type": "integer", "minimum": 0}

INDEX_SET = {"type": "array", "items": INDEX, "uniqueItems": True}

ALGEBRA = {
    "type": "object",
    "required": ["blocks"],
    "properties": {"blocks": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}}},
}

POINT = {
    "type": "object",
    "required": ["block", "line"],
    "properties": {"block": INDEX, "line": {"type": "array", "minItems": 1, "items": SCALAR}},
}

SPACE = {
    "type": "object",
    "required": ["points", "opens"],
    "properties": {
        "points": {"type": "array", "minItems": 1, "items": {"type": "string"}, "uniqueItems": True},
        "opens": {"type": "array", "items": INDEX_SET},
    },
}

FACE_SPACE = {
    "type": "object",
    "required": ["simplices"],
    "properties": {
        "simplices": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": INDEX}},
        "vertices": {"type": "array", "items": {"type": "string"}},
    },
}

COVER = {
    "oneOf": [
        {
            "type": "object",
            "required": ["space", "members"],
            "properties": {"space": SPACE, "members": {"type": "array", "minItems": 1, "items": INDEX_SET}},
        },
        {
            "type": "object",
            "required": ["size", "faces"],
            "properties": {
                "size": {"type": "integer", "minimum": 1},
                "faces": {"type": "array", "minItems": 1, "items": INDEX_SET},
                "labels": {"type": "array", "items": {"type": "string"}},
            },
        },
        {
            "type": "object",
            "required": ["star_cover"],
            "properties": {"star_cover": FACE_SPACE},
        },
        {
            "type": "object",
            "required": ["projective"],
            "properties": {
                "projective": {
                    "type": "object",
                    "required": ["n"],
                    "properties": {
                        "n": {"type": "integer", "minimum": 0},
                        "subspaces": {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": SCALAR}}},
                    },
                }
            },
        },
        {
            "type": "object",
            "required": ["product"],
            "properties": {
                "product": {
                    "type": "object",
                    "required": ["base", "fiber"],
                    "properties": {"base": {"$ref": "#"}, "fiber": {"$ref": "#"}},
                }
            },
        },
    ]
}

COMPLEX = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {"type": "array", "minItems": 1, "items": {"type": "string"}, "uniqueItems": True},
        "edges": {
            "type": "array",
            "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "string"}},
        },
        "cells": {
            "type": "array",
            "items": {"type": "array", "minItems": 1, "items": {"type": "string", "pattern": r"^e[0-9]+~?$"}},
        },
        "base": {"type": "string"},
    },
}

AUTOMORPHISM = {
    "type": "object",
    "required": ["permutation"],
    "properties": {
        "permutation": {"type": "array", "minItems": 1, "items": INDEX},
        "conjugators": {"type": "array", "items": MATRIX},
    },
}

QUADRUPLE = {
    "type": "object",
    "required": ["base", "total", "lift", "generators"],
    "properties": {
        "base": ALGEBRA,
        "total": ALGEBRA,
        "lift": {
            "type": "object",
            "required": ["multiplicities"],
            "properties": {"multiplicities": INT_MATRIX},
        },
        "generators": {"type": "array", "items": AUTOMORPHISM},
        "family": {"type": "array", "items": AUTOMORPHISM},
        "corner": {
            "type": "object",
            "required": ["block", "basis"],
            "properties": {"block": INDEX, "basis": MATRIX},
        },
    },
}

GRAPH = {
    "type": "object",
    "required": ["edges"],
    "properties": {
        "vertices": {"type": "array", "items": {"type": "string"}},
        "edges": {
            "type": "array",
            "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "string"}},
        },
    },
}

GRAPH_MAP = {
    "type": "object",
    "required": ["total", "base", "map"],
    "properties": {
        "total": GRAPH,
        "base": GRAPH,
        "map": {"type": "object", "additionalProperties": {"type": "string"}},
        "through": {"$ref": "#"},
    },
}

PRESHEAF = {
    "type": "object",
    "required": ["space", "sections"],
    "properties": {
        "space": SPACE,
        "sections": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["open", "group"],
                "properties": {"open": INDEX_SET, "group": {"type": "string"}},
            },
        },
        "restrictions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "to", "matrix"],
                "properties": {"from": INDEX_SET, "to": INDEX_SET, "matrix": INT_MATRIX},
            },
        },
    },
}

ELEMENT = {
    "type": "object",
    "required": ["blocks"],
    "properties": {"blocks": {"type": "array", "minItems": 1, "items": MATRIX}},
}

BLOWUP = {
    "type": "object",
    "required": ["algebra", "points", "over"],
    "properties": {
        "algebra": ALGEBRA,
        "points": {"type": "array", "minItems": 1, "items": {"type": "string"}, "uniqueItems": True},
        "over": {"type": "array", "minItems": 1, "items": INDEX},
        "element": ELEMENT,
        "eps": SCALAR,
    },
}

LATTICE = {
    "oneOf": [
        {
            "type": "object",
            "required": ["elements", "leq", "zero"],
            "properties": {
                "elements": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                "leq": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": INDEX}},
                "zero": INDEX,
                "filter": INDEX_SET,
            },
        },
        {
            "type": "object",
            "required": ["space"],
            "properties": {"space": SPACE, "filter": INDEX_SET},
        },
    ]
}

SCHEMAS = {
    "algebra": ALGEBRA,
    "point": POINT,
    "cover": COVER,
    "complex": COMPLEX,
    "quadruple": QUADRUPLE,
    "graph_map": GRAPH_MAP,
    "presheaf": PRESHEAF,
    "blowup": BLOWUP,
    "lattice": LATTICE,
}


def pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def validate(document: Any, kind: str) -> None:
    """Raise SchemaError at the most relevant offending path."""
    try:
        schema = SCHEMAS[kind]
    except KeyError as err:
        raise SchemaError(f"unknown document kind {kind!r}") from err
    error = best_match(Draft7Validator(schema).iter_errors(document))
    if error is not None:
        where = pointer(error.absolute_path)
        raise SchemaError(f"{kind} document invalid at {where}: {error.message}", path=where)
