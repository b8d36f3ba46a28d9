"""Job configuration: schema validation and conversion to typed objects."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Optional

from jsonschema import Draft202012Validator

from .closedforms import SUPPORTED_DIMENSIONS, Dimension
from .profiles import RadialProfile
from .specfun import DomainError

__all__ = ["ConfigError", "JobConfig", "CONFIG_SCHEMA", "load_config", "parse_config"]

_META = {
    "analytic_bound": {"type": "number", "minimum": 0},
    "analytic_radius": {"type": "number", "exclusiveMinimum": 4},
    "derivative_bounds": {"type": "array", "items": {"type": "number", "minimum": 0}},
}

_PROFILE_BRANCHES = {
    "gaussian": {
        "type": "object",
        "properties": {"kind": {"const": "gaussian"}, "amplitude": {"type": "number"},
                       "width": {"type": "number", "exclusiveMinimum": 0}, **_META},
        "required": ["kind", "amplitude"],
        "additionalProperties": False,
    },
    "poly_r2": {
        "type": "object",
        "properties": {"kind": {"const": "poly_r2"},
                       "coefficients": {"type": "array", "items": {"type": "number"},
                                        "minItems": 1},
                       **_META},
        "required": ["kind", "coefficients"],
        "additionalProperties": False,
    },
    "table": {
        "type": "object",
        "properties": {"kind": {"const": "table"},
                       "radii": {"type": "array", "items": {"type": "number"}, "minItems": 4},
                       "values": {"type": "array", "items": {"type": "number"}, "minItems": 4},
                       **_META},
        "required": ["kind", "radii", "values"],
        "additionalProperties": False,
    },
}

_PROFILE = {
    "type": "object",
    "properties": {"kind": {"enum": list(_PROFILE_BRANCHES)}},
    "required": ["kind"],
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "dimension": {"type": "integer", "enum": list(SUPPORTED_DIMENSIONS)},
        "profile": _PROFILE,
        "mode": {"enum": ["analytic", "ck", "direct", "all"]},
        "R": {"type": "number", "exclusiveMinimum": 4},
        "l_max": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "nodes": {
            "type": "object",
            "properties": {k: {"type": "integer", "minimum": 8}
                           for k in ("radial", "angular", "gegenbauer")},
            "additionalProperties": False,
        },
        "tolerances": {
            "type": "object",
            "properties": {"quadrature_rel": {"type": "number", "exclusiveMinimum": 0},
                           "verdict_margin": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
    },
    "required": ["dimension", "profile", "mode"],
    "additionalProperties": False,
}

DEFAULTS = {
    "l_max": 64,
    "seed": 0,
    "nodes": {"radial": 128, "angular": 128, "gegenbauer": 512},
    "tolerances": {"quadrature_rel": 1e-9, "verdict_margin": 0.0},
}


class ConfigError(ValueError):
    """Invalid job configuration; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class JobConfig:
    dimension: Dimension
    profile: RadialProfile
    mode: str
    R: Optional[float]
    l_max: int
    nodes: dict
    tolerances: dict
    seed: int
    raw: dict  # normalized document with defaults filled in


def _validate(schema: dict, doc, prefix: str):
    errors = list(Draft202012Validator(schema).iter_errors(doc))
    if errors:
        err = min(errors, key=lambda e: (len(e.absolute_path), [str(p) for p in e.absolute_path]))
        parts = [str(p) for p in err.absolute_path]
        _raise(prefix + "/" + "/".join(parts) if parts else prefix or "/", err.message)


def _profile_from(doc: dict) -> RadialProfile:
    meta = {k: doc[k] for k in ("analytic_bound", "analytic_radius", "derivative_bounds") if k in doc}
    kind = doc["kind"]
    if kind == "gaussian":
        return RadialProfile.gaussian(doc["amplitude"], doc.get("width", 1.0), **meta)
    if kind == "poly_r2":
        return RadialProfile.poly_r2(doc["coefficients"], **meta)
    return RadialProfile.table(doc["radii"], doc["values"], **meta)


def parse_config(doc: dict) -> JobConfig:
    _validate(CONFIG_SCHEMA, doc, "")
    _validate(_PROFILE_BRANCHES[doc["profile"]["kind"]], doc["profile"], "/profile")
    norm = copy.deepcopy(doc)
    for key, val in DEFAULTS.items():
        if isinstance(val, dict):
            norm[key] = {**val, **norm.get(key, {})}
        else:
            norm.setdefault(key, val)
    if norm["mode"] == "analytic" and "R" not in norm and "analytic_radius" not in norm["profile"]:
        _raise("/R", "mode 'analytic' requires R")
    if norm["nodes"]["gegenbauer"] < 4 * norm["l_max"]:
        _raise("/nodes/gegenbauer", "need at least 4 * l_max Gegenbauer nodes")
    try:
        profile = _profile_from(norm["profile"])
    except DomainError as exc:
        _raise("/profile", str(exc))
    return JobConfig(dimension=Dimension(norm["dimension"]), profile=profile, mode=norm["mode"],
                     R=norm.get("R"), l_max=norm["l_max"], nodes=norm["nodes"],
                     tolerances=norm["tolerances"], seed=norm["seed"], raw=norm)


def _raise(path: str, message: str):
    raise ConfigError(path, message)


def load_config(path) -> JobConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("/", f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("/", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc)
