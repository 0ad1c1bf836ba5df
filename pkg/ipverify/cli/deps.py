"""Configuration resolution shared by every sub-command.

A run configuration is the JSON file named by ``--config`` (if any) with the
explicitly given flags laid over it, validated by the command's pydantic
model before any computation starts.
"""

import argparse
import json
from pathlib import Path
from typing import Any, Mapping, TypeVar

from pydantic import BaseModel, ValidationError

from ipverify.core.errors import ConfigError

ConfigT = TypeVar("ConfigT", bound=BaseModel)

COMMON_FLAGS = {"out": "out", "format": "format", "seed": "seed", "threads": "threads", "summary": "summary"}

DIST_FIELDS = {
    "gb2": ("nu", "p", "q", "gamma"),
    "b2": ("a", "b"),
    "gb1": ("p", "q", "r", "delta"),
    "b1": ("a", "b"),
}
MAP_FIELDS = {
    "fab": ("alpha", "beta"),
    "fainf": ("alpha",),
    "finfb": ("beta",),
    "fazero": ("alpha",),
    "gdelta": ("delta",),
}


def read_config_file(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def merge(base: dict[str, Any], extra: Mapping[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; values in extra win."""
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def _set_path(target: dict[str, Any], dotted: str, value: Any) -> None:
    *parents, leaf = dotted.split(".")
    node = target
    for key in parents:
        node = node.setdefault(key, {})
    node[leaf] = value


def flag_overrides(args: argparse.Namespace, mapping: Mapping[str, str]) -> dict[str, Any]:
    """Nested overrides from the flags that were actually given."""
    out: dict[str, Any] = {}
    for dest, path in {**COMMON_FLAGS, **mapping}.items():
        value = getattr(args, dest, None)
        if value is not None:
            _set_path(out, path, value)
    return out


def _spec_override(
    data: dict[str, Any], field: str, kind: str | None, args: argparse.Namespace, fields: Mapping[str, tuple[str, ...]]
) -> dict[str, Any]:
    current = data.get(field) if isinstance(data.get(field), dict) else {}
    kind = kind or current.get("kind")
    if kind is None:
        return data
    if kind not in fields:
        raise ConfigError(f"unknown {field} kind {kind!r}")
    spec = dict(current) if current.get("kind") == kind else {}
    spec["kind"] = kind
    for name in fields[kind]:
        value = getattr(args, name, None)
        if value is not None:
            spec[name] = value
    return {**data, field: spec}


def dist_override(data: dict[str, Any], args: argparse.Namespace) -> dict[str, Any]:
    return _spec_override(data, "dist", getattr(args, "dist", None), args, DIST_FIELDS)


def map_override(data: dict[str, Any], args: argparse.Namespace) -> dict[str, Any]:
    return _spec_override(data, "map", getattr(args, "map", None), args, MAP_FIELDS)


def validate(model: type[ConfigT], data: dict[str, Any]) -> ConfigT:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        lines = "; ".join(f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in exc.errors())
        raise ConfigError(f"invalid {model.__name__}: {lines}")


def resolve(model: type[ConfigT], args: argparse.Namespace, mapping: Mapping[str, str]) -> ConfigT:
    data = merge(read_config_file(getattr(args, "config", None)), flag_overrides(args, mapping))
    return validate(model, data)


def parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers, got {text!r}")
