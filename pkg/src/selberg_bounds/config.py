"""Configuration file loading.

Lookup order: an explicit path, then ``$SELBERG_BOUNDS_CONFIG``, then the
packaged default.  The schema is documented in the README.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .bounds import DEFAULT_TOL, ExternalConstants
from .fuchsian.group import GroupSpec

__all__ = ["Config", "ConfigError", "load_config", "ENV_VAR"]

ENV_VAR = "SELBERG_BOUNDS_CONFIG"


class ConfigError(ValueError):
    """The configuration file is missing or malformed."""


@dataclass
class Config:
    quadrature_tol: float = DEFAULT_TOL
    output_format: str = "json"
    external: ExternalConstants = field(default_factory=ExternalConstants)
    groups: dict = field(default_factory=dict)
    depth: int = 14
    element_cap: int = 5_000_000
    lmax: float = 8.0
    trace_cap: Optional[float] = None
    source: str = "<default>"

    def group(self, label: str) -> GroupSpec:
        if label not in self.groups:
            known = ", ".join(sorted(self.groups)) or "none"
            raise ConfigError(f"unknown group '{label}'; configured groups: {known}")
        return self.groups[label]


def _table(raw: dict, label: str) -> dict:
    out = {}
    for k, v in (raw or {}).items():
        if v is None:
            continue
        try:
            out[int(k)] = float(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"external_constants.{label}[{k!r}] is not a number") from exc
    return out


def parse_config(data: dict, source: str = "<dict>") -> Config:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be an object")
    try:
        tol = float(data.get("quadrature_tol", DEFAULT_TOL))
        ec = data.get("external_constants", {}) or {}
        ext = ExternalConstants(W=_table(ec.get("W"), "W"), K=_table(ec.get("K"), "K"),
                                v=_table(ec.get("v"), "v"), tol=tol)
        groups = {label: GroupSpec.from_dict(label, g)
                  for label, g in (data.get("groups", {}) or {}).items()}
        enum = data.get("enumeration", {}) or {}
        fmt = data.get("output_format", "json")
        if fmt not in ("json", "csv"):
            raise ConfigError(f"output_format must be 'json' or 'csv', not {fmt!r}")
        cap = enum.get("trace_cap")
        return Config(tol, fmt, ext, groups, int(enum.get("depth", 14)),
                      int(enum.get("element_cap", 5_000_000)), float(enum.get("lmax", 8.0)),
                      None if cap is None else float(cap), source)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration in {source}: {exc}") from exc


def load_config(path: Optional[str] = None) -> Config:
    path = path or os.environ.get(ENV_VAR)
    if path:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        source = path
    else:
        text = resources.files("selberg_bounds").joinpath("data/default_config.json").read_text()
        source = "<default>"
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {source} is not valid JSON: {exc}") from exc
    return parse_config(data, source)
