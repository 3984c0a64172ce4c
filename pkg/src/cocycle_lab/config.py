"""Experiment configs: JSON documents checked against a per-command schema."""
from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import CocycleLabError

COMMANDS = ("check-length", "cocycle", "bmo", "multiplier", "mihlin", "lp", "meyer",
            "khintchine", "fft", "report-merge")

TOLERANCES = {
    "rank": 1e-10,        # eigenvalue cutoff for the Gram realisation
    "roundtrip": 1e-10,   # ||b(g)-b(h)||^2 vs psi
    "law": 1e-8,          # cocycle law and orthogonality
    "psd": 1e-8,          # Schoenberg and Kadison-Schwarz eigenvalues
    "gamma": 1e-10,       # gradient-form identities
    "plancherel": 1e-10,
    "l2": 1e-9,           # p = 2 norm laws
    "meyer_p2": 1e-6,
    "golden": 1e-6,
    "bmo_char": 0.999,    # lower bound for the BMO norm of a character
}


class ConfigError(CocycleLabError):
    """Schema violation; carries a JSON pointer to the offending field."""

    def __init__(self, message, pointer="/"):
        super().__init__(f"{pointer}: {message}", operation="config")
        self.pointer = pointer


NUM = (int, float)
ANY = object

GROUP = {"kind": str, "n": int, "factors": list, "path": str, "k": int, "radius": int}
PSI = {"values": list, "catalog": str, "params": dict, "random": dict}
COMMON = {"command": str, "seed": int, "tolerances": dict, "out": str, "golden": str,
          "label": str}

SCHEMAS = {
    "check-length": {"group": GROUP, "psi": PSI, "t_grid": list},
    "cocycle": {"group": GROUP, "psi": PSI, "side": str, "radii": list},
    "bmo": {"group": GROUP, "psi": PSI, "num_elements": int, "t_grid": list,
            "characters": bool},
    "multiplier": {"group": GROUP, "psi": PSI, "symbol": dict, "p": list, "trials": int,
                   "steps": int},
    "mihlin": {"expression": str, "n": int, "order": int, "eps": float, "threshold": NUM,
               "directions": int, "shells": list, "step_rel": float},
    "lp": {"group": GROUP, "psi": PSI, "family": dict, "p": list, "num_samples": int},
    "meyer": {"group": GROUP, "psi": PSI, "p": list, "num_samples": int},
    "khintchine": {"group": GROUP, "psi": PSI, "p": list, "num_samples": int, "num_z": int},
    "fft": {"symbol": dict, "p": list, "N": list, "trials": int, "steps": int, "scale": NUM,
            "max_factor": NUM},
    "report-merge": {"inputs": list},
}

DEFAULTS = {
    "check-length": {"t_grid": None},
    "cocycle": {"side": "left", "radii": [0.0, 0.5, 1.0, 1.5, 2.0, 4.0]},
    "bmo": {"num_elements": 10, "t_grid": None, "characters": True},
    "multiplier": {"symbol": {"type": "riesz"}, "p": [2, 4], "trials": 4, "steps": 50},
    "mihlin": {"n": 1, "order": None, "eps": 0.1, "threshold": None, "directions": 16,
               "shells": None, "step_rel": 1e-4},
    "lp": {"family": {}, "p": [2, 4], "num_samples": 20},
    "meyer": {"p": [2, 4], "num_samples": 50},
    "khintchine": {"p": [2, 4], "num_samples": 3, "num_z": 20000},
    "fft": {"symbol": {"type": "donut", "alpha": 1.0, "beta": 1.4142135623730951, "gamma": 0.25},
            "p": [2, 4], "N": [256, 512, 1024], "trials": 4, "steps": 100, "scale": None,
            "max_factor": None},
    "report-merge": {},
}

REQUIRED = {
    "check-length": ("psi",), "cocycle": ("psi",), "bmo": ("psi",), "multiplier": ("psi",),
    "mihlin": ("expression",), "lp": ("psi",), "meyer": ("psi",), "khintchine": ("psi",),
    "fft": (), "report-merge": ("inputs",),
}


def _type_ok(value, expected):
    if expected is ANY:
        return True
    if isinstance(expected, dict):
        return isinstance(value, dict)
    if expected is float or expected == NUM:
        return isinstance(value, NUM) and not isinstance(value, bool)
    if expected is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, expected)


def _check_fields(data, schema, pointer):
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"unknown field {key!r}", f"{pointer}/{key}")
        expected = schema[key]
        if value is None:
            continue
        if not _type_ok(value, expected):
            name = "object" if isinstance(expected, dict) else getattr(expected, "__name__", "number")
            raise ConfigError(f"expected {name}, got {type(value).__name__}", f"{pointer}/{key}")
        if isinstance(expected, dict):
            _check_fields(value, expected, f"{pointer}/{key}")


def validate(command: str, data: dict) -> dict:
    """Checked copy of ``data`` with defaults filled in."""
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}", "/command")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    schema = {**COMMON, **SCHEMAS[command]}
    _check_fields(data, schema, "")
    if data.get("command", command) != command:
        raise ConfigError(f"config is for {data['command']!r}, not {command!r}", "/command")
    for key in REQUIRED[command]:
        if key not in data:
            raise ConfigError("required field missing", f"/{key}")
    for key in data.get("tolerances", {}) or {}:
        if key not in TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}", f"/tolerances/{key}")
    out = copy.deepcopy(DEFAULTS[command])
    out.update(copy.deepcopy(data))
    out["command"] = command
    out.setdefault("seed", 0)
    out["tolerances"] = {**TOLERANCES, **(data.get("tolerances") or {})}
    return out


def load(path, command: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    return validate(command, data)


def dumps(config: dict) -> str:
    return json.dumps(config, sort_keys=True, indent=2)


def parse_overrides(items) -> dict:
    """``["law=1e-9", ...]`` -> ``{"law": 1e-9}``."""
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not KEY=VALUE", "/tolerances")
        if key not in TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}", f"/tolerances/{key}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"tolerance {key} needs a number, got {value!r}",
                              f"/tolerances/{key}") from None
    return out
