"""Run configuration: JSON file + ``key=value`` overrides, validated in one pass."""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path

from .exceptions import ConfigError

__all__ = ["DEFAULTS", "REQUIRED_IN_FILE", "load_config", "apply_override", "validate"]

# Numerical setup of the reference scenario: h = 50 m, 2.4 GHz, d = lambda/2.
DEFAULTS: dict = {
    "array": {
        "element_count": None,
        "spacing_over_lambda": 0.5,
        "carrier_frequency_hz": 2.4e9,
        "wavelength_m": None,
        "array_type": "broadside",
        "beamwidth_constant": 2.782,
    },
    "geometry": {"h_m": 50.0},
    "error": {"sigma_m": 1.0},
    "optimizer": {
        "p_th": 0.8,
        "n_max": 1024,
        "theta_b_rad": math.pi / 4,
        "probability_model": "halved",
    },
    "sweep": {
        "theta_points": 50,
        "sigma_min_m": 0.1,
        "sigma_max_m": 10.0,
        "sigma_points": 50,
        "p_th_list": [0.7, 0.8, 0.9],
        "target_directivity": 64.0,
        "theta_h_min_rad": 0.01,
        "theta_h_max_rad": 3.0,
        "theta_h_points": 100,
    },
    "codebook": {"beam_count": 16, "angular_resolution_rad": None},
    "traversal": {
        "beam_count": 16,
        "speed_mps": 135.0,
        "time_step_s": 0.001,
        "start_m": None,
        "end_m": None,
        "seed": 0,
    },
    "output": {"directory": "out", "precision": 9},
}

# A config file describes a physical scenario; these must be stated, not defaulted.
REQUIRED_IN_FILE = (
    "array.spacing_over_lambda",
    "array.carrier_frequency_hz",
    "geometry.h_m",
    "error.sigma_m",
    "optimizer.p_th",
)


def _get(cfg: dict, dotted: str):
    node = cfg
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            raise KeyError(dotted)
        node = node[part]
    return node


def _merge(base: dict, update: dict, prefix: str, errors: list[str]) -> None:
    for key, value in update.items():
        path = f"{prefix}{key}"
        if key.endswith("_deg"):
            rad_key = key[:-4] + "_rad"
            if rad_key not in base:
                errors.append(f"{path}: unknown key")
                continue
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                errors.append(f"{path}: expected a number of degrees")
                continue
            base[rad_key] = math.radians(value)
        elif key not in base:
            errors.append(f"{path}: unknown key")
        elif isinstance(base[key], dict):
            if not isinstance(value, dict):
                errors.append(f"{path}: expected an object")
            else:
                _merge(base[key], value, path + ".", errors)
        else:
            base[key] = value


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, assignment: str, errors: list[str]) -> None:
    """Apply one ``section.key=value`` override in place (JSON-typed value)."""
    if "=" not in assignment:
        errors.append(f"--set {assignment!r}: expected key=value")
        return
    dotted, text = assignment.split("=", 1)
    parts = dotted.strip().split(".")
    section = DEFAULTS.get(parts[0])
    if len(parts) != 2 or not isinstance(section, dict):
        errors.append(f"{dotted.strip()}: unknown key")
        return
    nested: dict = {}
    node = nested
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = _parse_value(text)
    _merge(cfg, nested, "", errors)


def _num(cfg, key, errors, *, positive=False, nonneg=False, integer=False,
         lo=None, hi=None, allow_none=False):
    v = _get(cfg, key)
    if v is None:
        if not allow_none:
            errors.append(f"{key}: required")
        return
    ok_type = isinstance(v, int) if integer else isinstance(v, (int, float))
    if isinstance(v, bool) or not ok_type or not math.isfinite(v):
        errors.append(f"{key}: expected {'an integer' if integer else 'a finite number'}, got {v!r}")
        return
    if positive and v <= 0:
        errors.append(f"{key}: must be > 0, got {v!r}")
    if nonneg and v < 0:
        errors.append(f"{key}: must be >= 0, got {v!r}")
    if lo is not None and not v > lo:
        errors.append(f"{key}: must be > {lo}, got {v!r}")
    if hi is not None and not v < hi:
        errors.append(f"{key}: must be < {hi}, got {v!r}")


def validate(cfg: dict) -> None:
    """Check every field; raise one :class:`ConfigError` listing all problems."""
    e = _problems(cfg)
    if e:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(e))


def _problems(cfg: dict) -> list[str]:
    e: list[str] = []
    _num(cfg, "array.element_count", e, positive=True, integer=True, allow_none=True)
    _num(cfg, "array.spacing_over_lambda", e, positive=True)
    _num(cfg, "array.carrier_frequency_hz", e, positive=True)
    _num(cfg, "array.wavelength_m", e, positive=True, allow_none=True)
    if cfg["array"]["array_type"] not in ("broadside", "end-fire"):
        e.append(f"array.array_type: expected 'broadside' or 'end-fire', "
                 f"got {cfg['array']['array_type']!r}")
    _num(cfg, "array.beamwidth_constant", e, positive=True)
    _num(cfg, "geometry.h_m", e, positive=True)
    _num(cfg, "error.sigma_m", e, nonneg=True)
    _num(cfg, "optimizer.p_th", e, lo=0, hi=1)
    _num(cfg, "optimizer.n_max", e, positive=True, integer=True)
    n_max = cfg["optimizer"]["n_max"]
    if isinstance(n_max, int) and n_max > 0 and n_max & (n_max - 1):
        e.append(f"optimizer.n_max: must be a power of two, got {n_max}")
    _num(cfg, "optimizer.theta_b_rad", e, lo=0, hi=math.pi)
    if cfg["optimizer"]["probability_model"] not in ("halved", "interval"):
        e.append("optimizer.probability_model: expected 'halved' or 'interval'")
    _num(cfg, "sweep.theta_points", e, positive=True, integer=True)
    _num(cfg, "sweep.sigma_min_m", e, positive=True)
    _num(cfg, "sweep.sigma_max_m", e, positive=True)
    _num(cfg, "sweep.sigma_points", e, positive=True, integer=True)
    p_list = cfg["sweep"]["p_th_list"]
    if not (isinstance(p_list, list) and p_list
            and all(isinstance(p, (int, float)) and not isinstance(p, bool) and 0 < p < 1
                    for p in p_list)):
        e.append(f"sweep.p_th_list: expected a nonempty list of values in (0, 1), got {p_list!r}")
    _num(cfg, "sweep.target_directivity", e, positive=True)
    _num(cfg, "sweep.theta_h_min_rad", e, lo=0, hi=math.pi)
    _num(cfg, "sweep.theta_h_max_rad", e, lo=0, hi=math.pi)
    _num(cfg, "sweep.theta_h_points", e, positive=True, integer=True)
    _num(cfg, "codebook.beam_count", e, positive=True, integer=True)
    _num(cfg, "codebook.angular_resolution_rad", e, positive=True, allow_none=True)
    _num(cfg, "traversal.beam_count", e, positive=True, integer=True)
    _num(cfg, "traversal.speed_mps", e, positive=True)
    _num(cfg, "traversal.time_step_s", e, positive=True)
    _num(cfg, "traversal.start_m", e, allow_none=True)
    _num(cfg, "traversal.end_m", e, allow_none=True)
    _num(cfg, "traversal.seed", e, nonneg=True, integer=True)
    _num(cfg, "output.precision", e, positive=True, integer=True)
    if not isinstance(cfg["output"]["directory"], str):
        e.append("output.directory: expected a path string")
    return e


def load_config(path: str | Path | None = None, overrides=()) -> dict:
    """Resolve defaults <- file <- overrides and validate the result.

    Without a file the built-in reference scenario is used.  With a file,
    the keys in :data:`REQUIRED_IN_FILE` must appear in it or in an override.
    """
    cfg = copy.deepcopy(DEFAULTS)
    errors: list[str] = []
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config {path}: top level must be a JSON object")
        overridden = {a.split("=", 1)[0].strip() for a in overrides}
        for key in REQUIRED_IN_FILE:
            try:
                _get(data, key)
            except KeyError:
                if key not in overridden:
                    errors.append(f"{key}: missing from config file")
        _merge(cfg, data, "", errors)
    for assignment in overrides:
        apply_override(cfg, assignment, errors)
    errors += _problems(cfg)
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return cfg
