"""Run configuration: a versioned JSON document plus command-line overrides."""

from __future__ import annotations

import copy
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError

FORMAT_TAG = "spinberry-config/1"

DEFAULTS = {
    "format": FORMAT_TAG,
    "mass": 1.0,
    "profile": {"shape": "gaussian", "width": 1.0, "p_max": None},
    "quadrature": {"n_r": 64, "n_theta": 32, "n_phi": 32},
    # spin labels for spin-expectation / connection / curvature
    "points": [[0.6, 0.0, 0.8], [1.0, 0.0, 0.0], [0.3, -0.4, 0.5]],
    "contour": {"shape": "circle", "theta": math.pi / 3, "n": 2000, "radius": 1.0, "clockwise": False},
    "mesh": {"n_rings": 40, "hole": 1e-3},
    "fd_step": 1e-4,
    "sphere": {"n_theta": 64, "n_phi": 128},
    "adiabatic": {
        "splitting": 1.0,
        "durations": [50.0, 100.0, 200.0, 500.0],
        "steps": 100000,
        "field": "contour",
        "direction": [0.0, 0.0, 1.0],
    },
    # parameters of the acceptance suite run by verify-all
    "acceptance": {
        "random_points": 100,
        "spin_directions": 10,
        "overlap_pairs": 20,
        "curvature_points": 50,
        "cap_thetas": [math.pi / 6, math.pi / 3, math.pi / 2],
        "circle_points": 100000,
        "discrete_points": 2000,
        "adiabatic_steps": 100000,
        "rotating_steps": 10000,
    },
    "seed": 20240501,
    "resolution_scale": 1.0,
    "output": {"format": "json", "path": None, "timestamp": False, "timing": False},
}

PROFILE_SHAPES = ("gaussian", "exponential")
CONTOUR_SHAPES = ("circle", "polygon", "file")


def _merge(base, over, path=""):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(base[key], dict) and key not in ("contour",):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            out[key] = _merge(base[key], val, path + key + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def load(path=None, overrides: dict | None = None) -> dict:
    """Read a config file (or the defaults), apply overrides and validate."""
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        tag = data.get("format", FORMAT_TAG)
        if tag != FORMAT_TAG:
            raise ConfigError(f"unsupported config format {tag!r}; expected {FORMAT_TAG!r}")
    cfg = _merge(DEFAULTS, data)
    for dotted, value in (overrides or {}).items():
        node = cfg
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node[key]
        node[leaf] = value
    validate(cfg)
    return cfg


def _positive(value, name):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{name} must be a positive number, got {value!r}")


def _count(value, name, minimum):
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")


def _vector(value, name):
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of 3 numbers") from None
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ConfigError(f"{name} must be a list of 3 finite numbers")
    if not np.any(v):
        raise ConfigError(f"{name}: zero spin vector")
    return v


def validate(cfg: dict) -> None:
    """Check every field against the preconditions of the operations that use it."""
    _positive(cfg["mass"], "mass")
    prof = cfg["profile"]
    if prof["shape"] not in PROFILE_SHAPES:
        raise ConfigError(f"profile.shape must be one of {PROFILE_SHAPES}")
    _positive(prof["width"], "profile.width")
    if prof["p_max"] is not None:
        _positive(prof["p_max"], "profile.p_max")
    for key in ("n_r", "n_theta", "n_phi"):
        _count(cfg["quadrature"][key], f"quadrature.{key}", 2)
    if not isinstance(cfg["points"], list) or not cfg["points"]:
        raise ConfigError("points must be a non-empty list of spin vectors")
    for i, p in enumerate(cfg["points"]):
        _vector(p, f"points[{i}]")
    con = cfg["contour"]
    shape = con.get("shape")
    if shape not in CONTOUR_SHAPES:
        raise ConfigError(f"contour.shape must be one of {CONTOUR_SHAPES}")
    if shape == "circle":
        theta = con.get("theta")
        if not isinstance(theta, (int, float)) or not 0 < theta < math.pi:
            raise ConfigError("contour.theta must lie strictly between 0 and pi (poles are singular)")
        _count(con.get("n", 2000), "contour.n", 3)
        _positive(con.get("radius", 1.0), "contour.radius")
    elif shape == "polygon":
        verts = con.get("vertices")
        if not isinstance(verts, list) or len(verts) < 3:
            raise ConfigError("contour.vertices must list at least 3 spin vectors")
        for i, v in enumerate(verts):
            _vector(v, f"contour.vertices[{i}]")
        _count(con.get("points_per_edge", 1), "contour.points_per_edge", 1)
    else:
        if not isinstance(con.get("path"), str):
            raise ConfigError("contour.path must name a text file of s_x s_y s_z rows")
    _count(cfg["mesh"]["n_rings"], "mesh.n_rings", 1)
    _positive(cfg["mesh"]["hole"], "mesh.hole")
    _positive(cfg["fd_step"], "fd_step")
    if cfg["fd_step"] > 0.05:
        raise ConfigError("fd_step must be <= 0.05")
    _count(cfg["sphere"]["n_theta"], "sphere.n_theta", 3)
    _count(cfg["sphere"]["n_phi"], "sphere.n_phi", 3)
    ad = cfg["adiabatic"]
    _positive(ad["splitting"], "adiabatic.splitting")
    durs = ad["durations"]
    if not isinstance(durs, list) or not durs:
        raise ConfigError("adiabatic.durations must be a non-empty list")
    for d in durs:
        _positive(d, "adiabatic.durations[]")
    if any(b <= a for a, b in zip(durs, durs[1:])):
        raise ConfigError("adiabatic.durations must be strictly increasing")
    _count(ad["steps"], "adiabatic.steps", 100)
    if ad["field"] not in ("contour", "constant"):
        raise ConfigError("adiabatic.field must be 'contour' or 'constant'")
    _vector(ad["direction"], "adiabatic.direction")
    acc = cfg["acceptance"]
    for key in ("random_points", "spin_directions", "overlap_pairs", "curvature_points"):
        _count(acc[key], f"acceptance.{key}", 2)
    for key in ("circle_points", "discrete_points"):
        _count(acc[key], f"acceptance.{key}", 3)
    for key in ("adiabatic_steps", "rotating_steps"):
        _count(acc[key], f"acceptance.{key}", 100)
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise ConfigError("seed must be an integer")
    _positive(cfg["resolution_scale"], "resolution_scale")
    out = cfg["output"]
    if out["format"] not in ("json", "csv"):
        raise ConfigError("output.format must be 'json' or 'csv'")


def canonical_json(cfg: dict) -> str:
    # the output block only affects presentation, not results
    payload = {k: v for k, v in cfg.items() if k != "output"}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()[:16]


def scaled_count(n: int, cfg: dict, minimum: int = 3) -> int:
    return max(minimum, int(round(n * cfg["resolution_scale"])))
