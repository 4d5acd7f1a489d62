"""Experiment configuration files (JSON).

Schema, all keys optional except ``plant``::

    {
      "plant": "helicopter3dof" | "quadrotor" | "quadratic",
      "plant_options": {"variant": "...", "params": {...}, "center": [...], "initial": "..."},
      "parameters": [{"name": "k_ele_p", "min": 0, "max": 60}, ...],
      "n": 301,
      "criterion": "itae" | "ise" | "iae" | "overshoot",
      "weights": [1.0, 1.0] | {"ele": 1.0, "pit": 1.0},
      "sim": {"dt": 0.01, "horizon": 20.0, "state_bound": 100.0},
      "budget": 100000,
      "workers": 1,
      "fixed_gains": [...],
      "output": "out/dir",
      "ga": {"population": 40, "generations": 100, "kc1": 1.0, "kc2": 0.5,
             "km1": 0.5, "km2": 0.05, "seed": 0, "mutation_scale": 0.05,
             "max_evaluations": null}
    }

``parameters`` defaults to the plant's own gain slots. ``fixed_gains``
turns a search into a one-row verification run of exactly those gains.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, UDTuneError
from .gabaseline import GaConfig
from .odesim import SimConfig
from .perfindex import CRITERIA
from .plants import PLANTS, HelicopterParams, QuadrotorParams, get_plant
from .plants.base import PlantModel

_TOP_KEYS = {"plant", "plant_options", "parameters", "n", "criterion", "weights", "sim", "budget",
             "workers", "fixed_gains", "output", "ga", "description"}
_PARAM_TYPES = {"helicopter3dof": HelicopterParams, "quadrotor": QuadrotorParams}


@dataclass
class ExperimentConfig:
    plant: PlantModel
    plant_key: str
    ranges: list
    n: int
    criterion: str
    weights: list | None
    sim: SimConfig
    budget: int
    workers: int
    fixed_gains: list | None
    output: str | None
    ga: GaConfig
    source: dict


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _number(v, what, integer=False):
    ok = isinstance(v, int) if integer else isinstance(v, (int, float))
    _require(ok and not isinstance(v, bool), f"{what} must be {'an integer' if integer else 'a number'}, got {v!r}")
    return v


def env_workers(default: int) -> int:
    raw = os.environ.get("UDTUNE_WORKERS")
    if raw is None or raw == "":
        return default
    try:
        w = int(raw)
    except ValueError:
        raise ConfigError(f"UDTUNE_WORKERS must be an integer, got {raw!r}") from None
    _require(w >= 1, "UDTUNE_WORKERS must be >= 1")
    return w


def parse_config(data: dict) -> ExperimentConfig:
    _require(isinstance(data, dict), "config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    key = data.get("plant")
    _require(isinstance(key, str), f"unknown plant {key!r}: config needs a string 'plant' key")
    _require(key in PLANTS, f"unknown plant {key!r}; registered: {sorted(PLANTS)}")

    opts = dict(data.get("plant_options") or {})
    _require(isinstance(opts, dict), "plant_options must be an object")
    if "params" in opts:
        ptype = _PARAM_TYPES.get(key)
        _require(ptype is not None, f"plant {key!r} takes no physical parameters")
        allowed = {f.name for f in fields(ptype)}
        bad = set(opts["params"]) - allowed
        _require(not bad, f"unknown {key} parameters: {sorted(bad)}")
        try:
            opts["params"] = ptype(**opts["params"])
        except (TypeError, UDTuneError) as exc:
            raise ConfigError(str(exc)) from None

    params = data.get("parameters")
    if params is not None:
        _require(isinstance(params, list) and params, "parameters must be a non-empty list")
        ranges = []
        for p in params:
            _require(isinstance(p, dict) and {"name", "min", "max"} <= set(p),
                     f"each parameter needs name/min/max: {p!r}")
            ranges.append((str(p["name"]), float(_number(p["min"], "min")), float(_number(p["max"], "max"))))
        opts["ranges"] = tuple(ranges)
    sim_d = data.get("sim") or {}
    _require(isinstance(sim_d, dict), "sim must be an object")
    bad = set(sim_d) - {"dt", "horizon", "state_bound"}
    _require(not bad, f"unknown sim keys: {sorted(bad)}")
    try:
        plant = get_plant(key, **opts)
        sim = SimConfig(**{**plant.default_sim.__dict__,
                           **{k: float(_number(v, k)) for k, v in sim_d.items()}})
    except TypeError as exc:
        raise ConfigError(f"bad plant_options for {key!r}: {exc}") from None
    except UDTuneError as exc:
        raise ConfigError(str(exc)) from None

    n = _number(data.get("n", 301), "n", integer=True)
    _require(n >= 2, f"n must be >= 2, got {n}")
    criterion = data.get("criterion", "itae")
    _require(criterion in CRITERIA + ("overshoot",), f"unknown criterion {criterion!r}")

    weights = data.get("weights")
    if isinstance(weights, dict):
        _require(set(weights) == set(plant.channel_names),
                 f"weights must name exactly the channels {list(plant.channel_names)}")
        weights = [float(weights[c]) for c in plant.channel_names]
    elif weights is not None:
        _require(isinstance(weights, list) and len(weights) == len(plant.channel_names),
                 f"weights must have {len(plant.channel_names)} entries")
        weights = [float(_number(w, "weight")) for w in weights]
    if weights is not None:
        _require(all(w >= 0 for w in weights), "weights must be nonnegative")

    budget = _number(data.get("budget", 100_000), "budget", integer=True)
    _require(budget >= 1, "budget must be >= 1")
    workers = _number(data.get("workers", 1), "workers", integer=True)
    _require(workers >= 1, "workers must be >= 1")

    fixed = data.get("fixed_gains")
    if fixed is not None:
        _require(isinstance(fixed, list) and len(fixed) == len(plant.gain_slots),
                 f"fixed_gains must list {len(plant.gain_slots)} numbers")
        fixed = [float(_number(v, "gain")) for v in fixed]

    ga_d = data.get("ga") or {}
    _require(isinstance(ga_d, dict), "ga must be an object")
    bad = set(ga_d) - {f.name for f in fields(GaConfig)}
    _require(not bad, f"unknown ga keys: {sorted(bad)}")
    try:
        ga = GaConfig(**ga_d)
    except (TypeError, UDTuneError) as exc:
        raise ConfigError(f"invalid ga section: {exc}") from None

    output = data.get("output")
    _require(output is None or isinstance(output, str), "output must be a string path")
    return ExperimentConfig(plant=plant, plant_key=key, ranges=plant.ranges, n=n, criterion=criterion,
                            weights=weights, sim=sim, budget=budget, workers=workers, fixed_gains=fixed,
                            output=output, ga=ga, source=data)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(data)


def shipped_config(name: str) -> Path:
    """Path of a config bundled with the package, e.g. ``shipped_config("helicopter_n301.json")``."""
    return Path(__file__).parent / "configs" / name
