"""Closed-form objectives dressed as plants, for exercising the search machinery."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidArgumentError
from ..odesim import SimConfig
from .base import GainSlot, PlantModel


def make_objective_plant(objective, ranges, name: str = "synthetic") -> PlantModel:
    """Plant whose aggregate index is ``objective(gains)``; nothing is simulated."""
    return PlantModel(
        name=name, state_names=(), control_names=(), channel_names=("J",),
        gain_slots=tuple(GainSlot(n, float(lo), float(hi)) for n, lo, hi in ranges),
        initial_state=(), dynamics=None, make_controller=None,
        default_sim=SimConfig(dt=1.0, horizon=1.0), objective=objective,
    )


def make_quadratic(center=None, ranges=None) -> PlantModel:
    """``J(k) = sum_i (k_i - c_i)^2``; by default three gains on [0, 10] centred at (3.3, 7.1, 5.0)."""
    if ranges is None:
        ranges = (("k1", 0.0, 10.0), ("k2", 0.0, 10.0), ("k3", 0.0, 10.0))
    ranges = tuple(tuple(r) for r in ranges)
    if center is None:
        center = (3.3, 7.1, 5.0)[:len(ranges)] + (5.0,) * max(0, len(ranges) - 3)
    c = np.asarray(center, dtype=np.float64)
    if c.shape != (len(ranges),):
        raise InvalidArgumentError(f"center has {c.size} entries for {len(ranges)} gains")

    def objective(k):
        d = np.asarray(k, dtype=np.float64) - c
        return float(np.dot(d, d))

    return make_objective_plant(objective, ranges, name="quadratic")
