from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import InvalidArgumentError
from ..odesim import SimConfig


@dataclass(frozen=True)
class GainSlot:
    name: str
    low: float
    high: float


@dataclass(frozen=True)
class PlantModel:
    """A simulable closed loop: dynamics, controller law, references, gain slots.

    ``make_controller(gains, dt)`` returns a fresh stateful callable
    ``ctrl(t, x) -> (u, ref, err)``, so per-run controller memory never lives
    on the shared model. ``kernel``, when set, is a compiled fast path that
    must reproduce the generic loop. ``objective`` short-circuits simulation
    for synthetic test plants.
    """

    name: str
    state_names: tuple[str, ...]
    control_names: tuple[str, ...]
    channel_names: tuple[str, ...]
    gain_slots: tuple[GainSlot, ...]
    initial_state: tuple[float, ...]
    dynamics: Callable | None
    make_controller: Callable | None
    default_sim: SimConfig
    project: Callable | None = None
    kernel: Callable | None = None
    objective: Callable | None = None
    step_channels: bool = False
    options: tuple = ()

    def __post_init__(self):
        if self.objective is None and (self.dynamics is None or self.make_controller is None):
            raise InvalidArgumentError(f"plant {self.name!r} needs dynamics and a controller")

    @property
    def gain_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.gain_slots)

    @property
    def ranges(self) -> list[tuple[str, float, float]]:
        return [(s.name, s.low, s.high) for s in self.gain_slots]
