"""Fixed-step RK4 closed-loop simulation with divergence detection."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (ControlSingularityError, InfeasibleAttitudeError, InvalidArgumentError,
                     ThrustDegenerateError)

log = logging.getLogger(__name__)

# Controller failures that end a run as "diverged" instead of propagating.
_CONTROL_FAILURES = (ControlSingularityError, ThrustDegenerateError, InfeasibleAttitudeError)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    horizon: float = 20.0
    state_bound: float = 100.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        if not self.horizon >= self.dt:
            raise InvalidArgumentError(f"horizon ({self.horizon}) must be >= dt ({self.dt})")
        if not self.state_bound > 0:
            raise InvalidArgumentError(f"state_bound must be positive, got {self.state_bound}")

    @property
    def nsteps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass
class Trajectory:
    dt: float
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    references: np.ndarray
    errors: np.ndarray
    state_names: tuple[str, ...]
    control_names: tuple[str, ...]
    channel_names: tuple[str, ...]
    diverged: bool = False
    diverged_at: float | None = None
    clamp_events: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.times.size

    def channel(self, name: str) -> np.ndarray:
        return self.errors[:, self.channel_names.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time"] + [f"state_{s}" for s in self.state_names]
                   + [f"control_{c}" for c in self.control_names]
                   + [f"ref_{c}" for c in self.channel_names]
                   + [f"err_{c}" for c in self.channel_names])
        for k in range(len(self)):
            row = [self.times[k], *self.states[k], *self.controls[k], *self.references[k], *self.errors[k]]
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def rk4_step(f, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``dx/dt = f(t, x)``.

    Non-finite output is returned as-is; the caller decides what divergence means.
    """
    k1 = f(t, x)
    k2 = f(t + dt / 2.0, x + dt / 2.0 * k1)
    k3 = f(t + dt / 2.0, x + dt / 2.0 * k2)
    k4 = f(t + dt, x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _out_of_bounds(x: np.ndarray, bound: float) -> bool:
    return not np.all(np.isfinite(x)) or bool(np.any(np.abs(x) > bound))


def simulate(plant, gains, cfg: SimConfig, use_kernel: bool = True) -> Trajectory:
    """Integrate ``plant`` in closed loop under ``gains``.

    The control is computed once per step from the current state and held
    constant through all four RK4 stages. A run stops at the first step whose
    state leaves ``cfg.state_bound`` or turns non-finite; the returned
    trajectory then holds only the samples before that step.
    """
    gains = np.asarray(gains, dtype=np.float64)
    if gains.shape != (len(plant.gain_slots),):
        raise InvalidArgumentError(
            f"plant {plant.name!r} expects {len(plant.gain_slots)} gains, got shape {gains.shape}")
    if use_kernel and plant.kernel is not None:
        return plant.kernel(gains, cfg)
    return _simulate_generic(plant, gains, cfg)


def _simulate_generic(plant, gains, cfg: SimConfig) -> Trajectory:
    dt, nsteps = cfg.dt, cfg.nsteps
    ctrl = plant.make_controller(gains, dt)
    x = np.array(plant.initial_state, dtype=np.float64)
    states, controls, refs, errs = [], [], [], []
    diverged, diverged_at, clamps = False, None, 0
    for k in range(nsteps + 1):
        t = k * dt
        try:
            u, ref, err = ctrl(t, x)
        except _CONTROL_FAILURES as exc:
            log.debug("%s: control failure at t=%.4f: %s", plant.name, t, exc)
            diverged, diverged_at = True, t
            break
        states.append(x)
        controls.append(u)
        refs.append(ref)
        errs.append(err)
        if k == nsteps:
            break
        x = rk4_step(lambda tt, xx: plant.dynamics(tt, xx, u), t, x, dt)
        if plant.project is not None:
            x, clamped = plant.project(x)
            clamps += int(clamped)
        if _out_of_bounds(x, cfg.state_bound):
            diverged, diverged_at = True, (k + 1) * dt
            break
    return make_trajectory(plant, dt, states, controls, refs, errs, diverged, diverged_at, clamps)


def make_trajectory(plant, dt, states, controls, refs, errs, diverged=False, diverged_at=None, clamps=0):
    ns, nu, nc = len(plant.state_names), len(plant.control_names), len(plant.channel_names)
    k = len(states)

    def stack(rows, width):
        return np.asarray(rows, dtype=np.float64).reshape(k, width)

    return Trajectory(
        dt=dt, times=np.arange(k) * dt,
        states=stack(states, ns), controls=stack(controls, nu),
        references=stack(refs, nc), errors=stack(errs, nc),
        state_names=plant.state_names, control_names=plant.control_names,
        channel_names=plant.channel_names,
        diverged=diverged, diverged_at=diverged_at, clamp_events=clamps,
    )
