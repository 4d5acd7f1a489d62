"""3-DOF helicopter, elevation and pitch axes, under two PID loops.

State ``(x1, x2, x3, x4) = (elevation, elevation rate, pitch, pitch rate)``;
inputs ``u1 = Vf + Vb`` and ``u2 = Vf - Vb``. The travel axis is left free
and not modelled.

Two model variants exist:

``"printed"`` (default)
    x2' = Kf La cos(x3) u1 - m g La cos(x1),  x4' = Kf Lh u2
``"inertia"``
    the same right-hand sides divided by Je and Jp respectively.
"""
from __future__ import annotations

import logging
import math
from dataclasses import astuple, dataclass

import numpy as np

from .. import kernels
from ..errors import InvalidArgumentError
from ..odesim import SimConfig, make_trajectory
from .base import GainSlot, PlantModel

log = logging.getLogger(__name__)

PITCH_LIMIT = math.pi / 2 - 1e-6
REF_ELEVATION = 0.4
REF_PITCH = 0.02
VARIANTS = ("printed", "inertia")

# Search box per gain, in (k_ele_p, k_ele_d, k_ele_i, k_pit_p, k_pit_d, k_pit_i) order.
GAIN_RANGES = (
    ("k_ele_p", 0.0, 60.0),
    ("k_ele_d", 0.0, 60.0),
    ("k_ele_i", 0.0, 6.0),
    ("k_pit_p", 0.0, 60.0),
    ("k_pit_d", 0.0, 60.0),
    ("k_pit_i", 0.0, 30.0),
)


@dataclass(frozen=True)
class HelicopterParams:
    Kf: float = 0.1188
    La: float = 0.660
    Je: float = 1.034
    Jp: float = 0.045
    g: float = 9.8
    m: float = 0.094
    Lh: float = 0.178

    def __post_init__(self):
        for name, v in zip(("Kf", "La", "Je", "Jp", "g", "m", "Lh"), astuple(self)):
            if not v > 0:
                raise InvalidArgumentError(f"helicopter parameter {name} must be positive, got {v}")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


@dataclass(frozen=True)
class PidGains:
    kp_ele: float
    kd_ele: float
    ki_ele: float
    kp_pit: float
    kd_pit: float
    ki_pit: float

    def __post_init__(self):
        if any(v < 0 for v in astuple(self)):
            raise InvalidArgumentError(f"PID gains must be nonnegative: {self}")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


def helicopter_dynamics(params: HelicopterParams, state, u, variant: str = "printed") -> np.ndarray:
    x1, x2, x3, x4 = state
    u1, u2 = u
    a = params.Kf * params.La * math.cos(x3) * u1 - params.m * params.g * params.La * math.cos(x1)
    b = params.Kf * params.Lh * u2
    if variant == "inertia":
        a = a / params.Je
        b = b / params.Jp
    return np.array([x2, a, x4, b])


def gravity_balance_input(params: HelicopterParams, x1: float, x3: float = 0.0) -> float:
    """Collective voltage ``u1`` that holds the elevation still at angle ``x1``."""
    return params.m * params.g * math.cos(x1) / (params.Kf * math.cos(x3))


def clamp_pitch(state) -> tuple[np.ndarray, bool]:
    """Pin the pitch at its mechanical stop and zero its rate if it got there."""
    x = np.asarray(state, dtype=np.float64)
    if abs(x[2]) <= PITCH_LIMIT:
        return x, False
    x = x.copy()
    x[2] = math.copysign(PITCH_LIMIT, x[2])
    x[3] = 0.0
    log.debug("pitch saturated at %+.6f rad", x[2])
    return x, True


def pid_control(kp, ki, kd, e, e_prev, e_int, dt):
    """Return ``(u, e_int)`` after folding the last interval into the integral.

    The integral is accumulated by the trapezoid rule before the control is
    evaluated; the derivative is a plain backward difference.
    """
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    e_int = e_int + dt * (e + e_prev) / 2.0
    u = kp * e + kd * (e - e_prev) / dt + ki * e_int
    return u, e_int


class _PidPair:
    def __init__(self, gains, refs, dt):
        self.g = [float(v) for v in gains]
        self.refs = refs
        self.dt = dt
        self.e_prev = None
        self.e_int = [0.0, 0.0]

    def __call__(self, t, x):
        kpe, kde, kie, kpp, kdp, kip = self.g
        e = (self.refs[0] - x[0], self.refs[1] - x[2])
        if self.e_prev is None:
            # No elapsed interval yet: no integral increment, no derivative kick.
            u1 = kpe * e[0] + kie * self.e_int[0]
            u2 = kpp * e[1] + kip * self.e_int[1]
        else:
            u1, self.e_int[0] = pid_control(kpe, kie, kde, e[0], self.e_prev[0], self.e_int[0], self.dt)
            u2, self.e_int[1] = pid_control(kpp, kip, kdp, e[1], self.e_prev[1], self.e_int[1], self.dt)
        self.e_prev = e
        return np.array([u1, u2]), np.array(self.refs), np.array(e)


def make_helicopter(params: HelicopterParams | None = None, variant: str = "printed",
                    ranges=GAIN_RANGES, refs=(REF_ELEVATION, REF_PITCH),
                    sim: SimConfig | None = None) -> PlantModel:
    params = params or HelicopterParams()
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"unknown helicopter variant {variant!r}; expected one of {VARIANTS}")
    refs = (float(refs[0]), float(refs[1]))
    p_arr = params.as_array()
    r_arr = np.array(refs)
    x0 = (0.0, 0.0, 0.0, 0.0)

    def dynamics(t, x, u):
        return helicopter_dynamics(params, x, u, variant)

    def make_controller(gains, dt):
        return _PidPair(gains, refs, dt)

    plant = None

    def kernel(gains, cfg):
        states, controls, diverged, clamps = kernels.helicopter_run(
            p_arr, np.ascontiguousarray(gains, dtype=np.float64), r_arr, np.array(x0),
            float(cfg.dt), int(cfg.nsteps), float(cfg.state_bound), variant == "inertia")
        k = states.shape[0]
        ref = np.broadcast_to(r_arr, (k, 2))
        err = ref - states[:, [0, 2]]
        diverged_at = k * cfg.dt if diverged else None
        if clamps:
            log.debug("pitch saturated %d times", clamps)
        return make_trajectory(plant, cfg.dt, states, controls, ref, err, diverged, diverged_at, clamps)

    plant = PlantModel(
        name="helicopter3dof",
        state_names=("elevation", "elevation_rate", "pitch", "pitch_rate"),
        control_names=("u1", "u2"),
        channel_names=("ele", "pit"),
        gain_slots=tuple(GainSlot(n, float(lo), float(hi)) for n, lo, hi in ranges),
        initial_state=x0,
        dynamics=dynamics,
        make_controller=make_controller,
        project=clamp_pitch,
        kernel=kernel,
        default_sim=sim or SimConfig(dt=0.01, horizon=20.0, state_bound=100.0),
        step_channels=True,
        options=(("variant", variant), ("params", params)),
    )
    return plant
