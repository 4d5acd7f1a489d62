"""Quadrotor UAV under cascaded backstepping control.

State vector ``chi`` (12): ``[phi, phi', theta, theta', psi, psi', x, x', y, y', z, z']``.
Gains ``k1..k12`` pair up per channel: (k1, k2) roll phi, (k3, k4) theta,
(k5, k6) yaw, (k7, k8) x, (k9, k10) y, (k11, k12) z; the odd gain acts on
the position-like error, the even one on the velocity-like error.

Model variants:

``"printed"`` (default)
    torque gains ``l/Ix`` on all three torque inputs and vertical
    acceleration ``U1 cos(psi) cos(phi) / m - g``.
``"corrected"``
    ``l/Ix``, ``l/Iy``, ``1/Iz`` and ``U1 cos(theta) cos(phi) / m - g``.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from ..errors import (ControlSingularityError, InfeasibleAttitudeError, InvalidArgumentError,
                      ThrustDegenerateError)
from .. import kernels
from ..odesim import SimConfig, make_trajectory
from .base import GainSlot, PlantModel

VARIANTS = ("printed", "corrected")
REFERENCE_GAINS = (7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 24.0, 20.8, 17.6, 24.0, 12.8)
GAIN_NAMES = tuple(f"k{i}" for i in range(1, 13))
DEFAULT_RANGE = (0.5, 30.0)
ASIN_TOL = 1e-9
SINGULAR_TOL = 1e-6
OMEGA = math.pi / 25.0


@dataclass(frozen=True)
class QuadrotorParams:
    m: float = 2.0
    l: float = 0.2  # noqa: E741
    Ix: float = 1.25e-2
    Iy: float = 1.25e-2
    Iz: float = 2.5e-2
    g: float = 9.8

    def __post_init__(self):
        for name, v in zip(("m", "l", "Ix", "Iy", "Iz", "g"), astuple(self)):
            if not v > 0:
                raise InvalidArgumentError(f"quadrotor parameter {name} must be positive, got {v}")


@dataclass(frozen=True)
class BackstepGains:
    k: tuple[float, ...] = REFERENCE_GAINS

    def __post_init__(self):
        if len(self.k) != 12:
            raise InvalidArgumentError(f"backstepping needs 12 gains, got {len(self.k)}")
        if any(not v > 0 for v in self.k):
            raise InvalidArgumentError(f"backstepping gains must be positive: {self.k}")

    def __getitem__(self, i: int) -> float:
        """1-based access, ``gains[1]`` is k1."""
        return self.k[i - 1]


@dataclass(frozen=True)
class QuadReference:
    pos: tuple[float, float, float]
    vel: tuple[float, float, float]
    acc: tuple[float, float, float]
    psi: float = 0.0
    dpsi: float = 0.0
    ddpsi: float = 0.0


@dataclass(frozen=True)
class AttitudeReference:
    phi: tuple[float, float, float]  # value, first, second derivative
    theta: tuple[float, float, float]
    psi: tuple[float, float, float]


def reference_signals(t: float) -> QuadReference:
    """Circle of radius 0.5 in x-y (period 50 s) while climbing at 1/6 m/s."""
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    s, c = math.sin(OMEGA * t), math.cos(OMEGA * t)
    return QuadReference(
        pos=(0.5 * s, 0.5 * c, t / 6.0),
        vel=(0.5 * OMEGA * c, -0.5 * OMEGA * s, 1.0 / 6.0),
        acc=(-0.5 * OMEGA ** 2 * s, -0.5 * OMEGA ** 2 * c, 0.0),
    )


def _torque_gains(p: QuadrotorParams, variant: str):
    if variant == "corrected":
        return p.l / p.Ix, p.l / p.Iy, 1.0 / p.Iz
    return p.l / p.Ix, p.l / p.Ix, p.l / p.Ix


def attitude_drift(p: QuadrotorParams, chi):
    """Gyroscopic terms of the three angular accelerations (input-free part)."""
    dphi, dtheta, dpsi = chi[1], chi[3], chi[5]
    return (dtheta * dpsi * (p.Iy - p.Iz) / p.Ix,
            dphi * dpsi * (p.Iz - p.Ix) / p.Iy,
            dtheta * dphi * (p.Ix - p.Iy) / p.Iz)


def quadrotor_dynamics(params: QuadrotorParams, chi, U, variant: str = "printed") -> np.ndarray:
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"unknown quadrotor variant {variant!r}")
    phi, dphi, theta, dtheta, psi, dpsi = chi[0], chi[1], chi[2], chi[3], chi[4], chi[5]
    U1, U2, U3, U4 = U
    f_phi, f_theta, f_psi = attitude_drift(params, chi)
    g_phi, g_theta, g_psi = _torque_gains(params, variant)
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    tilt = cth * cphi if variant == "corrected" else cpsi * cphi
    return np.array([
        dphi, f_phi + g_phi * U2,
        dtheta, f_theta + g_theta * U3,
        dpsi, f_psi + g_psi * U4,
        chi[7], U1 * (cpsi * sth * cphi + spsi * sphi) / params.m,
        chi[9], U1 * (spsi * sth * cphi - cpsi * sphi) / params.m,
        chi[11], U1 * tilt / params.m - params.g,
    ])


def thrust_components(U1: float, phi: float, theta: float, psi: float):
    """Forward map from thrust and attitude to ``(Ux, Uy, Uz)``; inverse of :func:`intermediate_controls`."""
    cphi, sphi = math.cos(phi), math.sin(phi)
    return (U1 * (math.cos(psi) * math.sin(theta) * cphi + math.sin(psi) * sphi),
            U1 * (math.sin(psi) * math.sin(theta) * cphi - math.cos(psi) * sphi),
            U1 * math.cos(theta) * cphi)


def intermediate_controls(Ux: float, Uy: float, Uz: float, psi_d: float):
    """Recover total thrust and the desired roll/pitch from the virtual forces."""
    U1 = math.sqrt(Ux * Ux + Uy * Uy + Uz * Uz)
    if U1 == 0.0:
        raise ThrustDegenerateError("zero total thrust")
    arg = (Ux * math.sin(psi_d) - Uy * math.cos(psi_d)) / U1
    if abs(arg) > 1.0 + ASIN_TOL:
        raise InfeasibleAttitudeError(f"asin argument {arg} outside [-1, 1]")
    arg = min(1.0, max(-1.0, arg))
    if Uz == 0.0:
        raise InfeasibleAttitudeError("vertical virtual force is zero")
    phi_d = math.asin(arg)
    theta_d = math.atan((Ux * math.cos(psi_d) + Uy * math.sin(psi_d)) / Uz)
    return U1, phi_d, theta_d


def virtual_control(k_prev: float, z_prev: float, dref_prev: float) -> float:
    """Desired velocity-like state: ``-k z + d/dt(ref)``."""
    return -k_prev * z_prev + dref_prev


def backstep_output(k: float, z: float, z_prev: float, f: float, g: float, dvirtual: float) -> float:
    """Actual control ``(-k z - f + d/dt(virtual) - z_prev) / g``."""
    if abs(g) < SINGULAR_TOL:
        raise ControlSingularityError(f"input gain {g} too close to zero")
    return (-k * z - f + dvirtual - z_prev) / g


def _channel(k_pos, k_vel, p, v, ref, f, g):
    r, dr, ddr = ref
    z_pos = p - r
    v_d = virtual_control(k_pos, z_pos, dr)
    z_vel = v - v_d
    # d/dt of v_d along the trajectory: -k_pos (v - dr) + ddr
    dv_d = -k_pos * (v - dr) + ddr
    return backstep_output(k_vel, z_vel, z_pos, f, g, dv_d)


def position_control(gains: BackstepGains, chi, ref: QuadReference, params: QuadrotorParams):
    """Virtual forces ``(Ux, Uy, Uz)`` from the three translational channels."""
    inv_m = 1.0 / params.m
    Ux = _channel(gains[7], gains[8], chi[6], chi[7], (ref.pos[0], ref.vel[0], ref.acc[0]), 0.0, inv_m)
    Uy = _channel(gains[9], gains[10], chi[8], chi[9], (ref.pos[1], ref.vel[1], ref.acc[1]), 0.0, inv_m)
    Uz = _channel(gains[11], gains[12], chi[10], chi[11], (ref.pos[2], ref.vel[2], ref.acc[2]),
                  -params.g, inv_m)
    return Ux, Uy, Uz


def attitude_control(gains: BackstepGains, chi, att: AttitudeReference, params: QuadrotorParams,
                     variant: str = "printed"):
    f_phi, f_theta, f_psi = attitude_drift(params, chi)
    g_phi, g_theta, g_psi = _torque_gains(params, variant)
    U2 = _channel(gains[1], gains[2], chi[0], chi[1], att.phi, f_phi, g_phi)
    U3 = _channel(gains[3], gains[4], chi[2], chi[3], att.theta, f_theta, g_theta)
    U4 = _channel(gains[5], gains[6], chi[4], chi[5], att.psi, f_psi, g_psi)
    return U2, U3, U4


class RateFilter:
    """Backward difference smoothed by a one-pole low-pass of time constant ``tau``."""

    def __init__(self, dt: float, tau: float):
        self.dt = dt
        self.alpha = dt / (tau + dt)
        self.prev = None
        self.rate = 0.0

    def update(self, value: float) -> float:
        if self.prev is not None:
            raw = (value - self.prev) / self.dt
            self.rate += self.alpha * (raw - self.rate)
        self.prev = value
        return self.rate


class AttitudeDifferentiator:
    """First and second derivatives of the desired roll and pitch angles."""

    def __init__(self, dt: float, tau: float | None = None):
        tau = 5.0 * dt if tau is None else tau
        self._f = [RateFilter(dt, tau) for _ in range(4)]

    def __call__(self, phi_d: float, theta_d: float):
        d_phi = self._f[0].update(phi_d)
        dd_phi = self._f[1].update(d_phi)
        d_theta = self._f[2].update(theta_d)
        dd_theta = self._f[3].update(d_theta)
        return (phi_d, d_phi, dd_phi), (theta_d, d_theta, dd_theta)


def backstep_control(gains: BackstepGains, chi, ref: QuadReference, params: QuadrotorParams,
                     variant: str = "printed", differentiator: AttitudeDifferentiator | None = None):
    """Full control ``(U1, U2, U3, U4)`` plus the attitude reference it tracked.

    Without a ``differentiator`` the desired-angle derivatives are taken as zero.
    """
    Ux, Uy, Uz = position_control(gains, chi, ref, params)
    U1, phi_d, theta_d = intermediate_controls(Ux, Uy, Uz, ref.psi)
    if differentiator is None:
        phi_ref, theta_ref = (phi_d, 0.0, 0.0), (theta_d, 0.0, 0.0)
    else:
        phi_ref, theta_ref = differentiator(phi_d, theta_d)
    att = AttitudeReference(phi=phi_ref, theta=theta_ref, psi=(ref.psi, ref.dpsi, ref.ddpsi))
    U2, U3, U4 = attitude_control(gains, chi, att, params, variant)
    return np.array([U1, U2, U3, U4]), att


class _BackstepController:
    def __init__(self, gains, params, variant, dt):
        self.gains = BackstepGains(tuple(float(v) for v in gains))
        self.params = params
        self.variant = variant
        self.diff = AttitudeDifferentiator(dt)

    def __call__(self, t, chi):
        ref = reference_signals(t)
        U, _ = backstep_control(self.gains, chi, ref, self.params, self.variant, self.diff)
        r = np.array(ref.pos)
        return U, r, r - np.array([chi[6], chi[8], chi[10]])


def path_start_state() -> tuple[float, ...]:
    """At rest on the first point of the reference path, level attitude."""
    chi = [0.0] * 12
    chi[6], chi[8], chi[10] = reference_signals(0.0).pos
    return tuple(chi)


INITIAL_STATES = ("path_start", "origin")


def make_quadrotor(params: QuadrotorParams | None = None, variant: str = "printed", ranges=None,
                   sim: SimConfig | None = None, initial: str = "path_start") -> PlantModel:
    params = params or QuadrotorParams()
    if initial not in INITIAL_STATES:
        raise InvalidArgumentError(f"unknown initial state {initial!r}; expected one of {INITIAL_STATES}")
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"unknown quadrotor variant {variant!r}; expected one of {VARIANTS}")
    if ranges is None:
        ranges = tuple((name, *DEFAULT_RANGE) for name in GAIN_NAMES)

    def dynamics(t, chi, U):
        return quadrotor_dynamics(params, chi, U, variant)

    def make_controller(gains, dt):
        return _BackstepController(gains, params, variant, dt)

    x0 = path_start_state() if initial == "path_start" else (0.0,) * 12
    plant = None

    def kernel(gains, cfg):
        states, controls, refs, diverged, failed = kernels.quadrotor_run(
            np.array(astuple(params)), np.ascontiguousarray(gains, dtype=np.float64), np.array(x0),
            float(cfg.dt), int(cfg.nsteps), float(cfg.state_bound), variant == "corrected", 5.0 * cfg.dt)
        k = states.shape[0]
        err = refs - states[:, [6, 8, 10]]
        return make_trajectory(plant, cfg.dt, states, controls, refs, err, diverged,
                               k * cfg.dt if diverged else None)

    plant = PlantModel(
        name="quadrotor",
        state_names=("phi", "dphi", "theta", "dtheta", "psi", "dpsi", "x", "dx", "y", "dy", "z", "dz"),
        control_names=("U1", "U2", "U3", "U4"),
        channel_names=("x", "y", "z"),
        gain_slots=tuple(GainSlot(n, float(lo), float(hi)) for n, lo, hi in ranges),
        initial_state=x0,
        dynamics=dynamics,
        make_controller=make_controller,
        default_sim=sim or SimConfig(dt=0.001, horizon=50.0, state_bound=1000.0),
        kernel=kernel if kernels.quadrotor_run is not None else None,
        options=(("variant", variant), ("params", params), ("initial", initial)),
    )
    return plant
