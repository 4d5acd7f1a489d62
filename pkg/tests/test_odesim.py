import math

import numpy as np
import pytest

from udtune.errors import InvalidArgumentError
from udtune.odesim import SimConfig, rk4_step, simulate
from udtune.plants import make_helicopter


def test_rk4_exponential_growth():
    x = rk4_step(lambda t, x: x, 0.0, np.array([1.0]), 0.1)
    assert x[0] == pytest.approx(math.exp(0.1), abs=1e-6)


def test_rk4_zero_field():
    x0 = np.array([1.0, -2.0, 3.5])
    assert np.array_equal(rk4_step(lambda t, x: np.zeros_like(x), 0.0, x0, 0.3), x0)


def test_rk4_decay_hundred_steps():
    x = np.array([1.0])
    for k in range(100):
        x = rk4_step(lambda t, x: -x, k * 0.01, x, 0.01)
    assert x[0] == pytest.approx(math.exp(-1), abs=1e-8)


def test_rk4_uses_stage_times():
    # dx/dt = t has exact solution t^2 / 2; RK4 integrates polynomials up to degree 3 exactly.
    x = rk4_step(lambda t, x: np.array([t ** 3]), 1.0, np.array([0.0]), 0.5)
    assert x[0] == pytest.approx((1.5 ** 4 - 1.0) / 4, abs=1e-14)


def test_rk4_global_order():
    def err(dt):
        x = np.array([1.0])
        for k in range(int(round(1.0 / dt))):
            x = rk4_step(lambda t, x: -x, k * dt, x, dt)
        return abs(x[0] - math.exp(-1))
    e = [err(dt) for dt in (0.1, 0.05, 0.025)]
    assert 12 <= e[0] / e[1] <= 20
    assert 12 <= e[1] / e[2] <= 20


def test_sim_config_validation():
    with pytest.raises(InvalidArgumentError):
        SimConfig(dt=0)
    with pytest.raises(InvalidArgumentError):
        SimConfig(dt=0.1, horizon=0.05)
    with pytest.raises(InvalidArgumentError):
        SimConfig(state_bound=0)
    assert SimConfig(dt=0.01, horizon=20).nsteps == 2000


@pytest.mark.parametrize("use_kernel", [True, False])
def test_zero_control_equilibrium_is_constant(use_kernel):
    # At elevation pi/2 gravity has no moment; with zero gains and refs at the
    # initial state nothing moves.
    plant = make_helicopter(refs=(0.0, 0.0))
    from dataclasses import replace
    plant = replace(plant, initial_state=(math.pi / 2, 0.0, 0.0, 0.0), kernel=None)
    tr = simulate(plant, np.zeros(6), SimConfig(0.01, 1.0, 100.0), use_kernel=use_kernel)
    assert not tr.diverged
    assert np.allclose(tr.states, tr.states[0], atol=1e-12)


@pytest.mark.parametrize("use_kernel", [True, False])
def test_divergence_is_flagged_and_truncated(use_kernel):
    plant = make_helicopter()
    # Integral action only on the pitch loop, no damping: the pitch runs into
    # its stop, elevation with strong positive feedback blows past the bound.
    gains = np.array([-500.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    tr = simulate(plant, gains, SimConfig(0.01, 20.0, 10.0), use_kernel=use_kernel)
    assert tr.diverged
    assert tr.diverged_at is not None and tr.diverged_at < 20.0
    assert len(tr) < 2001
    assert np.all(np.abs(tr.states) <= 10.0)
    assert len({len(tr.times), len(tr.states), len(tr.controls), len(tr.errors), len(tr.references)}) == 1


def test_gain_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        simulate(make_helicopter(), [1.0, 2.0], SimConfig())


def test_bit_identical_reruns():
    plant = make_helicopter()
    g = [10.0, 5.0, 1.0, 20.0, 8.0, 0.5]
    a = simulate(plant, g, plant.default_sim)
    b = simulate(plant, g, plant.default_sim)
    assert a.to_csv() == b.to_csv()


def test_trajectory_csv_columns():
    plant = make_helicopter()
    tr = simulate(plant, [10.0, 5.0, 1.0, 20.0, 8.0, 0.5], SimConfig(0.01, 0.05, 100.0))
    lines = tr.to_csv().splitlines()
    assert lines[0] == ("time,state_elevation,state_elevation_rate,state_pitch,state_pitch_rate,"
                        "control_u1,control_u2,ref_ele,ref_pit,err_ele,err_pit")
    assert len(lines) == 1 + 6
    assert "\r" not in tr.to_csv()
