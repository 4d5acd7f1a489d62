import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udtune import kernels
from udtune.errors import (ControlSingularityError, InfeasibleAttitudeError, InvalidArgumentError,
                           ThrustDegenerateError)
from udtune.odesim import SimConfig, rk4_step, simulate
from udtune.plants.quadrotor import (OMEGA, REFERENCE_GAINS, AttitudeDifferentiator, BackstepGains,
                                     QuadrotorParams, RateFilter, backstep_control, backstep_output,
                                     intermediate_controls, make_quadrotor, path_start_state,
                                     quadrotor_dynamics, reference_signals, thrust_components)

P = QuadrotorParams()


def test_physical_defaults():
    assert (P.m, P.l, P.Ix, P.Iy, P.Iz, P.g) == (2.0, 0.2, 1.25e-2, 1.25e-2, 2.5e-2, 9.8)
    with pytest.raises(InvalidArgumentError):
        QuadrotorParams(m=-1.0)


def test_gains_are_one_based_and_positive():
    g = BackstepGains(REFERENCE_GAINS)
    assert g[1] == REFERENCE_GAINS[0] and g[12] == REFERENCE_GAINS[11]
    with pytest.raises(InvalidArgumentError):
        BackstepGains((1.0,) * 11)
    with pytest.raises(InvalidArgumentError):
        BackstepGains((1.0,) * 11 + (0.0,))


@pytest.mark.parametrize("variant", ["printed", "corrected"])
def test_hover_is_an_equilibrium(variant):
    chi = np.zeros(12)
    d = quadrotor_dynamics(P, chi, (P.m * P.g, 0.0, 0.0, 0.0), variant)
    assert np.allclose(d, 0.0, atol=1e-15)
    x = chi.copy()
    for k in range(1000):
        x = rk4_step(lambda t, s: quadrotor_dynamics(P, s, (P.m * P.g, 0, 0, 0), variant), k * 1e-3, x, 1e-3)
    assert np.max(np.abs(x)) < 1e-9


def test_free_fall_without_thrust():
    d = quadrotor_dynamics(P, np.zeros(12), (0.0, 0.0, 0.0, 0.0))
    assert d[11] == pytest.approx(-9.8)


def test_torque_gains_per_variant():
    U = (0.0, 1.0, 1.0, 1.0)
    a = quadrotor_dynamics(P, np.zeros(12), U, "printed")
    b = quadrotor_dynamics(P, np.zeros(12), U, "corrected")
    assert a[1] == a[3] == a[5] == pytest.approx(P.l / P.Ix)
    assert b[3] == pytest.approx(P.l / P.Iy)
    assert b[5] == pytest.approx(1.0 / P.Iz)


def test_backstep_output_example():
    assert backstep_output(2.0, 3.0, 1.0, 0.0, 1.0, 0.0) == pytest.approx(-7.0)
    with pytest.raises(ControlSingularityError):
        backstep_output(1.0, 1.0, 1.0, 0.0, 1e-9, 0.0)


def test_intermediate_controls_examples():
    U1, phi, theta = intermediate_controls(0.0, 0.0, 19.6, 0.0)
    assert (U1, phi, theta) == (19.6, 0.0, 0.0)
    U1, phi, theta = intermediate_controls(3.0, 0.0, 4.0, 0.0)
    assert U1 == pytest.approx(5.0) and phi == 0.0 and theta == pytest.approx(math.atan(0.75))
    with pytest.raises(ThrustDegenerateError):
        intermediate_controls(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(InfeasibleAttitudeError):
        intermediate_controls(1.0, 0.0, 0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 100.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(-math.pi, math.pi))
def test_thrust_round_trip(U1, phi, theta, psi):
    Ux, Uy, Uz = thrust_components(U1, phi, theta, psi)
    V1, vphi, vtheta = intermediate_controls(Ux, Uy, Uz, psi)
    assert V1 == pytest.approx(U1, rel=1e-9)
    assert vphi == pytest.approx(phi, abs=1e-9)
    assert vtheta == pytest.approx(theta, abs=1e-9)


def test_reference_signals():
    r = reference_signals(0.0)
    assert r.pos == (0.0, 0.5, 0.0)
    r = reference_signals(12.5)
    assert r.pos[0] == pytest.approx(0.5) and r.pos[1] == pytest.approx(0.0, abs=1e-15)
    assert reference_signals(50.0).pos[2] == pytest.approx(50 / 6)
    # derivatives by central differences
    h = 1e-5
    for t in (1.0, 17.3):
        a, b, c = reference_signals(t - h), reference_signals(t), reference_signals(t + h)
        for i in range(3):
            assert b.vel[i] == pytest.approx((c.pos[i] - a.pos[i]) / (2 * h), abs=1e-8)
            assert b.acc[i] == pytest.approx((c.vel[i] - a.vel[i]) / (2 * h), abs=1e-8)
    assert OMEGA == pytest.approx(2 * math.pi / 50)
    with pytest.raises(InvalidArgumentError):
        reference_signals(-1.0)


def test_rate_filter_tracks_a_ramp():
    f = RateFilter(0.01, 0.05)
    assert f.update(0.0) == 0.0
    for k in range(1, 500):
        r = f.update(3.0 * k * 0.01)
    assert r == pytest.approx(3.0, rel=1e-9)


def test_differentiator_second_derivative_of_parabola():
    d = AttitudeDifferentiator(0.001)
    for k in range(3000):
        t = k * 0.001
        phi, theta = d(t * t, -t)
    assert phi[1] == pytest.approx(2 * t, abs=0.02)
    assert phi[2] == pytest.approx(2.0, abs=1e-3)
    assert theta[1] == pytest.approx(-1.0, abs=1e-9)


def test_on_path_control_is_hover_plus_feedforward():
    chi = np.array(path_start_state())
    chi[7], chi[9], chi[11] = reference_signals(0.0).vel
    U, att = backstep_control(BackstepGains(), chi, reference_signals(0.0), P)
    ref_acc = reference_signals(0.0).acc
    want = P.m * math.sqrt(ref_acc[0] ** 2 + ref_acc[1] ** 2 + P.g ** 2)
    assert U[0] == pytest.approx(want, rel=1e-12)
    assert att.psi == (0.0, 0.0, 0.0)


def test_initial_state_options():
    assert make_quadrotor().initial_state == path_start_state()
    assert make_quadrotor(initial="origin").initial_state == (0.0,) * 12
    with pytest.raises(InvalidArgumentError):
        make_quadrotor(initial="moon")
    with pytest.raises(InvalidArgumentError):
        make_quadrotor(variant="bogus")


@pytest.mark.skipif(kernels.quadrotor_run is None, reason="compiled quadrotor kernel not built")
@pytest.mark.parametrize("variant", ["printed", "corrected"])
def test_kernel_matches_generic_loop(variant):
    plant = make_quadrotor(variant=variant)
    cfg = SimConfig(0.001, 3.0, 1000.0)
    a = simulate(plant, REFERENCE_GAINS, cfg, use_kernel=True)
    b = simulate(plant, REFERENCE_GAINS, cfg, use_kernel=False)
    assert len(a) == len(b) and a.diverged == b.diverged
    assert np.allclose(a.states, b.states, rtol=1e-10, atol=1e-11)
    assert np.allclose(a.controls, b.controls, rtol=1e-10, atol=1e-9)


def test_tracking_error_decays():
    plant = make_quadrotor()
    tr = simulate(plant, REFERENCE_GAINS, SimConfig(0.001, 20.0, 1000.0))
    assert not tr.diverged
    err = np.max(np.abs(tr.errors), axis=1)
    assert err[-1] < 1e-3
    assert np.max(err[-2000:]) <= np.max(err[:2000])


def test_generic_loop_reports_control_failure_as_divergence():
    plant = replace(make_quadrotor(initial="origin"), kernel=None)
    tr = simulate(plant, REFERENCE_GAINS, SimConfig(0.01, 2.0, 1000.0), use_kernel=False)
    assert tr.diverged
