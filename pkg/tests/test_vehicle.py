"""Dynamics fixed points, dissipation, wrap/clamp behavior, sensor models."""

import math

import numpy as np
import pytest

from teleauv.autonomy import MotorThrusts
from teleauv.vehicle import (Environment, MagneticAnomaly, NumericalDivergenceError,
                             VehicleParams, VehicleState, kinetic_energy, sense, step)

DT = 0.01
ENV = Environment()
NO_NOISE = Environment(sigma_depth=0.0, sigma_heading=0.0, sigma_yaw_rate=0.0)
# large basin: fixed-point and convergence checks need wall-free motion
OPEN_WATER = Environment(pool_x=1000.0, pool_y=1000.0, pool_z=100.0,
                         sigma_depth=0.0, sigma_heading=0.0, sigma_yaw_rate=0.0)
NO_ANOMALY = MagneticAnomaly()


def run_constant_thrust(state, thrusts, params, env=OPEN_WATER, seconds=60.0, dt=DT):
    n = round(seconds / dt)
    for _ in range(n):
        state = step(state, thrusts, env, params, dt)
    return state


def centered(z=1.0):
    return VehicleState(x=500.0, y=500.0, z=z, psi=0.0)


def test_rest_state_stays_at_rest():
    params = VehicleParams()
    s0 = centered()
    s1 = step(s0, MotorThrusts(0.0, 0.0, 0.0), OPEN_WATER, params, DT)
    assert (s1.x, s1.y, s1.z, s1.psi, s1.u, s1.w, s1.r) == (s0.x, s0.y, s0.z, s0.psi, 0.0, 0.0, 0.0)
    assert s1.t == pytest.approx(DT)


def test_surge_steady_state_quadratic_drag():
    # u* = sqrt(F_x / d_u2) with purely quadratic surge drag
    params = VehicleParams(d_u1=0.0, d_u2=4.0)
    f_x = 1.2
    expected = math.sqrt(f_x / params.d_u2)
    end = run_constant_thrust(centered(), MotorThrusts(0.0, f_x / 2, f_x / 2), params)
    assert abs(end.u - expected) / expected < 0.01


def test_yaw_steady_state_linear_drag():
    # r* = M_z / d_r1 with purely linear yaw drag
    params = VehicleParams(d_r1=0.05, d_r2=0.0)
    m_z = 0.04
    expected = m_z / params.d_r1  # 0.8 rad/s
    half = m_z / (2 * params.motor_offset)
    end = run_constant_thrust(centered(), MotorThrusts(0.0, -half, half), params)
    assert abs(end.r - expected) / expected < 0.01


def test_heave_steady_state_mixed_drag():
    # analytic root of d_w1*w + d_w2*w^2 = F_z
    params = VehicleParams()
    f_z = 1.0
    a, b = params.d_w2, params.d_w1
    expected = (-b + math.sqrt(b * b + 4 * a * f_z)) / (2 * a)
    end = run_constant_thrust(centered(z=0.2), MotorThrusts(f_z, 0.0, 0.0), params, seconds=30.0)
    assert abs(end.w - expected) / expected < 0.01


def test_kinetic_energy_non_increasing_unforced():
    params = VehicleParams()
    rng = np.random.default_rng(1)
    for _ in range(20):
        state = VehicleState(x=500.0, y=500.0, z=1.0, psi=rng.uniform(0, 2 * math.pi),
                             u=rng.uniform(-1, 1), w=rng.uniform(-0.5, 0.5), r=rng.uniform(-2, 2))
        energy = kinetic_energy(state, params)
        for _ in range(1000):
            state = step(state, MotorThrusts(0.0, 0.0, 0.0), OPEN_WATER, params, DT)
            e = kinetic_energy(state, params)
            assert e <= energy + 1e-15
            energy = e


def test_yaw_stays_wrapped():
    params = VehicleParams()
    state = centered()
    for _ in range(3000):
        state = step(state, MotorThrusts(0.0, -0.5, 0.5), OPEN_WATER, params, DT)
        assert 0.0 <= state.psi < 2.0 * math.pi


def test_pool_walls_clamp_and_zero_velocity():
    params = VehicleParams()
    env = NO_NOISE
    state = VehicleState(x=env.pool_x - 0.05, y=4.0, z=1.0, psi=math.pi / 2, u=0.5)
    for _ in range(200):
        state = step(state, MotorThrusts(0.0, 0.75, 0.75), env, params, DT)
    assert state.x == env.pool_x
    assert state.u == 0.0

    state = VehicleState(x=6.0, y=4.0, z=0.02, psi=0.0, w=-0.3)
    for _ in range(200):
        state = step(state, MotorThrusts(-1.0, 0.0, 0.0), env, params, DT)
    assert state.z == 0.0
    assert state.w == 0.0


def test_current_advects_world_frame():
    params = VehicleParams()
    env = Environment(pool_x=1000.0, pool_y=1000.0, pool_z=100.0, current=(0.1, -0.05),
                      sigma_depth=0.0, sigma_heading=0.0, sigma_yaw_rate=0.0)
    end = run_constant_thrust(centered(), MotorThrusts(0.0, 0.0, 0.0), params, env=env, seconds=10.0)
    assert end.x == pytest.approx(500.0 + 0.1 * 10.0, abs=1e-9)
    assert end.y == pytest.approx(500.0 - 0.05 * 10.0, abs=1e-9)


def test_divergence_raises():
    params = VehicleParams()
    with pytest.raises(NumericalDivergenceError):
        step(centered(), MotorThrusts(float("nan"), 0.0, 0.0), NO_NOISE, params, DT)


def test_step_size_convergence():
    # halving dt moves the 60 s endpoint by < 1 cm and < 0.5 deg
    params = VehicleParams()
    thrusts = MotorThrusts(0.1, 0.61, 0.63)  # cruise with a gentle arc and slow heave
    start = VehicleState(x=500.0, y=500.0, z=0.5, psi=1.0)
    coarse = run_constant_thrust(start, thrusts, params, seconds=60.0, dt=0.01)
    fine = run_constant_thrust(start, thrusts, params, seconds=60.0, dt=0.005)
    assert math.hypot(coarse.x - fine.x, coarse.y - fine.y) < 0.01
    assert abs(coarse.z - fine.z) < 0.01
    assert abs(coarse.psi - fine.psi) < math.radians(0.5)


def test_determinism_bit_identical_trajectories():
    params = VehicleParams()
    outs = []
    for _ in range(2):
        rng = np.random.default_rng(123)
        state = centered()
        trace = []
        for _ in range(500):
            state = step(state, MotorThrusts(0.2, 0.4, 0.5), OPEN_WATER, params, DT)
            reading = sense(state, NO_ANOMALY, ENV, rng)
            trace.append((state, reading))
        outs.append(trace)
    assert outs[0] == outs[1]


# -- sensors -----------------------------------------------------------------

def test_sense_noiseless_equals_truth():
    state = VehicleState(x=2.0, y=3.0, z=1.25, psi=0.7, r=0.2)
    reading = sense(state, NO_ANOMALY, NO_NOISE, np.random.default_rng(0))
    assert reading.depth_meas == 1.25
    assert reading.heading_meas == 0.7
    assert reading.yaw_rate_meas == 0.2


def test_sense_constant_bias_additive():
    state = VehicleState(x=2.0, y=3.0, z=1.0, psi=0.5)
    reading = sense(state, MagneticAnomaly(constant_bias=0.5), NO_NOISE, np.random.default_rng(0))
    assert reading.heading_meas == pytest.approx(1.0)


def test_sense_spatial_gradient():
    anomaly = MagneticAnomaly(spatial_gradient=(0.01, -0.02))
    state = VehicleState(x=2.0, y=3.0, z=1.0, psi=1.0)
    reading = sense(state, anomaly, NO_NOISE, np.random.default_rng(0))
    assert reading.heading_meas == pytest.approx(1.0 + 0.01 * 2.0 - 0.02 * 3.0)


def test_sense_heading_wrapped():
    state = VehicleState(psi=6.0)
    reading = sense(state, MagneticAnomaly(constant_bias=1.0), NO_NOISE, np.random.default_rng(0))
    assert 0.0 <= reading.heading_meas < 2.0 * math.pi
    assert reading.heading_meas == pytest.approx((6.0 + 1.0) % (2.0 * math.pi))


def test_sense_depth_noise_monte_carlo():
    env = Environment(sigma_depth=0.01, sigma_heading=0.0, sigma_yaw_rate=0.0)
    rng = np.random.default_rng(5)
    state = VehicleState(z=1.5)
    n = 100_000
    samples = np.array([sense(state, NO_ANOMALY, env, rng).depth_meas for _ in range(n)])
    assert abs(samples.mean() - 1.5) < 3 * 0.01 / math.sqrt(n)
    assert abs(samples.std() - 0.01) < 0.001
