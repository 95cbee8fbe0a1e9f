import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lunarhab.environment import (
    R_GAS,
    IEInputs,
    IEParams,
    ZoneState,
    sample_ie_sensors,
    step_ie,
    total_enthalpy,
    zone_pressure,
)

C = 20.8


def zones(t1=299.6, t2=299.6, p=101325.0, v=(4.0, 4.0)):
    return (ZoneState.at_pressure(t1, p, v[0]), ZoneState.at_pressure(t2, p, v[1]))


def closed(**kw):
    return IEParams(pocket_door_open=False, **kw)


def test_equilibrium_is_fixed_point():
    z = zones()
    out = step_ie(z, IEInputs(), 1.0, IEParams())
    for a, b in zip(z, out):
        assert b.temperature == pytest.approx(a.temperature, abs=1e-12)
        assert b.gas_amount == pytest.approx(a.gas_amount, rel=1e-15)


def test_hand_euler_step():
    # n c = 1e4 J/K, 1 kW for 1 s, adiabatic walls: +0.1 K.
    n = 1e4 / C
    z = (ZoneState(295.0, n, 4.0), ZoneState(295.0, n, 4.0))
    out = step_ie(z, IEInputs(fire_heat=(1000.0, 0.0)), 1.0, closed(wall_conductance=0.0))
    assert out[0].temperature == pytest.approx(295.1, abs=1e-12)
    assert out[1].temperature == 295.0


def test_pressure_from_state():
    z = ZoneState.at_pressure(295.0, 101325.0, 4.0)
    assert zone_pressure(z) == pytest.approx(101325.0, rel=1e-14)
    hot = ZoneState(590.0, z.gas_amount, 4.0)
    assert zone_pressure(hot) == pytest.approx(2 * 101325.0, rel=1e-14)
    assert zone_pressure(z) == z.gas_amount * R_GAS * 295.0 / 4.0


def test_fire_zone_leads_neighbour():
    z = zones()
    params = IEParams()
    for k in range(600):
        q = 2.0 * math.pi * (0.4e-3 * k) ** 2 * 60e3
        z = step_ie(z, IEInputs(fire_heat=(0.0, q)), 1.0, params)
        if k > 0:
            assert z[1].temperature > z[0].temperature


heats = st.floats(0, 5e4)
temps = st.floats(250, 450)
vols = st.floats(1, 20)


@settings(max_examples=200)
@given(t1=temps, t2=temps, v1=vols, v2=vols, q1=heats, q2=heats, door=st.booleans(), dt=st.floats(0.05, 2))
def test_moles_conserved_without_flow(t1, t2, v1, v2, q1, q2, door, dt):
    z = zones(t1, t2, v=(v1, v2))
    params = IEParams(pocket_door_open=door)
    n0 = z[0].gas_amount + z[1].gas_amount
    for _ in range(5):
        z = step_ie(z, IEInputs(fire_heat=(q1, q2)), dt, params)
    assert z[0].gas_amount + z[1].gas_amount == pytest.approx(n0, rel=1e-9)


@settings(max_examples=200)
@given(t1=temps, t2=temps, v1=vols, v2=vols, q2=heats, flow=st.floats(-0.5, 0.5), dt=st.floats(0.05, 2))
def test_open_door_equalises_pressure(t1, t2, v1, v2, q2, flow, dt):
    z = zones(t1, t2, v=(v1, v2))
    params = IEParams()
    for _ in range(5):
        z = step_ie(z, IEInputs(fire_heat=(0.0, q2), air_flow=(flow, -flow * 0.5)), dt, params)
        p1, p2 = zone_pressure(z[0]), zone_pressure(z[1])
        assert p1 == pytest.approx(p2, rel=1e-12)


@settings(max_examples=100)
@given(t1=temps, t2=temps, q1=heats, q2=heats, dt=st.floats(0.05, 2))
def test_energy_bookkeeping_per_step(t1, t2, q1, q2, dt):
    """Change in stored energy equals heat in minus wall loss, door open or not."""
    params = IEParams()
    z = zones(t1, t2)
    out = step_ie(z, IEInputs(fire_heat=(q1, q2)), dt, params)
    loss = sum(params.wall_conductance * (zz.temperature - params.sink_temperature) for zz in z)
    expected = (q1 + q2 - loss) * dt
    got = total_enthalpy(out, C) - total_enthalpy(z, C)
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-6)


def euler_error(dt, horizon=200.0):
    """Max deviation of one closed, walled zone from the exact exponential."""
    params = closed(wall_conductance=450.0, sink_temperature=299.6)
    z = zones()
    heat_cap = z[0].gas_amount * C
    q = 5000.0
    tau = heat_cap / params.wall_conductance
    t_inf = params.sink_temperature + q / params.wall_conductance
    err = 0.0
    for k in range(1, int(round(horizon / dt)) + 1):
        z = step_ie(z, IEInputs(fire_heat=(q, 0.0)), dt, params)
        exact = t_inf + (299.6 - t_inf) * math.exp(-k * dt / tau)
        err = max(err, abs(z[0].temperature - exact))
    return err


def test_euler_error_halves_with_step():
    e1, e2, e3 = euler_error(1.0), euler_error(0.5), euler_error(0.25)
    assert e1 / e2 == pytest.approx(2.0, rel=0.1)
    assert e2 / e3 == pytest.approx(2.0, rel=0.05)


@settings(max_examples=50, deadline=None)
@given(qa=st.floats(0, 2e4), extra=st.floats(1, 2e4))
def test_more_fire_heat_means_hotter(qa, extra):
    params = IEParams()
    lo, hi = zones(), zones()
    for _ in range(30):
        lo = step_ie(lo, IEInputs(fire_heat=(0.0, qa)), 1.0, params)
        hi = step_ie(hi, IEInputs(fire_heat=(0.0, qa + extra)), 1.0, params)
    assert hi[1].temperature > lo[1].temperature
    assert hi[0].temperature >= lo[0].temperature


def test_supply_adds_moles_at_supply_temperature():
    params = closed(wall_conductance=0.0, supply_temperature=299.6)
    z = zones()
    out = step_ie(z, IEInputs(air_flow=(0.5, 0.0)), 2.0, params)
    assert out[0].gas_amount == pytest.approx(z[0].gas_amount + 1.0)
    assert out[0].temperature == pytest.approx(299.6)


def test_noiseless_sensors_read_truth():
    z = zones(300.0, 310.0)
    got = sample_ie_sensors(z, np.random.default_rng(1), 0.0, 0.0)
    assert got == (300.0, 310.0, zone_pressure(z[0]), zone_pressure(z[1]))


def test_sensor_noise_is_unbiased():
    z = zones(300.0, 300.0)
    rng = np.random.default_rng(7)
    reads = np.array([sample_ie_sensors(z, rng, 0.2, 0.0)[0] for _ in range(10_000)])
    assert abs(reads.mean() - 300.0) < 0.01


def test_sensor_noise_reproducible():
    z = zones()
    a = [sample_ie_sensors(z, np.random.default_rng(3), 0.1, 20.0) for _ in range(3)]
    b = [sample_ie_sensors(z, np.random.default_rng(3), 0.1, 20.0) for _ in range(3)]
    assert a == b


def test_bad_step_rejected():
    with pytest.raises(ValueError):
        step_ie(zones(), IEInputs(), 0.0, IEParams())
