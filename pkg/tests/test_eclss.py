import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lunarhab.eclss import (
    ECLSSParams,
    ECLSSState,
    apply_eclss_damage,
    delivered_hvac_heat,
    eclss_power_demand,
    efficiency_for,
    pressure_control,
    thermal_control,
)

P = ECLSSParams()
NOMINAL_DAMAGE = {"fan_zone1": 1, "fan_zone2": 1, "compressor": 1, "condenser": 1}


def test_deadband_leaves_actuators_alone():
    s = thermal_control((295.0, 295.0), ECLSSState(), P)
    assert s.cooling_on == (False, False) and s.heater_on == (False, False)


def test_cooling_latches_above_high_setpoint():
    s = thermal_control((299.9, 300.2), ECLSSState(), P)
    assert s.cooling_on == (False, True)
    # Still on inside the hysteresis width, off once below it.
    s = thermal_control((299.9, 299.5), s, P)
    assert s.cooling_on[1]
    s = thermal_control((299.9, 298.9), s, P)
    assert not s.cooling_on[1]


def test_heater_latches_below_low_setpoint():
    s = thermal_control((290.0, 295.0), ECLSSState(), P)
    assert s.heater_on == (True, False)
    s = thermal_control((291.5, 295.0), s, P)
    assert s.heater_on[0]
    s = thermal_control((292.1, 295.0), s, P)
    assert not s.heater_on[0]


def test_pressure_commands():
    s, flow = pressure_control(101e3, ECLSSState(), P)
    assert flow == 0.0
    s, flow = pressure_control(110e3, ECLSSState(), P)
    assert s.venting and flow == -P.air_rate
    s, flow = pressure_control(90e3, ECLSSState(), P)
    assert s.supplying_air and flow == P.air_rate


@settings(max_examples=100)
@given(st.lists(st.floats(280, 320), min_size=2, max_size=60).map(sorted), st.booleans())
def test_no_chatter_on_monotone_signal(readings, falling):
    if falling:
        readings = readings[::-1]
    s = ECLSSState()
    cool, heat = [], []
    for t in readings:
        s = thermal_control((t, t), s, P)
        cool.append(s.cooling_on[0])
        heat.append(s.heater_on[0])
    flips = lambda xs: sum(a != b for a, b in zip(xs, xs[1:]))  # noqa: E731
    assert flips(cool) <= 1 and flips(heat) <= 1


@settings(max_examples=100)
@given(st.lists(st.floats(90e3, 112e3), min_size=2, max_size=60).map(sorted))
def test_pressure_control_no_chatter(readings):
    s = ECLSSState()
    flows = []
    for p in readings:
        s, f = pressure_control(p, s, P)
        flows.append(f)
    assert sum(a != b for a, b in zip(flows, flows[1:])) <= 2  # supply off, then vent on


@pytest.mark.parametrize("level, eff", [(1, 1.0), (2, 0.9), (3, 0.75), (4, 0.6), (5, 0.4)])
def test_efficiency_table(level, eff):
    assert efficiency_for(level) == eff


def test_damage_only_touches_its_component():
    damage = dict(NOMINAL_DAMAGE, fan_zone2=3, compressor=2)
    s = apply_eclss_damage(damage, ECLSSState(), P)
    assert s.fan_efficiency == (1.0, 0.75)
    assert s.compressor_efficiency == 0.9


def test_nominal_demand_is_both_fans():
    assert eclss_power_demand(ECLSSState(), P) == pytest.approx(200.0)


def test_degraded_fan_draws_more():
    s = ECLSSState(fan_efficiency=(1.0, 0.6))
    assert eclss_power_demand(s, P) - 100.0 == pytest.approx(166.6667, rel=1e-5)


def test_cooling_demand_adds_compressor_and_condenser():
    s = ECLSSState(cooling_on=(False, True))
    assert eclss_power_demand(s, P) == pytest.approx(200 + 400 + 150)


effs = st.sampled_from([1.0, 0.9, 0.75, 0.6, 0.4])


@given(
    f1=effs, f2=effs, comp=effs, cond=effs,
    cool=st.tuples(st.booleans(), st.booleans()), heat=st.tuples(st.booleans(), st.booleans()),
    which=st.sampled_from(["f1", "f2", "comp", "cond"]),
)
def test_efficiency_drop_never_lowers_demand(f1, f2, comp, cond, cool, heat, which):
    base = dict(f1=f1, f2=f2, comp=comp, cond=cond)
    worse = dict(base)
    worse[which] = min(base[which], 0.6) * 0.5

    def state(e):
        return ECLSSState((e["f1"], e["f2"]), e["comp"], e["cond"], cool, heat)

    before, after = eclss_power_demand(state(base), P), eclss_power_demand(state(worse), P)
    assert after >= before
    if which in ("f1", "f2") or any(cool):
        assert after > before


def test_cooling_scales_with_efficiency_chain():
    s = ECLSSState((1.0, 0.75), 0.9, 0.9, (True, True))
    q1, q2 = delivered_hvac_heat(s, P)
    assert q1 == pytest.approx(-1500 * 0.81)
    assert q2 == pytest.approx(-1500 * 0.75 * 0.81)
