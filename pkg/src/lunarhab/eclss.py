"""Thermal (heater/cooler) and pressure control with damage-driven efficiencies."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .disturbance import ECLSS_COMPONENTS, damage_channel
from .engine import ChannelSpec, SignalKind, SubsystemDescriptor, Values

DEFAULT_EFFICIENCY_TABLE = (1.00, 0.90, 0.75, 0.60, 0.40)


@dataclass(frozen=True)
class ECLSSParams:
    temperature_setpoints: tuple[float, float] = (291.0, 300.0)
    pressure_setpoints: tuple[float, float] = (96e3, 106e3)
    temperature_hysteresis: float = 1.0
    pressure_hysteresis: float = 1e3
    rated_cooling: float = 1500.0  # W per zone
    rated_heater: float = 500.0  # W per zone
    fan_power: float = 100.0  # W per zone, fans always run
    compressor_power: float = 400.0
    condenser_power: float = 150.0
    pressure_control_power: float = 60.0  # W while supplying or venting
    air_rate: float = 0.5  # mol/s, split across zones by volume
    efficiency_table: tuple[float, ...] = DEFAULT_EFFICIENCY_TABLE

    def __post_init__(self) -> None:
        lo, hi = self.temperature_setpoints
        if not lo < hi:
            raise ValueError("temperature setpoints must satisfy low < high")
        lo, hi = self.pressure_setpoints
        if not lo < hi:
            raise ValueError("pressure setpoints must satisfy low < high")
        if len(self.efficiency_table) != 5 or not all(0 < x <= 1 for x in self.efficiency_table):
            raise ValueError("efficiency table needs five values in (0, 1]")


@dataclass(frozen=True)
class ECLSSState:
    fan_efficiency: tuple[float, float] = (1.0, 1.0)
    compressor_efficiency: float = 1.0
    condenser_efficiency: float = 1.0
    cooling_on: tuple[bool, bool] = (False, False)
    heater_on: tuple[bool, bool] = (False, False)
    supplying_air: bool = False
    venting: bool = False


def _hysteresis_zone(t: float, cooling: bool, heating: bool, params: ECLSSParams) -> tuple[bool, bool]:
    low, high = params.temperature_setpoints
    w = params.temperature_hysteresis
    if cooling and t < high - w:
        cooling = False
    elif not cooling and t > high:
        cooling = True
    if heating and t > low + w:
        heating = False
    elif not heating and t < low:
        heating = True
    if cooling and heating:
        # Only reachable with overlapping bands; trust the side the reading is on.
        mid = 0.5 * (low + high)
        cooling, heating = t >= mid, t < mid
    return cooling, heating


def thermal_control(measured: Sequence[float], state: ECLSSState, params: ECLSSParams) -> ECLSSState:
    """Latch cooler/heater commands per zone with hysteresis."""
    cool, heat = [], []
    for i in range(2):
        c, h = _hysteresis_zone(measured[i], state.cooling_on[i], state.heater_on[i], params)
        cool.append(c)
        heat.append(h)
    return replace(state, cooling_on=(cool[0], cool[1]), heater_on=(heat[0], heat[1]))


def pressure_control(measured: float, state: ECLSSState, params: ECLSSParams) -> tuple[ECLSSState, float]:
    """Return the updated state and the signed total air flow, mol/s."""
    low, high = params.pressure_setpoints
    w = params.pressure_hysteresis
    supplying, venting = state.supplying_air, state.venting
    if venting and measured < high - w:
        venting = False
    elif not venting and measured > high:
        venting = True
    if supplying and measured > low + w:
        supplying = False
    elif not supplying and measured < low:
        supplying = True
    if venting and supplying:
        venting, supplying = measured > 0.5 * (low + high), measured <= 0.5 * (low + high)
    flow = params.air_rate if supplying else -params.air_rate if venting else 0.0
    return replace(state, supplying_air=supplying, venting=venting), flow


def efficiency_for(level: int, table: Sequence[float] = DEFAULT_EFFICIENCY_TABLE) -> float:
    if not 1 <= level <= 5:
        raise ValueError(f"damage level {level} outside 1..5")
    return table[level - 1]


def apply_eclss_damage(damage: Mapping[str, int], state: ECLSSState, params: ECLSSParams) -> ECLSSState:
    """Set component efficiencies from the current damage levels (stepwise)."""
    table = params.efficiency_table
    return replace(
        state,
        fan_efficiency=(efficiency_for(damage["fan_zone1"], table), efficiency_for(damage["fan_zone2"], table)),
        compressor_efficiency=efficiency_for(damage["compressor"], table),
        condenser_efficiency=efficiency_for(damage["condenser"], table),
    )


def eclss_power_demand(state: ECLSSState, params: ECLSSParams) -> float:
    """Electrical draw, W. Each running component draws rated power / efficiency."""
    total = sum(params.fan_power / eff for eff in state.fan_efficiency)
    if any(state.cooling_on):
        total += params.compressor_power / state.compressor_efficiency
        total += params.condenser_power / state.condenser_efficiency
    total += params.rated_heater * sum(state.heater_on)
    if state.supplying_air or state.venting:
        total += params.pressure_control_power
    return total


def delivered_hvac_heat(state: ECLSSState, params: ECLSSParams) -> tuple[float, float]:
    """Net heat into each zone, W (cooling negative)."""
    chain = state.compressor_efficiency * state.condenser_efficiency
    out = []
    for i in range(2):
        q = 0.0
        if state.cooling_on[i]:
            q -= params.rated_cooling * state.fan_efficiency[i] * chain
        if state.heater_on[i]:
            q += params.rated_heater
        out.append(q)
    return out[0], out[1]


@dataclass
class ECLSS:
    params: ECLSSParams = field(default_factory=ECLSSParams)
    volumes: tuple[float, float] = (4.0, 4.0)
    period: float = 1.0
    state: ECLSSState = field(default_factory=ECLSSState)

    def __post_init__(self) -> None:
        inputs = ("ie.sensors", "fire.intensity") + tuple(damage_channel(c) for c in ECLSS_COMPONENTS)
        self.descriptor = SubsystemDescriptor(
            id="eclss",
            step_period=self.period,
            input_channels=inputs,
            output_channels=(
                ChannelSpec("eclss.thermal", SignalKind.PHYSICAL, (0.0, 0.0), ("W", "W")),
                ChannelSpec("eclss.air_flow", SignalKind.PHYSICAL, (0.0, 0.0), ("mol/s", "mol/s")),
                ChannelSpec("eclss.power_demand", SignalKind.PHYSICAL, (eclss_power_demand(self.state, self.params),), ("W",)),
                ChannelSpec("eclss.status", SignalKind.CYBER, self._status(0.0), ("-",) * 9),
            ),
        )

    def _status(self, flow: float) -> Values:
        s = self.state
        return (s.fan_efficiency[0], s.fan_efficiency[1], s.compressor_efficiency, s.condenser_efficiency,
                float(s.cooling_on[0]), float(s.cooling_on[1]), float(s.heater_on[0]), float(s.heater_on[1]), flow)

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> dict[str, Values]:
        sensors = inputs["ie.sensors"]
        damage = {c: int(round(inputs[damage_channel(c)][0])) for c in ECLSS_COMPONENTS}
        state = apply_eclss_damage(damage, self.state, self.params)
        state = thermal_control(sensors[:2], state, self.params)
        v1, v2 = self.volumes
        mean_p = (sensors[2] * v1 + sensors[3] * v2) / (v1 + v2)
        state, flow = pressure_control(mean_p, state, self.params)
        self.state = state
        share = v1 / (v1 + v2)
        return {
            "eclss.thermal": delivered_hvac_heat(state, self.params),
            "eclss.air_flow": (flow * share, flow * (1 - share)),
            "eclss.power_demand": (eclss_power_demand(state, self.params),),
            "eclss.status": self._status(flow),
        }
