"""Two-zone lumped model of the habitat air volume."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .disturbance import DEFAULT_HEAT_FLUX, Phase, fire_heat_output
from .engine import ChannelSpec, SignalKind, SubsystemDescriptor, Values

R_GAS = 8.314  # J/(mol K)


@dataclass(frozen=True)
class ZoneState:
    temperature: float  # K
    gas_amount: float  # mol
    volume: float  # m3

    @property
    def pressure(self) -> float:
        return zone_pressure(self)

    @classmethod
    def at_pressure(cls, temperature: float, pressure: float, volume: float) -> "ZoneState":
        return cls(temperature, pressure * volume / (R_GAS * temperature), volume)


@dataclass(frozen=True)
class IEParams:
    heat_capacity: float = 20.8  # J/(mol K)
    wall_conductance: float = 450.0  # W/K per zone
    door_conductance: float = 200.0  # W/K
    sink_temperature: float = 299.6  # K
    supply_temperature: float = 299.6  # K
    pocket_door_open: bool = True

    def __post_init__(self) -> None:
        if self.heat_capacity <= 0:
            raise ValueError("heat_capacity must be > 0")
        if self.wall_conductance < 0 or self.door_conductance < 0:
            raise ValueError("conductances must be >= 0")


@dataclass(frozen=True)
class IEInputs:
    fire_heat: tuple[float, float] = (0.0, 0.0)  # W per zone
    hvac_heat: tuple[float, float] = (0.0, 0.0)  # W per zone, heating positive
    air_flow: tuple[float, float] = (0.0, 0.0)  # mol/s per zone, supply positive


def zone_pressure(zone: ZoneState) -> float:
    """Ideal-gas pressure, Pa."""
    return zone.gas_amount * R_GAS * zone.temperature / zone.volume


def _rebalance(e: list[float], n: list[float], volumes: Sequence[float], c: float) -> None:
    """Move gas through the open door until both zones share one pressure.

    Pressure is E R / (c V), so equal pressure means equal energy density.
    The moles that cross carry the donor zone's temperature, which keeps
    total moles and total energy unchanged.
    """
    v_total = volumes[0] + volumes[1]
    e_total = e[0] + e[1]
    target0 = e_total * volumes[0] / v_total
    delta = target0 - e[0]
    if delta == 0.0:
        return
    donor = 1 if delta > 0 else 0
    t_donor = e[donor] / (c * n[donor])
    moved = abs(delta) / (c * t_donor)
    receiver = 1 - donor
    n[receiver] += moved
    n[donor] -= moved
    e[0] = target0
    e[1] = e_total - target0


def step_ie(zones: Sequence[ZoneState], inputs: IEInputs, dt: float, params: IEParams) -> tuple[ZoneState, ZoneState]:
    """One explicit-Euler step of the zone energy and gas balances."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    c = params.heat_capacity
    t = [z.temperature for z in zones]
    n = [z.gas_amount for z in zones]
    vols = [z.volume for z in zones]
    e = [n[i] * c * t[i] for i in range(2)]
    door = params.pocket_door_open

    for i in range(2):
        q = inputs.fire_heat[i] + inputs.hvac_heat[i] - params.wall_conductance * (t[i] - params.sink_temperature)
        if door:
            q += params.door_conductance * (t[1 - i] - t[i])
        e[i] += q * dt
        flow = inputs.air_flow[i] * dt
        if flow > 0:
            n[i] += flow
            e[i] += flow * c * params.supply_temperature
        elif flow < 0:
            removed = min(n[i], -flow)
            temp_now = e[i] / (c * n[i]) if n[i] > 0 else t[i]
            n[i] -= removed
            e[i] -= removed * c * temp_now

    if door and n[0] > 0 and n[1] > 0:
        _rebalance(e, n, vols, c)

    out = []
    for i in range(2):
        if n[i] <= 0:
            temp = t[i]
            n[i] = 0.0
        else:
            temp = e[i] / (c * n[i])
        if not (math.isfinite(temp) and temp > 0 and math.isfinite(n[i])):
            raise FloatingPointError(f"zone {i + 1} state blew up (T={temp}, n={n[i]})")
        out.append(ZoneState(temp, n[i], vols[i]))
    return out[0], out[1]


def total_enthalpy(zones: Sequence[ZoneState], heat_capacity: float) -> float:
    return sum(z.gas_amount * heat_capacity * z.temperature for z in zones)


def sample_ie_sensors(
    zones: Sequence[ZoneState],
    rng: np.random.Generator,
    sigma_temperature: float,
    sigma_pressure: float,
) -> tuple[float, float, float, float]:
    """Noisy (T1, T2, P1, P2) readings."""
    noise = rng.standard_normal(4)
    return (
        zones[0].temperature + sigma_temperature * noise[0],
        zones[1].temperature + sigma_temperature * noise[1],
        zone_pressure(zones[0]) + sigma_pressure * noise[2],
        zone_pressure(zones[1]) + sigma_pressure * noise[3],
    )


class InteriorEnvironment:
    """Bus adapter for the zone model."""

    def __init__(
        self,
        zones: Sequence[ZoneState],
        params: IEParams,
        rng: np.random.Generator,
        sigma_temperature: float = 0.1,
        sigma_pressure: float = 20.0,
        heat_flux: Sequence[float] = DEFAULT_HEAT_FLUX,
        period: float = 1.0,
    ):
        self.zones = tuple(zones)
        self.params = params
        self.rng = rng
        self.sigma_temperature = sigma_temperature
        self.sigma_pressure = sigma_pressure
        self.heat_flux = tuple(heat_flux)
        self.fire_heat = 0.0
        if params.pocket_door_open and self.zones[0].gas_amount > 0 and self.zones[1].gas_amount > 0:
            c = params.heat_capacity
            e = [z.gas_amount * c * z.temperature for z in self.zones]
            n = [z.gas_amount for z in self.zones]
            _rebalance(e, n, [z.volume for z in self.zones], c)
            self.zones = tuple(ZoneState(e[i] / (c * n[i]), n[i], self.zones[i].volume) for i in range(2))
        self.descriptor = SubsystemDescriptor(
            id="ie",
            step_period=period,
            input_channels=("fire.state", "fire.intensity", "eclss.thermal", "eclss.air_flow"),
            output_channels=(
                ChannelSpec("ie.state", SignalKind.PHYSICAL, self._state_values(), ("K", "K", "Pa", "Pa", "mol", "mol", "W")),
                ChannelSpec("ie.sensors", SignalKind.CYBER, self._state_values()[:4], ("K", "K", "Pa", "Pa")),
            ),
        )

    def _state_values(self) -> Values:
        z1, z2 = self.zones
        return (z1.temperature, z2.temperature, zone_pressure(z1), zone_pressure(z2),
                z1.gas_amount, z2.gas_amount, self.fire_heat)

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> dict[str, Values]:
        if dt > 0:
            fire = inputs["fire.state"]
            intensity = int(round(inputs["fire.intensity"][0]))
            q = fire_heat_output(fire[0], intensity, Phase(int(fire[4])), self.heat_flux)
            zone = int(fire[5])
            fire_heat = (q, 0.0) if zone == 1 else (0.0, q)
            hvac = inputs["eclss.thermal"]
            flow = inputs["eclss.air_flow"]
            self.fire_heat = q
            self.zones = step_ie(self.zones, IEInputs(fire_heat, (hvac[0], hvac[1]), (flow[0], flow[1])), dt, self.params)
        state = self._state_values()
        sensors = sample_ie_sensors(self.zones, self.rng, self.sigma_temperature, self.sigma_pressure)
        return {"ie.state": state, "ie.sensors": sensors}
