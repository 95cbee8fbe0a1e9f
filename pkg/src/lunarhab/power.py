"""Generation, converter losses and battery storage."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .disturbance import POWER_COMPONENTS, damage_channel
from .engine import ChannelSpec, SignalKind, SubsystemDescriptor, Values

STORAGE_MULTIPLIER = (1.00, 0.90, 0.75, 0.40, 0.10)
CONVERTER_EFFICIENCY = (0.95, 0.90, 0.80, 0.00)


@dataclass(frozen=True)
class StorageState:
    state_of_charge: float  # J
    capacity: float  # J
    charge_efficiency: float = 0.95
    discharge_efficiency: float = 0.95

    def __post_init__(self) -> None:
        if not 0 <= self.state_of_charge <= self.capacity:
            raise ValueError("state of charge outside [0, capacity]")
        if not (0 < self.charge_efficiency <= 1 and 0 < self.discharge_efficiency <= 1):
            raise ValueError("storage efficiencies must be in (0, 1]")


@dataclass(frozen=True)
class GenerationState:
    solar_output: float = 3000.0
    nuclear_output: float = 2000.0
    converter_efficiency: float = 0.95

    @property
    def available(self) -> float:
        return (self.solar_output + self.nuclear_output) * self.converter_efficiency


def step_power(gen: GenerationState, demand: float, storage: StorageState, dt: float) -> tuple[StorageState, float, float]:
    """Serve ``demand`` for ``dt`` seconds; return (storage, served W, unmet W).

    Surplus charges the battery (excess over capacity is curtailed);
    deficit is drawn from it at 1/discharge_efficiency.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if demand < 0:
        raise ValueError("demand must be >= 0")
    available = gen.available
    soc = storage.state_of_charge
    if available >= demand:
        soc = min(storage.capacity, soc + (available - demand) * storage.charge_efficiency * dt)
        return replace(storage, state_of_charge=soc), demand, 0.0
    deficit = demand - available
    needed = deficit / storage.discharge_efficiency * dt
    if needed <= soc:
        return replace(storage, state_of_charge=soc - needed), demand, 0.0
    supplied = soc * storage.discharge_efficiency / dt
    unmet = deficit - supplied
    return replace(storage, state_of_charge=0.0), demand - unmet, unmet


def apply_power_damage(
    storage_level: int,
    converter_level: int,
    nominal_charge: float = 0.95,
    nominal_discharge: float = 0.95,
    storage_table: Sequence[float] = STORAGE_MULTIPLIER,
    converter_table: Sequence[float] = CONVERTER_EFFICIENCY,
) -> tuple[float, float, float]:
    """(charge efficiency, discharge efficiency, converter efficiency)."""
    if not 1 <= storage_level <= 5:
        raise ValueError(f"storage damage level {storage_level} outside 1..5")
    if not 1 <= converter_level <= 4:
        raise ValueError(f"converter damage level {converter_level} outside 1..4")
    m = storage_table[storage_level - 1]
    return nominal_charge * m, nominal_discharge * m, converter_table[converter_level - 1]


@dataclass
class PowerSystem:
    storage: StorageState
    generation: GenerationState = field(default_factory=GenerationState)
    baseline_load: float = 200.0
    nominal_charge: float = 0.95
    nominal_discharge: float = 0.95
    storage_table: tuple[float, ...] = STORAGE_MULTIPLIER
    converter_table: tuple[float, ...] = CONVERTER_EFFICIENCY
    period: float = 1.0

    def __post_init__(self) -> None:
        self.served = 0.0
        self.unmet = 0.0
        self.demand = 0.0
        self.descriptor = SubsystemDescriptor(
            id="power",
            step_period=self.period,
            input_channels=("eclss.power_demand", "fire.intensity") + tuple(damage_channel(c) for c in POWER_COMPONENTS),
            output_channels=(
                ChannelSpec("power.state", SignalKind.PHYSICAL, self._values(), ("J", "W", "W", "W", "W", "-", "-")),
            ),
        )

    def _values(self) -> Values:
        s = self.storage
        mult = s.charge_efficiency / self.nominal_charge
        return (s.state_of_charge, self.demand, self.served, self.unmet, self.generation.available,
                mult, self.generation.converter_efficiency)

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> dict[str, Values]:
        charge, discharge, conv = apply_power_damage(
            int(round(inputs[damage_channel("energy_storage")][0])),
            int(round(inputs[damage_channel("power_converter")][0])),
            self.nominal_charge,
            self.nominal_discharge,
            self.storage_table,
            self.converter_table,
        )
        self.storage = replace(self.storage, charge_efficiency=charge, discharge_efficiency=discharge)
        self.generation = replace(self.generation, converter_efficiency=conv)
        self.demand = inputs["eclss.power_demand"][0] + self.baseline_load
        if dt > 0:
            self.storage, self.served, self.unmet = step_power(self.generation, self.demand, self.storage, dt)
        return {"power.state": self._values()}
