"""Scenario file schema, parsing and dumping.

Scenario files are YAML mappings. Every key is optional; omitted values
take the reference fire scenario defaults below. Unknown keys are errors.
All quantities are SI (seconds, meters, kelvin, pascals, watts, joules).
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .disturbance import COMPONENT_CLASS, DEFAULT_HEAT_FLUX
from .eclss import DEFAULT_EFFICIENCY_TABLE
from .power import CONVERTER_EFFICIENCY, STORAGE_MULTIPLIER

Pair = tuple[float, float]


class ScenarioError(ValueError):
    """Invalid scenario file. ``path`` is the dotted field path, when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path}: " if path else ""
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"{where}{message}{at}")


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _ordered(pair: Pair, name: str) -> Pair:
    if not pair[0] < pair[1]:
        raise ValueError(f"{name} must satisfy low < high")
    return pair


class Periods(_Block):
    disturbance: float = Field(1.0, gt=0)
    ie: float = Field(1.0, gt=0)
    eclss: float = Field(1.0, gt=0)
    power: float = Field(1.0, gt=0)
    fdd: float = Field(1.0, gt=0)
    repair: float = Field(1.0, gt=0)


class ClockConfig(_Block):
    base_step: float = Field(0.1, gt=0)
    end_time: float = Field(2000.0, ge=0)
    output_period: float = Field(1.0, gt=0)
    periods: Periods = Periods()


class IEConfig(_Block):
    volumes: tuple[float, float] = (4.0, 4.0)
    pocket_door_open: bool = True
    door_conductance: float = Field(200.0, ge=0)
    wall_conductance: float = Field(450.0, ge=0)
    sink_temperature: float = Field(299.6, gt=0)
    heat_capacity: float = Field(20.8, gt=0)
    initial_temperature: tuple[float, float] = (299.6, 299.6)
    initial_pressure: float = Field(101325.0, gt=0)
    supply_temperature: float = Field(299.6, gt=0)
    sensor_sigma_temperature: float = Field(0.05, ge=0)
    sensor_sigma_pressure: float = Field(20.0, ge=0)

    @field_validator("volumes")
    @classmethod
    def _positive_volumes(cls, v: tuple[float, float]) -> tuple[float, float]:
        if not all(x > 0 for x in v):
            raise ValueError("volumes must be > 0")
        return v

    @field_validator("initial_temperature")
    @classmethod
    def _positive_temperature(cls, v: tuple[float, float]) -> tuple[float, float]:
        if not all(x > 0 for x in v):
            raise ValueError("temperatures must be > 0 K")
        return v


class ECLSSConfig(_Block):
    temperature_setpoints: Pair = (291.0, 300.0)
    pressure_setpoints: Pair = (96e3, 106e3)
    temperature_hysteresis: float = Field(1.0, ge=0)
    pressure_hysteresis: float = Field(1e3, ge=0)
    rated_cooling: float = Field(1500.0, gt=0)
    rated_heater: float = Field(500.0, gt=0)
    fan_power: float = Field(100.0, gt=0)
    compressor_power: float = Field(400.0, gt=0)
    condenser_power: float = Field(150.0, gt=0)
    pressure_control_power: float = Field(60.0, ge=0)
    air_rate: float = Field(0.5, gt=0)
    efficiency_table: tuple[float, float, float, float, float] = DEFAULT_EFFICIENCY_TABLE

    @field_validator("temperature_setpoints", "pressure_setpoints")
    @classmethod
    def _low_high(cls, v: Pair) -> Pair:
        return _ordered(v, "setpoints")

    @field_validator("efficiency_table")
    @classmethod
    def _fractions(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not all(0 < x <= 1 for x in v):
            raise ValueError("efficiencies must be in (0, 1]")
        return v


class PowerConfig(_Block):
    solar_output: float = Field(3000.0, ge=0)
    nuclear_output: float = Field(2000.0, ge=0)
    capacity: float = Field(20e6, gt=0)
    initial_soc_fraction: float = Field(0.8, ge=0, le=1)
    charge_efficiency: float = Field(0.95, gt=0, le=1)
    discharge_efficiency: float = Field(0.95, gt=0, le=1)
    baseline_load: float = Field(200.0, ge=0)
    storage_multiplier: tuple[float, float, float, float, float] = STORAGE_MULTIPLIER
    converter_efficiency: tuple[float, float, float, float] = CONVERTER_EFFICIENCY


class FireConfig(_Block):
    enabled: bool = True
    start_time: float = Field(300.0, ge=0)
    finish_time: Optional[float] = None
    intensity: int = Field(3, ge=1, le=5)
    spread_rate: float = Field(0.4e-3, ge=0)
    origin: Pair = (0.0, -0.75)
    zone: Literal[1, 2] = 2

    @model_validator(mode="after")
    def _finish_after_start(self) -> "FireConfig":
        if self.finish_time is not None and not self.finish_time > self.start_time:
            raise ValueError("finish_time must be > start_time")
        return self


def _default_placement() -> dict[str, str]:
    return {
        "energy_storage": "zone1",
        "power_converter": "zone1",
        "compressor": "zone2",
        "condenser": "zone1",
        "fan_zone1": "zone1",
        "fan_zone2": "zone2",
    }


class DisturbanceConfig(_Block):
    fire: FireConfig = FireConfig()
    heat_flux: tuple[float, float, float, float, float] = DEFAULT_HEAT_FLUX
    placement: dict[str, Literal["zone1", "zone2"]] = Field(default_factory=_default_placement)

    @field_validator("placement")
    @classmethod
    def _known_components(cls, v: dict[str, str]) -> dict[str, str]:
        unknown = sorted(set(v) - set(COMPONENT_CLASS))
        if unknown:
            raise ValueError(f"unknown components {unknown}")
        missing = sorted(set(COMPONENT_CLASS) - set(v))
        if missing:
            raise ValueError(f"missing components {missing}")
        return v

    @field_validator("heat_flux")
    @classmethod
    def _nonneg(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if v[0] != 0 or any(x < 0 for x in v):
            raise ValueError("heat flux must be >= 0 with level 1 equal to 0")
        return v


class FDDBlock(_Block):
    mode: Literal["threshold", "sampled_latency"] = "sampled_latency"
    temperature_band: Pair = (291.0, 300.0)
    pressure_band: Pair = (96e3, 106e3)
    persistence: int = Field(5, ge=1)
    latency: float = Field(500.0, ge=0)
    detectable_radius: float = Field(0.02, gt=0)

    @field_validator("temperature_band", "pressure_band")
    @classmethod
    def _low_high(cls, v: Pair) -> Pair:
        return _ordered(v, "band")


class RepairBlock(_Block):
    suppression_rate: float = Field(1e-3, gt=0)
    availability_delay: float = Field(50.0, ge=0)
    restore_duration: float = Field(60.0, ge=0)


class BatchConfig(_Block):
    n_spread_samples: int = Field(10, ge=1)
    n_detection_samples: int = Field(10, ge=1)
    alpha: float = Field(8.49, gt=0)
    beta: float = Field(7.84, gt=0)
    spread_interval: Pair = (0.23e-3, 1.9e-3)
    detection_interval: Pair = (280.0, 560.0)
    t_crit: float = Field(350.0, gt=0)
    # Overrides applied to every cell on top of the base scenario.
    end_time: float = Field(3000.0, gt=0)
    intensity: int = Field(2, ge=1, le=5)
    suppression_rate: float = Field(2.5e-3, gt=0)

    @field_validator("spread_interval", "detection_interval")
    @classmethod
    def _low_high(cls, v: Pair) -> Pair:
        return _ordered(v, "interval")


class OutputConfig(_Block):
    dir: str = "out"


class ScenarioConfig(_Block):
    seed: int = Field(0, ge=0)
    clock: ClockConfig = ClockConfig()
    ie: IEConfig = IEConfig()
    eclss: ECLSSConfig = ECLSSConfig()
    power: PowerConfig = PowerConfig()
    disturbance: DisturbanceConfig = DisturbanceConfig()
    fdd: FDDBlock = FDDBlock()
    repair: RepairBlock = RepairBlock()
    batch: BatchConfig = BatchConfig()
    output: OutputConfig = OutputConfig()

    def updated(self, changes: dict[str, Any]) -> "ScenarioConfig":
        """Copy with dotted-path overrides, re-validated."""
        data = self.to_dict()
        for dotted, value in changes.items():
            node = data
            *head, last = dotted.split(".")
            for key in head:
                node = node[key]
            node[last] = value
        return from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def _error_path(loc: tuple[Any, ...]) -> str:
    return ".".join(str(p) for p in loc)


def from_dict(data: dict[str, Any] | None) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data or {})
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ScenarioError(err["msg"], path=_error_path(err["loc"])) from None


def parse_scenario_text(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError(f"syntax error: {getattr(exc, 'problem', exc)}", line=line) from None
    if data is not None and not isinstance(data, dict):
        raise ScenarioError("scenario file must be a mapping at the top level", line=1)
    return from_dict(data)


def parse_scenario(path: str | os.PathLike[str]) -> ScenarioConfig:
    return parse_scenario_text(Path(path).read_text())


def dump_scenario(config: ScenarioConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=None)
