"""Assemble the habitat subsystems on the kernel and run one scenario."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .disturbance import DisturbanceInitiator, DisturbanceKind, ScheduledDisturbance
from .eclss import ECLSS, ECLSSParams
from .engine import CoordinationBus, Engine
from .environment import IEParams, InteriorEnvironment, ZoneState
from .fdd import FaultDetector, FDDConfig, FDDMode
from .metrics import RunMetrics, extract_metrics
from .power import GenerationState, PowerSystem, StorageState
from .repair import RepairPolicy, RepairScheduler
from .rng import stream

# Fixed timeseries schema: (column, bus channel, index into its values).
COLUMNS: tuple[tuple[str, str, int], ...] = (
    ("fire_radius_m", "fire.state", 0),
    ("fire_phase", "fire.state", 4),
    ("fire_intensity", "fire.intensity", 0),
    ("fire_heat_w", "ie.state", 6),
    ("t_zone1_k", "ie.state", 0),
    ("t_zone2_k", "ie.state", 1),
    ("p_zone1_pa", "ie.state", 2),
    ("p_zone2_pa", "ie.state", 3),
    ("fan1_eff", "eclss.status", 0),
    ("fan2_eff", "eclss.status", 1),
    ("compressor_eff", "eclss.status", 2),
    ("condenser_eff", "eclss.status", 3),
    ("cooling_zone1", "eclss.status", 4),
    ("cooling_zone2", "eclss.status", 5),
    ("heater_zone1", "eclss.status", 6),
    ("heater_zone2", "eclss.status", 7),
    ("air_flow_mol_s", "eclss.status", 8),
    ("eclss_power_w", "eclss.power_demand", 0),
    ("total_demand_w", "power.state", 1),
    ("unmet_power_w", "power.state", 3),
    ("storage_soc_j", "power.state", 0),
    ("storage_multiplier", "power.state", 5),
    ("converter_eff", "power.state", 6),
    ("health_ie", "fdd.health", 0),
    ("agent_status", "repair.agent", 0),
    ("suppression_rate_m_s", "repair.suppression", 0),
)

HEADER: tuple[str, ...] = ("time_s",) + tuple(c[0] for c in COLUMNS)


@dataclass
class TimeSeries:
    """Recorded samples; ``data`` has one row per output period."""

    header: tuple[str, ...]
    data: np.ndarray

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[:, self.header.index(column)]

    @classmethod
    def from_columns(cls, columns: dict[str, np.ndarray]) -> "TimeSeries":
        header = tuple(columns)
        return cls(header, np.column_stack([np.asarray(v, dtype=float) for v in columns.values()]))


class Recorder:
    def __init__(self) -> None:
        self.rows: list[tuple[float, ...]] = []

    def __call__(self, now: float, bus: CoordinationBus) -> None:
        row = [now]
        for _, channel, idx in COLUMNS:
            row.append(bus.value(channel)[idx])
        self.rows.append(tuple(row))

    def series(self) -> TimeSeries:
        data = np.array(self.rows, dtype=float).reshape(-1, len(HEADER))
        return TimeSeries(HEADER, data)


@dataclass
class RunResult:
    config: ScenarioConfig
    series: TimeSeries
    metrics: RunMetrics
    step_counts: dict[str, int] = field(default_factory=dict)
    health_transitions: list[tuple[float, int]] = field(default_factory=list)
    repair_commands: list = field(default_factory=list)


def build_schedule(config: ScenarioConfig) -> list[ScheduledDisturbance]:
    fire = config.disturbance.fire
    if not fire.enabled:
        return []
    return [
        ScheduledDisturbance(
            DisturbanceKind.FIRE,
            fire.start_time,
            fire.finish_time,
            {"intensity": fire.intensity, "spread_rate": fire.spread_rate, "origin": fire.origin, "zone": fire.zone},
        )
    ]


def build_engine(config: ScenarioConfig) -> tuple[Engine, Recorder, dict[str, object]]:
    """Register all subsystems in their stepping order."""
    clk = config.clock
    periods = clk.periods
    engine = Engine(clk.base_step, clk.end_time)
    rng = stream(config.seed)

    ie_cfg = config.ie
    zones = [
        ZoneState.at_pressure(ie_cfg.initial_temperature[i], ie_cfg.initial_pressure, ie_cfg.volumes[i])
        for i in range(2)
    ]
    ie_params = IEParams(
        heat_capacity=ie_cfg.heat_capacity,
        wall_conductance=ie_cfg.wall_conductance,
        door_conductance=ie_cfg.door_conductance,
        sink_temperature=ie_cfg.sink_temperature,
        supply_temperature=ie_cfg.supply_temperature,
        pocket_door_open=ie_cfg.pocket_door_open,
    )
    e = config.eclss
    eclss_params = ECLSSParams(
        temperature_setpoints=e.temperature_setpoints,
        pressure_setpoints=e.pressure_setpoints,
        temperature_hysteresis=e.temperature_hysteresis,
        pressure_hysteresis=e.pressure_hysteresis,
        rated_cooling=e.rated_cooling,
        rated_heater=e.rated_heater,
        fan_power=e.fan_power,
        compressor_power=e.compressor_power,
        condenser_power=e.condenser_power,
        pressure_control_power=e.pressure_control_power,
        air_rate=e.air_rate,
        efficiency_table=e.efficiency_table,
    )
    p = config.power
    power = PowerSystem(
        storage=StorageState(p.capacity * p.initial_soc_fraction, p.capacity, p.charge_efficiency, p.discharge_efficiency),
        generation=GenerationState(p.solar_output, p.nuclear_output, p.converter_efficiency[0]),
        baseline_load=p.baseline_load,
        nominal_charge=p.charge_efficiency,
        nominal_discharge=p.discharge_efficiency,
        storage_table=p.storage_multiplier,
        converter_table=p.converter_efficiency,
        period=periods.power,
    )
    f = config.fdd
    fdd = FaultDetector(
        FDDConfig(FDDMode(f.mode), f.temperature_band, f.pressure_band, f.persistence, f.latency, f.detectable_radius),
        period=periods.fdd,
    )
    r = config.repair
    repair = RepairScheduler(RepairPolicy(r.suppression_rate, r.availability_delay, r.restore_duration), period=periods.repair)

    parts = {
        "disturbance": DisturbanceInitiator(build_schedule(config), config.disturbance.placement, periods.disturbance),
        "ie": InteriorEnvironment(
            zones, ie_params, rng, ie_cfg.sensor_sigma_temperature, ie_cfg.sensor_sigma_pressure,
            config.disturbance.heat_flux, periods.ie,
        ),
        "eclss": ECLSS(eclss_params, ie_cfg.volumes, periods.eclss),
        "power": power,
        "fdd": fdd,
        "repair": repair,
    }
    for part in parts.values():
        engine.register(part)
    recorder = Recorder()
    engine.add_observer(clk.output_period, recorder)
    engine.finalize()
    return engine, recorder, parts


class Pacer:
    """Observer that holds the run to ``factor`` simulated seconds per wall second."""

    def __init__(self, factor: float):
        if not factor > 0:
            raise ValueError("pace factor must be > 0")
        self.factor = factor
        self._start: float | None = None

    def __call__(self, now: float, bus: CoordinationBus) -> None:
        if self._start is None:
            self._start = time.monotonic() - now / self.factor
        lag = self._start + now / self.factor - time.monotonic()
        if lag > 0:
            time.sleep(lag)


def run_scenario(config: ScenarioConfig, pace: float | None = None) -> RunResult:
    engine, recorder, parts = build_engine(config)
    if pace is not None:
        engine.add_observer(config.clock.output_period, Pacer(pace))
    engine.run()
    series = recorder.series()
    metrics = extract_metrics(series, config.batch.t_crit, horizon=config.clock.end_time)
    return RunResult(
        config=config,
        series=series,
        metrics=metrics,
        step_counts=engine.step_counts(),
        health_transitions=list(parts["fdd"].history.transitions),  # type: ignore[attr-defined]
        repair_commands=list(parts["repair"].agent.issued),  # type: ignore[attr-defined]
    )
