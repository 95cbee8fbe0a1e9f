"""Disturbance initiator: fire model and temperature-to-damage conversion."""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .engine import ChannelSpec, SignalKind, SubsystemDescriptor, Values

# Radii closer than this to zero count as zero (accumulated float drift).
RADIUS_EPS = 1e-12

DEFAULT_HEAT_FLUX = (0.0, 20e3, 60e3, 120e3, 200e3)


class Phase(enum.IntEnum):
    PENDING = 0
    BURNING = 1
    SUPPRESSING = 2
    EXTINGUISHED = 3


class DisturbanceKind(str, enum.Enum):
    FIRE = "fire"
    MOONQUAKE = "moonquake"
    METEORITE = "meteorite"
    DUST = "dust"
    AIRLOCK_LEAK = "airlock_leak"


class ComponentClass(str, enum.Enum):
    ENERGY_STORAGE = "energy_storage"
    COMPRESSOR = "compressor"
    POWER_CONVERTER = "power_converter"


# Components without their own temperature rows borrow a class.
COMPONENT_CLASS = {
    "energy_storage": ComponentClass.ENERGY_STORAGE,
    "power_converter": ComponentClass.POWER_CONVERTER,
    "compressor": ComponentClass.COMPRESSOR,
    "condenser": ComponentClass.COMPRESSOR,
    "fan_zone1": ComponentClass.COMPRESSOR,
    "fan_zone2": ComponentClass.COMPRESSOR,
}

ECLSS_COMPONENTS = ("fan_zone1", "fan_zone2", "compressor", "condenser")
POWER_COMPONENTS = ("energy_storage", "power_converter")


@dataclass(frozen=True)
class ScheduledDisturbance:
    kind: DisturbanceKind
    start_time: float
    finish_time: float | None = None
    parameters: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.start_time < 0:
            raise ValueError("start_time must be >= 0")
        if self.finish_time is not None and not self.finish_time > self.start_time:
            raise ValueError("finish_time must be > start_time")


@dataclass(frozen=True)
class FireState:
    origin: tuple[float, float]
    spread_rate: float
    intensity: int
    start_time: float
    radius: float = 0.0
    phase: Phase = Phase.PENDING
    finish_time: float | None = None

    @property
    def active(self) -> bool:
        return self.phase in (Phase.BURNING, Phase.SUPPRESSING)


def step_fire(state: FireState, dt: float, suppression_rate: float, now: float | None = None) -> FireState:
    """Advance the fire by ``dt`` seconds.

    ``now`` is the clock time at the end of the step; it drives ignition
    and the optional forced finish time. A pending fire ignites with zero
    radius, so growth starts on the following step.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if suppression_rate < 0:
        raise ValueError("suppression_rate must be >= 0")
    phase = state.phase
    if phase is Phase.EXTINGUISHED:
        return state
    if phase is Phase.PENDING:
        if now is not None and now >= state.start_time:
            return replace(state, phase=Phase.BURNING, radius=0.0)
        return state
    if state.finish_time is not None and now is not None and now >= state.finish_time:
        return replace(state, phase=Phase.EXTINGUISHED, radius=0.0)

    if suppression_rate > 0:
        phase = Phase.SUPPRESSING
    if phase is Phase.SUPPRESSING:
        radius = state.radius + (state.spread_rate - suppression_rate) * dt
        if radius <= RADIUS_EPS:
            return replace(state, phase=Phase.EXTINGUISHED, radius=0.0)
        return replace(state, phase=phase, radius=radius)
    return replace(state, radius=state.radius + state.spread_rate * dt)


def fire_heat_output(radius: float, intensity: int, phase: Phase, heat_flux: Sequence[float] = DEFAULT_HEAT_FLUX) -> float:
    """Heat released into the fire zone, W.

    Flux density per intensity level times the surface of a hemisphere.
    """
    if phase not in (Phase.BURNING, Phase.SUPPRESSING) or intensity <= 1:
        return 0.0
    return heat_flux[intensity - 1] * 2.0 * math.pi * radius * radius


# Cut points (degC, ascending) and the level on each open interval between
# them; levels[i] covers (cuts[i-1], cuts[i]). A temperature exactly on a
# cut takes the milder of its two neighbours.
_DAMAGE_BANDS: dict[ComponentClass, tuple[tuple[float, ...], tuple[int, ...]]] = {
    ComponentClass.ENERGY_STORAGE: ((-50.0, -20.0, -1.0, 30.0, 50.0), (5, 3, 2, 1, 4, 5)),
    ComponentClass.COMPRESSOR: (
        (-20.0, -10.0, 0.0, 10.0, 30.0, 60.0, 90.0, 120.0),
        (5, 4, 3, 2, 1, 2, 3, 4, 5),
    ),
    ComponentClass.POWER_CONVERTER: ((105.0, 125.0, 145.0), (1, 2, 3, 4)),
}


def temperature_to_damage(component: ComponentClass | str, celsius: float) -> int:
    """Damage level (1..5, converters 1..4) for a component at ``celsius``."""
    if not math.isfinite(celsius):
        raise ValueError("temperature must be finite")
    try:
        cls = ComponentClass(component)
    except ValueError:
        raise ValueError(f"unknown component class {component!r}") from None
    cuts, levels = _DAMAGE_BANDS[cls]
    i = bisect.bisect_left(cuts, celsius)
    if i < len(cuts) and cuts[i] == celsius:
        return min(levels[i], levels[i + 1])
    return levels[i]


def kelvin_to_celsius(kelvin: float) -> float:
    return kelvin - 273.15


def derive_damage_indicators(
    zone_temperatures: Mapping[str, float],
    placement: Mapping[str, str],
) -> dict[str, int]:
    """Damage level per placed component from its zone temperature (K)."""
    out: dict[str, int] = {}
    for component, zone in placement.items():
        if zone not in zone_temperatures:
            raise ValueError(f"component {component!r} placed in unknown zone {zone!r}")
        cls = COMPONENT_CLASS.get(component)
        if cls is None:
            raise ValueError(f"unknown component {component!r}")
        out[component] = temperature_to_damage(cls, kelvin_to_celsius(zone_temperatures[zone]))
    return out


def disturbance_frames(state: FireState | None, zone: int) -> dict[str, Values]:
    """Physical fire state and phenomenological intensity for the bus."""
    if state is None:
        return {
            "fire.state": (0.0, 0.0, 0.0, 0.0, float(Phase.PENDING), float(zone)),
            "fire.intensity": (1.0,),
        }
    intensity = state.intensity if state.active else 1
    radius = state.radius if state.active else 0.0
    return {
        "fire.state": (radius, state.spread_rate, state.origin[0], state.origin[1], float(state.phase), float(zone)),
        "fire.intensity": (float(intensity),),
    }


def damage_channel(component: str) -> str:
    return f"damage.{component}"


class DisturbanceInitiator:
    """Bus adapter owning the fire and the damage conversion."""

    def __init__(
        self,
        schedule: Sequence[ScheduledDisturbance],
        placement: Mapping[str, str],
        period: float = 1.0,
    ):
        fires = [s for s in schedule if s.kind is DisturbanceKind.FIRE]
        others = [s for s in schedule if s.kind is not DisturbanceKind.FIRE]
        if others:
            raise NotImplementedError(f"disturbance kinds not modeled: {sorted({s.kind.value for s in others})}")
        if len(fires) > 1:
            raise NotImplementedError("only a single fire per scenario is modeled")
        self.placement = dict(placement)
        for comp in self.placement:
            if comp not in COMPONENT_CLASS:
                raise ValueError(f"unknown component {comp!r}")
        self.zone = 2
        self.fire: FireState | None = None
        if fires:
            f = fires[0]
            p = f.parameters
            self.zone = int(p.get("zone", 2))
            self.fire = FireState(
                origin=tuple(p.get("origin", (0.0, -0.75))),  # type: ignore[arg-type]
                spread_rate=float(p["spread_rate"]),
                intensity=int(p["intensity"]),
                start_time=f.start_time,
                finish_time=f.finish_time,
            )
        outputs = [
            ChannelSpec("fire.state", SignalKind.PHYSICAL, (0.0, 0.0, 0.0, 0.0, 0.0, float(self.zone)),
                        ("m", "m/s", "m", "m", "-", "-")),
            ChannelSpec("fire.intensity", SignalKind.DISTURBANCE, (1.0,), ("-",)),
        ]
        outputs += [ChannelSpec(damage_channel(c), SignalKind.DAMAGE, (1.0,), ("-",)) for c in self.placement]
        self.descriptor = SubsystemDescriptor(
            id="disturbance",
            step_period=period,
            input_channels=("ie.state", "repair.suppression"),
            output_channels=tuple(outputs),
        )

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> dict[str, Values]:
        if self.fire is not None:
            if dt > 0:
                rate = inputs["repair.suppression"][0]
                self.fire = step_fire(self.fire, dt, rate, now)
            elif now >= self.fire.start_time and self.fire.phase is Phase.PENDING:
                self.fire = replace(self.fire, phase=Phase.BURNING)
        ie = inputs["ie.state"]
        temps = {"zone1": ie[0], "zone2": ie[1]}
        out = disturbance_frames(self.fire, self.zone)
        for comp, level in derive_damage_indicators(temps, self.placement).items():
            out[damage_channel(comp)] = (float(level),)
        return out
