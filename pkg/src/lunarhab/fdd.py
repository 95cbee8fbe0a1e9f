"""Synthetic fault detection producing binary health states."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .disturbance import RADIUS_EPS, Phase
from .engine import ChannelSpec, SignalKind, SubsystemDescriptor, Values


class FDDMode(str, enum.Enum):
    THRESHOLD = "threshold"
    SAMPLED_LATENCY = "sampled_latency"


@dataclass(frozen=True)
class FDDConfig:
    mode: FDDMode = FDDMode.SAMPLED_LATENCY
    temperature_band: tuple[float, float] = (291.0, 300.0)
    pressure_band: tuple[float, float] = (96e3, 106e3)
    persistence: int = 5
    latency: float = 500.0
    detectable_radius: float = 0.02

    def __post_init__(self) -> None:
        if self.persistence < 1:
            raise ValueError("persistence must be >= 1")
        if self.latency < 0:
            raise ValueError("latency must be >= 0")
        if not self.detectable_radius > 0:
            raise ValueError("detectable_radius must be > 0")


@dataclass
class FDDHistory:
    """Per-run memory of the detector."""

    health: int = 0
    out_count: int = 0
    in_count: int = 0
    detectable_since: float | None = None
    transitions: list[tuple[float, int]] = field(default_factory=list)


def readings_in_band(readings: Sequence[float], config: FDDConfig) -> bool:
    """``readings`` is (T1, T2, P1, P2)."""
    t_lo, t_hi = config.temperature_band
    p_lo, p_hi = config.pressure_band
    return all(t_lo <= t <= t_hi for t in readings[:2]) and all(p_lo <= p <= p_hi for p in readings[2:4])


def fdd_evaluate(
    now: float,
    readings: Sequence[float],
    config: FDDConfig,
    history: FDDHistory,
    fire: Sequence[float] | None = None,
    fire_time: float | None = None,
) -> int:
    """Update ``history`` with one sample and return the interior health bit.

    ``fire`` is the fire state frame (radius first, phase at index 4) and
    ``fire_time`` the time it was produced; only the sampled-latency mode
    uses them.
    """
    in_band = readings_in_band(readings, config)
    before = history.health
    if config.mode is FDDMode.THRESHOLD:
        if in_band:
            history.in_count += 1
            history.out_count = 0
        else:
            history.out_count += 1
            history.in_count = 0
        if history.health == 0 and history.out_count >= config.persistence:
            history.health = 1
        elif history.health == 1 and history.in_count >= config.persistence:
            history.health = 0
    else:
        radius = fire[0] if fire is not None else 0.0
        phase = Phase(int(fire[4])) if fire is not None else Phase.PENDING
        stamp = now if fire_time is None else fire_time
        if history.detectable_since is None and radius >= config.detectable_radius - RADIUS_EPS:
            history.detectable_since = stamp
        if history.health == 0:
            if history.detectable_since is not None and phase is not Phase.EXTINGUISHED \
                    and now >= history.detectable_since + config.latency:
                history.health = 1
        elif phase is Phase.EXTINGUISHED and in_band:
            history.health = 0
            history.detectable_since = None
    if history.health != before:
        history.transitions.append((now, history.health))
    return history.health


class FaultDetector:
    """Bus adapter; monitors the interior environment."""

    def __init__(self, config: FDDConfig, period: float = 1.0):
        self.config = config
        self.history = FDDHistory()
        self._fire_seen: Values | None = None
        self._fire_stamp = 0.0
        self._elapsed = 0.0
        self.descriptor = SubsystemDescriptor(
            id="fdd",
            step_period=period,
            input_channels=("ie.sensors", "fire.state"),
            output_channels=(ChannelSpec("fdd.health", SignalKind.HEALTH, (0.0,), ("-",)),),
        )

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> dict[str, Values]:
        fire = inputs["fire.state"]
        # Inputs lag one exchange; the frame describes the previous step.
        stamp = now - dt if dt > 0 else now
        health = fdd_evaluate(now, inputs["ie.sensors"], self.config, self.history, fire, stamp)
        return {"fdd.health": (float(health),)}
