"""Multi-rate simulation kernel and coordination bus.

Every subsystem declares the channels it produces and consumes. The bus
keeps the latest frame per channel (zero-order hold) and hands each
subsystem one fused value per declared input when it steps. Exchange is
synchronous: all subsystems due on a tick read the store as it stood
before the tick, and their outputs become visible on the next tick.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol, Sequence

Values = tuple[float, ...]


class SignalKind(str, enum.Enum):
    PHYSICAL = "physical"
    CYBER = "cyber"
    DISTURBANCE = "disturbance"
    DAMAGE = "damage"
    HEALTH = "health"
    REPAIR = "repair"


class EngineError(Exception):
    """Base class for kernel errors."""


class DuplicateId(EngineError):
    pass


class NonIntegralPeriod(EngineError):
    pass


class DuplicateProducer(EngineError):
    pass


class UnproducedChannel(EngineError):
    pass


class ArityError(EngineError):
    pass


class SubsystemStepError(EngineError):
    """Wraps an exception raised inside a subsystem step."""

    def __init__(self, subsystem_id: str, time: float, cause: BaseException):
        super().__init__(f"subsystem {subsystem_id!r} failed at t={time:g} s: {cause}")
        self.subsystem_id = subsystem_id
        self.time = time
        self.cause = cause


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    kind: SignalKind
    initial: Values
    units: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.initial)


@dataclass(frozen=True)
class SignalFrame:
    source: str
    channel: str
    kind: SignalKind
    values: Values
    timestamp: float


@dataclass(frozen=True)
class SubsystemDescriptor:
    id: str
    step_period: float
    input_channels: tuple[str, ...]
    output_channels: tuple[ChannelSpec, ...]

    def __post_init__(self) -> None:
        if len(set(self.input_channels)) != len(self.input_channels):
            raise EngineError(f"{self.id}: duplicate input channel names")
        names = [c.name for c in self.output_channels]
        if len(set(names)) != len(names):
            raise EngineError(f"{self.id}: duplicate output channel names")


class Subsystem(Protocol):
    descriptor: SubsystemDescriptor

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> Mapping[str, Sequence[float]]:
        """Advance internal state to ``now`` and return output values per channel.

        ``dt`` is 0.0 on the first call (t = 0), where the subsystem only
        reports its initial state.
        """
        ...


@dataclass
class SimClock:
    base_step: float
    end_time: float
    tick: int = 0

    def __post_init__(self) -> None:
        if not self.base_step > 0:
            raise EngineError("base_step must be > 0")
        if self.end_time < 0:
            raise EngineError("end_time must be >= 0")

    @property
    def now(self) -> float:
        return self.tick * self.base_step

    @property
    def last_tick(self) -> int:
        return int(math.floor(self.end_time / self.base_step + 1e-9))

    def ticks_for(self, period: float) -> int:
        """Period expressed as an integer number of base steps."""
        ratio = period / self.base_step
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise NonIntegralPeriod(f"period {period:g} s is not a positive integer multiple of {self.base_step:g} s")
        return n


@dataclass
class CoordinationBus:
    """Routing table plus latest-value store."""

    producers: dict[str, str] = field(default_factory=dict)
    specs: dict[str, ChannelSpec] = field(default_factory=dict)
    routes: dict[str, list[str]] = field(default_factory=dict)
    latest: dict[str, SignalFrame] = field(default_factory=dict)

    def add_producer(self, subsystem_id: str, spec: ChannelSpec) -> None:
        if spec.name in self.producers:
            raise DuplicateProducer(
                f"channel {spec.name!r} already produced by {self.producers[spec.name]!r}"
            )
        self.producers[spec.name] = subsystem_id
        self.specs[spec.name] = spec
        self.routes.setdefault(spec.name, [])

    def add_consumer(self, subsystem_id: str, channel: str) -> None:
        self.routes.setdefault(channel, []).append(subsystem_id)

    def check_routing(self) -> None:
        missing = sorted(ch for ch in self.routes if ch not in self.producers)
        if missing:
            consumers = {ch: self.routes[ch] for ch in missing}
            raise UnproducedChannel(f"input channels with no producer: {consumers}")

    def publish(self, frame: SignalFrame) -> None:
        spec = self.specs[frame.channel]
        if len(frame.values) != spec.arity:
            raise ArityError(
                f"{frame.source}: channel {frame.channel!r} expects {spec.arity} values, got {len(frame.values)}"
            )
        prev = self.latest.get(frame.channel)
        if prev is not None and frame.timestamp < prev.timestamp:
            raise EngineError(f"non-monotone timestamp on {frame.channel!r}")
        self.latest[frame.channel] = frame

    def value(self, channel: str) -> Values:
        frame = self.latest.get(channel)
        if frame is None:
            return self.specs[channel].initial
        return frame.values

    def fuse(self, channels: Sequence[str]) -> dict[str, Values]:
        """One value per channel: latest frame, else the declared initial value."""
        return {ch: self.value(ch) for ch in channels}


@dataclass
class _Entry:
    subsystem: Subsystem
    period_ticks: int
    steps: int = 0


Observer = Callable[[float, CoordinationBus], None]


class Engine:
    """Fixed-step scheduler over registered subsystems.

    Subsystems step in registration order. Observers run after the
    exchange on every tick that is a multiple of their period, so they see
    the outputs of the tick they observe.
    """

    def __init__(self, base_step: float, end_time: float):
        self.clock = SimClock(base_step, end_time)
        self.bus = CoordinationBus()
        self._entries: dict[str, _Entry] = {}
        self._observers: list[tuple[int, Observer]] = []
        self._finalized = False

    def register(self, subsystem: Subsystem) -> str:
        d = subsystem.descriptor
        if d.id in self._entries:
            raise DuplicateId(f"subsystem id {d.id!r} already registered")
        period_ticks = self.clock.ticks_for(d.step_period)
        for spec in d.output_channels:
            self.bus.add_producer(d.id, spec)
        for ch in d.input_channels:
            self.bus.add_consumer(d.id, ch)
        self._entries[d.id] = _Entry(subsystem, period_ticks)
        self._finalized = False
        return d.id

    def add_observer(self, period: float, observer: Observer) -> None:
        self._observers.append((self.clock.ticks_for(period), observer))

    def finalize(self) -> None:
        self.bus.check_routing()
        self._finalized = True

    def step_counts(self) -> dict[str, int]:
        return {sid: e.steps for sid, e in self._entries.items()}

    def run(self) -> None:
        if not self._finalized:
            self.finalize()
        clock = self.clock
        entries = list(self._entries.values())
        last = clock.last_tick
        base = clock.base_step
        for tick in range(clock.tick, last + 1):
            clock.tick = tick
            now = tick * base
            due = [e for e in entries if tick % e.period_ticks == 0]
            if due:
                pending: list[SignalFrame] = []
                for e in due:
                    sub = e.subsystem
                    d = sub.descriptor
                    dt = 0.0 if e.steps == 0 else e.period_ticks * base
                    inputs = self.bus.fuse(d.input_channels)
                    try:
                        outputs = sub.step(now, dt, inputs)
                    except EngineError:
                        raise
                    except Exception as exc:
                        raise SubsystemStepError(d.id, now, exc) from exc
                    e.steps += 1
                    for spec in d.output_channels:
                        if spec.name in outputs:
                            pending.append(
                                SignalFrame(d.id, spec.name, spec.kind, tuple(float(v) for v in outputs[spec.name]), now)
                            )
                for frame in pending:
                    self.bus.publish(frame)
            for period_ticks, observer in self._observers:
                if tick % period_ticks == 0:
                    observer(now, self.bus)
