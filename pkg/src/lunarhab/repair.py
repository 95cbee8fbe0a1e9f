"""Repair scheduler and the single agent that carries out repairs."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .disturbance import Phase
from .engine import ChannelSpec, SignalKind, SubsystemDescriptor, Values


class RepairType(str, enum.Enum):
    FIRE_SUPPRESSION = "fire_suppression"
    COMPONENT_RESTORE = "component_restore"


class AgentStatus(enum.IntEnum):
    IDLE = 0
    TRAVELING = 1
    REPAIRING = 2


@dataclass(frozen=True)
class RepairCommand:
    target: str
    repair_type: RepairType
    repair_rate: float
    availability_delay: float
    issued_at: float
    duration: float = 0.0

    def __post_init__(self) -> None:
        if self.repair_type is RepairType.FIRE_SUPPRESSION and not self.repair_rate > 0:
            raise ValueError("fire suppression needs repair_rate > 0")

    @property
    def start_time(self) -> float:
        return self.issued_at + self.availability_delay


@dataclass
class AgentState:
    status: AgentStatus = AgentStatus.IDLE
    busy_until: float = 0.0
    command: RepairCommand | None = None
    queue: deque = field(default_factory=deque)
    last_health: dict[str, int] = field(default_factory=dict)
    issued: list[RepairCommand] = field(default_factory=list)


@dataclass(frozen=True)
class RepairPolicy:
    suppression_rate: float = 1e-3  # m/s
    availability_delay: float = 50.0  # s
    restore_duration: float = 60.0  # s
    # Health target -> repair type dispatched for it.
    targets: Mapping[str, RepairType] = field(default_factory=lambda: {"ie": RepairType.FIRE_SUPPRESSION})


def _make_command(target: str, now: float, policy: RepairPolicy) -> RepairCommand:
    kind = policy.targets[target]
    rate = policy.suppression_rate if kind is RepairType.FIRE_SUPPRESSION else 0.0
    duration = policy.restore_duration if kind is RepairType.COMPONENT_RESTORE else 0.0
    return RepairCommand(target, kind, rate, policy.availability_delay, now, duration)


def schedule_repair(health: Mapping[str, int], agent: AgentState, now: float, policy: RepairPolicy) -> RepairCommand | None:
    """React to 0 -> 1 health transitions; return a newly issued command, if any.

    Faults arriving while the agent is busy wait in a FIFO queue.
    """
    for target, bit in health.items():
        prev = agent.last_health.get(target, 0)
        if prev == 0 and bit == 1 and target in policy.targets and target not in agent.queue:
            if agent.command is None or agent.command.target != target:
                agent.queue.append(target)
        agent.last_health[target] = bit
    if agent.status is AgentStatus.IDLE and agent.queue:
        target = agent.queue.popleft()
        cmd = _make_command(target, now, policy)
        agent.command = cmd
        agent.status = AgentStatus.TRAVELING
        agent.busy_until = cmd.start_time
        agent.issued.append(cmd)
        return cmd
    return None


def step_repair(agent: AgentState, now: float, fire_phase: Phase, health: Mapping[str, int]) -> float:
    """Advance the active repair and return the suppression rate to apply, m/s."""
    cmd = agent.command
    if cmd is None:
        return 0.0
    if now < cmd.start_time:
        return 0.0
    agent.status = AgentStatus.REPAIRING
    if cmd.repair_type is RepairType.FIRE_SUPPRESSION:
        if fire_phase is Phase.EXTINGUISHED and health.get(cmd.target, 0) == 0:
            _finish(agent, now)
            return 0.0
        return cmd.repair_rate
    agent.busy_until = cmd.start_time + cmd.duration
    if now >= agent.busy_until and health.get(cmd.target, 0) == 0:
        _finish(agent, now)
    return 0.0


def _finish(agent: AgentState, now: float) -> None:
    agent.command = None
    agent.status = AgentStatus.IDLE
    agent.busy_until = now


class RepairScheduler:
    """Bus adapter: health in, suppression rate and agent status out."""

    def __init__(self, policy: RepairPolicy, period: float = 1.0):
        self.policy = policy
        self.agent = AgentState()
        self.descriptor = SubsystemDescriptor(
            id="repair",
            step_period=period,
            input_channels=("fdd.health", "fire.state"),
            output_channels=(
                ChannelSpec("repair.suppression", SignalKind.REPAIR, (0.0,), ("m/s",)),
                ChannelSpec("repair.agent", SignalKind.CYBER, (0.0, 0.0), ("-", "s")),
            ),
        )

    def step(self, now: float, dt: float, inputs: Mapping[str, Values]) -> dict[str, Values]:
        health = {"ie": int(round(inputs["fdd.health"][0]))}
        phase = Phase(int(inputs["fire.state"][4]))
        # The health frame was produced one step earlier; date the fault from it.
        stamp = now - dt if dt > 0 else now
        schedule_repair(health, self.agent, stamp, self.policy)
        rate = step_repair(self.agent, now, phase, health)
        return {
            "repair.suppression": (rate,),
            "repair.agent": (float(self.agent.status), self.agent.busy_until),
        }
