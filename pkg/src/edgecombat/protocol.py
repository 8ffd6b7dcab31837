"""Coordinator-agent alliance protocol.

Agents watch their own zone and raise a local alarm (LA) when the measured
attack force crosses their threshold; the coordinator raises a regional
alarm (RA) only when the whole alliance's available power is insufficient,
and then low-priority work is shed. Bot knowledge discovered at the victim
is broadcast so upstream classifiers can drop those sources early. Only
uncertain (L-class) traffic is ever offloaded; verified benign traffic keeps
its priority end to end.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .allocation import Allocation, InfeasibleError, WorkloadProblem, solve_exact
from .topology import NetworkGraph, hop_distance, loop_free_candidates


class MessageKind(enum.Enum):
    LOCAL_ALARM = "LocalAlarm"
    REGIONAL_ALARM = "RegionalAlarm"
    ALARM_CLEAR = "AlarmClear"
    HELP_REQUEST = "HelpRequest"
    UPDATE = "Update"
    QUERY = "Query"
    BOT_KNOWLEDGE = "BotKnowledge"


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    sender: str
    payload: dict = field(default_factory=dict)


class ActionKind(enum.Enum):
    OFFLOAD = "offload"
    KILL_LOW_PRIORITY = "kill_low_priority"
    ORGANIZE_DEFENSE = "organize_defense"
    CLEAR_REGIONAL = "clear_regional"
    CLEAR_LOCAL = "clear_local"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TrafficClass:
    label: str  # "H", "L" or "Drop"
    legitimacy: int | None = None  # percent, granular mode only

    def __post_init__(self) -> None:
        if self.label not in ("H", "L", "Drop"):
            raise ValueError(f"unknown traffic class {self.label!r}")
        if self.label == "H" and self.legitimacy not in (None, 100):
            raise ValueError("H-class traffic is 100% legitimate by definition")


@dataclass(frozen=True)
class TrafficFlow:
    source: str
    dest: str
    rate: float
    verified: bool = False
    legitimacy: int | None = None  # classifier hint, used in granular mode


@dataclass(frozen=True)
class AgentState:
    """Per-defender agent: alarm flag, threshold, capability, shared bot list."""

    defender_id: str
    threshold: float
    la: int = 0
    capability: int = 1
    peers: tuple[str, ...] = ()
    known_bots: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        if self.la not in (0, 1):
            raise ValueError("la must be 0 or 1")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


@dataclass(frozen=True)
class MemberRecord:
    member_id: str
    certificate_valid: bool
    egress_filtering: bool


@dataclass(frozen=True)
class CoordinatorState:
    """Alliance-wide view: regional alarm, admitted members, power bookkeeping."""

    members: tuple[MemberRecord, ...]
    total_power: float
    availability: float = 1.0  # fraction of total power currently released
    ra: int = 0
    reputation: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        if self.ra not in (0, 1):
            raise ValueError("ra must be 0 or 1")
        for member in self.members:
            if not (member.certificate_valid and member.egress_filtering):
                raise ValueError(
                    f"member {member.member_id!r} fails the admission requirement"
                )

    @classmethod
    def admit(cls, candidates: list[MemberRecord], total_power: float,
              availability: float = 1.0) -> "CoordinatorState":
        """Build a coordinator keeping only certificate-valid, filtering members."""
        kept = tuple(
            m for m in candidates if m.certificate_valid and m.egress_filtering
        )
        return cls(members=kept, total_power=total_power, availability=availability)


def classify(
    flow: TrafficFlow, known_bots: frozenset[tuple[str, str]], granular: bool = False
) -> TrafficClass:
    """Drop known bots, prioritize verified-benign sources, default to L."""
    if (flow.source, flow.dest) in known_bots:
        return TrafficClass("Drop")
    if flow.verified:
        return TrafficClass("H", legitimacy=100)
    if granular and flow.legitimacy is not None:
        return TrafficClass("L", legitimacy=flow.legitimacy)
    return TrafficClass("L")


def alarm_step(
    agent: AgentState,
    coord: CoordinatorState,
    attack_force: float,
    local_capacity: float,
    alliance_available: float,
) -> tuple[AgentState, CoordinatorState, list[Action]]:
    """One evaluation of the alarm escalation logic.

    Above-threshold force raises the local alarm and offloads to peers; with
    no capable peers the coordinator is asked for help, escalating to a
    regional alarm (shedding low-priority jobs) only when the attack exceeds
    the available alliance power. On suppression the regional alarm clears
    before the local one.
    """
    if attack_force < 0 or local_capacity < 0 or alliance_available < 0:
        raise ValueError("forces and capacities must be nonnegative")
    actions: list[Action] = []
    if attack_force >= agent.threshold:
        if agent.la == 0:
            agent = replace(agent, la=1)
        if alliance_available > 0:
            actions.append(
                Action(
                    ActionKind.OFFLOAD,
                    {"attack_force": attack_force, "victim": agent.defender_id},
                )
            )
        else:
            # all queried peers answered c_i == 0 (or have nothing left)
            available_power = coord.availability * coord.total_power
            if attack_force >= available_power:
                if coord.ra == 0:
                    coord = replace(coord, ra=1)
                actions.append(
                    Action(
                        ActionKind.KILL_LOW_PRIORITY,
                        {"attack_force": attack_force},
                    )
                )
            else:
                # release reserved capacity instead of escalating
                coord = replace(coord, availability=1.0, ra=0)
                actions.append(Action(ActionKind.ORGANIZE_DEFENSE))
    else:
        if agent.la == 1:
            if coord.ra == 1:
                coord = replace(coord, ra=0)
                actions.append(Action(ActionKind.CLEAR_REGIONAL))
            agent = replace(agent, la=0)
            actions.append(Action(ActionKind.CLEAR_LOCAL))
    return agent, coord, actions


def capability_vector(
    g: NetworkGraph, victim: str, members: list[str]
) -> tuple[int, ...]:
    """c_i = 1 for members upstream of the victim with egress filtering enabled."""
    g._require(victim)
    flags = []
    for member in members:
        if member not in g.nodes:
            raise KeyError(f"unknown member {member!r}")
        node = g.nodes[member]
        dist = hop_distance(g, member, victim)
        capable = (
            member != victim and node.egress_filtering and dist is not None and dist > 0
        )
        flags.append(1 if capable else 0)
    return tuple(flags)


@dataclass(frozen=True)
class OffloadPlan:
    """Per-collaborator shares of the diverted L-class load."""

    shares: tuple[tuple[str, float], ...]
    pi: float

    def share_of(self, node_id: str) -> float:
        return dict(self.shares).get(node_id, 0.0)


def orchestrate_offload(
    victim: str,
    excess: float,
    g: NetworkGraph,
    caps: dict[str, float],
    upstream: str | None = None,
) -> OffloadPlan:
    """Spread the excess L-class load over loop-free capable collaborators.

    Eligible collaborators are the capable members that are also loop-free
    forwarding choices from the upstream distributor (or any upstream member
    when no distributor is named). H-class traffic is never diverted.
    Raises InfeasibleError when nobody is eligible, which the caller turns
    into a coordinator escalation.
    """
    if excess <= 0:
        raise ValueError("excess must be positive")
    if upstream is not None:
        candidates = loop_free_candidates(g, upstream, victim)
    else:
        candidates = {
            node
            for node in caps
            if node != victim and hop_distance(g, node, victim) is not None
        }
    eligible = sorted(node for node in candidates if node in caps)
    if not eligible:
        raise InfeasibleError(f"no eligible collaborator for victim {victim!r}")
    problem = WorkloadProblem(
        attack_power=(excess,),
        capacity=tuple(caps[node] for node in eligible),
        eligible=tuple((True,) for _ in eligible),
    )
    solution = solve_exact(problem, tol=1e-9)
    shares = tuple(
        (node, solution.assign[k][0]) for k, node in enumerate(eligible)
    )
    return OffloadPlan(shares=shares, pi=solution.pi)


def share_bot_knowledge(
    agents: list[AgentState], discovery: tuple[str, str]
) -> list[AgentState]:
    """Broadcast one (source, victim) bot discovery to every agent; idempotent."""
    return [
        agent
        if discovery in agent.known_bots
        else replace(agent, known_bots=agent.known_bots | {discovery})
        for agent in agents
    ]
