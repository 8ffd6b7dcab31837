"""Deterministic discrete-event combat engine.

Binds the graph, the alarm protocol, the workload allocation, the population
dynamics, and the expense model into one runnable scenario. All event times
are integer milliseconds and the queue is ordered by (time, kind priority,
sequence), so identical scenarios replay bit for bit.

Load model: each attack wave offers a fixed bot traffic intensity that the
alliance spreads over the active defenders. A defender filters its share up
to capacity, but misses a fraction that grows with its own load factor, so
every extra collaborator strictly reduces what leaks through to the victim.
The attacker, meanwhile, must field (and pay for) the sustained bot
population against all engaged defense units, so expense grows linearly
with the defenders' joint power.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from decimal import Decimal

from . import dynamics, expense, protocol, topology
from .expense import Money
from .scenario import Scenario, ScenarioError


@dataclass(frozen=True)
class MetricsRecord:
    t: int  # seconds
    victim_util: float
    primary_util: float
    latency: float
    link_util: float
    active_bots: int
    cumulative_expense: Money
    la: int
    ra: int


@dataclass
class MetricsTimeSeries:
    rows: list[MetricsRecord] = field(default_factory=list)
    quit_time_s: int | None = None
    final_expense: Money = Decimal(0)
    waves_started: int = 0

    def mean(self, attr: str) -> float:
        return sum(getattr(r, attr) for r in self.rows) / len(self.rows)

    def max(self, attr: str) -> float:
        return max(getattr(r, attr) for r in self.rows)

    def summary(self) -> dict:
        return {
            "ticks": len(self.rows),
            "waves_started": self.waves_started,
            "mean_victim_util": self.mean("victim_util"),
            "max_victim_util": self.max("victim_util"),
            "mean_primary_util": self.mean("primary_util"),
            "max_primary_util": self.max("primary_util"),
            "mean_latency_s": self.mean("latency"),
            "max_latency_s": self.max("latency"),
            "mean_link_util": self.mean("link_util"),
            "total_expense": str(self.final_expense),
            "attacker_quit_time_s": self.quit_time_s,
        }


# event kind priorities: ends before starts before refreshes before samples
_ATTACK_END = 0
_ATTACK_START = 1
_ROUTE_REFRESH = 2
_METRIC_TICK = 9


def attacker_policy(margin: float) -> bool:
    """True while the campaign is still worth it (reward covers expense)."""
    return margin >= 1.0


def benign_delay(attack_utilization: float, base: float, cap: float) -> float:
    """Queueing-style delay growth driven by attack-induced congestion.

    With no attack load the benign latency equals the provisioned baseline
    exactly; as the leaked attack load fills the victim, delay scales like
    1/(1 - utilization) up to the configured cap.
    """
    rho = min(max(attack_utilization, 0.0), 1.0)
    if rho >= 1.0:
        return cap
    return min(base / (1.0 - rho), cap)


@dataclass
class World:
    """Mutable per-run state sampled by metrics_tick."""

    scenario: Scenario
    caps: dict[str, float]
    primary: str
    victim_in_capacity: float
    agent: protocol.AgentState
    coord: protocol.CoordinatorState
    shares: dict[str, float] = field(default_factory=dict)
    attack_active: bool = False
    active_bots: int = 0
    cumulative_expense: Money = Decimal(0)

    def attack_load(self) -> float:
        if not self.attack_active:
            return 0.0
        return self.scenario.attacker.bots_per_wave * self.scenario.attacker.bot_rate


def _filter_outcome(world: World) -> tuple[float, float]:
    """(residual reaching the victim, load dropped by defenders) this tick."""
    miss = world.scenario.run.filter_miss_rate
    residual = 0.0
    dropped = 0.0
    for node, share in world.shares.items():
        if not world.attack_active or share <= 0:
            continue
        cap = world.caps[node]
        handled = min(share, cap)
        overflow = share - handled
        leak = handled * miss * (handled / cap)
        residual += overflow + leak
        dropped += handled - leak
    return residual, dropped


def metrics_tick(world: World, t_s: int) -> MetricsRecord:
    """Sample utilizations, latency, and expense for one simulated second."""
    s = world.scenario
    benign = s.benign_rate
    attack = world.attack_load()
    residual, dropped = _filter_outcome(world)
    # conservation check: injected == delivered + dropped
    delivered = benign + residual
    if abs((benign + attack) - (delivered + dropped)) > 1e-9 * max(1.0, attack):
        raise AssertionError("traffic conservation violated")
    victim_util = min(1.0, delivered / s.victim.capacity)
    primary_share = world.shares.get(world.primary, 0.0) if world.attack_active else 0.0
    primary_util = min(1.0, primary_share / world.caps[world.primary])
    latency = benign_delay(
        residual / s.victim.capacity, s.victim.base_latency_s, s.victim.latency_cap_s
    )
    link_util = min(1.0, delivered / world.victim_in_capacity)
    return MetricsRecord(
        t=t_s,
        victim_util=victim_util,
        primary_util=primary_util,
        latency=latency,
        link_util=link_util,
        active_bots=world.active_bots,
        cumulative_expense=world.cumulative_expense,
        la=world.agent.la,
        ra=world.coord.ra,
    )


def _validate(s: Scenario) -> tuple[str, dict[str, float]]:
    """All validation errors reported at once, before any event executes."""
    errors: list[str] = []
    active = s.active_defenders()
    caps = {d.node: d.capacity for d in active}
    upstream = s.run.upstream
    if upstream is None:
        clouds = sorted(n.id for n in s.graph.nodes.values() if n.role == "cloud")
        if clouds:
            upstream = clouds[0]
        else:
            errors.append("no run.upstream given and no cloud node in the graph")
    if upstream is not None:
        dist = topology.hop_distance(s.graph, upstream, s.victim.node)
        if dist is None:
            errors.append(f"victim unreachable from upstream {upstream!r}")
    if s.benign_source not in s.graph.nodes:
        errors.append(f"benign source {s.benign_source!r} not in graph")
    for d in active:
        if topology.hop_distance(s.graph, d.node, s.victim.node) is None:
            errors.append(f"active defender {d.node!r} cannot reach the victim")
        if not s.graph.nodes[d.node].egress_filtering:
            errors.append(f"active defender {d.node!r} lacks egress filtering")
    if s.run.duration_s <= 0 or s.run.tick_s <= 0:
        errors.append("run.duration_s and run.tick_s must be positive")
    if errors:
        raise ScenarioError("; ".join(errors))
    return upstream, caps


def _wave_bots(s: Scenario, caps: dict[str, float]) -> int:
    """Bot population the attacker must keep active against the engaged units.

    The sustained population scales linearly with the engaged defense units,
    so relative to a lone primary defender the attacker fields the joint
    amplification factor times the scheduled wave population.
    """
    engaged = sum(caps.values())
    primary_units = caps[s.primary_defender().node]
    lam = dynamics.required_bots(engaged, s.combat) / dynamics.required_bots(
        primary_units, s.combat
    )
    n = round(s.attacker.bots_per_wave * lam)
    return max(n, s.pricing.min_bots)


def run(s: Scenario) -> MetricsTimeSeries:
    """Execute one combat scenario; bit-identical output for identical inputs."""
    upstream, caps = _validate(s)
    active = s.active_defenders()
    primary = s.primary_defender().node
    victim = s.victim.node

    in_links = [l for l in s.graph.links if l.dst == victim]
    victim_in_capacity = (
        sum(l.capacity for l in in_links) if in_links else s.victim.capacity
    )

    members = [
        protocol.MemberRecord(
            d.node, certificate_valid=True,
            egress_filtering=s.graph.nodes[d.node].egress_filtering,
        )
        for d in active
    ]
    world = World(
        scenario=s,
        caps=caps,
        primary=primary,
        victim_in_capacity=victim_in_capacity,
        agent=protocol.AgentState(
            defender_id=victim,
            threshold=s.victim.threshold_frac * s.victim.capacity,
            peers=tuple(d.node for d in active),
        ),
        coord=protocol.CoordinatorState.admit(members, sum(caps.values())),
    )

    rng = random.Random(s.run.seed)
    route_model = topology.RouteLifetimeModel(
        deltas=(s.run.route_refresh_rate,) * len(active)
    )
    attacking = s.attacker.bots_per_wave > 0
    wave_bots = _wave_bots(s, caps) if attacking else 0
    wave_cost = (
        expense.botnet_expense(wave_bots, s.pricing, s.mitigation)
        if attacking
        else Decimal(0)
    )

    duration_ms = s.run.duration_s * 1000
    tick_ms = s.run.tick_s * 1000
    heap: list[tuple[int, int, int, str]] = []
    seq = 0

    def push(time_ms: int, priority: int, kind: str) -> None:
        nonlocal seq
        heapq.heappush(heap, (time_ms, priority, seq, kind))
        seq += 1

    for t in range(0, duration_ms, tick_ms):
        push(t, _METRIC_TICK, "tick")
    if attacking:
        push(0, _ATTACK_START, "attack_start")
    first_refresh = int(topology.sample_route_interval(route_model, rng) * 1000)
    if first_refresh < duration_ms:
        push(max(first_refresh, 1), _ROUTE_REFRESH, "route_refresh")

    def recompute_shares() -> None:
        plan = protocol.orchestrate_offload(
            victim, world.attack_load(), s.graph, caps, upstream=upstream
        )
        world.shares = dict(plan.shares)

    metrics = MetricsTimeSeries()
    attacker_quit = False

    while heap:
        time_ms, priority, _, kind = heapq.heappop(heap)
        if kind == "attack_end":
            world.attack_active = False
            world.active_bots = 0
            world.shares = {}
        elif kind == "attack_start":
            if attacker_quit:
                continue
            margin = (
                float("inf")
                if world.cumulative_expense == 0
                else expense.profit_margin(s.attacker.reward, world.cumulative_expense)
            )
            if not attacker_policy(margin):
                attacker_quit = True
                metrics.quit_time_s = time_ms // 1000
                continue
            metrics.waves_started += 1
            world.cumulative_expense += wave_cost
            world.attack_active = True
            world.active_bots = wave_bots
            recompute_shares()
            end_ms = time_ms + s.attacker.wave_duration_s * 1000
            if end_ms < duration_ms:
                push(end_ms, _ATTACK_END, "attack_end")
            next_ms = time_ms + s.attacker.wave_period_s * 1000
            if next_ms < duration_ms:
                push(next_ms, _ATTACK_START, "attack_start")
        elif kind == "route_refresh":
            if world.attack_active:
                recompute_shares()
            gap = int(topology.sample_route_interval(route_model, rng) * 1000)
            next_ms = time_ms + max(gap, 1)
            if next_ms < duration_ms:
                push(next_ms, _ROUTE_REFRESH, "route_refresh")
        elif kind == "tick":
            alliance_available = sum(caps.values())
            world.agent, world.coord, _ = protocol.alarm_step(
                world.agent,
                world.coord,
                world.attack_load(),
                s.victim.capacity,
                alliance_available,
            )
            metrics.rows.append(metrics_tick(world, time_ms // 1000))

    metrics.final_expense = world.cumulative_expense
    return metrics
