"""Network graph, hop distances, loop-free offload candidates, route lifetimes.

Offloading is only allowed toward out-neighbors strictly closer (in hops) to
the victim, so any forwarding chain terminates. Multipath route lifetimes
are modeled as the maximum of independent exponential per-link lifetimes.
"""
from __future__ import annotations

import math
import random
import warnings
from collections import deque
from dataclasses import dataclass, field

ROLES = {"victim", "defender", "transit", "attacker-source", "cloud"}


class UnreachableVictimWarning(UserWarning):
    """The victim cannot be reached from the offloading node at all."""


@dataclass(frozen=True)
class Node:
    id: str
    role: str = "transit"
    egress_filtering: bool = False

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown node role {self.role!r}")


@dataclass(frozen=True)
class Link:
    src: str
    dst: str
    capacity: float = math.inf  # load units / s
    latency: float = 0.0  # seconds

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ValueError("self-loop links are not allowed")
        if self.capacity <= 0:
            raise ValueError("link capacity must be positive")
        if self.latency < 0:
            raise ValueError("link latency must be nonnegative")


class NetworkGraph:
    """Immutable directed graph; queries are read-only and thread-safe."""

    def __init__(self, nodes: list[Node], links: list[Link]):
        self.nodes: dict[str, Node] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise ValueError(f"duplicate node id {node.id!r}")
            self.nodes[node.id] = node
        self.links = tuple(links)
        self._out: dict[str, list[str]] = {n.id: [] for n in nodes}
        for link in links:
            if link.src not in self.nodes or link.dst not in self.nodes:
                raise ValueError(f"link {link.src}->{link.dst} references unknown node")
            self._out[link.src].append(link.dst)
        self._link_index = {(l.src, l.dst): l for l in links}

    def out_neighbors(self, node_id: str) -> list[str]:
        self._require(node_id)
        return sorted(self._out[node_id])

    def link(self, src: str, dst: str) -> Link | None:
        return self._link_index.get((src, dst))

    def _require(self, node_id: str) -> None:
        if node_id not in self.nodes:
            raise KeyError(f"unknown node id {node_id!r}")


def hop_distance(g: NetworkGraph, u: str, v: str) -> int | None:
    """Minimum directed hop count from u to v; None when unreachable."""
    g._require(u)
    g._require(v)
    if u == v:
        return 0
    seen = {u: 0}
    queue = deque([u])
    while queue:
        cur = queue.popleft()
        for nxt in g.out_neighbors(cur):
            if nxt not in seen:
                seen[nxt] = seen[cur] + 1
                if nxt == v:
                    return seen[nxt]
                queue.append(nxt)
    return None


def loop_free_candidates(g: NetworkGraph, u_i: str, victim: str) -> set[str]:
    """Out-neighbors of u_i that are strictly closer to the victim.

    Forwarding only to these guarantees loop freedom: the distance to the
    victim strictly decreases on every hop. When the victim is unreachable
    from u_i the result is empty and a warning distinguishes this from an
    empty-by-geometry answer.
    """
    if u_i == victim:
        raise ValueError("offloading node must differ from the victim")
    own = hop_distance(g, u_i, victim)
    if own is None:
        warnings.warn(
            f"victim {victim!r} unreachable from {u_i!r}", UnreachableVictimWarning
        )
        return set()
    result = set()
    for neighbor in g.out_neighbors(u_i):
        dist = hop_distance(g, neighbor, victim)
        if dist is not None and dist < own:
            result.add(neighbor)
    return result


@dataclass(frozen=True)
class RouteLifetimeModel:
    """Exponential route time-to-live rates, one per parallel link."""

    deltas: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.deltas:
            raise ValueError("need at least one link")
        if any(d <= 0 for d in self.deltas):
            raise ValueError("all rates must be strictly positive")


def route_interval_cdf(model: RouteLifetimeModel, t: float) -> float:
    """CDF of the routing-discovery interval T = max of the link lifetimes."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    prob = 1.0
    for delta in model.deltas:
        prob *= 1.0 - math.exp(-delta * t)
    return prob


def sample_route_interval(model: RouteLifetimeModel, rng: random.Random) -> float:
    """One draw of T: the slowest of independent exponential link lifetimes."""
    return max(rng.expovariate(delta) for delta in model.deltas)
