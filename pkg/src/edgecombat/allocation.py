"""Min-max defense workload allocation.

Given per-vulnerability attack power and per-defender capacity, spread the
load over eligible defenders so the worst load factor pi is as small as
possible. `solve_exact` binary-searches pi with a max-flow feasibility test;
`solve_iterative` is a multiplicative-weights approximation with a certified
(1 + epsilon) guarantee against the weights' dual lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass

_EPS = 1e-12


class InfeasibleError(ValueError):
    """Some attacked vulnerability has no eligible defender."""


class ConvergenceError(RuntimeError):
    """The solver hit its iteration cap before reaching the requested accuracy."""


@dataclass(frozen=True)
class WorkloadProblem:
    attack_power: tuple[float, ...]  # demand per vulnerability
    capacity: tuple[float, ...]  # per defender
    eligible: tuple[tuple[bool, ...], ...]  # [defender][vulnerability]

    def __post_init__(self) -> None:
        m, n = len(self.capacity), len(self.attack_power)
        if m == 0 or n == 0:
            raise ValueError("need at least one defender and one vulnerability")
        if len(self.eligible) != m or any(len(row) != n for row in self.eligible):
            raise ValueError("eligibility matrix dimensions inconsistent")
        if any(a < 0 for a in self.attack_power):
            raise ValueError("attack power must be nonnegative")
        if any(c <= 0 for c in self.capacity):
            raise ValueError("capacities must be strictly positive")
        for j, demand in enumerate(self.attack_power):
            if demand > 0 and not any(self.eligible[i][j] for i in range(m)):
                raise InfeasibleError(
                    f"vulnerability {j} under attack with no eligible defender"
                )

    @property
    def m(self) -> int:
        return len(self.capacity)

    @property
    def n(self) -> int:
        return len(self.attack_power)


@dataclass(frozen=True)
class Allocation:
    assign: tuple[tuple[float, ...], ...]  # [defender][vulnerability]
    pi: float

    def defender_load(self, i: int) -> float:
        return sum(self.assign[i])


class _Dinic:
    """Small dense max-flow for the feasibility test graphs (< 20 nodes)."""

    def __init__(self, n: int):
        self.n = n
        self.graph: list[list[list]] = [[] for _ in range(n)]  # [to, cap, rev-index]

    def add_edge(self, u: int, v: int, cap: float) -> None:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0.0, len(self.graph[u]) - 1])

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.n
        self.level[s] = 0
        queue = [s]
        for u in queue:
            for edge in self.graph[u]:
                if edge[1] > _EPS and self.level[edge[0]] < 0:
                    self.level[edge[0]] = self.level[u] + 1
                    queue.append(edge[0])
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, limit: float) -> float:
        if u == t:
            return limit
        while self.it[u] < len(self.graph[u]):
            edge = self.graph[u][self.it[u]]
            v = edge[0]
            if edge[1] > _EPS and self.level[v] == self.level[u] + 1:
                pushed = self._dfs(v, t, min(limit, edge[1]))
                if pushed > _EPS:
                    edge[1] -= pushed
                    self.graph[v][edge[2]][1] += pushed
                    return pushed
            self.it[u] += 1
        return 0.0

    def max_flow(self, s: int, t: int) -> float:
        flow = 0.0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                pushed = self._dfs(s, t, float("inf"))
                if pushed <= _EPS:
                    break
                flow += pushed
        return flow


def _feasibility_flow(p: WorkloadProblem, pi: float):
    """Max flow routing demand through eligible defenders capped at pi*capacity.

    Returns (routed flow, assignment matrix extracted from the flow).
    """
    # node ids: 0 source, 1..n vulnerabilities, n+1..n+m defenders, n+m+1 sink
    n, m = p.n, p.m
    sink = n + m + 1
    net = _Dinic(sink + 1)
    for j, demand in enumerate(p.attack_power):
        if demand > 0:
            net.add_edge(0, 1 + j, demand)
    for i in range(m):
        for j in range(n):
            if p.eligible[i][j] and p.attack_power[j] > 0:
                net.add_edge(1 + j, 1 + n + i, float("inf"))
        net.add_edge(1 + n + i, sink, pi * p.capacity[i])
    routed = net.max_flow(0, sink)
    assign = [[0.0] * n for _ in range(m)]
    for j in range(n):
        for edge in net.graph[1 + j]:
            to = edge[0]
            if n + 1 <= to <= n + m:
                # residual bookkeeping: flow on the forward edge sits on the
                # reverse edge's capacity
                flow = net.graph[to][edge[2]][1]
                if flow > 0:
                    assign[to - n - 1][j] = flow
    return routed, assign


def _normalize(p: WorkloadProblem, assign: list[list[float]]) -> list[list[float]]:
    """Rescale columns so each vulnerability's demand is met exactly."""
    for j, demand in enumerate(p.attack_power):
        total = sum(assign[i][j] for i in range(p.m))
        if demand > 0 and total > 0:
            scale = demand / total
            for i in range(p.m):
                assign[i][j] *= scale
    return assign


def _pi_of(p: WorkloadProblem, assign) -> float:
    return max(
        sum(assign[i]) / p.capacity[i] for i in range(p.m)
    )


def solve_exact(p: WorkloadProblem, tol: float = 1e-9) -> Allocation:
    """Optimal min-max load factor via binary search on pi with max-flow checks."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = sum(p.attack_power)
    if total == 0:
        return Allocation(tuple((0.0,) * p.n for _ in range(p.m)), 0.0)
    # feasible upper bound: send each demand to its first eligible defender
    greedy_load = [0.0] * p.m
    for j, demand in enumerate(p.attack_power):
        if demand > 0:
            first = next(i for i in range(p.m) if p.eligible[i][j])
            greedy_load[first] += demand
    lo = 0.0
    hi = max(greedy_load[i] / p.capacity[i] for i in range(p.m))
    slack = 1e-9 * max(1.0, total)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        routed, _ = _feasibility_flow(p, mid)
        if routed >= total - slack:
            hi = mid
        else:
            lo = mid
    else:
        raise ConvergenceError("binary search did not reach tol; tol too small")
    routed, assign = _feasibility_flow(p, hi * (1.0 + 1e-12) + 1e-15)
    assign = _normalize(p, assign)
    return Allocation(tuple(tuple(row) for row in assign), _pi_of(p, assign))


def solve_iterative(p: WorkloadProblem, epsilon: float) -> Allocation:
    """Multiplicative-weights approximation: pi <= (1 + epsilon) * optimum.

    Each round routes every vulnerability's demand to the eligible defender
    with the cheapest weight-per-capacity, then inflates weights by their
    round load factor. The running average allocation is returned once its
    max load factor is within (1 + epsilon) of the weights' dual lower bound,
    which sandwiches the true optimum.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    total = sum(p.attack_power)
    if total == 0:
        return Allocation(tuple((0.0,) * p.n for _ in range(p.m)), 0.0)
    m, n = p.m, p.n
    weights = [1.0] * m
    cumulative = [[0.0] * n for _ in range(m)]
    best_lower = 0.0
    # worst load ratio any single round can produce (everything on one weak
    # defender); updates are normalized by this fixed width so the round
    # average obeys the usual multiplicative-weights regret bound
    width = total / min(p.capacity)
    cap = 2_000_000
    for rounds in range(1, cap + 1):
        round_load = [0.0] * m
        round_assign = [[0.0] * n for _ in range(m)]
        lower_numerator = 0.0
        for j, demand in enumerate(p.attack_power):
            if demand <= 0:
                continue
            choices = [i for i in range(m) if p.eligible[i][j]]
            best = min(choices, key=lambda i: (weights[i] / p.capacity[i], i))
            round_assign[best][j] = demand
            round_load[best] += demand
            lower_numerator += demand * (weights[best] / p.capacity[best])
        # for any weights, optimal pi >= sum_j d_j min_i(w_i/c_i) / sum_i w_i
        best_lower = max(best_lower, lower_numerator / sum(weights))
        for i in range(m):
            weights[i] *= 1.0 + epsilon * (round_load[i] / p.capacity[i]) / width
        top = max(weights)
        if top > 1e100:  # rescaling changes neither the routing nor the bound
            weights = [w / top for w in weights]
        for i in range(m):
            for j in range(n):
                cumulative[i][j] += round_assign[i][j]
        avg = [[cumulative[i][j] / rounds for j in range(n)] for i in range(m)]
        achieved = _pi_of(p, avg)
        if achieved <= (1.0 + epsilon) * best_lower:
            return Allocation(tuple(tuple(row) for row in avg), achieved)
    raise ConvergenceError("multiplicative weights failed to certify the bound")
