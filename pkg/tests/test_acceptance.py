"""Acceptance gate: one test per release criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion report.
"""
import copy
import random
from decimal import Decimal
from itertools import combinations

import pytest

from edgecombat import engine
from edgecombat.allocation import (
    InfeasibleError,
    WorkloadProblem,
    solve_exact,
    solve_iterative,
)
from edgecombat.dynamics import (
    CombatParams,
    PopulationState,
    constant_of_motion,
    derivatives,
    equilibria,
    integrate,
    r_max,
)
from edgecombat.expense import (
    BotnetPricing,
    CapabilityVector,
    DefenseMatrix,
    MitigationProfile,
    amplification,
    botnet_expense,
    per_active_bot_expense,
)
from edgecombat.report import metrics_csv, sweep_csv
from edgecombat.scenario import build_scenario, bundled_scenario_path, load_document
from edgecombat.topology import (
    Link,
    NetworkGraph,
    Node,
    RouteLifetimeModel,
    hop_distance,
    loop_free_candidates,
    route_interval_cdf,
    sample_route_interval,
)

VERDICTS = []


def verdict(number, name, ok):
    line = f"[criterion {number:>2}] {name}: {'PASS' if ok else 'FAIL'}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def campaign_doc():
    return load_document(bundled_scenario_path("alliance_campaign"))


def test_criterion_1_pabe_reproduction():
    fast = MitigationProfile("1")  # one hour
    slow = MitigationProfile("336")  # two weeks
    low = BotnetPricing("0", "0.06", "336", min_bots=1000)  # $3,000 / 50,000 bots
    high = BotnetPricing("0", "0.08", "336", min_bots=1000)  # $4,000 / 50,000 bots
    ok = (
        per_active_bot_expense(low, fast) == Decimal("20.16")
        and per_active_bot_expense(high, fast) == Decimal("26.88")
        and per_active_bot_expense(low, slow) == Decimal("0.06")
        and per_active_bot_expense(high, MitigationProfile("400")) == Decimal("0.08")
    )
    verdict(1, "per-active-bot expense endpoints exact to the cent", ok)


def test_criterion_2_equilibrium_and_conservation():
    params = CombatParams(1.0, 0.02, 1.0, 0.01)
    ok = True
    for eq in equilibria(params):
        d_nd, d_nb = derivatives(eq, params)
        ok = ok and abs(d_nd) < 1e-12 and abs(d_nb) < 1e-12
    initial = PopulationState(120, 40)
    traj = integrate(initial, params, dt=1e-3, steps=100_000)
    reference = constant_of_motion(initial, params)
    drift = max(
        abs(constant_of_motion(s, params) - reference) / reference
        for s in traj.states
    )
    ok = ok and drift < 1e-4
    interior = equilibria(params)[1]
    ok = ok and abs(constant_of_motion(interior, params) - r_max(params)) <= (
        1e-12 * r_max(params)
    )
    verdict(2, "fixed points, RK4 conservation, R* at equilibrium", ok)


def test_criterion_3_amplification_mechanics():
    rng = random.Random(2024)
    ok = True
    for _ in range(10_000):
        m, n = rng.randint(2, 8), rng.randint(1, 4)
        rows = tuple(tuple(rng.uniform(1, 100) for _ in range(n)) for _ in range(m))
        d = DefenseMatrix(rows)
        c = CapabilityVector((1,) * m)
        i, j = rng.randrange(m), rng.randrange(n)
        brute = sum(rows[k][j] for k in range(m)) / rows[i][j]
        value = amplification(d, c, i, j)
        ok = ok and abs(value - brute) <= 1e-12 * brute
    for m in (2, 4, 8):
        uniform = DefenseMatrix(tuple((3.0,) for _ in range(m)))
        ok = ok and amplification(uniform, CapabilityVector((1,) * m), 0, 0) == m
    verdict(3, "amplification matches brute force; uniform case exact", ok)


def test_criterion_4_expense_linearity():
    rng = random.Random(99)
    ok = True
    for _ in range(1000):
        pricing = BotnetPricing(
            "0", str(round(rng.uniform(0.01, 0.5), 4)), str(rng.randint(24, 500)),
            min_bots=1,
        )
        mitigation = MitigationProfile(str(round(rng.uniform(0.5, 600), 3)))
        lam = rng.randint(2, 50)
        base = rng.randint(1000, 100_000)
        individual = botnet_expense(base, pricing, mitigation)
        joint = botnet_expense(base * lam, pricing, mitigation)
        ratio = float(joint / individual)
        ok = ok and abs(ratio - lam) <= 1e-9 * lam
    verdict(4, "joint/individual expense ratio equals lambda", ok)


def _subset_optimum(p: WorkloadProblem) -> float:
    best = 0.0
    for r in range(1, p.n + 1):
        for subset in combinations(range(p.n), r):
            demand = sum(p.attack_power[j] for j in subset)
            if demand == 0:
                continue
            capacity = sum(
                p.capacity[i]
                for i in range(p.m)
                if any(p.eligible[i][j] for j in subset)
            )
            best = max(best, demand / capacity)
    return best


def test_criterion_5_allocation_optimality():
    rng = random.Random(555)
    ok = True
    solved = 0
    while solved < 200:
        m, n = rng.randint(1, 8), rng.randint(1, 8)
        try:
            problem = WorkloadProblem(
                tuple(rng.uniform(0, 50) for _ in range(n)),
                tuple(rng.uniform(10, 100) for _ in range(m)),
                tuple(tuple(rng.random() < 0.6 for _ in range(n)) for _ in range(m)),
            )
        except InfeasibleError:
            continue
        solved += 1
        exact = solve_exact(problem, tol=1e-7)
        ok = ok and abs(exact.pi - _subset_optimum(problem)) <= 1e-6
        approx = solve_iterative(problem, epsilon=0.1)
        ok = ok and approx.pi <= 1.1 * exact.pi + 1e-9
    verdict(5, "exact matches brute-force oracle; iterative within 1+eps", ok)


def test_criterion_6_multipath_cdf():
    ok = True
    for deltas in [(1.0,), (0.5, 1.0, 2.0), (0.2, 0.6, 1.0, 1.5, 3.0)]:
        model = RouteLifetimeModel(deltas)
        rng = random.Random(424242)
        samples = sorted(
            sample_route_interval(model, rng) for _ in range(100_000)
        )
        ks = 0.0
        count = len(samples)
        for k, value in enumerate(samples):
            theory = route_interval_cdf(model, value)
            ks = max(ks, abs(theory - k / count), abs(theory - (k + 1) / count))
        ok = ok and ks < 0.02
    verdict(6, "sampled route intervals match closed-form CDF (KS < 0.02)", ok)


def test_criterion_7_loop_freedom():
    rng = random.Random(700)
    ok = True
    for _ in range(500):
        n = rng.randint(3, 50)
        ids = [f"n{k}" for k in range(n)]
        victim = ids[0]
        links = {(ids[k], ids[rng.randrange(k)]) for k in range(1, n)}
        for _ in range(n * 2):
            a, b = rng.sample(ids, 2)
            links.add((a, b))
        graph = NetworkGraph(
            [Node(i) for i in ids], [Link(a, b) for a, b in sorted(links)]
        )
        start = rng.choice(ids[1:])
        initial = hop_distance(graph, start, victim)
        visited = {start}
        node = start
        hops = 0
        while node != victim:
            candidates = sorted(loop_free_candidates(graph, node, victim))
            if not candidates:
                ok = False
                break
            node = rng.choice(candidates)
            hops += 1
            if node in visited:
                ok = False
                break
            visited.add(node)
        ok = ok and hops <= initial
        if not ok:
            break
    verdict(7, "offload chains never revisit a node, length <= distance", ok)


def test_criterion_8_efficacy_ordering(campaign_doc):
    results = {}
    for count in (1, 2, 3):
        doc = copy.deepcopy(campaign_doc)
        doc["run"]["defender_count_active"] = count
        results[count] = engine.run(build_scenario(doc))
    ok = True
    for prev, cur in zip((1, 2), (2, 3)):
        ok = ok and results[cur].mean("primary_util") < results[prev].mean(
            "primary_util"
        )
        ok = ok and results[cur].mean("latency") < results[prev].mean("latency")
    baseline_doc = copy.deepcopy(campaign_doc)
    baseline_doc["attacker"]["bots_per_wave"] = 0
    baseline_doc["run"]["duration_s"] = 600
    baseline = engine.run(build_scenario(baseline_doc))
    ok = ok and all(row.latency == 0.09 for row in baseline.rows)
    verdict(8, "utilization and latency strictly drop with more defenders", ok)


def test_criterion_9_attacker_economics(campaign_doc):
    solo_doc = copy.deepcopy(campaign_doc)
    solo_doc["attacker"]["reward"] = "999999999999"  # never quit
    solo = engine.run(build_scenario(solo_doc))
    ok = solo.quit_time_s is None

    joint_doc = copy.deepcopy(campaign_doc)
    joint_doc["attacker"]["reward"] = str(
        (Decimal("2.6") * solo.final_expense).quantize(Decimal("0.01"))
    )
    joint_doc["run"]["defender_count_active"] = 3  # lambda = 3 (equal capacities)
    joint = engine.run(build_scenario(joint_doc))
    ok = ok and joint.final_expense == 3 * solo.final_expense * Decimal(
        joint.waves_started
    ) / Decimal(solo.waves_started)
    ok = ok and joint.quit_time_s is not None
    ok = ok and joint.quit_time_s < build_scenario(joint_doc).run.duration_s
    ok = ok and joint.final_expense > build_scenario(joint_doc).attacker.reward
    ok = ok and any(row.cumulative_expense == joint.final_expense
                    for row in joint.rows)
    verdict(9, "2.6x-reward attacker quits mid-campaign against 3 defenders", ok)


def test_criterion_10_determinism(campaign_doc, tmp_path):
    doc = copy.deepcopy(campaign_doc)
    doc["run"]["duration_s"] = 1800
    scenario_a = build_scenario(copy.deepcopy(doc))
    scenario_b = build_scenario(copy.deepcopy(doc))
    csv_a = metrics_csv(engine.run(scenario_a), scenario_a.scenario_hash)
    csv_b = metrics_csv(engine.run(scenario_b), scenario_b.scenario_hash)
    ok = csv_a.encode() == csv_b.encode()
    sweeps = []
    for _ in range(2):
        runs = {}
        for count in (1, 3):
            d = copy.deepcopy(doc)
            d["run"]["defender_count_active"] = count
            runs[count] = engine.run(build_scenario(d))
        sweeps.append(sweep_csv(runs, scenario_a.scenario_hash).encode())
    ok = ok and sweeps[0] == sweeps[1]
    verdict(10, "identical inputs produce byte-identical CSV output", ok)


def test_zz_report():
    print()
    for line in VERDICTS:
        print(line)
    assert len(VERDICTS) == 10
