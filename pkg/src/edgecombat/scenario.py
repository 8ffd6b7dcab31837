"""Scenario files: a single YAML document describing one combat experiment.

The schema is versioned and strict: unknown keys are rejected and every
required field must be present, so a scenario hash pins the whole run.
Bundled scenarios ship inside the package and can be referenced by name.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal
from importlib import resources

import yaml

from .dynamics import CombatParams
from .expense import BotnetPricing, MitigationProfile, as_money
from .topology import Link, NetworkGraph, Node

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Scenario file fails validation; message names the offending key path."""


@dataclass(frozen=True)
class AttackerConfig:
    reward: Decimal
    wave_duration_s: int
    wave_period_s: int
    bots_per_wave: int
    bot_rate: float = 1.0  # load units per second per bot

    def __post_init__(self) -> None:
        if self.wave_duration_s >= self.wave_period_s:
            raise ScenarioError("attacker.wave_duration_s must be < wave_period_s")
        if self.bots_per_wave < 0:
            raise ScenarioError("attacker.bots_per_wave must be nonnegative")
        if self.bot_rate <= 0:
            raise ScenarioError("attacker.bot_rate must be positive")


@dataclass(frozen=True)
class DefenderConfig:
    node: str
    capacity: float
    primary: bool = False


@dataclass(frozen=True)
class VictimConfig:
    node: str
    capacity: float
    threshold_frac: float = 0.8
    base_latency_s: float = 0.09
    latency_cap_s: float = 2.86


@dataclass(frozen=True)
class RunConfig:
    duration_s: int
    seed: int
    tick_s: int = 1
    defender_count_active: int = 1
    filter_miss_rate: float = 0.2  # fraction of a full-load defender's share leaking
    upstream: str | None = None  # distributor node; defaults to the cloud node
    route_refresh_rate: float = 1.0 / 600.0  # per-path exponential TTL rate


@dataclass(frozen=True)
class Scenario:
    graph: NetworkGraph
    combat: CombatParams
    pricing: BotnetPricing
    mitigation: MitigationProfile
    attacker: AttackerConfig
    benign_source: str
    benign_rate: float
    defenders: tuple[DefenderConfig, ...]
    victim: VictimConfig
    run: RunConfig
    scenario_hash: str = ""

    def active_defenders(self) -> tuple[DefenderConfig, ...]:
        """Primary first, then collaborators by node id, up to the active count."""
        ordered = sorted(self.defenders, key=lambda d: (not d.primary, d.node))
        count = self.run.defender_count_active
        if not 1 <= count <= len(ordered):
            raise ScenarioError(
                f"run.defender_count_active must be in 1..{len(ordered)}"
            )
        return tuple(ordered[:count])

    def primary_defender(self) -> DefenderConfig:
        return self.active_defenders()[0]


_SCHEMA = {
    "schema_version": True,
    "graph": {"nodes": True, "links": True},
    "combat": {"alpha1": True, "alpha2": True, "alpha3": True, "alpha4": True},
    "pricing": {
        "setup_per_bot": True,
        "rental_per_bot_per_lease": True,
        "lease_hours": True,
        "min_bots": True,
    },
    "mitigation": {"mrt_hours": True},
    "attacker": {
        "reward": True,
        "wave_duration_s": True,
        "wave_period_s": True,
        "bots_per_wave": True,
        "bot_rate": False,
    },
    "benign": {"source": True, "rate": True},
    "defenders": True,
    "victim": {
        "node": True,
        "capacity": True,
        "threshold_frac": False,
        "base_latency_s": False,
        "latency_cap_s": False,
    },
    "run": {
        "duration_s": True,
        "seed": True,
        "tick_s": False,
        "defender_count_active": False,
        "filter_miss_rate": False,
        "upstream": False,
        "route_refresh_rate": False,
    },
}

_NODE_KEYS = {"id": True, "role": False, "egress_filtering": False}
_LINK_KEYS = {"src": True, "dst": True, "capacity": False, "latency": False}
_DEFENDER_KEYS = {"node": True, "capacity": True, "primary": False}


def _check_keys(mapping: dict, schema: dict, path: str) -> None:
    if not isinstance(mapping, dict):
        raise ScenarioError(f"{path}: expected a mapping")
    unknown = set(mapping) - set(schema)
    if unknown:
        raise ScenarioError(f"{path}: unknown key(s) {sorted(unknown)}")
    for key, spec in schema.items():
        required = spec if isinstance(spec, bool) else True
        if required and key not in mapping:
            raise ScenarioError(f"{path}: missing required key {key!r}")
        if isinstance(spec, dict) and key in mapping:
            _check_keys(mapping[key], spec, f"{path}.{key}")


def _hash_config(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, default=str).encode()
    return hashlib.sha256(canonical).hexdigest()[:16]


def validate_document(doc: dict) -> None:
    _check_keys(doc, _SCHEMA, "scenario")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ScenarioError(
            f"scenario.schema_version: expected {SCHEMA_VERSION}, "
            f"got {doc['schema_version']!r}"
        )
    for idx, node in enumerate(doc["graph"]["nodes"]):
        _check_keys(node, _NODE_KEYS, f"scenario.graph.nodes[{idx}]")
    for idx, link in enumerate(doc["graph"]["links"]):
        _check_keys(link, _LINK_KEYS, f"scenario.graph.links[{idx}]")
    if not isinstance(doc["defenders"], list) or not doc["defenders"]:
        raise ScenarioError("scenario.defenders: need at least one defender")
    for idx, defender in enumerate(doc["defenders"]):
        _check_keys(defender, _DEFENDER_KEYS, f"scenario.defenders[{idx}]")


def build_scenario(doc: dict) -> Scenario:
    """Construct a validated Scenario from a parsed document."""
    validate_document(doc)
    try:
        graph = NetworkGraph(
            nodes=[Node(**n) for n in doc["graph"]["nodes"]],
            links=[Link(**l) for l in doc["graph"]["links"]],
        )
        combat = CombatParams(**{k: float(v) for k, v in doc["combat"].items()})
        pricing_doc = doc["pricing"]
        pricing = BotnetPricing(
            setup_per_bot=as_money(pricing_doc["setup_per_bot"]),
            rental_per_bot_per_lease=as_money(pricing_doc["rental_per_bot_per_lease"]),
            lease_duration=as_money(pricing_doc["lease_hours"]),
            min_bots=int(pricing_doc["min_bots"]),
        )
        mitigation = MitigationProfile(mrt=as_money(doc["mitigation"]["mrt_hours"]))
        attacker_doc = dict(doc["attacker"])
        attacker_doc["reward"] = as_money(attacker_doc["reward"])
        attacker = AttackerConfig(**attacker_doc)
        defenders = tuple(DefenderConfig(**d) for d in doc["defenders"])
        victim = VictimConfig(**doc["victim"])
        run = RunConfig(**doc["run"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from exc
    if victim.node not in graph.nodes:
        raise ScenarioError(f"scenario.victim.node {victim.node!r} not in graph")
    for defender in defenders:
        if defender.node not in graph.nodes:
            raise ScenarioError(
                f"scenario.defenders: node {defender.node!r} not in graph"
            )
    if sum(d.primary for d in defenders) != 1:
        raise ScenarioError("scenario.defenders: exactly one primary defender required")
    if run.upstream is not None and run.upstream not in graph.nodes:
        raise ScenarioError(f"scenario.run.upstream {run.upstream!r} not in graph")
    return Scenario(
        graph=graph,
        combat=combat,
        pricing=pricing,
        mitigation=mitigation,
        attacker=attacker,
        benign_source=str(doc["benign"]["source"]),
        benign_rate=float(doc["benign"]["rate"]),
        defenders=defenders,
        victim=victim,
        run=run,
        scenario_hash=_hash_config(doc),
    )


def load_document(path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        doc = yaml.safe_load(handle)
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: scenario file must contain a mapping")
    return doc


def load_scenario(path, overrides: dict | None = None) -> Scenario:
    """Load a scenario file, optionally overriding run.* keys (seed, counts)."""
    doc = load_document(path)
    if overrides:
        doc.setdefault("run", {})
        doc["run"].update(overrides)
    return build_scenario(doc)


def bundled_scenario_path(name: str):
    """Path to a scenario shipped with the package (e.g. 'alliance_campaign')."""
    filename = name if name.endswith(".yaml") else f"{name}.yaml"
    ref = resources.files("edgecombat.scenarios") / filename
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return ref
