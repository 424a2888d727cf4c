"""Scenario files, runs, reports and parameter sweeps.

Scenarios are JSON documents::

    {
      "network": {"nodes": 2, "edges": [[0, 1, 1]]},
      "memory": {
        "default": {"zeta0": 0.01, "f0": 0.99, "model": "linear", "rate": 0.001},
        "nodes": {"1": {"zeta0": 0.02}}
      },
      "thresholds": {"d_max": 0.1, "eps_crit": 0.05},
      "demands": [{"source": 0, "target": 1, "dt": 5}],
      "seed": 7
    }

``network`` may instead hold ``{"generate": {"kind": "line", "n": 4, "seed": 1}}``.
Only ``network`` and ``thresholds.d_max`` are required.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any

from . import __version__
from .engine import (
    Demand,
    NoPathError,
    distribute,
    edge_qualities,
    greedy_walk_with_qualities,
    quality,
    realize_path,
)
from .cost import pair_cost
from .memory import DriftModel, NodeMemoryState, Thresholds
from .network import EntangledNetwork, NetworkError, build_network, generate_network

SCHEMA_VERSION = 1
SWEEP_PARAMETERS = ("d_max", "eps_crit", "f_crit", "f_delta", "p_max", "dt")
_MASK64 = (1 << 64) - 1

_TOP_KEYS = {"network", "memory", "thresholds", "demands", "seed"}
_MEMORY_KEYS = {"zeta0", "f0", "t0", "model", "rate", "decay_time", "fidelity_floor"}
_THRESHOLD_KEYS = {"d_max", "eps_crit", "f_crit", "f_delta", "p_max"}
_DEMAND_KEYS = {"source", "target", "dt", "user"}

DEFAULT_MEMORY = {"zeta0": 0.0, "f0": 1.0, "t0": 0.0, "model": "linear", "rate": 0.0, "decay_time": 1.0,
                  "fidelity_floor": 0.25}


class ScenarioError(ValueError):
    """Invalid scenario document. ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass
class Scenario:
    network: dict
    thresholds: Thresholds
    demands: list[Demand]
    memory_default: dict = field(default_factory=lambda: dict(DEFAULT_MEMORY))
    memory_nodes: dict[int, dict] = field(default_factory=dict)
    seed: int = 0

    def build_network(self) -> EntangledNetwork:
        if "generate" in self.network:
            spec = dict(self.network["generate"])
            kind = spec.pop("kind")
            seed = spec.pop("seed", 0)
            return generate_network(kind, seed, **spec)
        return build_network(self.network["nodes"], self.network["edges"])

    def memory_states(self, node_count: int) -> list[NodeMemoryState]:
        return [_memory_state({**self.memory_default, **self.memory_nodes.get(i, {})}) for i in range(node_count)]

    def to_document(self) -> dict:
        doc: dict[str, Any] = {"network": self.network}
        doc["memory"] = {
            "default": dict(self.memory_default),
            "nodes": {str(k): dict(v) for k, v in sorted(self.memory_nodes.items())},
        }
        th = self.thresholds
        doc["thresholds"] = {k: getattr(th, k) for k in sorted(_THRESHOLD_KEYS)}
        doc["demands"] = [{"source": d.source, "target": d.target, "dt": d.dt, "user": d.user} for d in self.demands]
        doc["seed"] = self.seed
        return doc


def emit_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_document(), indent=2, sort_keys=True) + "\n"


def _memory_state(params) -> NodeMemoryState:
    model = DriftModel(params["model"], params["rate"], params["decay_time"], params["fidelity_floor"])
    return NodeMemoryState(params["zeta0"], params["f0"], params["t0"], model)


def _require_mapping(value, path):
    if not isinstance(value, dict):
        raise ScenarioError("expected an object", path)
    return value


def _reject_unknown(obj, allowed, path):
    for key in obj:
        if key not in allowed:
            raise ScenarioError(f"unknown field {key!r}", f"{path}.{key}" if path else key)


def _number(obj, key, path, default=None):
    if key not in obj:
        if default is None:
            raise ScenarioError("missing required field", f"{path}.{key}")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"expected a finite number, got {v!r}", f"{path}.{key}")
    return v


def _integer(obj, key, path, default=None):
    v = _number(obj, key, path, default)
    if int(v) != v:
        raise ScenarioError(f"expected an integer, got {v!r}", f"{path}.{key}")
    return int(v)


def _parse_network(doc):
    net = _require_mapping(doc, "network")
    if "generate" in net:
        _reject_unknown(net, {"generate"}, "network")
        gen = _require_mapping(net["generate"], "network.generate")
        if "kind" not in gen:
            raise ScenarioError("missing required field", "network.generate.kind")
        return {"generate": dict(gen)}
    _reject_unknown(net, {"nodes", "edges"}, "network")
    nodes = _integer(net, "nodes", "network")
    edges = net.get("edges", [])
    if not isinstance(edges, list):
        raise ScenarioError("expected a list of [u, v, level] triples", "network.edges")
    triples = []
    for k, e in enumerate(edges):
        if not isinstance(e, list) or len(e) not in (2, 3) or not all(isinstance(x, int) for x in e):
            raise ScenarioError("expected [u, v] or [u, v, level] integers", f"network.edges[{k}]")
        triples.append([e[0], e[1], e[2] if len(e) == 3 else 1])
    return {"nodes": nodes, "edges": triples}


def _parse_memory_params(obj, path, base):
    obj = _require_mapping(obj, path)
    _reject_unknown(obj, _MEMORY_KEYS, path)
    out = {}
    for key in ("zeta0", "f0", "t0", "rate", "decay_time", "fidelity_floor"):
        if key in obj:
            out[key] = float(_number(obj, key, path))
    if "model" in obj:
        out["model"] = obj["model"]
    try:
        _memory_state({**base, **out})
    except ValueError as exc:
        raise ScenarioError(str(exc), path) from None
    return out


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document, applying defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    doc = _require_mapping(doc, "")
    _reject_unknown(doc, _TOP_KEYS, "")
    if "network" not in doc:
        raise ScenarioError("missing required section", "network")
    if "thresholds" not in doc:
        raise ScenarioError("missing required section", "thresholds")

    network = _parse_network(doc["network"])

    mem = _require_mapping(doc.get("memory", {}), "memory")
    _reject_unknown(mem, {"default", "nodes"}, "memory")
    default = dict(DEFAULT_MEMORY)
    default.update(_parse_memory_params(mem.get("default", {}), "memory.default", DEFAULT_MEMORY))
    overrides = {}
    for key, params in _require_mapping(mem.get("nodes", {}), "memory.nodes").items():
        path = f"memory.nodes.{key}"
        try:
            node = int(key)
        except ValueError:
            raise ScenarioError("node keys must be integer ids", path) from None
        overrides[node] = _parse_memory_params(params, path, default)

    th_doc = _require_mapping(doc["thresholds"], "thresholds")
    _reject_unknown(th_doc, _THRESHOLD_KEYS, "thresholds")
    th_values = {"d_max": float(_number(th_doc, "d_max", "thresholds"))}
    for key in ("eps_crit", "f_crit", "f_delta", "p_max"):
        if key in th_doc:
            th_values[key] = float(_number(th_doc, key, "thresholds"))
    for key, value in th_values.items():
        if key == "d_max" and value <= 0:
            raise ScenarioError(f"must be positive, got {value}", "thresholds.d_max")
        if value < 0:
            raise ScenarioError(f"must be non-negative, got {value}", f"thresholds.{key}")
    try:
        thresholds = Thresholds(**th_values)
    except ValueError as exc:
        raise ScenarioError(str(exc), "thresholds") from None

    demands = []
    raw_demands = doc.get("demands", [])
    if not isinstance(raw_demands, list):
        raise ScenarioError("expected a list", "demands")
    for k, d in enumerate(raw_demands):
        path = f"demands[{k}]"
        d = _require_mapping(d, path)
        _reject_unknown(d, _DEMAND_KEYS, path)
        dt = float(_number(d, "dt", path, 0.0))
        if dt < 0:
            raise ScenarioError(f"must be non-negative, got {dt}", f"{path}.dt")
        demands.append(Demand(_integer(d, "source", path), _integer(d, "target", path), dt, _integer(d, "user", path, 0)))

    seed = _integer(doc, "seed", "", 0) if "seed" in doc else 0

    scenario = Scenario(network, thresholds, demands, default, overrides, seed)
    try:
        net = scenario.build_network()
    except NetworkError as exc:
        raise ScenarioError(str(exc), "network") from None
    for node in overrides:
        if not 0 <= node < net.node_count:
            raise ScenarioError(f"node {node} not in network", f"memory.nodes.{node}")
    for k, d in enumerate(demands):
        for name in ("source", "target"):
            node = getattr(d, name)
            if not 0 <= node < net.node_count:
                raise ScenarioError(f"node {node} not in network", f"demands[{k}].{name}")
    return scenario


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def demand_seed(master: int, index: int) -> int:
    """Sub-seed for demand ``index``: splitmix64 of the master seed mixed with the index.

    Depends only on ``(master, index)``, so appending demands leaves earlier
    seeds untouched.
    """
    return splitmix64((splitmix64(master & _MASK64) ^ index) & _MASK64)


def _num(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def _path_doc(path):
    if path is None:
        return None
    return {"nodes": list(path.nodes), "omegas": [_num(w) for w in path.omegas], "usability": _num(path.usability)}


def _run_demand(index, demand, net, mem, scenario, greedy):
    entry = {
        "index": index,
        "user": demand.user,
        "source": demand.source,
        "target": demand.target,
        "dt": _num(demand.dt),
        "method": "greedy" if greedy else "distribute",
    }
    if greedy:
        qualities = edge_qualities(net, mem, scenario.thresholds, demand.dt)
        try:
            path = greedy_walk_with_qualities(net, qualities, demand.source, demand.target)
        except NoPathError as exc:
            path, stuck = None, exc.node
        else:
            stuck = None
        cost = math.inf if path is None else sum(
            pair_cost(quality(qualities, a, b)) for a, b in zip(path.nodes, path.nodes[1:])
        )
        entry.update(
            source_cost=_num(cost),
            unreachable=path is None,
            stuck_node=stuck,
            cost_table=None,
            distributing_sets=None,
            realized_path=_path_doc(path),
            path_usability=_num(path.usability if path else 0.0),
            stats=None,
        )
        return entry

    res = distribute(net, mem, scenario.thresholds, demand)
    realized = None if res.unreachable else realize_path(res, demand_seed(scenario.seed, index))
    entry.update(
        source_cost=_num(res.source_cost),
        unreachable=res.unreachable,
        stuck_node=None,
        cost_table=[_num(c) for c in res.cost_table],
        distributing_sets={str(i): list(s) for i, s in enumerate(res.distributing_sets) if s},
        realized_path=_path_doc(realized),
        path_usability=_num(res.path_usability),
        stats=res.stats.as_dict(),
    )
    return entry


def run(scenario: Scenario, greedy: bool = False) -> dict:
    """Run every demand and assemble a report ``{"body": ..., "meta": ...}``.

    The body is a deterministic function of the scenario; run timing lives in
    ``meta``.
    """
    started = time.perf_counter()
    net = scenario.build_network()
    mem = scenario.memory_states(net.node_count)
    results = []
    for index, demand in enumerate(scenario.demands):
        try:
            results.append(_run_demand(index, demand, net, mem, scenario, greedy))
        except NetworkError as exc:
            raise ScenarioError(str(exc), f"demands[{index}]") from None
    body = {
        "schema_version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "nodes": net.node_count,
        "edges": net.edge_count,
        "demands": results,
    }
    meta = {"version": __version__, "seed": scenario.seed, "elapsed_seconds": round(time.perf_counter() - started, 6)}
    return {"body": body, "meta": meta}


def report_body_json(report: dict) -> str:
    return json.dumps(report["body"], indent=2, sort_keys=True) + "\n"


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


RUN_CSV_FIELDS = ("demand", "user", "source", "target", "dt", "source_cost", "path_usability", "unreachable", "path")
SWEEP_CSV_FIELDS = ("value", "demand", "source_cost", "path_usability", "unreachable")


def csv_text(rows, fields):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    writer.writerows(rows)
    return buf.getvalue()


def report_csv(report: dict) -> str:
    rows = []
    for d in report["body"]["demands"]:
        path = d["realized_path"]
        rows.append([
            d["index"], d["user"], d["source"], d["target"], d["dt"], d["source_cost"], d["path_usability"],
            str(d["unreachable"]).lower(), " ".join(map(str, path["nodes"])) if path else "",
        ])
    return csv_text(rows, RUN_CSV_FIELDS)


def with_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    if parameter == "dt":
        demands = [replace(d, dt=float(value)) for d in scenario.demands]
        return replace(scenario, demands=demands)
    return replace(scenario, thresholds=replace(scenario.thresholds, **{parameter: float(value)}))


def sweep(scenario: Scenario, parameter: str, values, greedy: bool = False) -> list[tuple]:
    """One run per value; rows of ``(value, demand, source_cost, path_usability, unreachable)``."""
    if parameter not in SWEEP_PARAMETERS:
        raise ScenarioError(f"unknown sweep parameter {parameter!r}; valid: {', '.join(SWEEP_PARAMETERS)}", "param")
    values = list(values)
    if not values:
        raise ScenarioError("sweep needs at least one value", "values")
    rows = []
    for value in values:
        try:
            variant = with_parameter(scenario, parameter, value)
        except ValueError as exc:
            raise ScenarioError(str(exc), parameter) from None
        body = run(variant, greedy=greedy)["body"]
        for d in body["demands"]:
            rows.append((_num(float(value)), d["index"], d["source_cost"], d["path_usability"], str(d["unreachable"]).lower()))
    return rows


def sweep_csv(rows) -> str:
    return csv_text(rows, SWEEP_CSV_FIELDS)
