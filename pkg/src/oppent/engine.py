"""Opportunistic entanglement distribution.

``distribute`` is a target-rooted label-setting search. Costs start at
infinity except at the target (0). The cheapest unfinalized node is extracted,
finalized, and offered to each unfinalized neighbour as an extra member of
that neighbour's distributing set; the offer is kept only when it strictly
lowers the neighbour's total cost. Because extraction order is non-decreasing
in cost, every distributing set stays sorted by downstream cost (ties by node
id), which is the order in which candidates are tried.

``greedy_walk`` is the simpler hop-by-hop rule: from the current node move to
the feasible neighbour with the lowest pair cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .cost import INF, Candidate, EdgeQuality, pair_cost, weighted_selection_probabilities, weighted_total_cost
from .memory import NodeMemoryState, Thresholds, assess_pair, path_usability
from .network import EntangledNetwork, NetworkError, generate_network, neighbors

ORACLE_MAX_NODES = 10
# comparisons <= COMPARISON_CONSTANT * (|V| log2 |V| + |E|); measured ratios stay below 3
COMPARISON_CONSTANT = 8.0

Qualities = Mapping[tuple[int, int], EdgeQuality]


class NoPathError(RuntimeError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class OracleRefused(ValueError):
    pass


@dataclass(frozen=True)
class Demand:
    source: int
    target: int
    dt: float = 0.0
    user: int = 0

    def __post_init__(self):
        if not self.dt >= 0:
            raise ValueError(f"demand horizon must be non-negative, got {self.dt}")


@dataclass
class SearchStats:
    extractions: int = 0
    comparisons: int = 0
    relaxations: int = 0
    updates: int = 0

    def as_dict(self):
        return {
            "extractions": self.extractions,
            "comparisons": self.comparisons,
            "relaxations": self.relaxations,
            "updates": self.updates,
        }


@dataclass(frozen=True)
class RealizedPath:
    nodes: tuple[int, ...]
    omegas: tuple[float, ...]

    @property
    def usability(self) -> float:
        return path_usability(self.omegas)

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


@dataclass
class DistributionResult:
    source: int
    target: int
    cost_table: list[float]
    distributing_sets: list[tuple[int, ...]]
    qualities: Qualities = field(repr=False)
    stats: SearchStats
    extraction_order: list[int] = field(default_factory=list)

    @property
    def source_cost(self) -> float:
        return self.cost_table[self.source]

    @property
    def unreachable(self) -> bool:
        return self.source_cost == INF

    def selection(self, i: int) -> list[float]:
        """Selection probabilities over the members of node ``i``'s set."""
        return weighted_selection_probabilities([quality(self.qualities, i, j) for j in self.distributing_sets[i]])

    def principal_path(self) -> RealizedPath | None:
        """Follow the most likely member of each distributing set."""
        if self.unreachable:
            return None
        nodes, omegas = [self.source], []
        node = self.source
        while node != self.target:
            members = self.distributing_sets[node]
            phis = self.selection(node)
            nxt = members[max(range(len(members)), key=lambda k: (phis[k], -members[k]))]
            omegas.append(quality(self.qualities, node, nxt).omega)
            nodes.append(nxt)
            node = nxt
        return RealizedPath(tuple(nodes), tuple(omegas))

    @property
    def path_usability(self) -> float:
        path = self.principal_path()
        return 0.0 if path is None else path.usability


def quality(qualities: Qualities, i: int, j: int) -> EdgeQuality:
    return qualities[(i, j) if i < j else (j, i)]


def edge_qualities(net: EntangledNetwork, mem: Sequence[NodeMemoryState], th: Thresholds, dt: float) -> dict:
    """Evaluate ``(p, omega)`` for every edge with node states evolved by ``dt``."""
    if len(mem) != net.node_count:
        raise ValueError(f"expected {net.node_count} memory states, got {len(mem)}")
    out = {}
    for e in net.edges:
        a = assess_pair(mem[e.u], mem[e.v], dt, th)
        out[e.key] = EdgeQuality(a.p, a.omega)
    return out


class _IndexedHeap:
    """Binary min-heap keyed by (cost, node) with decrease-key.

    Every key comparison increments ``counter.comparisons``.
    """

    def __init__(self, counter: SearchStats):
        self.items: list[tuple[float, int]] = []
        self.pos: dict[int, int] = {}
        self.counter = counter

    def __bool__(self):
        return bool(self.items)

    def _less(self, a, b):
        self.counter.comparisons += 1
        return a < b

    def push_or_decrease(self, node, cost):
        if node in self.pos:
            k = self.pos[node]
            self.items[k] = (cost, node)
        else:
            self.items.append((cost, node))
            k = len(self.items) - 1
            self.pos[node] = k
        self._up(k)

    def pop(self):
        items = self.items
        top = items[0]
        last = items.pop()
        del self.pos[top[1]]
        if items:
            items[0] = last
            self.pos[last[1]] = 0
            self._down(0)
        return top

    def _swap(self, i, j):
        items = self.items
        items[i], items[j] = items[j], items[i]
        self.pos[items[i][1]] = i
        self.pos[items[j][1]] = j

    def _up(self, k):
        while k > 0:
            parent = (k - 1) >> 1
            if not self._less(self.items[k], self.items[parent]):
                break
            self._swap(k, parent)
            k = parent

    def _down(self, k):
        n = len(self.items)
        while True:
            left = 2 * k + 1
            if left >= n:
                return
            child = left
            if left + 1 < n and self._less(self.items[left + 1], self.items[left]):
                child = left + 1
            if not self._less(self.items[child], self.items[k]):
                return
            self._swap(k, child)
            k = child


def _check_endpoints(net, source, target):
    for x in (source, target):
        if not 0 <= x < net.node_count:
            raise NetworkError(f"node id {x} out of range for {net.node_count} nodes")


def distribute_with_qualities(net: EntangledNetwork, qualities: Qualities, source: int, target: int) -> DistributionResult:
    """Minimal-cost distributing sets for fixed edge qualities."""
    _check_endpoints(net, source, target)
    n = net.node_count
    stats = SearchStats()
    cost = [INF] * n
    sets: list[list[Candidate]] = [[] for _ in range(n)]
    final = [False] * n
    order = []
    cost[target] = 0.0
    heap = _IndexedHeap(stats)
    heap.push_or_decrease(target, 0.0)

    while heap:
        c_u, u = heap.pop()
        stats.extractions += 1
        final[u] = True
        order.append(u)
        for i, _level in neighbors(net, u):
            if final[i]:
                continue
            q = quality(qualities, i, u)
            if q.weighted <= 0.0:
                continue
            stats.relaxations += 1
            trial = sets[i] + [Candidate(u, q, c_u)]
            new = weighted_total_cost(trial)
            stats.comparisons += 1
            if new < cost[i]:
                cost[i] = new
                sets[i] = trial
                stats.updates += 1
                heap.push_or_decrease(i, new)

    return DistributionResult(
        source=source,
        target=target,
        cost_table=cost,
        distributing_sets=[tuple(c.node for c in s) for s in sets],
        qualities=qualities,
        stats=stats,
        extraction_order=order,
    )


def distribute(net: EntangledNetwork, mem: Sequence[NodeMemoryState], th: Thresholds, demand: Demand) -> DistributionResult:
    qualities = edge_qualities(net, mem, th, demand.dt)
    return distribute_with_qualities(net, qualities, demand.source, demand.target)


def greedy_walk_with_qualities(net: EntangledNetwork, qualities: Qualities, source: int, target: int) -> RealizedPath:
    """Walk towards the target taking the cheapest feasible contact each step.

    The walk stops as soon as the current node shares a feasible edge with
    the target. Revisiting nodes is not allowed, so the walk either reaches
    the target within ``|V|`` nodes or gets stuck.
    """
    _check_endpoints(net, source, target)
    nodes, omegas = [source], []
    visited = {source}
    node = source
    while node != target:
        options = []
        for j, _level in neighbors(net, node):
            q = quality(qualities, node, j)
            if q.weighted > 0.0 and (j == target or j not in visited):
                options.append((pair_cost(q), j, q))
        if not options:
            raise NoPathError(f"greedy walk stuck at node {node}", node=node)
        direct = [o for o in options if o[1] == target]
        _, nxt, q = direct[0] if direct else min(options, key=lambda o: (o[0], o[1]))
        nodes.append(nxt)
        omegas.append(q.omega)
        visited.add(nxt)
        node = nxt
    return RealizedPath(tuple(nodes), tuple(omegas))


def greedy_walk(net: EntangledNetwork, mem: Sequence[NodeMemoryState], th: Thresholds, demand: Demand) -> RealizedPath:
    qualities = edge_qualities(net, mem, th, demand.dt)
    return greedy_walk_with_qualities(net, qualities, demand.source, demand.target)


def realize_path(result: DistributionResult, seed) -> RealizedPath:
    """Sample one source-to-target path from the distributing sets.

    At each node the next hop is drawn with the weighted selection
    probabilities of its set. ``seed`` may be an int or a numpy Generator.
    Members always have strictly lower cost, so the walk terminates.
    """
    if result.unreachable:
        raise NoPathError(f"source {result.source} cannot reach target {result.target}", node=result.source)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    nodes, omegas = [result.source], []
    node = result.source
    while node != result.target:
        members = result.distributing_sets[node]
        phis = result.selection(node)
        u = rng.random()
        k, acc = len(members) - 1, 0.0
        for idx, phi in enumerate(phis):
            acc += phi
            if u < acc:
                k = idx
                break
        nxt = members[k]
        omegas.append(quality(result.qualities, node, nxt).omega)
        nodes.append(nxt)
        node = nxt
    return RealizedPath(tuple(nodes), tuple(omegas))


def oracle_min_cost_with_qualities(net: EntangledNetwork, qualities: Qualities, source: int, target: int) -> float:
    """Brute-force minimum source cost over all acyclic distributing structures.

    Enumerates every order in which nodes can be attached behind the target
    and, for each attached node, every non-empty subset of already attached
    feasible neighbours. Costs are evaluated backwards from the target, with
    each subset tried cheapest member first.
    """
    _check_endpoints(net, source, target)
    if net.node_count > ORACLE_MAX_NODES:
        raise OracleRefused(f"oracle limited to {ORACLE_MAX_NODES} nodes, network has {net.node_count}")
    if source == target:
        return 0.0

    usable = {
        i: [j for j, _ in neighbors(net, i) if quality(qualities, i, j).weighted > 0.0]
        for i in range(net.node_count)
    }
    best = INF
    costs = {target: 0.0}

    def subset_min(i):
        placed = [j for j in usable[i] if j in costs]
        lowest = INF
        for mask in range(1, 1 << len(placed)):
            members = [placed[b] for b in range(len(placed)) if mask >> b & 1]
            members.sort(key=lambda j: (costs[j], j))
            cands = [Candidate(j, quality(qualities, i, j), costs[j]) for j in members]
            lowest = min(lowest, weighted_total_cost(cands))
        return lowest

    def search():
        nonlocal best
        for i in range(net.node_count):
            if i in costs:
                continue
            c = subset_min(i)
            if c == INF:
                continue
            if i == source:
                best = min(best, c)
                continue
            costs[i] = c
            search()
            del costs[i]

    search()
    return best


def oracle_min_cost(net: EntangledNetwork, mem: Sequence[NodeMemoryState], th: Thresholds, demand: Demand) -> float:
    if net.node_count > ORACLE_MAX_NODES:
        raise OracleRefused(f"oracle limited to {ORACLE_MAX_NODES} nodes, network has {net.node_count}")
    qualities = edge_qualities(net, mem, th, demand.dt)
    return oracle_min_cost_with_qualities(net, qualities, demand.source, demand.target)


@dataclass(frozen=True)
class ProbeRow:
    kind: str
    nodes: int
    edges: int
    extractions: int
    comparisons: int

    @property
    def scale(self) -> float:
        n = self.nodes
        return n * math.log2(n) + self.edges if n > 1 else 1.0 + self.edges

    @property
    def ratio(self) -> float:
        return self.comparisons / self.scale


def probe_network(kind: str, n: int, seed: int) -> EntangledNetwork:
    if kind == "line":
        return generate_network("line", seed, n=n)
    if kind == "random_geometric":
        # mean degree about 8 at every size
        radius = math.sqrt(8.0 / (math.pi * max(n, 1)))
        return generate_network("random_geometric", seed, n=n, radius=radius)
    if kind == "grid":
        side = max(1, int(round(math.sqrt(n))))
        return generate_network("grid", seed, rows=side, cols=max(1, n // side))
    raise NetworkError(f"unknown network kind {kind!r}")


def complexity_probe(sizes: Sequence[int], kind: str = "line", seed: int = 0) -> list[ProbeRow]:
    """Count heap extractions and comparisons of ``distribute`` per size.

    Edge qualities are drawn at random (p in [0.3, 1], omega in [0.5, 1]).
    Raises ``AssertionError`` if a run breaks the extraction or comparison
    bound.
    """
    rows = []
    for n in sizes:
        net = probe_network(kind, n, seed)
        rng = np.random.default_rng([seed, n])
        qualities = {
            e.key: EdgeQuality(float(rng.uniform(0.3, 1.0)), float(rng.uniform(0.5, 1.0))) for e in net.edges
        }
        res = distribute_with_qualities(net, qualities, net.node_count - 1, 0)
        row = ProbeRow(kind, net.node_count, net.edge_count, res.stats.extractions, res.stats.comparisons)
        assert row.extractions <= row.nodes, row
        assert row.comparisons <= COMPARISON_CONSTANT * row.scale, row
        rows.append(row)
    return rows
