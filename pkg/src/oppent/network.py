"""Entangled network graph: nodes, leveled entangled edges and generators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree


class NetworkError(ValueError):
    """Raised for malformed networks or generator parameters."""


def hop_distance(level: int) -> int:
    """Number of physical hops spanned by an L_level entangled connection.

    Every level doubles the span of the previous one, so a level-1 edge links
    direct neighbours and a level-l edge skips ``2**(l-1) - 1`` intermediate
    nodes.
    """
    if int(level) != level or level < 1:
        raise NetworkError(f"entanglement level must be an integer >= 1, got {level!r}")
    return 1 << (int(level) - 1)


@dataclass(frozen=True)
class EntangledEdge:
    u: int
    v: int
    level: int = 1

    def __post_init__(self):
        if self.u == self.v:
            raise NetworkError(f"self-loop on node {self.u}")
        if self.level < 1:
            raise NetworkError(f"edge ({self.u}, {self.v}) has level {self.level} < 1")

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.u, self.v), max(self.u, self.v))


@dataclass(frozen=True)
class EntangledNetwork:
    """Immutable undirected graph of entangled contacts.

    ``adjacency[i]`` lists ``(neighbor, level)`` pairs sorted by neighbour id.
    """

    node_count: int
    edges: tuple[EntangledEdge, ...]
    adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, i: int) -> int:
        return len(neighbors(self, i))

    def edge_triples(self) -> list[tuple[int, int, int]]:
        return [(e.u, e.v, e.level) for e in self.edges]


def build_network(node_count: int, edges) -> EntangledNetwork:
    """Validate ``(u, v, level)`` triples and build the network.

    Edge order is preserved. A level may be omitted, in which case it is 1.
    """
    if node_count < 0:
        raise NetworkError(f"node_count must be non-negative, got {node_count}")
    seen: set[tuple[int, int]] = set()
    built = []
    adj: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
    for raw in edges:
        u, v, *rest = raw
        level = rest[0] if rest else 1
        for x in (u, v):
            if not 0 <= x < node_count:
                raise NetworkError(f"edge endpoint {x} out of range for {node_count} nodes")
        edge = EntangledEdge(int(u), int(v), int(level))
        if edge.key in seen:
            raise NetworkError(f"duplicate edge between {edge.key[0]} and {edge.key[1]}")
        seen.add(edge.key)
        built.append(edge)
        adj[edge.u].append((edge.v, edge.level))
        adj[edge.v].append((edge.u, edge.level))
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    return EntangledNetwork(node_count, tuple(built), adjacency)


def neighbors(net: EntangledNetwork, i: int) -> tuple[tuple[int, int], ...]:
    """Incident ``(neighbor, level)`` pairs of ``i`` in ascending neighbour id."""
    if not 0 <= i < net.node_count:
        raise NetworkError(f"node id {i} out of range for {net.node_count} nodes")
    return net.adjacency[i]


def _upgrade_levels(pairs, rng, upgrade_prob):
    # promotes a random subset of edges to level 2 or 3
    if not upgrade_prob:
        return [(u, v, 1) for u, v in pairs]
    out = []
    for u, v in pairs:
        level = 1
        if rng.random() < upgrade_prob:
            level = int(rng.integers(2, 4))
        out.append((u, v, level))
    return out


def generate_network(kind: str, seed: int | None = 0, **params) -> EntangledNetwork:
    """Generate a ``line``, ``grid`` or ``random_geometric`` network.

    Parameters by kind:

    * line: ``n``
    * grid: ``rows``, ``cols``
    * random_geometric: ``n``, ``radius`` (nodes uniform in the unit square,
      pairs closer than ``radius`` are connected)

    All kinds accept ``upgrade_prob`` (default 0): the probability that an
    edge is promoted to level 2 or 3. Output is a pure function of
    ``(kind, params, seed)``.
    """
    rng = np.random.default_rng(seed)
    upgrade = float(params.pop("upgrade_prob", 0.0))
    if not 0.0 <= upgrade <= 1.0:
        raise NetworkError(f"upgrade_prob must lie in [0, 1], got {upgrade}")

    if kind == "line":
        n = _count(params, "n", minimum=1)
        _no_extra(kind, params)
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif kind == "grid":
        rows = _count(params, "rows", minimum=1)
        cols = _count(params, "cols", minimum=1)
        _no_extra(kind, params)
        n = rows * cols
        pairs = []
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                if c + 1 < cols:
                    pairs.append((i, i + 1))
                if r + 1 < rows:
                    pairs.append((i, i + cols))
    elif kind == "random_geometric":
        n = _count(params, "n", minimum=1)
        radius = float(params.pop("radius", 0.0))
        _no_extra(kind, params)
        if not radius > 0:
            raise NetworkError(f"radius must be positive, got {radius}")
        points = rng.random((n, 2))
        pairs = sorted(cKDTree(points).query_pairs(radius))
    else:
        raise NetworkError(f"unknown network kind {kind!r} (line, grid, random_geometric)")

    return build_network(n, _upgrade_levels(pairs, rng, upgrade))


def _count(params, name, minimum):
    if name not in params:
        raise NetworkError(f"missing generator parameter {name!r}")
    value = params.pop(name)
    if int(value) != value or value < minimum:
        raise NetworkError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def _no_extra(kind, params):
    if params:
        raise NetworkError(f"unknown parameters for {kind}: {', '.join(sorted(params))}")
