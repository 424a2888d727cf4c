import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oppent.network import NetworkError, build_network, generate_network, hop_distance, neighbors


@pytest.mark.parametrize("level, hops", [(1, 1), (2, 2), (3, 4), (4, 8)])
def test_hop_distance(level, hops):
    assert hop_distance(level) == hops


@pytest.mark.parametrize("level", [0, -1, 1.5])
def test_hop_distance_rejects_bad_level(level):
    with pytest.raises(NetworkError):
        hop_distance(level)


@given(st.integers(min_value=1, max_value=60))
def test_hop_distance_doubles(level):
    assert hop_distance(level + 1) == 2 * hop_distance(level)
    assert hop_distance(level + 1) > hop_distance(level)


def test_build_two_nodes():
    net = build_network(2, [(0, 1, 1)])
    assert neighbors(net, 0) == ((1, 1),)
    assert neighbors(net, 1) == ((0, 1),)


def test_duplicate_pair_rejected():
    with pytest.raises(NetworkError, match="duplicate"):
        build_network(2, [(0, 1, 1), (1, 0, 2)])


@pytest.mark.parametrize("edges", [[(0, 3, 1)], [(-1, 0, 1)], [(1, 1, 1)], [(0, 1, 0)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(NetworkError):
        build_network(3, edges)


def test_isolated_node():
    net = build_network(3, [(0, 2, 1)])
    assert neighbors(net, 1) == ()


def test_neighbors_sorted():
    path = build_network(3, [(2, 1, 1), (1, 0, 3)])
    assert [j for j, _ in neighbors(path, 1)] == [0, 2]
    complete = build_network(3, [(2, 0, 1), (1, 2, 1), (0, 1, 2)])
    assert neighbors(complete, 0) == ((1, 2), (2, 1))


def test_neighbors_invalid_id():
    net = build_network(2, [(0, 1)])
    with pytest.raises(NetworkError):
        neighbors(net, 2)


def test_edge_order_preserved():
    net = build_network(4, [(2, 3, 1), (0, 1, 2), (1, 2, 1)])
    assert net.edge_triples() == [(2, 3, 1), (0, 1, 2), (1, 2, 1)]


def test_line():
    net = generate_network("line", n=4)
    assert net.edge_triples() == [(0, 1, 1), (1, 2, 1), (2, 3, 1)]


def test_grid_shape():
    net = generate_network("grid", rows=3, cols=4)
    assert net.node_count == 12
    assert net.edge_count == 3 * 3 + 2 * 4


def test_random_geometric_large_radius_is_complete():
    net = generate_network("random_geometric", seed=3, n=9, radius=2.0)
    # radius exceeds the unit-square diameter, so every pair is within range
    assert 2.0 > math.sqrt(2.0)
    assert all(net.degree(i) == 8 for i in range(9))


def test_random_geometric_matches_pairwise_distances():
    seed, n, radius = 17, 40, 0.25
    net = generate_network("random_geometric", seed=seed, n=n, radius=radius)
    pts = np.random.default_rng(seed).random((n, 2))
    expected = {(i, j) for i, j in itertools.combinations(range(n), 2) if np.linalg.norm(pts[i] - pts[j]) <= radius}
    assert {e.key for e in net.edges} == expected


@pytest.mark.parametrize(
    "kind, params",
    [
        ("line", {"n": 12, "upgrade_prob": 0.5}),
        ("grid", {"rows": 3, "cols": 3, "upgrade_prob": 0.3}),
        ("random_geometric", {"n": 30, "radius": 0.3, "upgrade_prob": 0.4}),
    ],
)
def test_generation_deterministic(kind, params):
    a = generate_network(kind, 99, **params)
    b = generate_network(kind, 99, **params)
    assert a.edge_triples() == b.edge_triples()


def test_level_upgrade_opt_in():
    plain = generate_network("line", 5, n=50)
    assert {e.level for e in plain.edges} == {1}
    upgraded = generate_network("line", 5, n=50, upgrade_prob=1.0)
    assert {e.level for e in upgraded.edges} <= {2, 3}


@pytest.mark.parametrize(
    "kind, params",
    [
        ("line", {"n": 0}),
        ("grid", {"rows": 0, "cols": 2}),
        ("random_geometric", {"n": 5, "radius": 0.0}),
        ("random_geometric", {"n": 5}),
        ("line", {"n": 3, "bogus": 1}),
        ("torus", {"n": 3}),
    ],
)
def test_generation_rejects_bad_params(kind, params):
    with pytest.raises(NetworkError):
        generate_network(kind, 0, **params)


@given(st.integers(0, 2**32 - 1), st.integers(1, 25), st.floats(0.05, 1.0))
def test_degree_sum_and_symmetry(seed, n, radius):
    net = generate_network("random_geometric", seed, n=n, radius=radius, upgrade_prob=0.3)
    assert sum(net.degree(i) for i in range(n)) == 2 * net.edge_count
    for i in range(n):
        for j, level in neighbors(net, i):
            assert (i, level) in neighbors(net, j)
