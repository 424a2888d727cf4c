import itertools
from pathlib import Path

import numpy as np
import pytest

from oppent.cost import EdgeQuality
from oppent.network import build_network

DATA = Path(__file__).parent / "data"


def random_connected_network(rng, n, extra=0.4):
    edges = {(int(rng.integers(0, v)), v) for v in range(1, n)}
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < extra:
            edges.add((u, v))
    return build_network(n, sorted(edges))


def random_qualities(rng, net, low=0.05):
    return {e.key: EdgeQuality(float(rng.uniform(low, 1.0)), float(rng.uniform(low, 1.0))) for e in net.edges}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def data_dir():
    return DATA
