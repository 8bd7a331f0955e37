import itertools
import math
import random

import pytest
from hypothesis import strategies as st

from graphlike import Edge, MetricGraph


def floyd(g):
    """All-pairs distances by Floyd-Warshall; an independent check for Dijkstra-based code."""
    vs = list(g.vertices)
    d = {(a, b): (0.0 if a == b else math.inf) for a in vs for b in vs}
    for e in g.edges:
        if e.length < d[e.u, e.v]:
            d[e.u, e.v] = d[e.v, e.u] = e.length
    for k, i, j in itertools.product(vs, vs, vs):
        if d[i, k] + d[k, j] < d[i, j]:
            d[i, j] = d[i, k] + d[k, j]
    return d


def random_connected(rng, n_vertices, n_edges, lo=0.1, hi=10.0):
    """Connected multigraph on 0..n-1: a random spanning tree plus extra (possibly parallel) edges."""
    verts = list(range(n_vertices))
    pairs = [(rng.randrange(i), i) for i in range(1, n_vertices)]
    while len(pairs) < n_edges:
        a, b = rng.sample(verts, 2)
        pairs.append((a, b))
    return MetricGraph(verts, [Edge(i, a, b, rng.uniform(lo, hi)) for i, (a, b) in enumerate(pairs)])


@st.composite
def connected_graphs(draw, max_vertices=5, max_edges=8):
    n = draw(st.integers(2, max_vertices))
    m = draw(st.integers(n - 1, max(n - 1, max_edges)))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected(random.Random(seed), n, m)


@pytest.fixture
def rng():
    return random.Random(12345)
