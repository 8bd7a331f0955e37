import math
import random

import pytest
from conftest import connected_graphs, floyd, random_connected
from hypothesis import given, settings

from graphlike import (
    Edge,
    EdgePoint,
    HostMetric,
    MetricGraph,
    build,
    components,
    contract,
    diameter,
    distance,
    shortest_path,
    subdivide,
    with_points,
)
from graphlike.errors import (
    DanglingEndpoint,
    DuplicateId,
    FractionOutOfRange,
    NonPositiveLength,
    SelfLoop,
    UnknownEdge,
)


def path3():
    return build(["a", "b", "c"], [(0, "a", "b", 1.0), (1, "b", "c", 2.0)])


class TestConstruction:
    def test_rejects_bad_lengths(self):
        for bad in (0.0, -1.0, math.inf, math.nan):
            with pytest.raises(NonPositiveLength):
                build([0, 1], [(0, 0, 1, bad)])

    def test_rejects_self_loop(self):
        with pytest.raises(SelfLoop):
            build([0], [(0, 0, 0, 1.0)])

    def test_rejects_dangling_and_duplicates(self):
        with pytest.raises(DanglingEndpoint):
            build([0], [(0, 0, 1, 1.0)])
        with pytest.raises(DuplicateId):
            build([0, 1], [(0, 0, 1, 1.0), (0, 0, 1, 2.0)])

    def test_parallel_edges_allowed(self):
        g = build([0, 1], [(0, 0, 1, 1.0), (1, 0, 1, 3.0)])
        assert g.edges_between(0, 1) == (0, 1)
        assert g.total_length() == 4.0
        assert g.degree(0) == 2

    def test_unknown_edge(self):
        with pytest.raises(UnknownEdge):
            path3().edge(7)

    def test_empty_graph(self):
        g = MetricGraph(["o"], [])
        assert g.total_length() == 0.0
        assert g.is_connected()


class TestSubdivide:
    def test_lengths_and_ids(self):
        g = path3()
        h, w = subdivide(g, 1, 0.25)
        assert h.total_length() == pytest.approx(3.0)
        assert not h.has_edge(1)
        assert sorted(h.edge(e).length for e in h.incident(w)) == [0.5, 1.5]

    def test_fraction_range(self):
        for t in (0.0, 1.0, -0.1):
            with pytest.raises(FractionOutOfRange):
                subdivide(path3(), 0, t)

    @settings(max_examples=40, deadline=None)
    @given(connected_graphs())
    def test_distances_unchanged(self, g):
        rng = random.Random(g.total_length())
        h, _ = subdivide(g, rng.choice(g.edge_ids), rng.uniform(0.05, 0.95))
        dg, dh = floyd(g), floyd(h)
        for (a, b), x in dg.items():
            assert dh[a, b] == pytest.approx(x, rel=1e-12)


class TestContract:
    def test_merges_to_smallest_id_and_drops_loops(self):
        g = build([0, 1, 2, 3], [(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 0, 2, 5.0), (3, 2, 3, 1.0)])
        h, proj = contract(g, vertices=[0, 1, 2])
        assert proj[2] == 0 and proj[3] == 3
        assert h.edge_ids == (3,)

    def test_keeps_parallel_edges(self):
        g = build([0, 1, 2], [(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 0, 2, 1.0), (3, 0, 2, 2.0)])
        h, _ = contract(g, edges=[0])
        assert len(h.edges_between(0, 2)) == 3


class TestDistances:
    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(max_vertices=7, max_edges=12))
    def test_matches_floyd(self, g):
        d = floyd(g)
        for a in g.vertices:
            for b in g.vertices:
                assert distance(g, a, b) == pytest.approx(d[a, b], rel=1e-12, abs=1e-15)

    def test_edge_points(self):
        g = path3()
        assert distance(g, EdgePoint(1, 0.5), "a") == pytest.approx(2.0)
        assert distance(g, EdgePoint(1, 0.25), EdgePoint(1, 0.75)) == pytest.approx(1.0)
        # a shortcut around the edge is used when shorter
        g2 = build([0, 1], [(0, 0, 1, 10.0), (1, 0, 1, 1.0)])
        assert distance(g2, EdgePoint(0, 0.5), 0) == pytest.approx(5.0)
        assert distance(g2, EdgePoint(0, 0.1), EdgePoint(0, 0.9)) == pytest.approx(3.0)

    def test_shortest_path(self):
        length, verts, eids = shortest_path(path3(), "a", "c")
        assert length == 3.0 and verts == ["a", "b", "c"] and eids == [0, 1]

    def test_with_points(self):
        h, ids = with_points(path3(), [EdgePoint(1, 0.5), "a"])
        assert ids[1] == "a"
        assert distance(h, ids[0], "c") == pytest.approx(1.0)


class TestDiameter:
    def test_cycle(self):
        g = build(range(4), [(i, i, (i + 1) % 4, 1.0) for i in range(4)])
        val, (x, y) = diameter(g, g.vertices)
        assert val == 2.0
        assert (x, y) == (0, 2)  # lexicographically first witness

    def test_components(self):
        g = build(range(4), [(0, 0, 1, 1.0), (1, 2, 3, 1.0)])
        assert sorted(sorted(c) for c in components(g)) == [[0, 1], [2, 3]]
        assert len(components(g, removed=[0])) == 3

    @settings(max_examples=40, deadline=None)
    @given(connected_graphs(max_vertices=7, max_edges=10))
    def test_host_metric_uses_whole_graph(self, g):
        d = floyd(g)
        hm = HostMetric(g)
        part = list(g.vertices)[: max(2, len(g.vertices) // 2)]
        want = max(d[a, b] for a in part for b in part)
        assert hm.value(part) == pytest.approx(want, rel=1e-12)
        lo, hi = hm.bounds(part)
        assert lo <= want * (1 + 1e-12) and want <= hi * (1 + 1e-12)
        # a radius bound is only a hint
        assert hm.value(part, radius=g.total_length()) == pytest.approx(want, rel=1e-12)


def test_immutable_graph_equality():
    g = random_connected(random.Random(1), 5, 7)
    h = MetricGraph(g.vertices, list(g.edges))
    assert g == h and hash(g) == hash(h)
