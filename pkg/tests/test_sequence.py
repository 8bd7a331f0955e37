import threading

import pytest

from graphlike import EdgePoint, RefinementSequence, RefinementStep, Tracked, Vertex, build, distance, point_at
from graphlike.errors import NonSummable, UnknownPoint
from graphlike.sequence import AddEdge, Subdivide


def halving():
    """Unit interval whose edges are all halved at every step."""

    def step(n, g):
        moves = [Subdivide(e.id, 0.5) for e in sorted(g.edges)]
        return RefinementStep(tuple(moves), ())

    g0 = build([0, 1], [(0, 0, 1, 1.0)])
    return RefinementSequence(g0, step, declared=(0,), tail=lambda n: 0.0)


def test_levels_nested_and_length_preserved():
    s = halving()
    assert s.refine(3).num_edges == 8
    for n in range(4):
        assert s.total_length(n) == pytest.approx(1.0)
    assert s[2] is s.refine(2)


def test_lineage():
    s = halving()
    kids = s.descendants(0, 3)
    assert len(kids) == 8
    assert s.refine(3).length_of(kids) == pytest.approx(1.0)
    for k in kids:
        assert s.ancestor(k, 0) == 0
        assert s.ancestor(k, 3) == k
    mid = s.descendants(0, 1)
    assert {s.ancestor(k, 1) for k in kids} == set(mid)


def test_declared_edges_follow_splits():
    s = halving()
    assert s.declared_members(2) == [0]
    assert sorted(s.declared_edges(2)) == sorted(s.descendants(0, 2))


def test_tracking_points():
    s = halving()
    p = EdgePoint(0, 0.3)
    q = s.track(p, 0, 4)
    g = s.refine(4)
    assert distance(g, q, 0) == pytest.approx(0.3)
    # a point that becomes a vertex
    assert isinstance(s.track(EdgePoint(0, 0.5), 0, 1), Vertex)
    assert point_at(s, Tracked(EdgePoint(0, 0.75), 0), 3) == Vertex(s.track(EdgePoint(0, 0.75), 0, 2).id)


def test_point_errors():
    s = halving()
    with pytest.raises(UnknownPoint):
        point_at(s, "nope", 2)
    with pytest.raises(UnknownPoint):
        point_at(s, Tracked(0, 3), 1)


def test_no_tail():
    g0 = build([0, 1], [(0, 0, 1, 1.0)])
    s = RefinementSequence(g0, lambda n, g: RefinementStep((AddEdge(0, 1, 1.0),), ()))
    with pytest.raises(NonSummable):
        s.tail(1)
    assert s.total_length(3) == 4.0


def test_concurrent_refine_is_idempotent():
    s = halving()
    out = []
    ts = [threading.Thread(target=lambda: out.append(s.refine(6))) for _ in range(6)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert all(g == out[0] for g in out)
    assert halving().refine(6) == out[0]
