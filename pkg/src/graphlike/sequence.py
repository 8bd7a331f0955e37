"""Refinement sequences G_0 ⊆ G_1 ⊆ ... of finite metric graphs.

A sequence is an initial graph plus a step generator. Each step is a list of
primitive moves: subdividing an existing edge or adding a new edge. Old edges
are only ever partitioned, never shortened, so every level contains the
previous one as a topological subspace. Levels are computed lazily and
memoized.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from .core import Edge, EdgePoint, MetricGraph, PointRef, Vertex, as_point, components, id_key
from .errors import (
    DuplicateId,
    FractionOutOfRange,
    NonPositiveLength,
    NonSummable,
    SelfLoop,
    UnknownEdge,
    UnknownPoint,
)


@dataclass(frozen=True)
class Subdivide:
    """Split ``edge`` at ``fraction`` from its ``u`` end.

    ``vertex`` and ``ids`` pin the id of the new vertex and of the two pieces;
    when omitted, fresh ids are drawn from the graph counters.
    """

    edge: int
    fraction: float
    vertex: Optional[Hashable] = None
    ids: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class AddEdge:
    """Add an edge; endpoints that do not exist yet are created."""

    u: Hashable
    v: Hashable
    length: float
    id: Optional[int] = None


Move = Union[Subdivide, AddEdge]


@dataclass(frozen=True)
class RefinementStep:
    moves: Tuple[Move, ...] = ()
    #: ids (in the new level) of edges appended to the disconnecting enumeration
    declare: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Split:
    level: int  # the level in which the pieces first appear
    fraction: float
    vertex: Hashable
    left: int
    right: int


def apply_step(g: MetricGraph, step: RefinementStep) -> Tuple[MetricGraph, Dict[int, Tuple[float, Hashable, int, int]]]:
    """Apply the moves of ``step`` in order.

    Returns the new graph and, for every subdivided edge, ``(fraction, new
    vertex, left piece, right piece)``.
    """
    verts: Dict[Hashable, None] = dict.fromkeys(g.vertices)
    edges: Dict[int, Edge] = {e.id: e for e in g.edges}
    next_v = g.next_vertex_id
    next_e = g.next_edge_id
    splits: Dict[int, Tuple[float, Hashable, int, int]] = {}

    def fresh_edge() -> int:
        nonlocal next_e
        while next_e in edges:
            next_e += 1
        eid = next_e
        next_e += 1
        return eid

    for mv in step.moves:
        if isinstance(mv, Subdivide):
            if mv.edge not in edges:
                raise UnknownEdge(f"subdivide: no edge {mv.edge!r}")
            if not (0.0 < mv.fraction < 1.0):
                raise FractionOutOfRange(f"subdivide fraction {mv.fraction}")
            e = edges.pop(mv.edge)
            if mv.vertex is None:
                while next_v in verts:
                    next_v += 1
                w = next_v
                next_v += 1
            else:
                w = mv.vertex
                if w in verts:
                    raise DuplicateId(f"vertex {w!r} already exists")
            verts[w] = None
            if mv.ids is None:
                a, b = fresh_edge(), fresh_edge()
            else:
                a, b = mv.ids
                if a in edges or b in edges or a == b:
                    raise DuplicateId(f"edge ids {mv.ids} already in use")
                next_e = max(next_e, a + 1, b + 1)
            left = mv.fraction * e.length
            right = e.length - left
            if left <= 0 or right <= 0:
                raise FractionOutOfRange(f"fraction {mv.fraction} degenerates edge {e.id}")
            edges[a] = Edge(a, e.u, w, left)
            edges[b] = Edge(b, w, e.v, right)
            splits[e.id] = (mv.fraction, w, a, b)
        elif isinstance(mv, AddEdge):
            if mv.u == mv.v:
                raise SelfLoop(f"add edge: loop at {mv.u!r}")
            if not (math.isfinite(mv.length) and mv.length > 0):
                raise NonPositiveLength(f"add edge: length {mv.length!r}")
            eid = fresh_edge() if mv.id is None else mv.id
            if eid in edges:
                raise DuplicateId(f"edge id {eid} already in use")
            next_e = max(next_e, eid + 1)
            verts.setdefault(mv.u, None)
            verts.setdefault(mv.v, None)
            edges[eid] = Edge(eid, mv.u, mv.v, float(mv.length))
        else:
            raise TypeError(f"unknown move {mv!r}")
    out = MetricGraph(verts, edges.values(), next_vertex_id=next_v, next_edge_id=next_e, validate=False)
    return out, splits


StepFn = Callable[[int, MetricGraph], Optional[RefinementStep]]


class RefinementSequence:
    """Lazily generated chain of metric graphs with point tracking.

    Parameters
    ----------
    initial:
        The graph G_0.
    step_fn:
        ``step_fn(n, G_n)`` returns the step producing G_{n+1}, or ``None``
        for "no change". It must be a pure function of its arguments.
    declared:
        Edge ids of G_0 that start the disconnecting enumeration.
    tail:
        ``tail(n)`` bounds the total length not yet present in G_n, i.e.
        ``lim ℓ(G_m) - ℓ(G_n)``. ``None`` means no certified bound is known.
    reference:
        Known constants (e.g. ``{"H1": 1.5}``) used only by tests.
    """

    def __init__(
        self,
        initial: MetricGraph,
        step_fn: Optional[StepFn] = None,
        *,
        declared: Sequence[int] = (),
        tail: Optional[Callable[[int], float]] = None,
        reference: Optional[Dict[str, Any]] = None,
        family: str = "custom",
        params: Optional[Dict[str, Any]] = None,
        max_cached_edges: int = 3_000_000,
    ):
        for e in declared:
            initial.edge(e)
        self.initial = initial
        self.step_fn = step_fn
        self.family = family
        self.params = dict(params or {})
        self.reference = dict(reference or {})
        self._tail = tail
        self._levels: Dict[int, MetricGraph] = {0: initial}
        self._declares: Dict[int, Tuple[int, ...]] = {0: tuple(declared)}
        self._splits: Dict[int, Split] = {}
        self._parent: Dict[int, int] = {}
        self._lock = threading.RLock()
        self._max_cached_edges = max_cached_edges

    # -- levels ---------------------------------------------------------------
    def refine(self, n: int) -> MetricGraph:
        """The graph G_n (memoized; safe under concurrent calls)."""
        if n < 0:
            raise ValueError("level must be >= 0")
        g = self._levels.get(n)
        if g is not None:
            return g
        with self._lock:
            g = self._levels.get(n)
            if g is not None:
                return g
            base = max(k for k in self._levels if k <= n)
            g = self._levels[base]
            for k in range(base, n):
                step = self.step_fn(k, g) if self.step_fn is not None else None
                if step is None:
                    step = RefinementStep()
                g, splits = apply_step(g, step)
                for eid, (t, w, a, b) in splits.items():
                    self._splits[eid] = Split(k + 1, t, w, a, b)
                    self._parent[a] = eid
                    self._parent[b] = eid
                for e in step.declare:
                    g.edge(e)
                self._declares[k + 1] = tuple(step.declare)
                self._levels[k + 1] = g
            self._evict(keep=n)
            return g

    def _evict(self, keep: int) -> None:
        total = sum(g.num_edges for g in self._levels.values())
        if total <= self._max_cached_edges:
            return
        for k in sorted(self._levels):
            if k in (0, keep):
                continue
            total -= self._levels.pop(k).num_edges
            if total <= self._max_cached_edges:
                break

    def __getitem__(self, n: int) -> MetricGraph:
        return self.refine(n)

    def total_length(self, n: int) -> float:
        return self.refine(n).total_length()

    def tail(self, n: int) -> float:
        """Certified bound on ``lim ℓ(G_m) - ℓ(G_n)``."""
        if self._tail is None:
            raise NonSummable(f"sequence {self.family!r} declares no tail bound")
        return float(self._tail(n))

    @property
    def has_tail(self) -> bool:
        return self._tail is not None

    # -- lineage ------------------------------------------------------------
    def descendants(self, eid: int, n: int) -> List[int]:
        """Edges of G_n into which ``eid`` (an edge of some earlier level) was split."""
        self.refine(n)
        out = []
        stack = [eid]
        while stack:
            e = stack.pop()
            s = self._splits.get(e)
            if s is not None and s.level <= n:
                stack.append(s.right)
                stack.append(s.left)
            else:
                out.append(e)
        return out

    def ancestor(self, eid: int, n: int) -> Optional[int]:
        """The edge of G_n containing ``eid`` (an edge of a later level), or None."""
        while True:
            parent = self._parent.get(eid)
            if parent is None or self._splits[parent].level <= n:
                break
            eid = parent
        return eid if self.refine(n).has_edge(eid) else None

    def declared_members(self, n: int) -> List[int]:
        """Enumeration e_1, e_2, ... of declared edges known by level n (original ids)."""
        self.refine(n)
        out: List[int] = []
        for k in range(n + 1):
            out.extend(self._declares.get(k, ()))
        return out

    def declared_edges(self, n: int) -> List[int]:
        """Declared enumeration expressed as edges of G_n, in enumeration order."""
        out: List[int] = []
        for e in self.declared_members(n):
            out.extend(self.descendants(e, n))
        return out

    # -- points ---------------------------------------------------------------
    def track(self, p: Any, n: int, m: int) -> PointRef:
        """Re-express a point of G_n as the identical point of G_m (m >= n)."""
        if m < n:
            raise ValueError("can only track forward")
        g = self.refine(n)
        p = as_point(p)
        try:
            g.check_point(p)
        except UnknownPoint:
            raise UnknownPoint(f"{p} is not a point of level {n}") from None
        self.refine(m)
        if isinstance(p, Vertex):
            return p
        e, t = p.edge, p.fraction
        while True:
            s = self._splits.get(e)
            if s is None or s.level > m:
                break
            if abs(t - s.fraction) <= 1e-12:
                return Vertex(s.vertex)
            if t < s.fraction:
                e, t = s.left, t / s.fraction
            else:
                e, t = s.right, (t - s.fraction) / (1.0 - s.fraction)
        return EdgePoint(e, t)

    def first_level_with(self, v: Hashable, n_max: int = 64) -> int:
        for n in range(n_max + 1):
            if self.refine(n).has_vertex(v):
                return n
        raise UnknownPoint(f"vertex {v!r} does not appear up to level {n_max}")


@dataclass(frozen=True)
class Tracked:
    """A point given at a specific level, followed through later levels."""

    point: Any
    level: int


PointSpec = Union[Tracked, PointRef, Callable[[int], PointRef], Hashable]


def point_at(seq: RefinementSequence, spec: Any, n: int) -> PointRef:
    """Resolve a point specification to a point of G_n.

    Accepted specs: a :class:`Tracked` point, a callable ``n -> PointRef``
    (an explicit point sequence p_n), an :class:`EdgePoint` (taken at level
    0) or a vertex id / :class:`Vertex` (must exist in G_n).
    """
    if isinstance(spec, Tracked):
        if n < spec.level:
            raise UnknownPoint(f"point given at level {spec.level} requested at level {n}")
        return seq.track(spec.point, spec.level, n)
    if callable(spec) and not isinstance(spec, (Vertex, EdgePoint)):
        return seq.refine(n).check_point(spec(n))
    spec = as_point(spec)
    if isinstance(spec, EdgePoint):
        return seq.track(spec, 0, n)
    return seq.refine(n).check_point(spec)


def components_meeting(seq: RefinementSequence, n0: int, removed: Iterable[int], part: Iterable[Hashable], n: int) -> int:
    """Number of components of G_n minus (descendants of) ``removed`` that meet ``part``.

    ``removed`` are edges of G_{n0}; ``part`` is a vertex set of G_{n0}.
    Finite counterpart of the component-stabilization property.
    """
    removed_n = [d for e in removed for d in seq.descendants(e, n)]
    part = set(part)
    return sum(1 for c in components(seq.refine(n), removed_n) if c & part)
