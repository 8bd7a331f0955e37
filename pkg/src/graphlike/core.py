"""Finite metric multigraphs and the basic operations on them.

A :class:`MetricGraph` is immutable. Every operation that "changes" a graph
returns a new one, keeping vertex ids and the ids of untouched edges stable.
Vertex ids are opaque hashables; fresh vertices created by the library get
integer ids larger than every integer id already present.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _cs_dijkstra

from .errors import (
    DanglingEndpoint,
    Disconnected,
    DisconnectedPart,
    DuplicateId,
    FractionOutOfRange,
    NonPositiveLength,
    SelfLoop,
    UnknownEdge,
    UnknownPoint,
    UnknownVertex,
)

VertexId = Hashable

#: default relative tolerance for float comparisons across the package
REL_TOL = 1e-9


def id_key(v: Any) -> tuple:
    """Total order on opaque ids: integers first (numerically), then by repr."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return (0, int(v), "")
    return (1, 0, repr(v))


class Edge(NamedTuple):
    id: int
    u: VertexId
    v: VertexId
    length: float

    def other(self, x: VertexId) -> VertexId:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Vertex:
    id: VertexId


@dataclass(frozen=True)
class EdgePoint:
    """Interior point of an edge, ``fraction`` of its length away from ``u``."""

    edge: int
    fraction: float

    def __post_init__(self):
        if not (0.0 < self.fraction < 1.0):
            raise FractionOutOfRange(f"edge point fraction {self.fraction} not in (0, 1)")


PointRef = Union[Vertex, EdgePoint]


def as_point(x: Any) -> PointRef:
    if isinstance(x, (Vertex, EdgePoint)):
        return x
    return Vertex(x)


class MetricGraph:
    """Finite multigraph with strictly positive edge lengths.

    Parallel edges are allowed, self-loops are not. Instances are immutable
    and can be shared freely between threads.
    """

    __slots__ = ("_vertices", "_vset", "_edges", "_adj", "_next_vid", "_next_eid", "_total", "_hash")

    def __init__(
        self,
        vertices: Iterable[VertexId],
        edges: Iterable[Edge],
        *,
        next_vertex_id: Optional[int] = None,
        next_edge_id: Optional[int] = None,
        validate: bool = True,
    ):
        verts = tuple(dict.fromkeys(vertices))
        vset = frozenset(verts)
        emap: Dict[int, Edge] = {}
        for e in edges:
            if validate:
                if e.id in emap:
                    raise DuplicateId(f"duplicate edge id {e.id!r}")
                if not (isinstance(e.length, (int, float, np.floating)) and math.isfinite(e.length) and e.length > 0):
                    raise NonPositiveLength(f"edge {e.id}: length {e.length!r} is not a positive real")
                if e.u not in vset or e.v not in vset:
                    raise DanglingEndpoint(f"edge {e.id}: endpoint not a declared vertex")
                if e.u == e.v:
                    raise SelfLoop(f"edge {e.id} is a self-loop at {e.u!r}")
                e = Edge(int(e.id), e.u, e.v, float(e.length))
            emap[e.id] = e
        self._vertices = verts
        self._vset = vset
        self._edges = emap
        self._adj = None
        self._total = None
        self._hash = None
        int_ids = [v for v in verts if type(v) is int]
        nv = max(int_ids) + 1 if int_ids else 0
        self._next_vid = max(nv, next_vertex_id or 0)
        ne = max(emap) + 1 if emap else 0
        self._next_eid = max(ne, next_edge_id or 0)

    # -- basic accessors ---------------------------------------------------
    @property
    def vertices(self) -> Tuple[VertexId, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(self._edges.values())

    @property
    def edge_ids(self) -> Tuple[int, ...]:
        return tuple(self._edges)

    @property
    def num_vertices(self) -> int:
        return len(self._vertices)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def next_vertex_id(self) -> int:
        return self._next_vid

    @property
    def next_edge_id(self) -> int:
        return self._next_eid

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._vset

    def has_edge(self, eid: int) -> bool:
        return eid in self._edges

    def edge(self, eid: int) -> Edge:
        try:
            return self._edges[eid]
        except KeyError:
            raise UnknownEdge(f"no edge with id {eid!r}") from None

    def total_length(self) -> float:
        if self._total is None:
            self._total = math.fsum(e.length for e in self._edges.values())
        return self._total

    def length_of(self, eids: Iterable[int]) -> float:
        return math.fsum(self.edge(e).length for e in eids)

    def _adjacency(self) -> Dict[VertexId, List[int]]:
        adj = self._adj
        if adj is None:
            adj = {v: [] for v in self._vertices}
            for eid, e in self._edges.items():
                adj[e.u].append(eid)
                adj[e.v].append(eid)
            for lst in adj.values():
                lst.sort()
            self._adj = adj
        return adj

    def incident(self, v: VertexId) -> Tuple[int, ...]:
        try:
            return tuple(self._adjacency()[v])
        except KeyError:
            raise UnknownVertex(f"no vertex {v!r}") from None

    def degree(self, v: VertexId, within: Optional[Iterable[int]] = None) -> int:
        inc = self.incident(v)
        if within is None:
            return len(inc)
        within = set(within)
        return sum(1 for e in inc if e in within)

    def edges_between(self, u: VertexId, v: VertexId) -> Tuple[int, ...]:
        return tuple(e for e in self.incident(u) if self._edges[e].other(u) == v and u != v)

    def check_point(self, p: PointRef) -> PointRef:
        p = as_point(p)
        if isinstance(p, Vertex):
            if p.id not in self._vset:
                raise UnknownPoint(f"vertex {p.id!r} not in graph")
        elif p.edge not in self._edges:
            raise UnknownPoint(f"edge {p.edge!r} not in graph")
        return p

    def is_connected(self) -> bool:
        return len(components(self)) <= 1

    def find_vertex(self, label: str) -> VertexId:
        """Resolve a textual label (e.g. from a command line) to a vertex id."""
        if label in self._vset:
            return label
        for v in self._vertices:
            if str(v) == label:
                return v
        try:
            iv = int(label)
        except ValueError:
            iv = None
        if iv is not None and iv in self._vset:
            return iv
        raise UnknownVertex(f"no vertex labelled {label!r}")

    # -- value semantics ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return self._vset == other._vset and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._vset, frozenset(self._edges.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MetricGraph(|V|={self.num_vertices}, |E|={self.num_edges}, length={self.total_length():.6g})"


def build(vertices: Iterable[VertexId], edges: Iterable[Any]) -> MetricGraph:
    """Validate and freeze a graph.

    ``edges`` entries may be ``(u, v, length)``, ``(id, u, v, length)``,
    mappings with keys ``id/u/v/len`` or :class:`Edge` values. Edges without an
    explicit id are numbered in order, skipping ids already taken.
    """
    raw = []
    for item in edges:
        if isinstance(item, Edge):
            raw.append((item.id, item.u, item.v, item.length))
        elif isinstance(item, dict):
            raw.append((item.get("id"), item["u"], item["v"], item.get("len", item.get("length"))))
        elif len(item) == 3:
            raw.append((None,) + tuple(item))
        elif len(item) == 4:
            raw.append(tuple(item))
        else:
            raise ValueError(f"cannot interpret edge spec {item!r}")
    taken = {r[0] for r in raw if r[0] is not None}
    nxt = 0
    out = []
    for eid, u, v, length in raw:
        if eid is None:
            while nxt in taken:
                nxt += 1
            eid = nxt
            taken.add(eid)
        out.append(Edge(int(eid), u, v, length))
    return MetricGraph(vertices, out)


# -- structural operations ---------------------------------------------------


def subdivide(
    g: MetricGraph,
    e: int,
    t: float,
    *,
    vertex: Optional[VertexId] = None,
    ids: Optional[Tuple[int, int]] = None,
) -> Tuple[MetricGraph, VertexId]:
    """Split edge ``e`` at fraction ``t`` (measured from its ``u`` end).

    The pieces are ``(u, w)`` of length ``t*len`` and ``(w, v)`` carrying the
    remainder; the other edges are untouched.
    """
    edge = g.edge(e)
    if not (0.0 < t < 1.0):
        raise FractionOutOfRange(f"subdivision fraction {t} not in (0, 1)")
    w = g.next_vertex_id if vertex is None else vertex
    if g.has_vertex(w):
        raise DuplicateId(f"vertex {w!r} already exists")
    if ids is None:
        ids = (g.next_edge_id, g.next_edge_id + 1)
    left = t * edge.length
    right = edge.length - left
    if left <= 0 or right <= 0:
        raise FractionOutOfRange(f"fraction {t} degenerates edge {e} of length {edge.length}")
    edges = [x for x in g.edges if x.id != e]
    edges.append(Edge(ids[0], edge.u, w, left))
    edges.append(Edge(ids[1], w, edge.v, right))
    nxt_v = g.next_vertex_id + 1 if vertex is None else g.next_vertex_id
    out = MetricGraph(g.vertices + (w,), edges, next_vertex_id=nxt_v, next_edge_id=g.next_edge_id)
    return out, w


def _part_edges(g: MetricGraph, vertices=None, edges=None) -> Tuple[set, set]:
    if (vertices is None) == (edges is None):
        raise ValueError("give exactly one of vertices= or edges=")
    if edges is not None:
        eset = set(edges)
        for e in eset:
            g.edge(e)
        vset = set()
        for e in eset:
            ed = g.edge(e)
            vset.update((ed.u, ed.v))
    else:
        vset = set(vertices)
        for v in vset:
            if not g.has_vertex(v):
                raise UnknownVertex(f"no vertex {v!r}")
        eset = {e.id for e in g.edges if e.u in vset and e.v in vset}
    return vset, eset


def _connected_via(g: MetricGraph, vset: set, eset: set) -> bool:
    if not vset:
        return False
    start = min(vset, key=id_key)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for eid in g.incident(x):
            if eid in eset:
                y = g.edge(eid).other(x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return len(seen) == len(vset)


def contract(g: MetricGraph, vertices=None, edges=None) -> Tuple[MetricGraph, Dict[VertexId, VertexId]]:
    """Collapse a connected part ``H`` to a single vertex.

    ``H`` is given either as a vertex set (its induced subgraph) or as an edge
    set. The merged vertex keeps the smallest id of ``H``. Edges of ``H`` and
    loops created by the collapse are dropped; parallel edges are kept.
    Returns the new graph and the projection of old vertices onto new ones.
    """
    vset, eset = _part_edges(g, vertices, edges)
    if not _connected_via(g, vset, eset):
        raise DisconnectedPart("part to contract is not connected")
    rep = min(vset, key=id_key)
    proj = {v: (rep if v in vset else v) for v in g.vertices}
    new_edges = []
    for e in g.edges:
        if e.id in eset:
            continue
        u, v = proj[e.u], proj[e.v]
        if u == v:
            continue
        new_edges.append(Edge(e.id, u, v, e.length))
    new_vertices = [v for v in g.vertices if v not in vset or v == rep]
    out = MetricGraph(new_vertices, new_edges, next_vertex_id=g.next_vertex_id, next_edge_id=g.next_edge_id, validate=False)
    return out, proj


def components(g: MetricGraph, removed: Iterable[int] = ()) -> List[frozenset]:
    """Connected components after deleting the open edges in ``removed``.

    Endpoints of removed edges stay. Components are ordered by their smallest
    vertex id.
    """
    removed = set(removed)
    for e in removed:
        g.edge(e)
    parent: Dict[VertexId, VertexId] = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        if e.id in removed:
            continue
        a, b = find(e.u), find(e.v)
        if a != b:
            parent[a] = b
    groups: Dict[VertexId, list] = {}
    for v in g.vertices:
        groups.setdefault(find(v), []).append(v)
    comps = [frozenset(vs) for vs in groups.values()]
    comps.sort(key=lambda c: id_key(min(c, key=id_key)))
    return comps


# -- shortest paths -----------------------------------------------------------


def shortest_distances(
    g: MetricGraph,
    sources: Dict[VertexId, float],
    *,
    weights: Optional[Dict[int, float]] = None,
    allowed: Optional[set] = None,
    removed: Iterable[int] = (),
) -> Tuple[Dict[VertexId, float], Dict[VertexId, int]]:
    """Multi-source Dijkstra; weights default to edge lengths and may be zero.

    Returns (distance map, predecessor edge map). Ties keep the first
    relaxation, which visits incident edges in increasing id order.
    """
    removed = set(removed)
    dist: Dict[VertexId, float] = {}
    pred: Dict[VertexId, int] = {}
    best = dict(sources)
    heap = [(d, id_key(v), v) for v, d in sources.items()]
    heapq.heapify(heap)
    edges = g._edges
    adj = g._adjacency()
    while heap:
        d, _, x = heapq.heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        for eid in adj[x]:
            if eid in removed or (allowed is not None and eid not in allowed):
                continue
            e = edges[eid]
            y = e.v if e.u == x else e.u
            if y in dist:
                continue
            w = e.length if weights is None else weights[eid]
            nd = d + w
            if y not in best or nd < best[y]:
                best[y] = nd
                pred[y] = eid
                heapq.heappush(heap, (nd, id_key(y), y))
    return dist, pred


def _point_sources(g: MetricGraph, p: PointRef, weights=None) -> Dict[VertexId, float]:
    p = g.check_point(p)
    if isinstance(p, Vertex):
        return {p.id: 0.0}
    e = g.edge(p.edge)
    w = e.length if weights is None else weights[e.id]
    a, b = p.fraction * w, (1.0 - p.fraction) * w
    if e.u == e.v:  # pragma: no cover - loops are rejected at construction
        return {e.u: min(a, b)}
    return {e.u: a, e.v: b}


def distance(g: MetricGraph, p: Any, q: Any, *, weights: Optional[Dict[int, float]] = None) -> float:
    """Path-metric distance between two points of ``g``.

    Edge-interior points are handled as if their edge were split there.
    ``weights`` replaces edge lengths (non-negative) for alternative metrics.
    """
    p, q = as_point(p), as_point(q)
    src = _point_sources(g, p, weights)
    dst = _point_sources(g, q, weights)
    dist, _ = shortest_distances(g, src, weights=weights)
    cands = [dist[v] + off for v, off in dst.items() if v in dist]
    if isinstance(p, EdgePoint) and isinstance(q, EdgePoint) and p.edge == q.edge:
        e = g.edge(p.edge)
        w = e.length if weights is None else weights[e.id]
        cands.append(abs(p.fraction - q.fraction) * w)
    if not cands:
        raise Disconnected(f"{p} and {q} lie in different components")
    return min(cands)


def shortest_path(
    g: MetricGraph,
    a: VertexId,
    b: VertexId,
    *,
    allowed: Optional[set] = None,
    removed: Iterable[int] = (),
) -> Tuple[float, List[VertexId], List[int]]:
    """Shortest ``a``-``b`` path as (length, vertex sequence, edge sequence)."""
    dist, pred = shortest_distances(g, {a: 0.0}, allowed=allowed, removed=removed)
    if b not in dist:
        raise Disconnected(f"{a!r} and {b!r} are not connected")
    verts = [b]
    eids: List[int] = []
    x = b
    while x != a:
        eid = pred[x]
        eids.append(eid)
        x = g.edge(eid).other(x)
        verts.append(x)
    verts.reverse()
    eids.reverse()
    return dist[b], verts, eids


# -- diameters -----------------------------------------------------------------


def _induced(g: MetricGraph, part: Iterable[VertexId], removed: Iterable[int] = ()):
    """Vertices (sorted), index map and edge list of the subgraph induced on part."""
    verts = sorted(set(part), key=id_key)
    index = {v: i for i, v in enumerate(verts)}
    removed = set(removed)
    eids = []
    for v in verts:
        for eid in g.incident(v):
            if eid in removed:
                continue
            e = g.edge(eid)
            if e.u == v and e.v in index:
                eids.append(eid)
    return verts, index, eids


def _simple_csr(g: MetricGraph, index: Dict[VertexId, int], eids: Sequence[int]) -> Tuple[csr_matrix, int]:
    """Symmetric csr matrix with parallel edges collapsed to the shortest one."""
    best: Dict[Tuple[int, int], float] = {}
    for eid in eids:
        e = g.edge(eid)
        i, j = index[e.u], index[e.v]
        if i > j:
            i, j = j, i
        L = e.length
        if (i, j) not in best or L < best[(i, j)]:
            best[(i, j)] = L
    n = len(index)
    if not best:
        return csr_matrix((n, n)), 0
    ij = np.array(list(best.keys()), dtype=np.int64)
    w = np.array(list(best.values()), dtype=float)
    rows = np.concatenate([ij[:, 0], ij[:, 1]])
    cols = np.concatenate([ij[:, 1], ij[:, 0]])
    m = csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))
    return m, len(best)


_CHUNK = 256


def _all_pairs_max(m: csr_matrix, n: int) -> Tuple[float, Tuple[int, int]]:
    """Maximum finite entry of the distance matrix and its first (i<j) position."""
    best_val = -1.0
    best_pair = (0, 0)
    for start in range(0, n, _CHUNK):
        idx = np.arange(start, min(n, start + _CHUNK))
        D = _cs_dijkstra(m, directed=False, indices=idx)
        if not np.all(np.isfinite(D)):
            raise DisconnectedPart("part is not connected")
        # only pairs (i, j) with j > i
        mask = np.arange(n)[None, :] > idx[:, None]
        D = np.where(mask, D, -1.0)
        mx = float(D.max()) if D.size else -1.0
        tol = 1e-12 * max(1.0, abs(mx))
        if mx > best_val + 1e-12 * max(1.0, abs(best_val)):
            r, c = np.argwhere(D >= mx - tol)[0]
            best_val, best_pair = mx, (int(idx[r]), int(c))
        elif mx > best_val:
            best_val = mx
    return max(best_val, 0.0), best_pair


def _tree_diameter(m: csr_matrix) -> Tuple[float, Tuple[int, int]]:
    d0 = _cs_dijkstra(m, directed=False, indices=0)
    if not np.all(np.isfinite(d0)):
        raise DisconnectedPart("part is not connected")
    a = int(np.argmax(d0))
    da = _cs_dijkstra(m, directed=False, indices=a)
    b = int(np.argmax(da))
    return float(da[b]), (min(a, b), max(a, b))


#: above this many vertices a tree component is measured by double sweep
TREE_SWEEP_MIN = 2000


def diameter(g: MetricGraph, part: Iterable[VertexId], *, removed: Iterable[int] = ()) -> Tuple[float, Tuple[VertexId, VertexId]]:
    """Largest distance between two vertices of ``part`` inside its induced subgraph.

    Distances are measured in the subgraph induced on ``part`` with the edges
    in ``removed`` deleted. The witness is the lexicographically smallest
    maximizing pair (smaller id first); for very large tree-like parts the
    witness is the pair found by a double sweep instead.
    """
    verts, index, eids = _induced(g, part, removed)
    if not verts:
        raise DisconnectedPart("empty part")
    if len(verts) == 1:
        return 0.0, (verts[0], verts[0])
    m, n_simple = _simple_csr(g, index, eids)
    if n_simple == len(verts) - 1 and len(verts) >= TREE_SWEEP_MIN:
        val, (i, j) = _tree_diameter(m)
    else:
        val, (i, j) = _all_pairs_max(m, len(verts))
    return val, (verts[i], verts[j])


def diameter_value(g: MetricGraph, part: Iterable[VertexId], *, removed: Iterable[int] = ()) -> float:
    """Diameter without the witness; uses the exact double sweep on trees."""
    verts, index, eids = _induced(g, part, removed)
    if len(verts) <= 1:
        return 0.0
    m, n_simple = _simple_csr(g, index, eids)
    if n_simple == len(verts) - 1:
        return _tree_diameter(m)[0]
    return _all_pairs_max(m, len(verts))[0]


def eccentricity_bounds(g: MetricGraph, part: Iterable[VertexId], *, removed: Iterable[int] = ()) -> Tuple[float, float]:
    """Cheap (lower, upper) bounds on the diameter of a connected part."""
    verts, index, eids = _induced(g, part, removed)
    if len(verts) <= 1:
        return 0.0, 0.0
    m, _ = _simple_csr(g, index, eids)
    d0 = _cs_dijkstra(m, directed=False, indices=0)
    if not np.all(np.isfinite(d0)):
        raise DisconnectedPart("part is not connected")
    a = int(np.argmax(d0))
    da = _cs_dijkstra(m, directed=False, indices=a)
    ecc = float(da.max())
    return ecc, min(2.0 * float(d0.max()), 2.0 * ecc)


# -- temporary points ------------------------------------------------------------


def with_points(g: MetricGraph, points: Sequence[Any]) -> Tuple[MetricGraph, List[VertexId]]:
    """Return a graph in which every given point is a vertex.

    Edge-interior points are realized by subdividing their host edge; several
    points on the same edge are handled in order. The returned list holds the
    vertex id realizing each input point.
    """
    out: List[Optional[VertexId]] = [None] * len(points)
    pending: Dict[int, List[Tuple[float, int]]] = {}
    for i, p in enumerate(points):
        p = g.check_point(p)
        if isinstance(p, Vertex):
            out[i] = p.id
        else:
            pending.setdefault(p.edge, []).append((p.fraction, i))
    h = g
    for eid, lst in pending.items():
        lst.sort()
        cur, offset, span = eid, 0.0, 1.0
        made: Dict[float, VertexId] = {}
        for frac, i in lst:
            if frac in made:
                out[i] = made[frac]
                continue
            local = (frac - offset) / span
            h, w = subdivide(h, cur, local)
            made[frac] = w
            out[i] = w
            cur = h.next_edge_id - 1  # right piece (w, v)
            offset, span = frac, 1.0 - frac
    return h, out  # type: ignore[return-value]


class HostMetric:
    """Distances of a fixed graph, queried on vertex subsets.

    Diameters here are taken in the metric of the whole graph restricted to a
    subset, so detours through the rest of the graph count. ``radius`` is an
    optional upper bound on the diameter (e.g. the part's total edge length)
    that keeps the searches local.
    """

    def __init__(self, g: MetricGraph):
        self.graph = g
        self.verts = sorted(g.vertices, key=id_key)
        self.index = {v: i for i, v in enumerate(self.verts)}
        self.csr, _ = _simple_csr(g, self.index, g.edge_ids)
        self._memo: Dict[Tuple[frozenset, str], Any] = {}

    def _cols(self, part) -> np.ndarray:
        return np.array(sorted(self.index[v] for v in set(part)), dtype=np.int64)

    def _rows(self, sources, limit: float = np.inf) -> np.ndarray:
        # the matrix is symmetric, so the directed search avoids a transpose per call
        return _cs_dijkstra(self.csr, directed=True, indices=sources, limit=limit)

    def _from(self, src: int, cols: np.ndarray, radius: float) -> np.ndarray:
        d = self._rows(src, radius * (1 + 1e-9))[cols]
        if not np.all(np.isfinite(d)) and math.isfinite(radius):
            d = self._rows(src)[cols]
        if not np.all(np.isfinite(d)):
            raise DisconnectedPart("part spans several components")
        return d

    def bounds(self, part, radius: float = math.inf) -> Tuple[float, float]:
        key = (frozenset(part), "b")
        if key not in self._memo:
            self._memo[key] = self._bounds(part, radius)
        return self._memo[key]

    def _bounds(self, part, radius: float) -> Tuple[float, float]:
        cols = self._cols(part)
        if len(cols) <= 1:
            return 0.0, 0.0
        d0 = self._from(int(cols[0]), cols, radius)
        a = int(cols[int(np.argmax(d0))])
        ecc = float(self._from(a, cols, radius).max())
        return ecc, min(2.0 * float(d0.max()), 2.0 * ecc)

    def diameter(self, part, radius: float = math.inf) -> Tuple[float, Tuple[VertexId, VertexId]]:
        """Exact diameter with the lexicographically first witness pair."""
        cols = self._cols(part)
        if len(cols) == 0:
            raise DisconnectedPart("empty part")
        if len(cols) == 1:
            v = self.verts[int(cols[0])]
            return 0.0, (v, v)
        _, hi = self.bounds(part, radius)
        limit = hi * (1 + 1e-9) + 1e-300
        k = len(cols)
        best_val, best_pair = -1.0, (0, 0)
        for start in range(0, k, _CHUNK):
            rows = np.arange(start, min(k, start + _CHUNK))
            D = self._rows(cols[rows], limit)[:, cols]
            D = np.where(np.isfinite(D), D, -1.0)
            D = np.where(np.arange(k)[None, :] > rows[:, None], D, -1.0)
            mx = float(D.max())
            tol = 1e-12 * max(1.0, abs(mx))
            if mx > best_val + 1e-12 * max(1.0, abs(best_val)):
                r, c = np.argwhere(D >= mx - tol)[0]
                best_val, best_pair = mx, (int(rows[r]), int(c))
        x, y = best_pair
        return max(best_val, 0.0), (self.verts[int(cols[x])], self.verts[int(cols[y])])

    def value(self, part, radius: float = math.inf) -> float:
        lo, hi = self.bounds(part, radius)
        if hi - lo <= 1e-15 * max(1.0, hi):
            return lo
        key = (frozenset(part), "d")
        if key not in self._memo:
            self._memo[key] = self.diameter(part, radius)[0]
        return self._memo[key]
