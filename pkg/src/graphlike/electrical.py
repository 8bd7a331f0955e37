"""Flows, energy and effective resistance on metric graphs (resistance = length).

Besides the solver this module carries the three network-surgery facts the
convergence argument is built on: replacing a two-terminal subnetwork by a
single edge, the effect of contracting a connected part, and the resistance
window of a pseudo-edge.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import cg, spsolve

from .core import (
    Edge,
    MetricGraph,
    as_point,
    components,
    contract,
    distance,
    id_key,
    shortest_path,
    with_points,
    _connected_via,
    _part_edges,
)
from .errors import (
    BoundaryNotTwo,
    BoundViolation,
    Disconnected,
    DisconnectedH,
    EndpointDegreeNotOne,
    HostMismatch,
    InvalidFlow,
    NotShortestPath,
    SamePoint,
    TooLarge,
    UnknownVertex,
)

#: absolute part of the Kirchhoff residual tolerance, per unit strength
KIRCHHOFF_TOL = 1e-10
#: above this many unknowns the Laplacian system is solved by conjugate gradients
DIRECT_LIMIT = 1_000_000
CG_TOL = 1e-12


@dataclass
class Flow:
    """A p-q flow of a given strength.

    ``current[e]`` is the flow along edge ``e`` in its ``u -> v`` direction;
    the opposite direction carries the negative (antisymmetry is built in).
    """

    graph: MetricGraph
    p: Any
    q: Any
    strength: float
    current: Dict[int, float]
    potential: Optional[Dict[Any, float]] = None

    def along(self, eid: int, source) -> float:
        """Flow through ``eid`` leaving vertex ``source``."""
        e = self.graph.edge(eid)
        val = self.current.get(eid, 0.0)
        return val if source == e.u else -val

    def net_out(self) -> Dict[Any, float]:
        out = {v: 0.0 for v in self.graph.vertices}
        for eid, val in self.current.items():
            e = self.graph.edge(eid)
            out[e.u] += val
            out[e.v] -= val
        return out

    def residual(self) -> float:
        """Largest violation of the node law and boundary conditions."""
        worst = 0.0
        for v, val in self.net_out().items():
            target = self.strength if v == self.p else (-self.strength if v == self.q else 0.0)
            worst = max(worst, abs(val - target))
        return worst

    def validate(self, tol: Optional[float] = None) -> None:
        for eid in self.current:
            if not self.graph.has_edge(eid):
                raise InvalidFlow(f"flow mentions unknown edge {eid}")
        if tol is None:
            tol = _kirchhoff_tol(self)
        r = self.residual()
        if r > tol:
            raise InvalidFlow(f"Kirchhoff residual {r:.3g} exceeds {tol:.3g}")


def _kirchhoff_tol(flow: Flow) -> float:
    # rounding floor: currents are potential differences times conductances,
    # so each carries an absolute error of order eps * c * |phi|
    tol = KIRCHHOFF_TOL * max(1.0, abs(flow.strength))
    if flow.potential:
        eps = np.finfo(float).eps
        worst = 0.0
        acc: Dict[Any, float] = {}
        for eid in flow.current:
            e = flow.graph.edge(eid)
            s = (abs(flow.potential.get(e.u, 0.0)) + abs(flow.potential.get(e.v, 0.0))) / e.length
            acc[e.u] = acc.get(e.u, 0.0) + s
            acc[e.v] = acc.get(e.v, 0.0) + s
        if acc:
            worst = max(acc.values())
        tol += 64 * eps * worst
    return tol


def energy(g: MetricGraph, flow: Flow, *, validate: bool = True) -> float:
    """Σ over undirected edges of current² · length.

    The directed-edge sum counts every edge twice; this normalization makes a
    unit flow through a single edge of length L dissipate exactly L.
    """
    if flow.graph is not g and flow.graph != g:
        raise HostMismatch("flow is hosted on a different graph")
    if validate:
        flow.validate()
    return math.fsum(val * val * g.edge(eid).length for eid, val in flow.current.items())


def _component_of(g: MetricGraph, v) -> frozenset:
    for c in components(g):
        if v in c:
            return c
    raise UnknownVertex(f"no vertex {v!r}")


def _solve_potentials(g: MetricGraph, p, q, *, method: str = "auto") -> Tuple[List[Any], np.ndarray, List[int]]:
    """Potentials of the unit p->q current, grounded at q.

    Returns (vertices of the component, potentials in that order, edge ids).
    """
    comp = _component_of(g, p)
    if q not in comp:
        raise Disconnected(f"{p!r} and {q!r} lie in different components")
    verts = sorted(comp, key=id_key)
    index = {v: i for i, v in enumerate(verts)}
    es = [e for e in g.edges if e.u in index]
    eids = [e.id for e in es]
    n = len(verts)
    ui = np.fromiter((index[e.u] for e in es), dtype=np.int64, count=len(es))
    vi = np.fromiter((index[e.v] for e in es), dtype=np.int64, count=len(es))
    c = 1.0 / np.fromiter((e.length for e in es), dtype=float, count=len(es))
    rows = np.concatenate([ui, vi, ui, vi])
    cols = np.concatenate([ui, vi, vi, ui])
    data = np.concatenate([c, c, -c, -c])
    L = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    ground = index[q]
    keep = np.ones(n, dtype=bool)
    keep[ground] = False
    Lr = L[keep][:, keep].tocsc()
    b = np.zeros(n)
    b[index[p]] = 1.0
    b = b[keep]
    if method == "auto":
        method = "direct" if n - 1 <= DIRECT_LIMIT else "cg"
    if method == "direct":
        x = spsolve(Lr, b)
    elif method == "cg":
        diag = Lr.diagonal()
        from scipy.sparse.linalg import LinearOperator

        M = LinearOperator(Lr.shape, matvec=lambda r: r / diag)
        x, info = cg(Lr, b, rtol=CG_TOL, atol=0.0, maxiter=20 * n, M=M)
        if info != 0:
            raise InvalidFlow(f"conjugate gradients did not converge (info={info})")
    else:
        raise ValueError(f"unknown method {method!r}")
    phi = np.zeros(n)
    phi[keep] = np.atleast_1d(x)
    return verts, phi, eids


def unit_current(g: MetricGraph, p, q, *, method: str = "auto") -> Flow:
    """The energy-minimizing unit-strength p->q flow (the electrical current)."""
    if p == q:
        raise SamePoint("source and sink coincide")
    for v in (p, q):
        if not g.has_vertex(v):
            raise UnknownVertex(f"no vertex {v!r}")
    verts, phi, eids = _solve_potentials(g, p, q, method=method)
    index = {v: i for i, v in enumerate(verts)}
    current = {}
    for eid in eids:
        e = g.edge(eid)
        current[eid] = (phi[index[e.u]] - phi[index[e.v]]) / e.length
    pot = {v: float(phi[i]) for v, i in index.items()}
    flow = Flow(g, p, q, 1.0, current, pot)
    flow.validate()
    return flow


def effective_resistance(g: MetricGraph, p: Any, q: Any, *, method: str = "auto", reduce: bool = True) -> float:
    """Effective resistance between two points (vertices or edge points).

    Edge-interior points are realized on a scratch copy of the graph, so the
    caller's graph is never modified. Series and parallel runs are collapsed
    exactly before the linear solve; without that step long chains of very
    short edges wreck the conditioning of the Laplacian.
    """
    p, q = as_point(p), as_point(q)
    if p == q:
        return 0.0
    h, (a, b) = with_points(g, [p, q])
    if a == b:
        return 0.0
    if reduce:
        h = series_parallel_reduce(h, (a, b))
    verts, phi, _ = _solve_potentials(h, a, b, method=method)
    return float(phi[verts.index(a)])


def series_parallel_reduce(g: MetricGraph, terminals: Iterable[Any]) -> MetricGraph:
    """Equivalent network between ``terminals`` after exact local reductions.

    Parallel edges are merged, non-terminal vertices of degree two are
    bypassed by a series edge and dangling non-terminal parts are dropped.
    Resistance between any two terminals is unchanged.
    """
    keep = set(terminals)
    # nbr[x][y] = conductance between x and y, parallels summed on insert
    nbr: Dict[Any, Dict[Any, float]] = {v: {} for v in g.vertices}
    for e in g.edges:
        c = 1.0 / e.length
        row = nbr[e.u]
        row[e.v] = row.get(e.v, 0.0) + c
        row = nbr[e.v]
        row[e.u] = row.get(e.u, 0.0) + c
    work = [v for v in g.vertices if v not in keep and len(nbr[v]) <= 2]
    while work:
        x = work.pop()
        row = nbr.get(x)
        if row is None or len(row) > 2:
            continue
        if len(row) == 2:
            (a, ca), (b, cb) = row.items()
            c = 1.0 / (1.0 / ca + 1.0 / cb)
            del nbr[a][x], nbr[b][x]
            nbr[a][b] = nbr[a].get(b, 0.0) + c
            nbr[b][a] = nbr[b].get(a, 0.0) + c
            touched = (a, b)
        else:
            for y in row:
                del nbr[y][x]
            touched = tuple(row)
        del nbr[x]
        for y in touched:
            if y not in keep and len(nbr[y]) <= 2:
                work.append(y)
    edges = []
    for u, row in nbr.items():
        for v, c in row.items():
            if id_key(u) < id_key(v):
                edges.append(Edge(len(edges), u, v, 1.0 / c))
    return MetricGraph(nbr.keys(), edges, validate=False)


# -- independent oracle ---------------------------------------------------------


def resistance_oracle(g: MetricGraph, p, q, *, max_edges: int = 16) -> float:
    """Effective resistance from the weighted matrix-tree identity.

    R(p, q) = Σ_{2-forests separating p, q} w(F) / Σ_{spanning trees} w(T),
    with weights the products of conductances, evaluated by enumeration. No
    linear system is solved.
    """
    if p == q:
        return 0.0
    comp = _component_of(g, p)
    if q not in comp:
        raise Disconnected(f"{p!r} and {q!r} lie in different components")
    edges = [e for e in g.edges if e.u in comp]
    if len(edges) > max_edges:
        raise TooLarge(f"{len(edges)} edges exceed the enumeration bound {max_edges}")
    verts = sorted(comp, key=id_key)
    index = {v: i for i, v in enumerate(verts)}
    k = len(verts)

    def forest(subset):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in subset:
            a, b = find(index[e.u]), find(index[e.v])
            if a == b:
                return None
            parent[a] = b
        return find

    trees = 0.0
    for subset in itertools.combinations(edges, k - 1):
        if forest(subset) is not None:
            trees += math.prod(1.0 / e.length for e in subset)
    forests = 0.0
    ip, iq = index[p], index[q]
    for subset in itertools.combinations(edges, k - 2):
        find = forest(subset)
        if find is not None and find(ip) != find(iq):
            forests += math.prod(1.0 / e.length for e in subset)
    return forests / trees


# -- network surgery ----------------------------------------------------------------


def subgraph(g: MetricGraph, eids: Iterable[int]) -> MetricGraph:
    """The graph formed by the given edges and their endpoints."""
    eids = list(eids)
    es = [g.edge(e) for e in eids]
    verts = []
    for e in es:
        verts.extend((e.u, e.v))
    return MetricGraph(verts, es, next_vertex_id=g.next_vertex_id, next_edge_id=g.next_edge_id, validate=False)


def replace_subnetwork(g: MetricGraph, H: Iterable[int], p, q) -> MetricGraph:
    """Swap a two-terminal subnetwork for one p-q edge of length R_H(p, q).

    Every vertex of ``H`` other than ``p`` and ``q`` must be internal to ``H``;
    those vertices disappear with it.
    """
    if p == q:
        raise SamePoint("terminals coincide")
    hset = set(H)
    vset, eset = _part_edges(g, edges=hset)
    if p not in vset or q not in vset:
        raise BoundaryNotTwo("terminals must be vertices of H")
    if not _connected_via(g, vset, eset):
        raise DisconnectedH("H is not connected")
    boundary = {v for v in vset if any(e not in eset for e in g.incident(v))}
    if not boundary <= {p, q}:
        extra = sorted(boundary - {p, q}, key=id_key)
        raise BoundaryNotTwo(f"vertices {extra!r} of H also touch the rest of the graph")
    r = effective_resistance(subgraph(g, eset), p, q)
    inner = vset - {p, q}
    edges = [e for e in g.edges if e.id not in eset]
    edges.append(Edge(g.next_edge_id, p, q, r))
    verts = [v for v in g.vertices if v not in inner]
    return MetricGraph(verts, edges, next_vertex_id=g.next_vertex_id)


@dataclass(frozen=True)
class ContractionCheck:
    before: float
    after: float
    contracted_length: float
    lower: float
    upper: float


def contraction_bounds(g: MetricGraph, p, q, *, vertices=None, edges=None, tol: float = 1e-9) -> ContractionCheck:
    """Resistances before and after contracting a connected part.

    Asserts ``after ∈ [before - ℓ(H), before]`` up to ``tol``, where ℓ(H) is
    the total length removed by the contraction (the part itself plus any
    edges turned into loops).
    """
    before = effective_resistance(g, p, q)
    g2, proj = contract(g, vertices=vertices, edges=edges)
    lost = g.total_length() - g2.total_length()
    after = effective_resistance(g2, proj[p], proj[q])
    lo, hi = before - lost, before
    if not (lo - tol <= after <= hi + tol):
        raise BoundViolation(f"contracted resistance {after!r} outside [{lo!r}, {hi!r}]")
    return ContractionCheck(before, after, lost, lo, hi)


@dataclass(frozen=True)
class ResistanceBounds:
    lower: float
    upper: float
    value: Optional[float] = None
    note: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)) or self.lower > self.upper:
            raise ValueError(f"invalid bounds [{self.lower}, {self.upper}]")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


def pseudo_edge_resistance_bounds(
    H: MetricGraph,
    f0,
    f1,
    h1_f: Optional[float] = None,
    d_endpoints: Optional[float] = None,
    *,
    tol: float = 1e-9,
) -> ResistanceBounds:
    """Resistance window [2d - H¹(f), H¹(f)] of a graph sitting inside a pseudo-edge.

    ``h1_f`` defaults to ℓ(H) and ``d_endpoints`` to the f0-f1 distance in H.
    Both endpoints must have degree one in H.
    """
    for v in (f0, f1):
        if not H.has_vertex(v):
            raise UnknownVertex(f"no vertex {v!r}")
        if H.degree(v) != 1:
            raise EndpointDegreeNotOne(f"endpoint {v!r} has degree {H.degree(v)} in H")
    if not H.is_connected():
        raise Disconnected("H is not connected")
    if h1_f is None:
        h1_f = H.total_length()
    if d_endpoints is None:
        d_endpoints = distance(H, f0, f1)
    r = effective_resistance(H, f0, f1)
    out = ResistanceBounds(max(0.0, 2.0 * d_endpoints - h1_f), h1_f, r, "pseudo-edge window")
    if not out.contains(r, tol):
        raise BoundViolation(f"R={r!r} outside [{out.lower!r}, {out.upper!r}]")
    return out


@dataclass(frozen=True)
class PathTransform:
    edges: Tuple[int, ...]
    length: float
    path_length: float
    host_length: float
    #: (component edges, contracted span edges) in processing order
    steps: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...] = ()

    @property
    def bound(self) -> float:
        return 2.0 * self.path_length - self.host_length


def _path_vertices(H: MetricGraph, path: Sequence[int], start=None) -> List[Any]:
    if not path:
        if start is None:
            raise ValueError("empty path needs a start vertex")
        return [start]
    first = H.edge(path[0])
    if start is None:
        if len(path) == 1:
            start = first.u
        else:
            nxt = H.edge(path[1])
            start = first.u if first.v in (nxt.u, nxt.v) else first.v
    verts = [start]
    for eid in path:
        e = H.edge(eid)
        if verts[-1] not in (e.u, e.v):
            raise ValueError(f"edges {list(path)} do not form a walk")
        verts.append(e.other(verts[-1]))
    if len(set(verts)) != len(verts):
        raise ValueError("walk revisits a vertex")
    return verts


def path_contraction_transform(H: MetricGraph, path: Sequence[int], *, start=None, tol: float = 1e-9) -> PathTransform:
    """Contract H onto a path, one off-path component at a time.

    For every component C of H minus the path (chords count as components),
    the shortest stretch of the current path spanning C's attachment points
    is contracted together with C. Starting from a shortest path, each
    contracted stretch is no longer than C; the result P' satisfies
    ℓ(P') ≥ 2ℓ(P) - ℓ(H).
    """
    verts = _path_vertices(H, path, start)
    pset = set(path)
    on_path = set(verts)
    off = [e.id for e in H.edges if e.id not in pset]
    # group off-path edges that meet at off-path vertices
    parent = {e: e for e in off}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_vertex: Dict[Any, List[int]] = {}
    for eid in off:
        e = H.edge(eid)
        for x in (e.u, e.v):
            if x not in on_path:
                by_vertex.setdefault(x, []).append(eid)
    for lst in by_vertex.values():
        for other in lst[1:]:
            a, b = find(lst[0]), find(other)
            if a != b:
                parent[a] = b
    comps: Dict[int, List[int]] = {}
    for eid in off:
        comps.setdefault(find(eid), []).append(eid)
    ordered = sorted((sorted(c) for c in comps.values()), key=lambda c: c[0])

    groups = [{v} for v in verts]  # current path vertices as merged groups
    cur_edges = list(path)
    steps = []
    for comp in ordered:
        attach = set()
        for eid in comp:
            e = H.edge(eid)
            attach.update(x for x in (e.u, e.v) if x in on_path)
        if not attach:
            continue  # component does not touch the path (H disconnected)
        pos = [i for i, grp in enumerate(groups) if grp & attach]
        i, j = min(pos), max(pos)
        span = cur_edges[i:j]
        span_len = H.length_of(span)
        comp_len = H.length_of(comp)
        if span_len > comp_len + tol * max(1.0, comp_len):
            raise NotShortestPath(f"stretch of length {span_len} exceeds component of length {comp_len}")
        merged = set().union(*groups[i : j + 1])
        groups[i : j + 1] = [merged]
        del cur_edges[i:j]
        steps.append((tuple(comp), tuple(span)))
    out = PathTransform(
        tuple(cur_edges), H.length_of(cur_edges), H.length_of(path), H.total_length(), tuple(steps)
    )
    if out.length < out.bound - tol * max(1.0, out.host_length):
        raise BoundViolation(f"ℓ(P')={out.length!r} below 2ℓ(P)-ℓ(H)={out.bound!r}")
    return out
