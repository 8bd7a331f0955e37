"""Decomposition of a finite metric graph into pseudo-edges plus small leftovers.

A pseudo-edge is a set of edges whose closure meets the rest of the host in
exactly two vertices, each touched by a single edge of the set. Its
discrepancy is its length minus the host distance between those two
vertices. The procedure: cut a prefix of the disconnecting enumeration so
that cut length plus component diameters nearly exhausts the total length,
then split each remaining component along a shortest diameter path at the
ends of the seeded bridged stretches, and recurse on whatever cannot be
certified.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .core import (
    HostMetric,
    MetricGraph,
    Vertex,
    as_point,
    components,
    id_key,
    shortest_distances,
    shortest_path,
    subdivide,
)
from .electrical import subgraph
from .measure import _span
from .errors import BudgetExhausted, PathNotInK, UnknownPoint
from .sequence import RefinementSequence

DEFAULT_M = 8.0
DEFAULT_DEPTH = 12


@dataclass(frozen=True)
class PseudoEdge:
    edges: Tuple[int, ...]
    f0: Any
    f1: Any
    h1: float
    inner: float  # shortest f0-f1 path inside the pseudo-edge
    d_endpoints: float  # distance in the host

    @property
    def delta(self) -> float:
        # a single edge counts as a genuine edge: no discrepancy
        if len(self.edges) == 1:
            return 0.0
        return max(0.0, self.h1 - self.d_endpoints)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edges": list(self.edges),
            "endpoints": [self.f0, self.f1],
            "h1": self.h1,
            "d": self.d_endpoints,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class Leftover:
    edges: Tuple[int, ...]
    vertices: frozenset
    length: float


@dataclass
class Decomposition:
    host: MetricGraph
    pseudo_edges: List[PseudoEdge]
    leftovers: List[Leftover]
    eps: float
    M: float
    depth: int
    rejects: int = 0
    forbidden: Tuple[Any, ...] = ()

    @property
    def total_h1(self) -> float:
        return math.fsum(f.h1 for f in self.pseudo_edges)

    @property
    def total_delta(self) -> float:
        return math.fsum(f.delta for f in self.pseudo_edges)

    @property
    def leftover_length(self) -> float:
        return math.fsum(c.length for c in self.leftovers)

    def violations(self, tol: float = 1e-9) -> List[str]:
        """Invariant failures; an empty list means the decomposition is sound."""
        g = self.host
        out = []
        seen: Dict[int, str] = {}
        for i, f in enumerate(self.pseudo_edges):
            for e in f.edges:
                if e in seen:
                    out.append(f"edge {e} in two parts")
                seen[e] = f"f{i}"
            out.extend(f"pseudo-edge {i}: {msg}" for msg in _validate(g, set(f.edges), {f.f0, f.f1}))
            if f.h1 + tol < f.inner or f.inner + tol < f.d_endpoints:
                out.append(f"pseudo-edge {i}: length chain h1 >= inner >= d fails")
            for v in self.forbidden:
                if v in _closure(g, f.edges):
                    out.append(f"pseudo-edge {i} touches forbidden {v!r}")
        for c in self.leftovers:
            for e in c.edges:
                if e in seen:
                    out.append(f"edge {e} in two parts")
                seen[e] = "leftover"
        if set(seen) != set(g.edge_ids):
            out.append("parts do not cover the host")
        if abs(self.total_h1 + self.leftover_length - g.total_length()) > tol * max(1.0, g.total_length()):
            out.append("lengths do not add up")
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "M": self.M,
            "depth": self.depth,
            "pseudo_edges": [f.to_dict() for f in self.pseudo_edges],
            "leftovers": [{"edges": list(c.edges), "h1": c.length} for c in self.leftovers],
            "sum_h1": self.total_h1,
            "sum_delta": self.total_delta,
            "sum_leftover": self.leftover_length,
        }


# -- pieces of the construction ----------------------------------------------------


def _closure(g: MetricGraph, edges: Iterable[int]) -> Set[Any]:
    out: Set[Any] = set()
    for e in edges:
        x = g.edge(e)
        out.add(x.u)
        out.add(x.v)
    return out


def _validate(host: MetricGraph, eset: Set[int], ends: Set[Any]) -> List[str]:
    problems = []
    verts = _closure(host, eset)
    frontier = {v for v in verts if any(e not in eset for e in host.incident(v))}
    if len(ends) != 2 or not ends <= verts:
        problems.append(f"needs two endpoints, got {sorted(ends, key=id_key)!r}")
        return problems
    if not frontier <= ends:
        problems.append(f"frontier {sorted(frontier, key=id_key)!r} exceeds the endpoints")
    for v in ends:
        k = sum(1 for e in host.incident(v) if e in eset)
        if k != 1:
            problems.append(f"endpoint {v!r} has degree {k} into the set")
    return problems


def _positions(K: MetricGraph, path_edges: Sequence[int]) -> List[float]:
    pos = [0.0]
    for e in path_edges:
        pos.append(pos[-1] + K.edge(e).length)
    return pos


def _off_path_groups(K: MetricGraph, path_vertices: Sequence[Any], path_edges: Sequence[int]) -> List[Tuple[List[int], Set[Any]]]:
    """Components of K minus the path, each as (edges, path vertices it touches).

    A chord (off-path edge between two path vertices) is its own component.
    """
    on = set(path_vertices)
    pset = set(path_edges)
    off = [e.id for e in K.edges if e.id not in pset]
    parent = {e: e for e in off}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    hub: Dict[Any, int] = {}
    for eid in off:
        e = K.edge(eid)
        for x in (e.u, e.v):
            if x in on:
                continue
            if x in hub:
                a, b = find(hub[x]), find(eid)
                if a != b:
                    parent[a] = b
            else:
                hub[x] = eid
    groups: Dict[int, List[int]] = {}
    for eid in off:
        groups.setdefault(find(eid), []).append(eid)
    out = []
    for eids in sorted(groups.values(), key=min):
        touch = set()
        for eid in eids:
            e = K.edge(eid)
            touch.update(x for x in (e.u, e.v) if x in on)
        out.append((sorted(eids), touch))
    return out


def bridged_subarcs(
    K: MetricGraph, path_vertices: Sequence[Any], path_edges: Sequence[int], attach_points: Iterable[Any] = ()
) -> List[Tuple[float, float]]:
    """Bridged stretches of the path, as (start, end) arclength positions.

    Every component of K off the path contributes the shortest stretch
    spanning the path vertices it touches; every attach point and both path
    ends contribute a singleton.
    """
    for e in path_edges:
        if not K.has_edge(e):
            raise PathNotInK(f"path edge {e} is not in the component")
    for v in path_vertices:
        if not K.has_vertex(v):
            raise PathNotInK(f"path vertex {v!r} is not in the component")
    pos = _positions(K, path_edges)
    index = {v: i for i, v in enumerate(path_vertices)}
    out = []
    for _, touch in _off_path_groups(K, path_vertices, path_edges):
        if touch:
            idx = [index[v] for v in touch]
            out.append((pos[min(idx)], pos[max(idx)]))
    singles = {0, len(path_vertices) - 1}
    for v in attach_points:
        if v not in index:
            raise PathNotInK(f"attach point {v!r} is not on the path")
        singles.add(index[v])
    out.extend((pos[i], pos[i]) for i in sorted(singles))
    return out


def maximal_super_bridged(
    bridged: Iterable[Tuple[float, float]], seeds: Iterable[float] = ()
) -> Tuple[List[Tuple[float, float]], List[Tuple[float, float]]]:
    """Merge overlapping or abutting stretches; split the result by whether it holds a seed.

    Returns ``(seeded, unseeded)``, each sorted and pairwise disjoint.
    """
    merged: List[List[float]] = []
    for a, b in sorted(bridged):
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    seeds = sorted(seeds)
    seeded, unseeded = [], []
    for a, b in merged:
        (seeded if any(a <= s <= b for s in seeds) else unseeded).append((a, b))
    return seeded, unseeded


def _landing(K: MetricGraph, path_vertices: Sequence[Any], v) -> Any:
    """First path vertex met by a shortest path from ``v`` to the path."""
    on = set(path_vertices)
    if v in on:
        return v
    dist, pred = shortest_distances(K, {v: 0.0})
    order = {x: i for i, x in enumerate(path_vertices)}
    best = min((x for x in path_vertices if x in dist), key=lambda x: (dist[x], order[x]))
    # walk back until the first path vertex on the way from v
    chain = [best]
    x = best
    while x != v:
        x = K.edge(pred[x]).other(x)
        chain.append(x)
    for x in reversed(chain):
        if x in on:
            return x
    return best


def _bounded_distance(g: MetricGraph, a, b, cutoff: float) -> float:
    """Host distance between two vertices, searching no further than ``cutoff``."""
    if a == b:
        return 0.0
    dist = {a: 0.0}
    done = set()
    heap = [(0.0, id_key(a), a)]
    limit = cutoff * (1 + 1e-12)
    while heap:
        d, _, x = heapq.heappop(heap)
        if x in done:
            continue
        if x == b:
            return d
        done.add(x)
        for eid in g.incident(x):
            e = g.edge(eid)
            y = e.other(x)
            nd = d + e.length
            if nd <= limit and (y not in dist or nd < dist[y]):
                dist[y] = nd
                heapq.heappush(heap, (nd, id_key(y), y))
    return cutoff


def _make_pseudo_edge(host: MetricGraph, eset: Set[int], ends: Set[Any]) -> PseudoEdge:
    f0, f1 = sorted(ends, key=id_key)
    local = subgraph(host, eset)
    inner, _, _ = shortest_path(local, f0, f1)
    d = _bounded_distance(host, f0, f1, inner)
    return PseudoEdge(tuple(sorted(eset)), f0, f1, host.length_of(eset), inner, d)


def pseudo_edges_of_component(
    host: MetricGraph, K: MetricGraph, metric: Optional[HostMetric] = None
) -> Tuple[List[PseudoEdge], List[List[int]], List[List[int]]]:
    """Split one component along a shortest path between its diameter witnesses.

    The diameter is taken in the host metric. Returns (pseudo-edges,
    rejected edge sets, edge sets that miss the unbridged part of the path);
    the last two are meant for recursion.
    """
    metric = HostMetric(host) if metric is None else metric
    kset = set(K.edge_ids)
    _, (x, y) = metric.diameter(K.vertices)
    _, pverts, pedges = shortest_path(K, x, y)
    index = {v: i for i, v in enumerate(pverts)}
    pos = _positions(K, pedges)
    boundary = [v for v in K.vertices if any(e not in kset for e in host.incident(v))]
    attach = {_landing(K, pverts, v) for v in sorted(boundary, key=id_key)}
    bridged = bridged_subarcs(K, pverts, pedges, attach)
    seeds = [pos[index[v]] for v in attach] + [pos[0], pos[-1]]
    seeded, _ = maximal_super_bridged(bridged, seeds)
    pi = set()
    at = {p: v for v, p in zip(pverts, pos)}
    for a, b in seeded:
        pi.add(at[a])
        pi.add(at[b])

    def covered(i: int) -> bool:
        return any(a <= pos[i] and pos[i + 1] <= b for a, b in seeded)

    free_path_edges = {e for i, e in enumerate(pedges) if not covered(i)}
    parent = {e: e for e in kset}

    def find(z):
        while parent[z] != z:
            parent[z] = parent[parent[z]]
            z = parent[z]
        return z

    for v in K.vertices:
        if v in pi:
            continue
        inc = [e for e in K.incident(v)]
        for other in inc[1:]:
            a, b = find(inc[0]), find(other)
            if a != b:
                parent[a] = b
    groups: Dict[int, List[int]] = {}
    for e in sorted(kset):
        groups.setdefault(find(e), []).append(e)
    found, rejects, rest = [], [], []
    for eids in sorted(groups.values(), key=min):
        if not free_path_edges.intersection(eids):
            rest.append(eids)
            continue
        eset = set(eids)
        ends = _closure(host, eset) & pi
        if _validate(host, eset, ends):
            rejects.append(eids)
        else:
            found.append(_make_pseudo_edge(host, eset, ends))
    return found, rejects, rest


def _reaches(sub: MetricGraph, metric: HostMetric, removed: Set[int], target: float) -> bool:
    """Whether ℓ(removed) + Σ diam(K) over components of sub - removed is ≥ target."""
    base = sub.length_of(removed)
    parts = [c for c in components(sub, removed) if len(c) > 1]
    # a part's own edge length bounds its diameter and keeps searches local
    radii = [_span(sub, c, removed) for c in parts]
    lo, hi = base, base
    for c, r in zip(parts, radii):
        a, b = metric.bounds(c, r)
        lo += a
        hi += b
    if lo >= target:
        return True
    if hi < target:
        return False
    exact = base + math.fsum(metric.value(c, r) for c, r in zip(parts, radii))
    return exact >= target


def cut_prefix(sub: MetricGraph, order: Sequence[int], slack: float, metric: Optional[HostMetric] = None) -> int:
    """Length of the shortest prefix E with ℓ(E) + Σ diam ≥ ℓ(sub) - slack.

    Diameters are measured with ``metric`` (``sub``'s own by default). The
    deficit is non-increasing along prefixes, so a bisection suffices.
    Returns ``len(order)`` when even the full enumeration falls short.
    """
    metric = HostMetric(sub) if metric is None else metric
    target = sub.total_length() - slack
    lo, hi = 0, len(order)
    if not _reaches(sub, metric, set(order), target):
        return hi
    while lo < hi:
        mid = (lo + hi) // 2
        if _reaches(sub, metric, set(order[:mid]), target):
            hi = mid
        else:
            lo = mid + 1
    return hi


def _process(host: MetricGraph, metric: HostMetric, sub: MetricGraph, order: Sequence[int], slack: float):
    k = cut_prefix(sub, order, slack, metric)
    cut = list(dict.fromkeys(order[:k]))
    found = [_make_pseudo_edge(host, {e}, {host.edge(e).u, host.edge(e).v}) for e in cut]
    removed = set(cut)
    later: List[List[int]] = []
    rejects = 0
    for comp in components(sub, removed):
        eids = [e for v in comp for e in sub.incident(v) if e not in removed]
        eids = sorted(set(eids))
        if not eids:
            continue
        K = subgraph(sub, eids)
        pes, rej, rest = pseudo_edges_of_component(host, K, metric)
        found.extend(pes)
        later.extend(rej)
        later.extend(rest)
        rejects += len(rej)
    return found, later, rejects


def _resolve(source, n: Optional[int]) -> Tuple[MetricGraph, List[int]]:
    if isinstance(source, RefinementSequence):
        level = 0 if n is None else n
        return source.refine(level), source.declared_edges(level)
    if isinstance(source, tuple) and len(source) == 2 and isinstance(source[0], RefinementSequence):
        seq, level = source
        return seq.refine(level), seq.declared_edges(level)
    return source, sorted(source.edge_ids)


def _run(host: MetricGraph, start: MetricGraph, order: Sequence[int], eps: float, M: float, depth_cap: int,
         fixed: Sequence[Sequence[int]] = ()):
    total = host.total_length()
    scale = total if total > 0 else 1.0
    metric = HostMetric(host)
    found, later, rejects = _process(host, metric, start, order, eps / 4)
    stop = eps * min(1.0, scale) / M
    depth = 0
    while later and depth < depth_cap and math.fsum(host.length_of(c) for c in later) > stop:
        depth += 1
        queue, later = later, []
        for eids in queue:
            sub = subgraph(host, eids)
            slack = (eps / 4) * 2.0**-depth * sub.total_length() / scale
            pes, rest, rej = _process(host, metric, sub, sorted(eids), slack)
            found.extend(pes)
            later.extend(rest)
            rejects += rej
    later = list(later) + [list(c) for c in fixed]
    return found, _merge_leftovers(host, later), depth, rejects


def _merge_leftovers(host: MetricGraph, parts: Sequence[Sequence[int]]) -> List[Leftover]:
    eids = sorted({e for p in parts for e in p})
    if not eids:
        return []
    sub = subgraph(host, eids)
    out = []
    for comp in components(sub):
        es = sorted({e for v in comp for e in sub.incident(v)})
        if es:
            out.append(Leftover(tuple(es), frozenset(comp), host.length_of(es)))
    return out


def decompose(
    source,
    eps: float,
    M: float = DEFAULT_M,
    *,
    n: Optional[int] = None,
    enumeration: Optional[Sequence[int]] = None,
    depth_cap: int = DEFAULT_DEPTH,
    forbidden: Iterable[Any] = (),
    strict: bool = True,
) -> Decomposition:
    """Pseudo-edge decomposition of a graph (or of level ``n`` of a sequence).

    The top-level cut follows ``enumeration`` (the declared enumeration for
    sequences, edge ids otherwise). Leftovers are decomposed again with
    geometrically shrinking slack until their total length drops below
    ε·min(1, ℓ)/M or ``depth_cap`` is reached. With ``strict`` set, a total
    discrepancy ≥ ε raises :class:`BudgetExhausted` carrying the result.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not M > 2:
        raise ValueError("M must exceed 2")
    g, order = _resolve(source, n)
    if enumeration is not None:
        order = list(enumeration)
    forbidden = list(forbidden)
    if forbidden:
        dec = _decompose_avoiding(g, order, eps, M, depth_cap, forbidden)
    else:
        found, left, depth, rej = _run(g, g, order, eps, M, depth_cap)
        dec = Decomposition(g, found, left, eps, M, depth, rej)
    if strict and dec.total_delta >= eps:
        raise BudgetExhausted(f"total discrepancy {dec.total_delta:.3g} is not below {eps}", dec)
    return dec


def _realize(g: MetricGraph, order: List[int], points: Sequence[Any]) -> Tuple[MetricGraph, List[int], List[Any]]:
    """Make every point a vertex, keeping the enumeration in step with the splits."""
    pieces: Dict[int, List[int]] = {}
    verts = []
    for p in points:
        p = as_point(p)
        if isinstance(p, Vertex):
            g.check_point(p)
            verts.append(p.id)
            continue
        e = g.edge(p.edge) if g.has_edge(p.edge) else None
        if e is None:
            raise UnknownPoint(f"edge {p.edge} not in graph")
        base = g.next_edge_id
        g, w = subdivide(g, p.edge, p.fraction)
        pieces[p.edge] = [base, base + 1]
        verts.append(w)
    return g, _expand(order, pieces), verts


def _expand(order: Sequence[int], pieces: Dict[int, List[int]]) -> List[int]:
    out = []
    for e in order:
        stack = [e]
        while stack:
            x = stack.pop(0)
            if x in pieces:
                stack = list(pieces[x]) + stack
            else:
                out.append(x)
    return out


def _decompose_avoiding(g: MetricGraph, order: List[int], eps: float, M: float, depth_cap: int, points) -> Decomposition:
    g, order, verts = _realize(g, list(order), points)
    found, left, depth, rej = _run(g, g, order, eps, M, depth_cap)
    plain = Decomposition(g, found, left, eps, M, depth, rej, tuple(verts))
    hit = [v for v in dict.fromkeys(verts) if any(v in _closure(g, f.edges) for f in found)]
    if not hit:
        return plain
    incident = sum(g.degree(v) for v in hit)
    budget = eps / (16 * max(1, incident))
    stubs: List[int] = []
    pieces: Dict[int, List[int]] = {}
    for v in hit:
        for eid in list(g.incident(v)):
            if eid in stubs:
                continue
            e = g.edge(eid)
            s = min(e.length / 4, budget)
            t = s / e.length if e.u == v else 1.0 - s / e.length
            base = g.next_edge_id
            g, _ = subdivide(g, eid, t)
            pieces[eid] = [base, base + 1]
            stubs.append(base if e.u == v else base + 1)
    stub_set = set(stubs)
    order = [e for e in _expand(order, pieces) if e not in stub_set]
    rest = subgraph(g, [e.id for e in g.edges if e.id not in stub_set])
    found, left, depth, rej = _run(g, rest, order, eps, M, depth_cap, fixed=[[e] for e in stubs])
    return Decomposition(g, found, left, eps, M, depth, rej, tuple(verts))


def exclude_points(source, eps: float, forbidden: Iterable[Any], M: float = DEFAULT_M, **kw) -> Decomposition:
    """Decomposition whose pseudo-edge closures avoid every forbidden point.

    Forbidden points inside edges are first made vertices. Each forbidden
    vertex touched by a pseudo-edge is isolated by short stubs cut from its
    incident edges; the stubs stay behind as leftovers (total length below
    ε/16) and the rest is decomposed afresh.
    """
    return decompose(source, eps, M, forbidden=forbidden, **kw)
