"""Resistance along a refinement sequence and certified limits."""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, List, Optional, Tuple

from .core import Edge, MetricGraph, Vertex, as_point, subdivide
from .decomp import exclude_points
from .electrical import effective_resistance
from .errors import BudgetExhausted, UnknownVertex
from .measure import CertifiedValue, _first_level
from .sequence import RefinementSequence, point_at

__all__ = [
    "CertifiedValue",
    "InvarianceReport",
    "certified_resistance",
    "default_threads",
    "invariance_suite",
    "resistance_sequence",
]


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GRAPHLIKE_THREADS", "1")))
    except ValueError:
        return 1


def resistance_sequence(
    seq: RefinementSequence, p, q, n_range: Iterable[int], *, threads: Optional[int] = None
) -> List[Tuple[int, float]]:
    """[(n, R_n(p_n, q_n))] over the requested levels."""
    levels = list(n_range)

    def one(n: int) -> Tuple[int, float]:
        g = seq.refine(n)
        return n, effective_resistance(g, point_at(seq, p, n), point_at(seq, q, n))

    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(levels) <= 1:
        return [one(n) for n in levels]
    # levels are built in order first so workers only read the cache
    for n in levels:
        seq.refine(n)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, levels))


def certified_resistance(
    seq: RefinementSequence,
    p,
    q,
    eps: float,
    *,
    n_max: int = 40,
    M: float = 8.0,
) -> CertifiedValue:
    """Certify the limit of R_n(p_n, q_n) to within ε.

    Searches for the first level n0 with tail(n0) < ε/4 whose decomposition
    (pseudo-edges kept away from p and q) has Σδ + tail < ε/4 and leftover
    length + tail < ε/4. From n0 on, all resistances lie within ε of each
    other; the result is R_{n0} ± ε/2.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    start = max(1, _first_level(seq, (p, q), n_max))
    best: Optional[CertifiedValue] = None
    for n0 in range(start, n_max + 1):
        tail = seq.tail(n0)
        if tail >= eps / 4:
            continue
        pn, qn = point_at(seq, p, n0), point_at(seq, q, n0)
        dec = exclude_points((seq, n0), eps / 8, [pn, qn], M, strict=False)
        r = effective_resistance(seq.refine(n0), pn, qn)
        detail = {
            "eps": eps,
            "sum_delta": dec.total_delta,
            "sum_leftover": dec.leftover_length,
            "tail": tail,
            "pseudo_edges": len(dec.pseudo_edges),
        }
        cand = CertifiedValue(r, eps / 2, n0, detail)
        ok = dec.total_delta + tail < eps / 4 and dec.leftover_length + tail < eps / 4
        if ok:
            return cand
        best = cand
    raise BudgetExhausted(f"no level up to {n_max} meets the ε/4 budgets for ε={eps}", best)


@dataclass
class InvarianceReport:
    baseline: float
    trials: int
    max_deviation: float
    max_relative: float
    values: List[float] = field(default_factory=list, repr=False)

    def passed(self, rel_tol: float = 1e-9) -> bool:
        return self.max_relative <= rel_tol


def _relabel(g: MetricGraph, rng: random.Random, p, q):
    verts = list(g.vertices)
    fresh = [f"x{i}" for i in range(len(verts))]
    rng.shuffle(fresh)
    vmap = dict(zip(verts, fresh))
    ids = list(range(len(g.edge_ids)))
    rng.shuffle(ids)
    edges = [Edge(i, vmap[e.u], vmap[e.v], e.length) for i, e in zip(ids, g.edges)]
    return MetricGraph(fresh, edges), vmap[p], vmap[q]


def invariance_suite(g: MetricGraph, p, q, trials: int = 50, *, seed: int = 0, max_splits: int = 4) -> InvarianceReport:
    """Resistance under random subdivisions and relabelings of ``g``.

    Each trial subdivides a few random edges at random interior fractions,
    then renames every vertex and edge; the p-q resistance should not move.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for v in (p, q):
        if not g.has_vertex(v):
            raise UnknownVertex(f"vertex {v!r} not in graph")
    rng = random.Random(seed)
    base = effective_resistance(g, p, q)
    values = []
    worst = 0.0
    for _ in range(trials):
        h = g
        for _ in range(rng.randint(1, max_splits)):
            if not h.num_edges:
                break
            eid = rng.choice(h.edge_ids)
            h, _ = subdivide(h, eid, rng.uniform(0.05, 0.95))
        h, a, b = _relabel(h, rng, p, q)
        r = effective_resistance(h, a, b)
        values.append(r)
        worst = max(worst, abs(r - base))
    rel = worst / abs(base) if base else worst
    return InvarianceReport(base, trials, worst, rel, values)
