"""Length-measure estimates and the metrics carried by a refinement sequence.

``hausdorff_estimate`` brackets H¹ of the limit space between ℓ(G_n) and
ℓ(G_n) plus the generator's tail bound; the cut functional H^G_δ (cut length
plus component diameters) is reported alongside as an independent check.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .core import HostMetric, MetricGraph, components, distance, id_key
from .errors import BudgetExhausted, CutNotAchievable, NonSummable, StaleCut, UnknownPoint
from .sequence import RefinementSequence, point_at


@dataclass(frozen=True)
class EdgeCut:
    """A prefix E_δ of the declared enumeration and the pieces it leaves in G_n."""

    delta: float
    level: int
    edges: Tuple[int, ...]
    components: Tuple[frozenset, ...]
    diameters: Tuple[float, ...]
    length: float  # ℓ(E_δ)

    @property
    def value(self) -> float:
        return self.length + math.fsum(self.diameters)


@dataclass(frozen=True)
class MeasureEstimate:
    lower: float
    upper: float
    n: int
    delta: Optional[float] = None
    h_g_delta: Optional[float] = None
    cut_size: int = 0

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


@dataclass(frozen=True)
class CertifiedValue:
    """An estimate with a guaranteed half-width, plus how it was obtained."""

    estimate: float
    halfwidth: float
    n_certified: int
    detail: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def lower(self) -> float:
        return self.estimate - self.halfwidth

    @property
    def upper(self) -> float:
        return self.estimate + self.halfwidth

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


@dataclass(frozen=True)
class MetricSeries:
    """Values d_n for consecutive levels; ``error`` bounds the truncation where known."""

    levels: Tuple[int, ...]
    values: Tuple[float, ...]
    estimate: float
    error: Optional[float] = None

    def is_monotone(self, tol: float = 1e-12) -> bool:
        return all(b <= a + tol * max(1.0, abs(a)) for a, b in zip(self.values, self.values[1:]))


# -- cuts ------------------------------------------------------------------------


def _small(hm: HostMetric, part, delta: float, radius: float = math.inf) -> bool:
    if len(part) == 1:
        return True
    lo, hi = hm.bounds(part, radius)
    if hi < delta:
        return True
    if lo >= delta:
        return False
    return hm.diameter(part, radius)[0] < delta


def _span(g: MetricGraph, part, removed) -> float:
    """Total length of the edges still attached to ``part``; bounds its diameter."""
    return math.fsum({e: g.edge(e).length for v in part for e in g.incident(v) if e not in removed}.values())


def _split(g: MetricGraph, part: frozenset, removed: set) -> List[frozenset]:
    seen: set = set()
    out = []
    for s in sorted(part, key=id_key):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for eid in g.incident(x):
                if eid in removed:
                    continue
                y = g.edge(eid).other(x)
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def edge_cut_for_delta(
    seq: RefinementSequence, n: int, delta: float, *, enumeration: Optional[Sequence[int]] = None
) -> EdgeCut:
    """Shortest prefix of the declared enumeration leaving only pieces of diameter < δ.

    Piece diameters use the distances of G_n itself. Raises
    :class:`CutNotAchievable` when the enumeration known at level n runs out.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    g = seq.refine(n)
    order = list(seq.declared_edges(n) if enumeration is None else enumeration)
    hm = HostMetric(g)
    removed: set = set()
    comps = {i: c for i, c in enumerate(components(g))}
    owner = {v: i for i, c in comps.items() for v in c}
    bad = {i for i, c in comps.items() if not _small(hm, c, delta, _span(g, c, removed))}
    next_id = len(comps)
    used = 0
    for eid in order:
        if not bad:
            break
        used += 1
        if eid in removed:
            continue
        removed.add(eid)
        i = owner[g.edge(eid).u]
        bad.discard(i)
        for piece in _split(g, comps.pop(i), removed):
            comps[next_id] = piece
            for v in piece:
                owner[v] = next_id
            if not _small(hm, piece, delta, _span(g, piece, removed)):
                bad.add(next_id)
            next_id += 1
    if bad:
        raise CutNotAchievable(f"declared edges of level {n} cannot cut G_{n} into pieces of diameter < {delta}")
    chosen = tuple(order[:used])
    pieces = sorted(comps.values(), key=lambda c: id_key(min(c, key=id_key)))
    diams = tuple(hm.value(c, _span(g, c, removed)) for c in pieces)
    return EdgeCut(delta, n, chosen, tuple(pieces), diams, g.length_of(set(chosen)))


def cut_value(g: MetricGraph, removed) -> float:
    """ℓ(E) + Σ diam(K) over components K of g minus E."""
    removed = set(removed)
    hm = HostMetric(g)
    parts = components(g, removed)
    return g.length_of(removed) + math.fsum(hm.value(c, _span(g, c, removed)) for c in parts)


def h_g_delta(seq: RefinementSequence, n: int, cut: EdgeCut) -> float:
    """Cut functional of ``cut`` evaluated on G_n; the cut must belong to G_n."""
    g = seq.refine(n)
    if cut.level != n or any(not g.has_edge(e) for e in cut.edges):
        raise StaleCut(f"cut was computed for level {cut.level}, not {n}")
    return cut_value(g, cut.edges)


def hausdorff_estimate(seq: RefinementSequence, target_gap: float, *, n_max: int = 40, n_start: int = 0) -> MeasureEstimate:
    """Bracket H¹ of the limit: ℓ(G_n) ≤ H¹ ≤ ℓ(G_n) + tail(n).

    Refines until the bracket is at most ``target_gap`` wide. At the final
    level the cut functional is evaluated for decreasing δ until it comes
    within the gap of ℓ(G_n) or no finer cut exists; the last value is
    reported in ``h_g_delta``.
    """
    if target_gap < 0:
        raise ValueError("target gap must be non-negative")
    best = None
    for n in range(n_start, n_max + 1):
        lower = seq.total_length(n)
        upper = lower + seq.tail(n)
        best = MeasureEstimate(lower, upper, n)
        if upper - lower <= target_gap:
            break
    else:
        raise BudgetExhausted(f"gap {best.gap:.3g} after {n_max} levels", best)
    g = seq.refine(best.n)
    delta, h, cut_size = None, None, 0
    hm = HostMetric(g)
    trial = max(hm.value(c) for c in components(g)) if g.num_edges else 0.0
    for _ in range(64):
        if trial <= 0:
            break
        try:
            cut = edge_cut_for_delta(seq, best.n, trial)
        except CutNotAchievable:
            break
        delta, h, cut_size = trial, cut.value, len(cut.edges)
        if lower - h <= target_gap:
            break
        trial /= 2
    return MeasureEstimate(best.lower, best.upper, best.n, delta, h, cut_size)


# -- metrics -------------------------------------------------------------------------


def _first_level(seq: RefinementSequence, specs, n_max: int) -> int:
    for n in range(n_max + 1):
        try:
            for s in specs:
                point_at(seq, s, n)
        except UnknownPoint:
            continue
        return n
    raise UnknownPoint(f"points not present up to level {n_max}")


def d_ell(seq: RefinementSequence, p, q, n_max: int, *, n_min: Optional[int] = None) -> MetricSeries:
    """Path distances d_n(p, q) in G_n for every level where both points exist."""
    start = _first_level(seq, (p, q), n_max) if n_min is None else n_min
    levels, values = [], []
    for n in range(start, n_max + 1):
        g = seq.refine(n)
        values.append(distance(g, point_at(seq, p, n), point_at(seq, q, n)))
        levels.append(n)
    return MetricSeries(tuple(levels), tuple(values), values[-1])


Assignment = Union[Callable[[int, int], float], Mapping[int, float]]


def f_weights(seq: RefinementSequence, assignment: Assignment, n: int, lookahead: int) -> Dict[int, float]:
    """Edge weights ℓ_f on G_n: assigned lengths of declared members lying inside each edge.

    ``assignment`` is either a mapping from member edge id to weight or a
    callable ``(rank, member id) -> weight`` with 1-based enumeration rank.
    Members known by level ``lookahead`` are counted; a member later cut into
    pieces spreads its weight over them in proportion to length.
    """
    g, deep = seq.refine(n), seq.refine(lookahead)
    out = {e.id: 0.0 for e in g.edges}
    for rank, m in enumerate(seq.declared_members(lookahead), start=1):
        w = assignment(rank, m) if callable(assignment) else assignment.get(m, 0.0)
        if w < 0:
            raise ValueError(f"negative weight for member {m}")
        if w == 0:
            continue
        pieces = seq.descendants(m, lookahead)
        total = deep.length_of(pieces)
        for d in pieces:
            a = seq.ancestor(d, n)
            if a is not None:
                out[a] += w * deep.edge(d).length / total
    return out


def d_f(
    seq: RefinementSequence,
    assignment: Assignment,
    p,
    q,
    n_max: int,
    *,
    tail: Optional[Callable[[int], float]] = None,
    n_min: Optional[int] = None,
) -> MetricSeries:
    """Distances under the summable edge weighting ℓ_f, level by level.

    ``tail(N)`` must bound the total weight of members declared after level
    N; it becomes the reported truncation error. Weights may vanish on edges
    that contain no member; such edges act as zero-length connections.
    """
    if tail is None:
        raise NonSummable("d_f needs a tail bound for the weight assignment")
    start = _first_level(seq, (p, q), n_max) if n_min is None else n_min
    levels, values = [], []
    for n in range(start, n_max + 1):
        g = seq.refine(n)
        w = f_weights(seq, assignment, n, n_max)
        values.append(distance(g, point_at(seq, p, n), point_at(seq, q, n), weights=w))
        levels.append(n)
    return MetricSeries(tuple(levels), tuple(values), values[-1], float(tail(n_max)))


def intrinsic_distance(seq: RefinementSequence, p, q, tol: float, *, n_max: int = 40, eps_fraction: float = 0.25) -> CertifiedValue:
    """Length of the shortest arc between p and q in the limit space.

    d_n(p, q) is an upper bound at every level. A decomposition of G_n that
    keeps p and q away from pseudo-edges bounds how much shorter an arc in
    the limit can be by Σ leftover lengths + Σ discrepancies + tail(n). The
    estimate returned is d_n with that bound as half-width once it is ≤ tol.
    """
    from .decomp import exclude_points

    start = _first_level(seq, (p, q), n_max)
    best = None
    for n in range(start, n_max + 1):
        tail = seq.tail(n)
        if tail > tol:
            continue
        g = seq.refine(n)
        pn, qn = point_at(seq, p, n), point_at(seq, q, n)
        d = distance(g, pn, qn)
        eps = max(eps_fraction * tol, 1e-15)
        dec = exclude_points((seq, n), eps, [pn, qn], strict=False)
        hw = dec.leftover_length + dec.total_delta + tail
        best = CertifiedValue(d, hw, n, {"tail": tail, "leftover": dec.leftover_length, "delta": dec.total_delta})
        if hw <= tol:
            return best
    raise BudgetExhausted(f"no level up to {n_max} certifies tolerance {tol}", best)
