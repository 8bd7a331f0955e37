"""Standard graph-like continua as refinement sequences.

Every generator is a pure function of its parameters: the step producing
G_{n+1} depends only on n and G_n, and all new ids follow fixed formulas, so
two sequences built from the same parameters agree level by level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .core import MetricGraph, build
from .errors import NonSummable
from .sequence import AddEdge, RefinementSequence, RefinementStep, Subdivide

FAMILIES = ("hawaiian", "fat_cantor", "gasket_edges", "dumbbell", "custom")


@dataclass
class SpaceSpec:
    """Serializable description of a fixture: family tag plus parameters.

    ``references`` maps a constant name to ``(value, provenance)``; these are
    only consumed by tests.
    """

    family: str
    params: Dict[str, Any] = field(default_factory=dict)
    references: Dict[str, Tuple[float, str]] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        for key in ("ratio",):
            r = self.params.get(key)
            if r is not None and not (0.0 < float(r) < 1.0):
                raise ValueError(f"{key} must lie in (0, 1), got {r}")

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"family": self.family, "params": dict(self.params)}
        if self.references:
            out["references"] = {k: {"value": v, "provenance": p} for k, (v, p) in self.references.items()}
        return out

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "SpaceSpec":
        refs = {k: (float(v["value"]), str(v.get("provenance", ""))) for k, v in doc.get("references", {}).items()}
        return cls(doc["family"], dict(doc.get("params", {})), refs)

    def build(self) -> RefinementSequence:
        return from_spec(self)


def _split3(e, start, lengths: Sequence[float], names: Sequence[Any], ids: Sequence[int]) -> Tuple[List[Subdivide], int]:
    """Moves cutting edge ``e`` into three pieces of the given lengths, read from ``start``.

    ``names`` are the two new vertices (nearest ``start`` first); ``ids`` are
    four fresh edge ids, the second of which is only used transiently.
    Returns the moves and the id of the middle piece.
    """
    x, m, y = lengths
    a, b = names
    if e.u != start:
        x, y = y, x
        a, b = b, a
    total = x + m + y
    i0, tmp, mid, i3 = ids
    moves = [
        Subdivide(e.id, x / total, a, (i0, tmp)),
        Subdivide(tmp, m / (m + y), b, (mid, i3)),
    ]
    return moves, mid


# -- Hawaiian earring ------------------------------------------------------------


def hawaiian(
    first: float = 1.0,
    ratio: float = 0.5,
    *,
    lengths: Optional[Any] = None,
    tail: Optional[Callable[[int], float]] = None,
) -> RefinementSequence:
    """Wedge of loops at ``"o"``; loop i has length l_i and far point ``"a{i}"``.

    By default l_i = first·ratio^(i-1). ``lengths`` may instead be a finite
    list (the earring stops growing after it) or a callable i -> l_i, which
    then needs an explicit ``tail`` bound. Loop i is the pair of parallel
    edges ``2i-2`` and ``2i-1``, both of length l_i/2; G_0 is the bare base point.
    """
    params: Dict[str, Any]
    if lengths is None:
        if not (0.0 < ratio < 1.0):
            raise NonSummable(f"ratio {ratio} gives a divergent loop series")
        if first <= 0:
            raise ValueError("first loop length must be positive")

        def length(i: int) -> Optional[float]:
            return first * ratio ** (i - 1)

        def tail_fn(n: int) -> float:
            return first * ratio**n / (1.0 - ratio)

        params = {"first": first, "ratio": ratio}
        h1 = first / (1.0 - ratio)
    elif callable(lengths):
        if tail is None:
            raise NonSummable("a length callable needs an explicit tail bound")
        length, tail_fn = lengths, tail
        params = {}
        h1 = None
    else:
        seq = [float(x) for x in lengths]
        if any(not (x > 0 and math.isfinite(x)) for x in seq):
            raise ValueError("loop lengths must be positive and finite")

        def length(i: int) -> Optional[float]:
            return seq[i - 1] if i <= len(seq) else None

        def tail_fn(n: int) -> float:
            return math.fsum(seq[n:]) if tail is None else tail(n)

        params = {"lengths": seq}
        h1 = math.fsum(seq)

    def step(n: int, g: MetricGraph) -> Optional[RefinementStep]:
        li = length(n + 1)
        if li is None:
            return None
        a = f"a{n + 1}"
        ids = (2 * n, 2 * n + 1)
        return RefinementStep(
            (AddEdge("o", a, li / 2, ids[0]), AddEdge("o", a, li / 2, ids[1])),
            declare=ids,
        )

    g0 = MetricGraph(["o"], [])
    refs = {"H1": (h1, "closed-form")} if h1 is not None else {}
    family = "hawaiian" if params else "custom"
    return RefinementSequence(g0, step, tail=tail_fn, reference=refs, family=family, params=params)


# -- fat Cantor set --------------------------------------------------------------

# per level: (piece endpoints left to right, piece edge ids, next free edge id)
_piece_cache: List[Tuple[List[Tuple[Any, Any]], List[int], int]] = [([(0, 1)], [0], 1)]


def _cantor_pieces(n: int) -> Tuple[List[Tuple[Any, Any]], List[int], int]:
    """Undoubled path pieces of G_n: endpoints, edge ids and the next free id."""
    while len(_piece_cache) <= n:
        k = len(_piece_cache)
        ends, ids, base = _piece_cache[-1]
        nxt_ends, nxt_ids = [], []
        for j, (a, b) in enumerate(ends):
            nxt_ends.append((a, ("L", k, j)))
            nxt_ends.append((("R", k, j), b))
            nxt_ids.append(base + 5 * j)
            nxt_ids.append(base + 5 * j + 3)
        _piece_cache.append((nxt_ends, nxt_ids, base + 5 * len(ends)))
    return _piece_cache[n]


def cantor_piece_length(n: int) -> float:
    """Length of each undoubled piece of G_n."""
    return (0.5 + 0.5 * 2.0**-n) / 2**n


def cantor_gap_length(k: int) -> float:
    """Length of each generation-k interval."""
    return 4.0**-k


def fat_cantor(depth: Optional[int] = None) -> RefinementSequence:
    """Unit interval whose removed Cantor intervals are doubled.

    Generation k consists of 2^(k-1) intervals of length 4^-k, one centred in
    each remaining piece; step k-1 -> k subdivides every piece around its
    interval and adds a parallel copy. The interval ends are vertices
    ``("L", k, j)`` and ``("R", k, j)``; 0 and 1 are the persistent ends.
    With ``depth`` set, refinement stops after that generation.
    """

    def step(n: int, g: MetricGraph) -> Optional[RefinementStep]:
        if depth is not None and n >= depth:
            return None
        k = n + 1
        c, r = cantor_piece_length(n), cantor_gap_length(k)
        side = (c - r) / 2
        moves: List[Any] = []
        declare: List[int] = []
        ends, piece_ids, base = _cantor_pieces(n)
        for j, ((a, b), eid) in enumerate(zip(ends, piece_ids)):
            e = g.edge(eid)
            if {e.u, e.v} != {a, b}:
                raise ValueError(f"level {n} does not have the expected layout")
            ids = [base + 5 * j + i for i in range(5)]
            sub, mid = _split3(e, a, (side, r, c - side - r), (("L", k, j), ("R", k, j)), ids[:4])
            moves.extend(sub)
            moves.append(AddEdge(("L", k, j), ("R", k, j), r, ids[4]))
            declare.extend((mid, ids[4]))
        return RefinementStep(tuple(moves), tuple(declare))

    if depth is None:

        def tail(n: int) -> float:
            return 2.0 ** (-n - 1)

        h1 = 1.5
    else:

        def tail(n: int) -> float:
            return max(0.0, 2.0 ** (-n - 1) - 2.0 ** (-depth - 1))

        h1 = 1.5 - 2.0 ** (-depth - 1)
    g0 = build([0, 1], [(0, 0, 1, 1.0)])
    params = {} if depth is None else {"depth": depth}
    refs = {"H1": (h1, "closed-form"), "R01_limit": (0.75, "closed-form")}
    return RefinementSequence(g0, step, tail=tail, reference=refs, family="fat_cantor", params=params)


def fat_cantor_length(n: int) -> float:
    return 1.5 - 2.0 ** (-n - 1)


def fat_cantor_resistance(n: int) -> float:
    """R(0, 1) in G_n: doubled intervals conduct at half their length."""
    return 0.75 + 2.0**-n / 4


# -- gasket with articulation intervals ----------------------------------------


def gasket_corner(word: str, i: int) -> Any:
    """Vertex id of corner ``i`` of the sub-triangle addressed by ``word``."""
    if not word:
        return ("g", "", i)
    w, j = word[:-1], int(word[-1])
    if i == j:
        return gasket_corner(w, j)
    return ("g", w, j, i)


def _words(n: int):
    if n == 0:
        yield ""
        return
    for w in _words(n - 1):
        for j in "012":
            yield w + j


def gasket_edges(eps0: float = 1.0, ratio: float = 0.25) -> RefinementSequence:
    """Gasket graph whose articulation points are replaced by intervals.

    Level-k articulation edges have length eps0·ratio^k; there are 3^k of
    them, so the total length is finite only for ratio < 1/3. A level-n
    triangle side has length eps0·ratio^(n+1)/(1-2·ratio) and is cut into
    two sub-triangle sides around the new articulation edge, so sides shrink
    by ``ratio`` per level as well.
    """
    if not (0.0 < ratio < 1.0 / 3.0):
        raise NonSummable(f"ratio {ratio}: 3^k articulation edges of length ratio^k do not sum")
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")

    def side(n: int) -> float:
        return eps0 * ratio ** (n + 1) / (1.0 - 2.0 * ratio)

    def step(n: int, g: MetricGraph) -> RefinementStep:
        s_new, art = side(n + 1), eps0 * ratio ** (n + 1)
        moves: List[Any] = []
        declare: List[int] = []
        nxt = g.next_edge_id
        for w in _words(n):
            for i, j in ((0, 1), (0, 2), (1, 2)):
                a, b = gasket_corner(w, i), gasket_corner(w, j)
                (eid,) = g.edges_between(a, b)
                names = (("g", w, i, j), ("g", w, j, i))
                sub, mid = _split3(g.edge(eid), a, (s_new, art, s_new), names, range(nxt, nxt + 4))
                nxt += 4
                moves.extend(sub)
                declare.append(mid)
            for j in range(3):
                x, y = [gasket_corner(w + str(j), i) for i in range(3) if i != j]
                moves.append(AddEdge(x, y, s_new, nxt))
                nxt += 1
        return RefinementStep(tuple(moves), tuple(declare))

    q = 3.0 * ratio

    def tail(n: int) -> float:
        return eps0 * q ** (n + 1) * (1.0 / (1.0 - q) - 1.0 / (1.0 - 2.0 * ratio))

    corners = [gasket_corner("", i) for i in range(3)]
    s0 = side(0)
    g0 = build(corners, [(0, corners[0], corners[1], s0), (1, corners[0], corners[2], s0), (2, corners[1], corners[2], s0)])
    refs = {"H1": (eps0 * q / (1.0 - q), "closed-form")}
    return RefinementSequence(
        g0, step, tail=tail, reference=refs, family="gasket_edges", params={"eps0": eps0, "ratio": ratio}
    )


def gasket_length(n: int, eps0: float = 1.0, ratio: float = 0.25) -> float:
    q = 3.0 * ratio
    return eps0 * (math.fsum(q**k for k in range(1, n + 1)) + q ** (n + 1) / (1.0 - 2.0 * ratio))


# -- dumbbell ----------------------------------------------------------------------


def dumbbell() -> RefinementSequence:
    """Path v0-v1-v2-v3 of unit edges plus a second unit edge v1-v2 (id 3)."""
    g = build(
        ["v0", "v1", "v2", "v3"],
        [(0, "v0", "v1", 1.0), (1, "v1", "v2", 1.0), (2, "v2", "v3", 1.0), (3, "v1", "v2", 1.0)],
    )
    refs = {"H1": (4.0, "closed-form"), "diam": (3.0, "closed-form"), "R_v0_v3": (2.5, "closed-form")}
    return RefinementSequence(g, None, declared=(3, 0, 1, 2), tail=lambda n: 0.0, reference=refs, family="dumbbell")


def constant(g: MetricGraph, declared: Optional[Sequence[int]] = None) -> RefinementSequence:
    """The constant sequence G_n = g; all edges declared in id order by default."""
    decl = tuple(sorted(g.edge_ids)) if declared is None else tuple(declared)
    return RefinementSequence(g, None, declared=decl, tail=lambda n: 0.0, family="custom")


def from_spec(spec: SpaceSpec) -> RefinementSequence:
    p = dict(spec.params)
    if spec.family == "hawaiian":
        if "lengths" in p:
            return hawaiian(lengths=p["lengths"])
        return hawaiian(float(p.get("first", 1.0)), float(p.get("ratio", 0.5)))
    if spec.family == "fat_cantor":
        return fat_cantor(p.get("depth"))
    if spec.family == "gasket_edges":
        return gasket_edges(float(p.get("eps0", 1.0)), float(p.get("ratio", 0.25)))
    if spec.family == "dumbbell":
        return dumbbell()
    raise ValueError("custom spaces carry a graph document, not parameters")


def by_name(name: str, **params) -> RefinementSequence:
    return from_spec(SpaceSpec(name, params))
