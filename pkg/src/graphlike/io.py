"""Interchange documents for graphs, decompositions and fixture specs.

Documents are JSON. Vertex ids may be integers, strings or tuples of those;
tuples travel as JSON arrays and are turned back into tuples on load. Edge
lengths are written with 17 significant digits so a round trip is exact.
Graph documents put one edge per line to keep diffs readable.
"""

from __future__ import annotations

import json
import math
from typing import Any, Dict, Iterable, List, TextIO, Union

from .core import Edge, EdgePoint, MetricGraph, Vertex
from .decomp import Decomposition
from .spaces import SpaceSpec

__all__ = [
    "decode_id",
    "decomposition_to_doc",
    "dump_graph",
    "dumps_graph",
    "encode_id",
    "graph_from_doc",
    "graph_to_doc",
    "load_document",
    "loads_graph",
    "parse_point",
]


def encode_id(v: Any) -> Any:
    if isinstance(v, tuple):
        return [encode_id(x) for x in v]
    if isinstance(v, (bool, float)) or not isinstance(v, (int, str)):
        raise TypeError(f"vertex id {v!r} has no interchange form")
    return v


def decode_id(v: Any) -> Any:
    if isinstance(v, list):
        return tuple(decode_id(x) for x in v)
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return v
    raise ValueError(f"malformed vertex id {v!r}")


def _num(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite length {x!r}")
    return f"{x:.16e}"


def graph_to_doc(g: MetricGraph) -> Dict[str, Any]:
    return {
        "kind": "graph",
        "vertices": [encode_id(v) for v in g.vertices],
        "edges": [{"id": e.id, "u": encode_id(e.u), "v": encode_id(e.v), "len": e.length} for e in g.edges],
    }


_GRAPH_KEYS = {"kind", "vertices", "edges"}
_EDGE_KEYS = {"id", "u", "v", "len"}


def graph_from_doc(doc: Dict[str, Any]) -> MetricGraph:
    extra = set(doc) - _GRAPH_KEYS
    if extra:
        raise ValueError(f"unknown graph fields {sorted(extra)}")
    if doc.get("kind", "graph") != "graph":
        raise ValueError(f"document kind {doc.get('kind')!r} is not a graph")
    edges = []
    for item in doc.get("edges", []):
        if set(item) != _EDGE_KEYS:
            raise ValueError(f"edge record needs exactly {sorted(_EDGE_KEYS)}, got {sorted(item)}")
        edges.append(Edge(int(item["id"]), decode_id(item["u"]), decode_id(item["v"]), float(item["len"])))
    return MetricGraph([decode_id(v) for v in doc.get("vertices", [])], edges)


def dumps_graph(g: MetricGraph) -> str:
    verts = json.dumps([encode_id(v) for v in g.vertices])
    lines = [
        '    {"id": %d, "u": %s, "v": %s, "len": %s}' % (e.id, json.dumps(encode_id(e.u)), json.dumps(encode_id(e.v)), _num(e.length))
        for e in g.edges
    ]
    body = ",\n".join(lines)
    edges = "[\n" + body + "\n  ]" if lines else "[]"
    return '{\n  "kind": "graph",\n  "vertices": %s,\n  "edges": %s\n}\n' % (verts, edges)


def dump_graph(g: MetricGraph, fh: TextIO) -> None:
    fh.write(dumps_graph(g))


def loads_graph(text: str) -> MetricGraph:
    return graph_from_doc(json.loads(text))


def decomposition_to_doc(dec: Decomposition) -> Dict[str, Any]:
    doc = dec.to_dict()
    for f in doc["pseudo_edges"]:
        f["endpoints"] = [encode_id(v) for v in f["endpoints"]]
    doc["kind"] = "decomposition"
    doc["violations"] = dec.violations()
    return doc


def load_document(text: str) -> Union[MetricGraph, SpaceSpec]:
    """A graph document or a fixture spec document (``family`` + ``params``)."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("document must be a JSON object")
    if "family" in doc:
        extra = set(doc) - {"family", "params", "references"}
        if extra:
            raise ValueError(f"unknown spec fields {sorted(extra)}")
        return SpaceSpec.from_dict(doc)
    return graph_from_doc(doc)


def parse_point(token: str) -> Any:
    """Command-line point syntax.

    ``e<id>@<fraction>`` names an interior edge point; anything else is read
    as JSON when possible (so ``3`` and ``["L",1,0]`` work) and taken as a
    string id otherwise.
    """
    if token.startswith("e") and "@" in token:
        eid, frac = token[1:].split("@", 1)
        try:
            return EdgePoint(int(eid), float(frac))
        except ValueError:
            pass
    try:
        return decode_id(json.loads(token))
    except ValueError:
        return token
