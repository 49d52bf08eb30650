"""Graph documents: JSON parsing/emission and DOT export.

The on-disk format is a single JSON object:

    {
      "d": 2,
      "vertices": [{"id": 1, "role": "input"}, ...],
      "edges": [{"i": 1, "j": 3, "weight": 1}, ...],
      "strategy": {"1": "x", "2": "z", "3": "y:1", "4": "graph:basis.json"}
    }

ids are integers, i == j declares a self-link, weights lie in 1..d-1 and
"strategy" (optional) assigns a basis tag to every measuring vertex.
Emission uses a fixed key order and sorted vertices/edges so identical
graphs serialize to identical bytes.
"""

from __future__ import annotations

import json
import os
from typing import Mapping

from . import field, pipeline
from .errors import ParseError
from .graphs import Role, WeightedGraph

_ROLES = {r.value for r in Role}


def _need(obj, key, kind, where):
    if key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    val = obj[key]
    if kind is int and isinstance(val, bool) or not isinstance(val, kind):
        raise ParseError(f"{where}.{key}: expected {kind.__name__}, got {val!r}")
    return val


def parse_document(text: str, base_dir: str | None = None):
    """Parse a graph document.

    Returns (graph, strategy) where strategy is None when the document has
    no strategy section.  ParseError messages carry the offending field.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object")
    unknown = set(doc) - {"d", "vertices", "edges", "strategy"}
    if unknown:
        raise ParseError(f"unknown fields {sorted(unknown)}")
    d = _need(doc, "d", int, "document")
    if not field.is_prime(d):
        raise ParseError(f"document.d: modulus {d} is not prime")
    vertices = _need(doc, "vertices", list, "document")
    roles: dict[int, Role] = {}
    for idx, entry in enumerate(vertices):
        where = f"vertices[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        vid = _need(entry, "id", int, where)
        role = _need(entry, "role", str, where)
        if role not in _ROLES:
            raise ParseError(f"{where}.role: unknown role {role!r}")
        if set(entry) - {"id", "role"}:
            raise ParseError(f"{where}: unknown fields {sorted(set(entry) - {'id', 'role'})}")
        if vid in roles:
            raise ParseError(f"{where}.id: duplicate vertex id {vid}")
        roles[vid] = Role(role)
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise ParseError("document.edges: expected a list")
    triples = []
    seen = set()
    for idx, entry in enumerate(edges):
        where = f"edges[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        i = _need(entry, "i", int, where)
        j = _need(entry, "j", int, where)
        w = _need(entry, "weight", int, where)
        if set(entry) - {"i", "j", "weight"}:
            raise ParseError(f"{where}: unknown fields")
        for v in (i, j):
            if v not in roles:
                raise ParseError(f"{where}: unknown vertex {v}")
        if not 1 <= w <= d - 1:
            raise ParseError(f"{where}.weight: {w} outside 1..{d-1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(f"{where}: duplicate edge {key}")
        seen.add(key)
        triples.append((i, j, w))
    graph = WeightedGraph.from_edges(d, roles, triples)
    strategy = None
    if "strategy" in doc:
        strategy = _parse_strategy(doc["strategy"], graph, base_dir)
    return graph, strategy


def _parse_strategy(raw, graph: WeightedGraph, base_dir: str | None):
    if not isinstance(raw, dict):
        raise ParseError("document.strategy: expected an object")
    measuring = set(graph.measuring)
    out: dict[int, object] = {}
    for key, tag in raw.items():
        where = f"strategy[{key!r}]"
        try:
            vid = int(key)
        except ValueError:
            raise ParseError(f"{where}: key is not a vertex id") from None
        if vid not in measuring:
            raise ParseError(f"{where}: vertex {vid} is not a measuring vertex")
        if not isinstance(tag, str):
            raise ParseError(f"{where}: expected a basis tag string")
        if tag == "x":
            out[vid] = pipeline.XBasis()
        elif tag == "z":
            out[vid] = pipeline.ZBasis()
        elif tag == "y":
            out[vid] = pipeline.YBasis(1)
        elif tag.startswith("y:"):
            try:
                weight = int(tag[2:])
            except ValueError:
                raise ParseError(f"{where}: bad self-link weight in {tag!r}") from None
            if not 0 <= weight <= graph.d - 1:
                raise ParseError(f"{where}: weight {weight} outside 0..{graph.d-1}")
            out[vid] = pipeline.YBasis(weight)
        elif tag.startswith("graph:"):
            path = tag[len("graph:"):]
            if base_dir is not None:
                path = os.path.join(base_dir, path)
            try:
                with open(path, encoding="utf-8") as fh:
                    sub, sub_strategy = parse_document(fh.read(), os.path.dirname(path))
            except OSError as exc:
                raise ParseError(f"{where}: cannot read {path}: {exc}") from exc
            if sub_strategy is not None:
                raise ParseError(f"{where}: measurement graphs may not carry strategies")
            out[vid] = pipeline.GraphBasis(sub)
        else:
            raise ParseError(f"{where}: unknown basis tag {tag!r}")
    missing = measuring - set(out)
    if missing:
        raise ParseError(f"strategy: measuring vertices {sorted(missing)} have no basis")
    return out


def load(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read(), os.path.dirname(os.path.abspath(path)))


def document_dict(g: WeightedGraph, strategy: Mapping[int, object] | None = None) -> dict:
    doc: dict = {
        "d": g.d,
        "vertices": [{"id": v, "role": g.role(v).value} for v in g.vertices],
        "edges": [],
    }
    for a_idx, i in enumerate(g.vertices):
        for b_idx in range(a_idx, len(g.vertices)):
            w = int(g.adjacency[a_idx, b_idx])
            if w:
                doc["edges"].append({"i": i, "j": g.vertices[b_idx], "weight": w})
    if strategy is not None:
        tags = {}
        for v in sorted(strategy):
            basis = strategy[v]
            if isinstance(basis, pipeline.XBasis):
                tags[str(v)] = "x"
            elif isinstance(basis, pipeline.ZBasis):
                tags[str(v)] = "z"
            elif isinstance(basis, pipeline.YBasis):
                tags[str(v)] = "y" if basis.weight == 1 else f"y:{basis.weight}"
            else:
                raise ValueError("graph-basis strategies reference external files "
                                 "and cannot be re-emitted")
        doc["strategy"] = tags
    return doc


def emit_document(g: WeightedGraph, strategy=None) -> str:
    """Serialize a graph (byte-stable: fixed key order, sorted entries)."""
    return json.dumps(document_dict(g, strategy), indent=2) + "\n"


def trace_document(trace: pipeline.ReductionTrace) -> dict:
    steps = []
    for step in trace.steps:
        steps.append({
            "removed": list(step.removed),
            "case": step.case,
            "fourier": None if step.fourier is None else {
                "source": step.fourier.source,
                "partner": step.fourier.partner,
                "weight": step.fourier.weight,
            },
            "graph": document_dict(step.graph_after),
            "loops": [int(x) for x in step.loops_after],
        })
    return {
        "initial": document_dict(trace.initial),
        "initial_loops": [int(x) for x in trace.initial_loops],
        "steps": steps,
        "final": document_dict(trace.final),
    }


_DOT_SHAPES = {
    Role.INPUT: "invtriangle",
    Role.OUTPUT: "doublecircle",
    Role.MEASURING: "circle",
    Role.AUXILIARY: "diamond",
    Role.SYNDROME: "square",
}


def export_dot(g: WeightedGraph) -> str:
    """Undirected DOT rendering with role-coded node shapes."""
    lines = ["graph cluster {", "  node [fontsize=10];"]
    for v in g.vertices:
        lines.append(f'  {v} [shape={_DOT_SHAPES[g.role(v)]}, label="{v}"];')
    for a_idx, i in enumerate(g.vertices):
        for b_idx in range(a_idx, len(g.vertices)):
            w = int(g.adjacency[a_idx, b_idx])
            if w:
                lines.append(f'  {i} -- {g.vertices[b_idx]} [label="{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
