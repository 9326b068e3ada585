"""Graph ingestion and serialization.

Two interchange formats:

* a JSON document ("format_version": 1) carrying vertices with measures and
  edges with weights in one file, and
* a plain edge list (one ``u v weight`` per line, ``#`` comments) with a
  companion measure file (``v m`` per line), which interoperates with common
  graph corpora.

Each edge must be declared once per unordered pair; conflicting symmetric
entries are rejected at parse time.
"""

from __future__ import annotations

import json

from .graphs import WeightedGraph, validate

__all__ = ["GraphFormatError", "parse_graph", "parse_edge_list", "serialize_graph"]

FORMAT_VERSION = 1


class GraphFormatError(ValueError):
    """Malformed graph input; the message carries the line or field."""


def parse_graph(
    text: str,
    measures: str | None = None,
    require_valid: bool = True,
) -> WeightedGraph:
    """Parse either interchange format into a WeightedGraph.

    JSON input is detected by a leading ``{``; anything else is treated as
    an edge list, which needs the companion ``measures`` text.  With
    ``require_valid`` (the default) structural violations raise; pass False
    to obtain the raw graph for diagnostic validation.
    """
    if text.lstrip().startswith("{"):
        g = _parse_document(text)
    else:
        if measures is None:
            raise GraphFormatError("edge-list input requires a measure file")
        g = parse_edge_list(text, measures)
    if require_valid:
        violations = validate(g)
        if violations:
            raise GraphFormatError("invalid graph: " + "; ".join(violations))
    return g


def _parse_document(text: str) -> WeightedGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"JSON parse error: {exc}") from None
    if not isinstance(doc, dict):
        raise GraphFormatError("top-level JSON value must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise GraphFormatError(
            f"format_version: expected {FORMAT_VERSION}, got {version!r}"
        )
    raw_vertices = doc.get("vertices")
    raw_edges = doc.get("edges")
    if not isinstance(raw_vertices, list):
        raise GraphFormatError("vertices: expected a list")
    if not isinstance(raw_edges, list):
        raise GraphFormatError("edges: expected a list")

    vertices: list[str] = []
    measure: dict[str, float] = {}
    for i, entry in enumerate(raw_vertices):
        loc = f"vertices[{i}]"
        if not isinstance(entry, dict) or "id" not in entry or "measure" not in entry:
            raise GraphFormatError(f"{loc}: expected an object with id and measure")
        vid = entry["id"]
        if not isinstance(vid, str):
            raise GraphFormatError(f"{loc}.id: expected a string")
        if vid in measure:
            raise GraphFormatError(f"{loc}: duplicate vertex id {vid!r}")
        try:
            measure[vid] = float(entry["measure"])
        except (TypeError, ValueError):
            raise GraphFormatError(f"{loc}.measure: expected a number") from None
        vertices.append(vid)

    weights: dict[tuple[str, str], float] = {}
    seen_pairs: set[frozenset[str]] = set()
    for i, entry in enumerate(raw_edges):
        loc = f"edges[{i}]"
        if not isinstance(entry, dict) or not {"u", "v", "weight"} <= entry.keys():
            raise GraphFormatError(f"{loc}: expected an object with u, v and weight")
        u, v = entry["u"], entry["v"]
        if not isinstance(u, str) or not isinstance(v, str):
            raise GraphFormatError(f"{loc}: endpoints must be strings")
        try:
            w = float(entry["weight"])
        except (TypeError, ValueError):
            raise GraphFormatError(f"{loc}.weight: expected a number") from None
        pair = frozenset((u, v))
        if pair in seen_pairs:
            raise GraphFormatError(
                f"{loc}: conflicting symmetric entries for edge ({u!r}, {v!r})"
            )
        seen_pairs.add(pair)
        weights[(u, v)] = w

    return WeightedGraph(vertices, weights, measure)


def parse_edge_list(edge_text: str, measure_text: str) -> WeightedGraph:
    """Parse ``u v weight`` lines plus ``v m`` measure lines."""
    measure: dict[str, float] = {}
    vertices: list[str] = []
    for lineno, line in enumerate(measure_text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise GraphFormatError(f"measures line {lineno}: expected 'vertex measure'")
        vid, raw = parts
        if vid in measure:
            raise GraphFormatError(f"measures line {lineno}: duplicate measure for {vid!r}")
        try:
            measure[vid] = float(raw)
        except ValueError:
            raise GraphFormatError(f"measures line {lineno}: bad measure {raw!r}") from None
        vertices.append(vid)

    weights: dict[tuple[str, str], float] = {}
    seen_pairs: set[frozenset[str]] = set()
    for lineno, line in enumerate(edge_text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise GraphFormatError(f"edges line {lineno}: expected 'u v weight'")
        u, v, raw = parts
        try:
            w = float(raw)
        except ValueError:
            raise GraphFormatError(f"edges line {lineno}: bad weight {raw!r}") from None
        pair = frozenset((u, v))
        if pair in seen_pairs:
            raise GraphFormatError(
                f"edges line {lineno}: conflicting symmetric entries for ({u!r}, {v!r})"
            )
        seen_pairs.add(pair)
        weights[(u, v)] = w
        for endpoint in (u, v):
            if endpoint not in measure:
                raise GraphFormatError(
                    f"edges line {lineno}: no measure declared for vertex {endpoint!r}"
                )

    return WeightedGraph(vertices, weights, measure)


def serialize_graph(g: WeightedGraph) -> str:
    """Emit the JSON document; floats round-trip exactly."""
    doc = {
        "format_version": FORMAT_VERSION,
        "vertices": [{"id": v, "measure": g.measure(v)} for v in g.vertices],
        "edges": [{"u": u, "v": v, "weight": w} for u, v, w in g.edges()],
    }
    return json.dumps(doc, indent=2)
