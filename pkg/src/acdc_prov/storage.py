"""On-disk formats: graph documents, environment files, verdict reports.

A graph document is JSON of the shape::

    {"version": "acdc-prov/1",
     "vertices": [{"id": "...", "kind": "...", "attrs": {...}}, ...],
     "edges": [{"src": "...", "dst": "...", "label": "..."}, ...]}

with kinds in lowercase snake case and labels matching the six relation
labels. ``save_graph`` is canonical -- vertices sorted by id, edges by
(src, dst, label), two-space indentation, UTF-8 -- so equal graphs always
serialise to identical bytes, loading a saved graph returns an equal
graph, and re-saving a loaded document canonicalises it.

An environment file is JSON of the shape
``{"constants": {name: vertex id}, "sets": {name: [vertex ids]}}``.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .graph import (
    GraphError,
    CycleIntroducedError,
    LabeledEdge,
    ProvGraph,
    RelationLabel,
    TypeViolationError,
    Vertex,
    VertexKind,
)
from .evaluator import Verdict
from .policy import Environment

__all__ = [
    "FORMAT_VERSION",
    "load_graph",
    "load_graph_unchecked",
    "save_graph",
    "load_environment",
    "save_environment",
    "verdict_to_dict",
    "MalformedDocumentError",
    "UnknownKindError",
    "UnknownLabelError",
]

FORMAT_VERSION = "acdc-prov/1"

_KIND_NAMES: Mapping[str, VertexKind] = {k.value: k for k in VertexKind}
_LABEL_NAMES: Mapping[str, RelationLabel] = {l.value: l for l in RelationLabel}


class MalformedDocumentError(Exception):
    """The document is not a well-formed graph or environment file."""


class UnknownKindError(MalformedDocumentError):
    """A vertex record names a kind outside the six vertex kinds."""


class UnknownLabelError(MalformedDocumentError):
    """An edge record names a label outside the six relation labels."""


def _decode(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocumentError(f"not valid UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(
            f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from None


def _parse_graph_document(
    data: bytes | str,
) -> tuple[list[tuple[str, VertexKind, dict[str, str]]], list[tuple[str, str, RelationLabel]]]:
    doc = _decode(data)
    if not isinstance(doc, dict):
        raise MalformedDocumentError("top-level value must be an object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise MalformedDocumentError(
            f"unsupported version {version!r}; expected {FORMAT_VERSION!r}"
        )
    raw_vertices = doc.get("vertices")
    if not isinstance(raw_vertices, list):
        raise MalformedDocumentError("'vertices' must be a list")
    raw_edges = doc.get("edges")
    if not isinstance(raw_edges, list):
        raise MalformedDocumentError("'edges' must be a list")

    vertices: list[tuple[str, VertexKind, dict[str, str]]] = []
    seen_ids: set[str] = set()
    for i, record in enumerate(raw_vertices):
        where = f"vertices[{i}]"
        if not isinstance(record, dict):
            raise MalformedDocumentError(f"{where}: must be an object")
        vid = record.get("id")
        if not isinstance(vid, str) or not vid:
            raise MalformedDocumentError(f"{where}: 'id' must be a non-empty string")
        kind_name = record.get("kind")
        if not isinstance(kind_name, str):
            raise MalformedDocumentError(f"{where}: 'kind' must be a string")
        kind = _KIND_NAMES.get(kind_name)
        if kind is None:
            raise UnknownKindError(f"{where}: unknown kind {kind_name!r}")
        attrs = record.get("attrs", {})
        if not isinstance(attrs, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in attrs.items()
        ):
            raise MalformedDocumentError(f"{where}: 'attrs' must map strings to strings")
        if vid in seen_ids:
            raise MalformedDocumentError(f"{where}: duplicate vertex id {vid!r}")
        seen_ids.add(vid)
        vertices.append((vid, kind, dict(attrs)))

    edges: list[tuple[str, str, RelationLabel]] = []
    seen_edges: set[tuple[str, str, str]] = set()
    for i, record in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(record, dict):
            raise MalformedDocumentError(f"{where}: must be an object")
        src = record.get("src")
        dst = record.get("dst")
        if not isinstance(src, str) or not isinstance(dst, str):
            raise MalformedDocumentError(f"{where}: 'src' and 'dst' must be strings")
        label_name = record.get("label")
        if not isinstance(label_name, str):
            raise MalformedDocumentError(f"{where}: 'label' must be a string")
        label = _LABEL_NAMES.get(label_name)
        if label is None:
            raise UnknownLabelError(f"{where}: unknown label {label_name!r}")
        triple = (src, dst, label_name)
        if triple in seen_edges:
            raise MalformedDocumentError(
                f"{where}: duplicate edge {src} -> {dst} ({label_name})"
            )
        seen_edges.add(triple)
        edges.append((src, dst, label))

    return vertices, edges


def _with_index(exc: GraphError, where: str) -> GraphError:
    message = f"{where}: {exc}"
    if isinstance(exc, TypeViolationError):
        return TypeViolationError(message, exc.violation)
    if isinstance(exc, CycleIntroducedError):
        return CycleIntroducedError(message, exc.cycle)
    return type(exc)(message)


def load_graph(data: bytes | str) -> ProvGraph:
    """Parse a graph document and construct the graph through the checked
    insertion operations; the result is always well typed and acyclic.

    Construction errors are re-raised with the offending record index.
    """
    vertices, edges = _parse_graph_document(data)
    graph = ProvGraph()
    for i, (vid, kind, attrs) in enumerate(vertices):
        try:
            graph = graph.add_vertex(vid, kind, attrs)
        except GraphError as exc:
            raise _with_index(exc, f"vertices[{i}]") from None
    for i, (src, dst, label) in enumerate(edges):
        try:
            graph = graph.add_edge(src, dst, label)
        except GraphError as exc:
            raise _with_index(exc, f"edges[{i}]") from None
    return graph


def load_graph_unchecked(data: bytes | str) -> ProvGraph:
    """Parse a graph document without enforcing typing or acyclicity.

    Edge endpoints must still exist. This is the loading path for
    diagnostic validation, where the point is to report violations rather
    than refuse the file.
    """
    vertex_records, edge_records = _parse_graph_document(data)
    vertices = {vid: Vertex(vid, kind, attrs) for vid, kind, attrs in vertex_records}
    edges = set()
    for i, (src, dst, label) in enumerate(edge_records):
        for endpoint in (src, dst):
            if endpoint not in vertices:
                raise MalformedDocumentError(
                    f"edges[{i}]: endpoint {endpoint!r} is not a declared vertex"
                )
        edges.add(LabeledEdge(src, dst, label))
    return ProvGraph(vertices, frozenset(edges))


def save_graph(graph: ProvGraph) -> bytes:
    """Serialise a graph to canonical UTF-8 document bytes."""
    vertices = []
    for vid in sorted(graph.vertices):
        vertex = graph.vertices[vid]
        record: dict[str, Any] = {"id": vid, "kind": vertex.kind.value}
        if vertex.attrs:
            record["attrs"] = {k: vertex.attrs[k] for k in sorted(vertex.attrs)}
        vertices.append(record)
    edges = [
        {"src": e.src, "dst": e.dst, "label": e.label.value}
        for e in sorted(graph.edges, key=lambda e: (e.src, e.dst, e.label.value))
    ]
    doc = {"version": FORMAT_VERSION, "vertices": vertices, "edges": edges}
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_environment(data: bytes | str) -> Environment:
    """Parse an environment file into an Environment."""
    doc = _decode(data)
    if not isinstance(doc, dict):
        raise MalformedDocumentError("top-level value must be an object")
    constants = doc.get("constants", {})
    if not isinstance(constants, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in constants.items()
    ):
        raise MalformedDocumentError("'constants' must map strings to strings")
    raw_sets = doc.get("sets", {})
    if not isinstance(raw_sets, dict):
        raise MalformedDocumentError("'sets' must be an object")
    sets: dict[str, frozenset[str]] = {}
    for name, members in raw_sets.items():
        if not isinstance(members, list) or not all(
            isinstance(m, str) for m in members
        ):
            raise MalformedDocumentError(f"sets[{name!r}]: must be a list of strings")
        sets[name] = frozenset(members)
    return Environment(constants=dict(constants), sets=sets)


def save_environment(env: Environment) -> bytes:
    """Serialise an environment to canonical UTF-8 bytes."""
    doc = {
        "constants": {k: env.constants[k] for k in sorted(env.constants)},
        "sets": {k: sorted(env.sets[k]) for k in sorted(env.sets)},
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def verdict_to_dict(verdict: Verdict) -> dict[str, Any]:
    """Flatten a Verdict into JSON-serialisable primitives."""
    return {
        "satisfied": verdict.satisfied,
        "witness": dict(verdict.witness) if verdict.witness is not None else None,
        "counterexample": (
            dict(verdict.counterexample)
            if verdict.counterexample is not None
            else None
        ),
        "diagnostics": list(verdict.diagnostics),
    }
