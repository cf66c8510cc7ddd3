"""Typed provenance graphs.

A provenance record is a finite directed acyclic graph. Vertices carry one
of six kinds: three entity refinements (keys, contracts, data), two agent
refinements (nodes acting in the system, accounts they act for), and
activities. Edges carry one of six causal relation labels, and each label
admits only a fixed set of (source kind, destination kind) combinations --
see ``TYPING_RULES``.

Graphs are immutable values: every mutating operation returns a new graph
and never touches the receiver. Comparison and lookup of vertices are by
id; optional ``attrs`` are display metadata with no semantics.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping

__all__ = [
    "VertexKind",
    "Sort",
    "RelationLabel",
    "Vertex",
    "LabeledEdge",
    "TypeViolation",
    "Cycle",
    "ProvGraph",
    "TYPING_RULES",
    "SORT_KINDS",
    "union",
    "GraphError",
    "DuplicateIdError",
    "MissingVertexError",
    "TypeViolationError",
    "CycleIntroducedError",
]


class VertexKind(Enum):
    """The six vertex kinds of a provenance graph."""

    KEY_ENTITY = "key_entity"
    CONTRACT_ENTITY = "contract_entity"
    DATA_ENTITY = "data_entity"
    NODE_AGENT = "node_agent"
    ACCOUNT_AGENT = "account_agent"
    ACTIVITY = "activity"


class Sort(Enum):
    """Quantification sorts: the six kinds plus their natural unions."""

    KEY_ENTITY = "key_entity"
    CONTRACT_ENTITY = "contract_entity"
    DATA_ENTITY = "data_entity"
    NODE_AGENT = "node_agent"
    ACCOUNT_AGENT = "account_agent"
    ACTIVITY = "activity"
    ENTITY = "entity"
    AGENT = "agent"
    VERTEX = "vertex"

    def admits(self, kind: VertexKind) -> bool:
        """Return True when a vertex of ``kind`` belongs to this sort."""
        return kind in SORT_KINDS[self]


class RelationLabel(Enum):
    """The six causal relation labels."""

    USED = "Used"
    WAS_DERIVED_FROM = "WasDerivedFrom"
    WAS_ATTRIBUTED_TO = "WasAttributedTo"
    ACTED_ON_BEHALF_OF = "ActedOnBehalfOf"
    WAS_ASSOCIATED_WITH = "WasAssociatedWith"
    WAS_GENERATED_BY = "WasGeneratedBy"


_ENTITY_KINDS = (
    VertexKind.KEY_ENTITY,
    VertexKind.CONTRACT_ENTITY,
    VertexKind.DATA_ENTITY,
)
_AGENT_KINDS = (VertexKind.NODE_AGENT, VertexKind.ACCOUNT_AGENT)

SORT_KINDS: Mapping[Sort, frozenset[VertexKind]] = {
    Sort.KEY_ENTITY: frozenset({VertexKind.KEY_ENTITY}),
    Sort.CONTRACT_ENTITY: frozenset({VertexKind.CONTRACT_ENTITY}),
    Sort.DATA_ENTITY: frozenset({VertexKind.DATA_ENTITY}),
    Sort.NODE_AGENT: frozenset({VertexKind.NODE_AGENT}),
    Sort.ACCOUNT_AGENT: frozenset({VertexKind.ACCOUNT_AGENT}),
    Sort.ACTIVITY: frozenset({VertexKind.ACTIVITY}),
    Sort.ENTITY: frozenset(_ENTITY_KINDS),
    Sort.AGENT: frozenset(_AGENT_KINDS),
    Sort.VERTEX: frozenset(VertexKind),
}


def _pairs(
    sources: tuple[VertexKind, ...], targets: tuple[VertexKind, ...]
) -> frozenset[tuple[VertexKind, VertexKind]]:
    return frozenset((s, t) for s in sources for t in targets)


# Which (source kind, destination kind) combinations each relation admits.
# Everything outside this table is a typing violation.
TYPING_RULES: Mapping[RelationLabel, frozenset[tuple[VertexKind, VertexKind]]] = {
    RelationLabel.WAS_ATTRIBUTED_TO: _pairs(_ENTITY_KINDS, _AGENT_KINDS),
    RelationLabel.WAS_DERIVED_FROM: _pairs(_ENTITY_KINDS, _ENTITY_KINDS),
    RelationLabel.USED: _pairs((VertexKind.ACTIVITY,), _ENTITY_KINDS),
    RelationLabel.ACTED_ON_BEHALF_OF: _pairs(
        (VertexKind.NODE_AGENT,), (VertexKind.ACCOUNT_AGENT,)
    ),
    RelationLabel.WAS_ASSOCIATED_WITH: _pairs(
        (VertexKind.ACTIVITY,), (VertexKind.NODE_AGENT,)
    ),
    RelationLabel.WAS_GENERATED_BY: _pairs(_ENTITY_KINDS, (VertexKind.ACTIVITY,)),
}


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


class GraphError(Exception):
    """Base class for graph construction and validation errors."""


class DuplicateIdError(GraphError):
    """A vertex id is already taken by a vertex of a different kind."""


class MissingVertexError(GraphError):
    """An operation referenced a vertex id that is not in the graph."""


class TypeViolationError(GraphError):
    """An edge insertion violated the relation typing table."""

    def __init__(self, message: str, violation: TypeViolation):
        super().__init__(message)
        self.violation = violation


class CycleIntroducedError(GraphError):
    """An edge insertion (or merge) would close a directed cycle."""

    def __init__(self, message: str, cycle: Cycle = ()):
        super().__init__(message)
        self.cycle = cycle


# ---------------------------------------------------------------------------
# values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Vertex:
    """A graph vertex: an id, a kind, and optional display attributes."""

    id: str
    kind: VertexKind
    attrs: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class LabeledEdge:
    """A directed edge ``src -> dst`` carrying a relation label."""

    src: str
    dst: str
    label: RelationLabel


@dataclass(frozen=True)
class TypeViolation:
    """A report that an edge's endpoint kinds are not admitted by its label."""

    src: str
    dst: str
    label: RelationLabel
    src_kind: VertexKind
    dst_kind: VertexKind

    def describe(self) -> str:
        allowed = sorted(
            f"{s.value} -> {t.value}" for s, t in TYPING_RULES[self.label]
        )
        return (
            f"{self.label.value} does not admit {self.src_kind.value} -> "
            f"{self.dst_kind.value} (edge {self.src} -> {self.dst}; allowed: "
            f"{', '.join(allowed)})"
        )


Cycle = tuple[str, ...]
"""A directed cycle, reported as the vertex-id sequence it passes through."""


@dataclass(frozen=True)
class ProvGraph:
    """An immutable typed provenance graph.

    Direct construction bypasses the insertion checks; graphs built through
    ``add_vertex``/``add_edge`` are always well typed and acyclic, and
    ``validate_typing``/``validate_acyclic`` re-check arbitrary instances.
    """

    vertices: Mapping[str, Vertex] = field(default_factory=dict)
    edges: frozenset[LabeledEdge] = field(default_factory=frozenset)

    # -- construction -------------------------------------------------------

    def add_vertex(
        self, vertex_id: str, kind: VertexKind, attrs: Mapping[str, str] | None = None
    ) -> ProvGraph:
        """Return a graph that also contains ``vertex_id`` of ``kind``.

        Re-adding an existing (id, kind) pair is a no-op; reusing an id for
        a different kind raises DuplicateIdError.
        """
        if not vertex_id:
            raise ValueError("vertex id must be a non-empty string")
        existing = self.vertices.get(vertex_id)
        if existing is not None:
            if existing.kind is kind:
                return self
            raise DuplicateIdError(
                f"vertex '{vertex_id}' already exists with kind "
                f"{existing.kind.value}, cannot re-add as {kind.value}"
            )
        vertices = dict(self.vertices)
        vertices[vertex_id] = Vertex(vertex_id, kind, dict(attrs or {}))
        return ProvGraph(vertices, self.edges)

    def add_edge(self, src: str, dst: str, label: RelationLabel) -> ProvGraph:
        """Return a graph that also contains the edge ``src -> dst`` (label).

        Both endpoints must exist, the endpoint kinds must be admitted by
        the label, and the edge must not close a directed cycle. Adding an
        edge that is already present is a no-op.
        """
        for vid in (src, dst):
            if vid not in self.vertices:
                raise MissingVertexError(f"edge endpoint '{vid}' is not in the graph")
        edge = LabeledEdge(src, dst, label)
        if edge in self.edges:
            return self
        src_kind = self.vertices[src].kind
        dst_kind = self.vertices[dst].kind
        if (src_kind, dst_kind) not in TYPING_RULES[label]:
            violation = TypeViolation(src, dst, label, src_kind, dst_kind)
            raise TypeViolationError(violation.describe(), violation)
        if src == dst:
            raise CycleIntroducedError(
                f"self-loop on '{src}' rejected: graphs must stay acyclic",
                cycle=(src,),
            )
        path = self._path(dst, src)
        if path is not None:
            raise CycleIntroducedError(
                f"edge {src} -> {dst} would close the cycle "
                f"{' -> '.join((src, *path))}",
                cycle=(src, *path[:-1]),
            )
        return ProvGraph(self.vertices, self.edges | {edge})

    def renamed(self, mapping: Mapping[str, str]) -> ProvGraph:
        """Return a copy with vertex ids rewritten through ``mapping``.

        Ids absent from the mapping are kept. The rewrite must not merge
        two vertices into one id.
        """
        def rewrite(vid: str) -> str:
            return mapping.get(vid, vid)

        vertices: dict[str, Vertex] = {}
        for vid, vertex in self.vertices.items():
            new_id = rewrite(vid)
            if not new_id:
                raise ValueError("vertex id must be a non-empty string")
            if new_id in vertices:
                raise DuplicateIdError(f"renaming maps two vertices onto '{new_id}'")
            vertices[new_id] = Vertex(new_id, vertex.kind, dict(vertex.attrs))
        edges = frozenset(
            LabeledEdge(rewrite(e.src), rewrite(e.dst), e.label) for e in self.edges
        )
        return ProvGraph(vertices, edges)

    # -- queries -------------------------------------------------------------

    def has_edge(self, src: str, dst: str, label: RelationLabel) -> bool:
        """Return True iff the labeled edge is present."""
        return LabeledEdge(src, dst, label) in self.edges

    def kind_of(self, vertex_id: str) -> VertexKind:
        """Return the kind of ``vertex_id`` (MissingVertexError if absent)."""
        vertex = self.vertices.get(vertex_id)
        if vertex is None:
            raise MissingVertexError(f"no vertex '{vertex_id}' in the graph")
        return vertex.kind

    def vertices_of_sort(self, sort: Sort) -> set[str]:
        """Return the ids of all vertices whose kind belongs to ``sort``."""
        kinds = SORT_KINDS[sort]
        return {vid for vid, v in self.vertices.items() if v.kind in kinds}

    def out_edges(
        self, src: str, label: RelationLabel | None = None
    ) -> Iterator[LabeledEdge]:
        """Yield edges leaving ``src`` (optionally restricted to ``label``)."""
        for edge in self.edges:
            if edge.src == src and (label is None or edge.label is label):
                yield edge

    def in_edges(
        self, dst: str, label: RelationLabel | None = None
    ) -> Iterator[LabeledEdge]:
        """Yield edges entering ``dst`` (optionally restricted to ``label``)."""
        for edge in self.edges:
            if edge.dst == dst and (label is None or edge.label is label):
                yield edge

    # -- validation ----------------------------------------------------------

    def validate_typing(self) -> list[TypeViolation]:
        """Return one TypeViolation per edge not admitted by its label."""
        violations = []
        for edge in sorted(self.edges, key=lambda e: (e.src, e.dst, e.label.value)):
            src_kind = self.vertices[edge.src].kind
            dst_kind = self.vertices[edge.dst].kind
            if (src_kind, dst_kind) not in TYPING_RULES[edge.label]:
                violations.append(
                    TypeViolation(edge.src, edge.dst, edge.label, src_kind, dst_kind)
                )
        return violations

    def validate_acyclic(self) -> list[Cycle]:
        """Return every directed cycle, one representative per strongly
        connected component, as a vertex-id sequence. Empty iff acyclic."""
        adjacency = {
            vid: sorted({e.dst for e in self.edges if e.src == vid})
            for vid in self.vertices
        }
        cycles: list[Cycle] = []
        for component in self._strongly_connected(adjacency):
            if len(component) == 1:
                vid = component[0]
                if vid in adjacency[vid]:
                    cycles.append((vid,))
                continue
            cycles.append(self._component_cycle(component, adjacency))
        cycles.sort(key=lambda c: (min(c), len(c), c))
        return cycles

    def _strongly_connected(
        self, adjacency: Mapping[str, list[str]]
    ) -> list[list[str]]:
        index: dict[str, int] = {}
        low: dict[str, int] = {}
        on_stack: set[str] = set()
        stack: list[str] = []
        components: list[list[str]] = []
        counter = 0
        for root in sorted(self.vertices):
            if root in index:
                continue
            work: list[tuple[str, Iterator[str]]] = [(root, iter(adjacency[root]))]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack.add(root)
            while work:
                vid, neighbours = work[-1]
                pushed = False
                for nxt in neighbours:
                    if nxt not in index:
                        index[nxt] = low[nxt] = counter
                        counter += 1
                        stack.append(nxt)
                        on_stack.add(nxt)
                        work.append((nxt, iter(adjacency[nxt])))
                        pushed = True
                        break
                    if nxt in on_stack:
                        low[vid] = min(low[vid], index[nxt])
                if pushed:
                    continue
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[vid])
                if low[vid] == index[vid]:
                    component = []
                    while True:
                        member = stack.pop()
                        on_stack.discard(member)
                        component.append(member)
                        if member == vid:
                            break
                    components.append(component)
        return components

    @staticmethod
    def _component_cycle(
        component: list[str], adjacency: Mapping[str, list[str]]
    ) -> Cycle:
        # Shortest closed walk through the component's smallest id.
        members = set(component)
        start = min(component)
        previous: dict[str, str | None] = {start: None}
        queue: deque[str] = deque([start])
        tail = start
        while queue:
            vid = queue.popleft()
            finished = False
            for nxt in adjacency[vid]:
                if nxt not in members:
                    continue
                if nxt == start:
                    tail = vid
                    finished = True
                    break
                if nxt not in previous:
                    previous[nxt] = vid
                    queue.append(nxt)
            if finished:
                break
        sequence: list[str] = []
        node: str | None = tail
        while node is not None:
            sequence.append(node)
            node = previous[node]
        sequence.reverse()
        return tuple(sequence)

    def _path(self, origin: str, target: str) -> tuple[str, ...] | None:
        """Shortest directed path origin..target as an id tuple, or None."""
        if origin == target:
            return (origin,)
        previous: dict[str, str | None] = {origin: None}
        queue: deque[str] = deque([origin])
        while queue:
            vid = queue.popleft()
            for edge in self.edges:
                if edge.src != vid or edge.dst in previous:
                    continue
                previous[edge.dst] = vid
                if edge.dst == target:
                    path = [edge.dst]
                    node: str | None = vid
                    while node is not None:
                        path.append(node)
                        node = previous[node]
                    path.reverse()
                    return tuple(path)
                queue.append(edge.dst)
        return None


def union(*graphs: ProvGraph) -> ProvGraph:
    """Merge graphs by vertex id, keeping the union of all edges.

    The same id must carry the same kind everywhere (DuplicateIdError
    otherwise); attrs are merged with later graphs winning on conflicts.
    The merged graph must remain acyclic.
    """
    vertices: dict[str, Vertex] = {}
    edges: set[LabeledEdge] = set()
    for graph in graphs:
        for vid, vertex in graph.vertices.items():
            existing = vertices.get(vid)
            if existing is None:
                vertices[vid] = vertex
            elif existing.kind is not vertex.kind:
                raise DuplicateIdError(
                    f"union maps '{vid}' to both {existing.kind.value} and "
                    f"{vertex.kind.value}"
                )
            elif vertex.attrs and vertex.attrs != existing.attrs:
                vertices[vid] = Vertex(
                    vid, existing.kind, {**existing.attrs, **vertex.attrs}
                )
        edges |= graph.edges
    merged = ProvGraph(vertices, frozenset(edges))
    cycles = merged.validate_acyclic()
    if cycles:
        raise CycleIntroducedError(
            f"union closes the cycle {' -> '.join(cycles[0])}", cycle=cycles[0]
        )
    return merged
