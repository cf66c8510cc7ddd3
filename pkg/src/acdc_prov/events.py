"""Event extraction and per-agent slicing of provenance graphs.

An *event* is the one-activity neighbourhood of a graph: the activity, the
entities it used and generated, derivations among those entities, the
agents one attribution hop away plus the associated node agents, and the
account agents those node agents act on behalf of. A per-agent *slice* is
the union of all events an account agent appears in; chains longer than
one attribution hop are deliberately out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import LabeledEdge, ProvGraph, RelationLabel, Sort, Vertex, VertexKind

__all__ = [
    "Event",
    "extract_event",
    "slice_by_agent",
    "EventError",
    "NoSuchActivityError",
    "NoSuchAgentError",
    "WrongKindError",
]


class EventError(Exception):
    """Base class for event extraction and slicing errors."""


class NoSuchActivityError(EventError):
    """The requested activity id is not in the graph."""


class NoSuchAgentError(EventError):
    """The requested agent id is not in the graph."""


class WrongKindError(EventError):
    """The requested vertex exists but has the wrong kind."""


@dataclass(frozen=True)
class Event:
    """One activity's neighbourhood subgraph."""

    subgraph: ProvGraph
    activity: str


def extract_event(graph: ProvGraph, activity: str) -> Event:
    """Cut the event subgraph around ``activity``.

    The subgraph contains exactly one activity (the named one), its used
    and generated entities, WasDerivedFrom edges among those entities,
    agents attributed by them, the associated node agents, and the account
    agents the included node agents act on behalf of, together with all
    such edges between included vertices.
    """
    vertex = graph.vertices.get(activity)
    if vertex is None:
        raise NoSuchActivityError(f"no vertex '{activity}' in the graph")
    if vertex.kind is not VertexKind.ACTIVITY:
        raise WrongKindError(
            f"'{activity}' has kind {vertex.kind.value}, expected activity"
        )

    inputs = {e.dst for e in graph.out_edges(activity, RelationLabel.USED)}
    outputs = {e.src for e in graph.in_edges(activity, RelationLabel.WAS_GENERATED_BY)}
    entities = inputs | outputs
    attributed = {
        e.dst
        for e in graph.edges
        if e.label is RelationLabel.WAS_ATTRIBUTED_TO and e.src in entities
    }
    associated = {
        e.dst for e in graph.out_edges(activity, RelationLabel.WAS_ASSOCIATED_WITH)
    }
    agents = attributed | associated
    principals = {
        e.dst
        for e in graph.edges
        if e.label is RelationLabel.ACTED_ON_BEHALF_OF and e.src in agents
    }
    included = {activity} | entities | agents | principals

    edges: set[LabeledEdge] = set()
    for e in graph.edges:
        keep = (
            (e.label is RelationLabel.USED and e.src == activity and e.dst in entities)
            or (
                e.label is RelationLabel.WAS_GENERATED_BY
                and e.dst == activity
                and e.src in entities
            )
            or (
                e.label is RelationLabel.WAS_DERIVED_FROM
                and e.src in entities
                and e.dst in entities
            )
            or (
                e.label is RelationLabel.WAS_ATTRIBUTED_TO
                and e.src in entities
                and e.dst in included
            )
            or (e.label is RelationLabel.WAS_ASSOCIATED_WITH and e.src == activity)
            or (e.label is RelationLabel.ACTED_ON_BEHALF_OF and e.src in agents)
        )
        if keep:
            edges.add(e)

    vertices = {vid: graph.vertices[vid] for vid in sorted(included)}
    return Event(ProvGraph(vertices, frozenset(edges)), activity)


def slice_by_agent(graph: ProvGraph, agent: str) -> ProvGraph:
    """Union of every event whose subgraph contains ``agent``.

    ``agent`` must be an account agent; the agent vertex itself is always
    part of the slice, even when it appears in no event.
    """
    vertex = graph.vertices.get(agent)
    if vertex is None:
        raise NoSuchAgentError(f"no vertex '{agent}' in the graph")
    if vertex.kind is not VertexKind.ACCOUNT_AGENT:
        raise WrongKindError(
            f"'{agent}' has kind {vertex.kind.value}, expected account_agent"
        )

    vertices: dict[str, Vertex] = {agent: vertex}
    edges: set[LabeledEdge] = set()
    for activity in sorted(graph.vertices_of_sort(Sort.ACTIVITY)):
        event = extract_event(graph, activity)
        if agent in event.subgraph.vertices:
            vertices.update(event.subgraph.vertices)
            edges |= event.subgraph.edges
    return ProvGraph(vertices, frozenset(edges))
