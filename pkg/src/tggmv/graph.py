"""Typed graphs, type graphs and typed graph morphisms.

Element ids are arbitrary hashable values (strings and ints in practice,
tuples for derived multi-version elements). Node and edge ids of one graph
live in a single namespace so that bookkeeping marks can refer to either.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Optional

from .errors import InputError, TypeGraphMismatch

ElementId = Hashable


class TypeGraph:
    """A graph acting as a metamodel.

    ``edges`` maps every type-edge id to its ``(src, tgt)`` type-node pair.
    """

    __slots__ = ("nodes", "edges", "_hash")

    def __init__(self, nodes: Iterable[str], edges: Mapping[str, tuple[str, str]] = ()):
        node_set = frozenset(nodes)
        edge_map = dict(edges)
        for e, (s, t) in edge_map.items():
            if s not in node_set or t not in node_set:
                raise InputError(f"type edge {e!r} has endpoint outside the type graph")
        self.nodes = node_set
        self.edges = MappingProxyType(edge_map)
        self._hash = None

    def src(self, edge_type: str) -> str:
        return self.edges[edge_type][0]

    def tgt(self, edge_type: str) -> str:
        return self.edges[edge_type][1]

    def _key(self):
        return (frozenset(self.nodes), frozenset(self.edges.items()))

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._key()))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({len(self.nodes)} nodes, {len(self.edges)} edges)"


class Edge(NamedTuple):
    type: str
    src: ElementId
    tgt: ElementId


def same_type_graph(a: TypeGraph, b: TypeGraph) -> bool:
    return a is b or a == b


def require_same_type_graph(a: "TypedGraph", b: "TypedGraph") -> None:
    if not same_type_graph(a.type_graph, b.type_graph):
        raise TypeGraphMismatch("graphs are typed over different type graphs")


class TypedGraph:
    """A mutable typed graph with adjacency and type indexes.

    The transformation API treats graphs as values (callers receive copies);
    in-place mutation is reserved for the engine's private working copies.
    ``bookkeeping`` holds the ids of elements marked as untranslated.
    """

    __slots__ = ("type_graph", "_nodes", "_edges", "_marks", "_out", "_in", "_by_type", "_next_id")

    def __init__(self, type_graph: TypeGraph):
        self.type_graph = type_graph
        self._nodes: dict[ElementId, str] = {}
        self._edges: dict[ElementId, Edge] = {}
        self._marks: set[ElementId] = set()
        self._out: dict[ElementId, dict[ElementId, None]] = {}
        self._in: dict[ElementId, dict[ElementId, None]] = {}
        self._by_type: dict[str, dict[ElementId, None]] = {}
        self._next_id = 0

    # -- construction -------------------------------------------------

    def fresh_id(self) -> int:
        while self._next_id in self._nodes or self._next_id in self._edges:
            self._next_id += 1
        fid = self._next_id
        self._next_id += 1
        return fid

    def _claim(self, eid):
        if eid is None:
            return self.fresh_id()
        if eid in self._nodes or eid in self._edges:
            raise InputError(f"duplicate element id {eid!r}")
        if isinstance(eid, int) and not isinstance(eid, bool) and eid >= self._next_id:
            self._next_id = eid + 1
        return eid

    def add_node(self, type_: str, node_id: Optional[ElementId] = None, marked: bool = False) -> ElementId:
        if type_ not in self.type_graph.nodes:
            raise InputError(f"unknown node type {type_!r}")
        nid = self._claim(node_id)
        self._nodes[nid] = type_
        self._out[nid] = {}
        self._in[nid] = {}
        self._by_type.setdefault(type_, {})[nid] = None
        if marked:
            self._marks.add(nid)
        return nid

    def add_edge(
        self,
        type_: str,
        src: ElementId,
        tgt: ElementId,
        edge_id: Optional[ElementId] = None,
        marked: bool = False,
    ) -> ElementId:
        try:
            ts, tt = self.type_graph.edges[type_]
        except KeyError:
            raise InputError(f"unknown edge type {type_!r}") from None
        if src not in self._nodes or tgt not in self._nodes:
            raise InputError(f"edge endpoints {src!r}->{tgt!r} are not nodes of the graph")
        if self._nodes[src] != ts or self._nodes[tgt] != tt:
            raise InputError(
                f"edge of type {type_!r} must connect {ts!r}->{tt!r}, "
                f"got {self._nodes[src]!r}->{self._nodes[tgt]!r}"
            )
        eid = self._claim(edge_id)
        self._edges[eid] = Edge(type_, src, tgt)
        self._out[src][eid] = None
        self._in[tgt][eid] = None
        if marked:
            self._marks.add(eid)
        return eid

    def remove_edge(self, eid: ElementId) -> None:
        e = self._edges.pop(eid)
        del self._out[e.src][eid]
        del self._in[e.tgt][eid]
        self._marks.discard(eid)

    def remove_node(self, nid: ElementId) -> None:
        if self._out[nid] or self._in[nid]:
            raise InputError(f"node {nid!r} still has incident edges")
        t = self._nodes.pop(nid)
        del self._out[nid]
        del self._in[nid]
        del self._by_type[t][nid]
        self._marks.discard(nid)

    def mark(self, eid: ElementId) -> None:
        if eid not in self._nodes and eid not in self._edges:
            raise InputError(f"cannot mark unknown element {eid!r}")
        self._marks.add(eid)

    def unmark(self, eid: ElementId) -> None:
        self._marks.discard(eid)

    def copy(self) -> "TypedGraph":
        g = TypedGraph.__new__(TypedGraph)
        g.type_graph = self.type_graph
        g._nodes = dict(self._nodes)
        g._edges = dict(self._edges)
        g._marks = set(self._marks)
        g._out = {n: dict(d) for n, d in self._out.items()}
        g._in = {n: dict(d) for n, d in self._in.items()}
        g._by_type = {t: dict(d) for t, d in self._by_type.items()}
        g._next_id = self._next_id
        return g

    # -- queries ------------------------------------------------------

    @property
    def nodes(self) -> Mapping[ElementId, str]:
        return MappingProxyType(self._nodes)

    @property
    def edges(self) -> Mapping[ElementId, Edge]:
        return MappingProxyType(self._edges)

    @property
    def bookkeeping(self) -> frozenset:
        return frozenset(self._marks)

    def is_marked(self, eid: ElementId) -> bool:
        return eid in self._marks

    def has_node(self, nid) -> bool:
        return nid in self._nodes

    def has_edge(self, eid) -> bool:
        return eid in self._edges

    def __contains__(self, eid) -> bool:
        return eid in self._nodes or eid in self._edges

    def elements(self) -> Iterator[ElementId]:
        yield from self._nodes
        yield from self._edges

    def type_of(self, eid: ElementId) -> str:
        if eid in self._nodes:
            return self._nodes[eid]
        return self._edges[eid].type

    def out_edges(self, nid: ElementId) -> Iterable[ElementId]:
        return self._out[nid].keys()

    def in_edges(self, nid: ElementId) -> Iterable[ElementId]:
        return self._in[nid].keys()

    def nodes_of_type(self, type_: str) -> Iterable[ElementId]:
        return self._by_type.get(type_, {}).keys()

    def count_of_type(self, type_: str) -> int:
        return len(self._by_type.get(type_, ()))

    def __len__(self) -> int:
        return len(self._nodes) + len(self._edges)

    def subgraph(self, elements: Iterable[ElementId]) -> "TypedGraph":
        """Induced sub-structure on ``elements``; edges need both endpoints."""
        keep = set(elements)
        g = TypedGraph(self.type_graph)
        for n, t in self._nodes.items():
            if n in keep:
                g.add_node(t, n, marked=n in self._marks)
        for e, edge in self._edges.items():
            if e in keep:
                if edge.src not in keep or edge.tgt not in keep:
                    raise InputError(f"edge {e!r} selected without its endpoints")
                g.add_edge(edge.type, edge.src, edge.tgt, e, marked=e in self._marks)
        return g

    def __eq__(self, other):
        if not isinstance(other, TypedGraph):
            return NotImplemented
        return (
            same_type_graph(self.type_graph, other.type_graph)
            and self._nodes == other._nodes
            and self._edges == other._edges
            and self._marks == other._marks
        )

    __hash__ = None

    def __repr__(self):
        return f"TypedGraph({len(self._nodes)} nodes, {len(self._edges)} edges, {len(self._marks)} marked)"


class GraphMorphism:
    """A pair of maps (vertex map, edge map) between two typed graphs."""

    __slots__ = ("source", "target", "nodes", "edges")

    def __init__(self, source: TypedGraph, target: TypedGraph, nodes: Mapping, edges: Mapping):
        self.source = source
        self.target = target
        self.nodes = dict(nodes)
        self.edges = dict(edges)

    def __call__(self, eid):
        if eid in self.nodes:
            return self.nodes[eid]
        return self.edges[eid]

    def is_injective(self) -> bool:
        return (
            len(set(self.nodes.values())) == len(self.nodes)
            and len(set(self.edges.values())) == len(self.edges)
        )

    def is_surjective(self) -> bool:
        return set(self.nodes.values()) == set(self.target.nodes) and set(self.edges.values()) == set(
            self.target.edges
        )

    def violations(self, check_marks: bool = True) -> list[str]:
        """Return every failed morphism condition (empty list when valid)."""
        src, tgt = self.source, self.target
        problems = []
        if not same_type_graph(src.type_graph, tgt.type_graph):
            return ["different type graphs"]
        if set(self.nodes) != set(src.nodes) or set(self.edges) != set(src.edges):
            problems.append("maps are not total on the source graph")
        for n, img in self.nodes.items():
            if img not in tgt.nodes:
                problems.append(f"node {n!r} mapped outside the target")
            elif tgt.nodes[img] != src.nodes.get(n):
                problems.append(f"node {n!r} changes type")
            elif check_marks and src.is_marked(n) and not tgt.is_marked(img):
                problems.append(f"marked node {n!r} mapped to unmarked node")
        for e, img in self.edges.items():
            if img not in tgt.edges:
                problems.append(f"edge {e!r} mapped outside the target")
                continue
            se, te = src.edges.get(e), tgt.edges[img]
            if se is None:
                continue
            if se.type != te.type:
                problems.append(f"edge {e!r} changes type")
            if self.nodes.get(se.src) != te.src or self.nodes.get(se.tgt) != te.tgt:
                problems.append(f"edge {e!r} does not commute with src/tgt")
            if check_marks and src.is_marked(e) and not tgt.is_marked(img):
                problems.append(f"marked edge {e!r} mapped to unmarked edge")
        return problems

    def is_valid(self, check_marks: bool = True) -> bool:
        return not self.violations(check_marks)

    def is_monomorphism(self, check_marks: bool = True) -> bool:
        return self.is_injective() and self.is_valid(check_marks)

    def compose(self, then: "GraphMorphism") -> "GraphMorphism":
        """``then ∘ self``."""
        return GraphMorphism(
            self.source,
            then.target,
            {n: then.nodes[m] for n, m in self.nodes.items()},
            {e: then.edges[f] for e, f in self.edges.items()},
        )

    def inverse(self) -> "GraphMorphism":
        return GraphMorphism(
            self.target,
            self.source,
            {m: n for n, m in self.nodes.items()},
            {f: e for e, f in self.edges.items()},
        )

    def binding(self) -> dict:
        b = dict(self.nodes)
        b.update(self.edges)
        return b

    def __eq__(self, other):
        if not isinstance(other, GraphMorphism):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    __hash__ = None

    def __repr__(self):
        return f"GraphMorphism(nodes={self.nodes!r}, edges={self.edges!r})"


def identity(g: TypedGraph) -> GraphMorphism:
    return GraphMorphism(g, g, {n: n for n in g.nodes}, {e: e for e in g.edges})


def inclusion(sub: TypedGraph, sup: TypedGraph) -> GraphMorphism:
    """Id-preserving morphism from ``sub`` into ``sup``."""
    return GraphMorphism(sub, sup, {n: n for n in sub.nodes}, {e: e for e in sub.edges})


def unmarked(g: TypedGraph) -> TypedGraph:
    h = g.copy()
    for x in list(h.bookkeeping):
        h.unmark(x)
    return h
