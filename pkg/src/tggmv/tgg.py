"""Triple graphs, TGG rules and forward-rule derivation.

Bookkeeping is represented by marks: a marked source element is one that
is still untranslated. A forward rule requires marks on the elements it
translates, forbids marks on its remaining context via NACs, and clears
the marks it consumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import InputError
from .graph import ElementId, GraphMorphism, TypedGraph, TypeGraph, unmarked
from .matching import NAC
from .rules import Rule

SOURCE, CORRESPONDENCE, TARGET = "S", "C", "T"
DOMAINS = (SOURCE, CORRESPONDENCE, TARGET)
LINK_S, LINK_T = "corrS", "corrT"


class TripleTypeGraph(TypeGraph):
    """A type graph whose elements carry a domain tag (S, C or T).

    Edges inside one domain inherit that domain. Edges from a C-node to an
    S- or T-node are correspondence links and are tagged C.
    """

    __slots__ = ("node_domains", "edge_domains", "links")

    def __init__(self, nodes: Mapping[str, str], edges: Mapping[str, tuple[str, str]] = ()):
        super().__init__(nodes.keys(), edges)
        for n, d in nodes.items():
            if d not in DOMAINS:
                raise InputError(f"type node {n!r} has unknown domain {d!r}")
        self.node_domains = dict(nodes)
        self.edge_domains = {}
        self.links = {}
        for e, (s, t) in self.edges.items():
            ds, dt = nodes[s], nodes[t]
            if ds == dt:
                self.edge_domains[e] = ds
            elif ds == CORRESPONDENCE and dt in (SOURCE, TARGET):
                self.edge_domains[e] = CORRESPONDENCE
                self.links[e] = dt
            else:
                raise InputError(f"type edge {e!r} crosses domains {ds}->{dt} and is not a correspondence link")

    @classmethod
    def build(
        cls,
        source: TypeGraph,
        target: TypeGraph,
        correspondence: Mapping[str, tuple[str, str]],
    ) -> "TripleTypeGraph":
        """Union of source and target languages plus correspondence types.

        ``correspondence`` maps each correspondence node type to the pair of
        source and target node types it links, via edges named
        ``<corr>.corrS`` and ``<corr>.corrT``.
        """
        nodes = {n: SOURCE for n in source.nodes}
        for n in target.nodes:
            if n in nodes:
                raise InputError(f"type node {n!r} occurs in source and target")
            nodes[n] = TARGET
        edges = dict(source.edges)
        for e, st in target.edges.items():
            if e in edges:
                raise InputError(f"type edge {e!r} occurs in source and target")
            edges[e] = st
        for c, (s, t) in correspondence.items():
            if c in nodes:
                raise InputError(f"correspondence type {c!r} clashes with another type")
            nodes[c] = CORRESPONDENCE
            edges[f"{c}.{LINK_S}"] = (c, s)
            edges[f"{c}.{LINK_T}"] = (c, t)
        return cls(nodes, edges)

    def domain(self, type_: str) -> str:
        if type_ in self.node_domains:
            return self.node_domains[type_]
        return self.edge_domains[type_]

    def _key(self):
        return (super()._key(), frozenset(self.node_domains.items()))

    def restrict(self, domain: str) -> TypeGraph:
        """The type graph of a single domain (links excluded)."""
        nodes = [n for n, d in self.node_domains.items() if d == domain]
        edges = {e: st for e, st in self.edges.items() if self.edge_domains[e] == domain and e not in self.links}
        return TypeGraph(nodes, edges)


def element_domain(g: TypedGraph, eid: ElementId) -> str:
    tg = g.type_graph
    if not isinstance(tg, TripleTypeGraph):
        raise InputError("graph is not typed over a triple type graph")
    return tg.domain(g.type_of(eid))


def _require_triple(g: TypedGraph) -> TripleTypeGraph:
    if not isinstance(g.type_graph, TripleTypeGraph):
        raise InputError("graph is not typed over a triple type graph")
    return g.type_graph


@dataclass(frozen=True, eq=False)
class TGGRule:
    """A production over a triple type graph."""

    rule: Rule

    def __post_init__(self):
        _require_triple(self.rule.lhs)
        if not self.rule.is_production:
            raise InputError(f"TGG rule {self.name!r} deletes elements")

    @property
    def name(self) -> str:
        return self.rule.name

    @property
    def type_graph(self) -> TripleTypeGraph:
        return self.rule.lhs.type_graph

    @property
    def is_axiom(self) -> bool:
        return len(self.rule.lhs) == 0

    def partition(self, side: str = "R") -> dict[str, frozenset]:
        """Domain partition of L or R as ``{domain: element ids}``."""
        g = self.rule.lhs if side == "L" else self.rule.rhs
        parts = {d: set() for d in DOMAINS}
        for x in g.elements():
            parts[element_domain(g, x)].add(x)
        return {d: frozenset(xs) for d, xs in parts.items()}

    @classmethod
    def from_shorthand(
        cls,
        type_graph: TripleTypeGraph,
        name: str,
        nodes: Iterable[tuple],
        edges: Iterable[tuple] = (),
    ) -> "TGGRule":
        """Build a rule from ``(id, type, created)`` node and
        ``(id, type, src, tgt, created)`` edge tuples, mirroring the
        "++" notation for created elements."""
        nodes, edges = list(nodes), list(edges)
        rhs = TypedGraph(type_graph)
        for nid, t, _ in nodes:
            rhs.add_node(t, nid)
        for eid, t, s, tg, _ in edges:
            rhs.add_edge(t, s, tg, eid)
        kept = [nid for nid, _, created in nodes if not created]
        kept += [eid for eid, _, _, _, created in edges if not created]
        try:
            lhs = rhs.subgraph(kept)
        except InputError as exc:
            raise InputError(f"TGG rule {name!r}: preserved edge attached to created node ({exc})") from None
        return cls(Rule.production(lhs, rhs, name=name))


@dataclass(frozen=True, eq=False)
class ForwardRule:
    """Forward rule ``L^F <- K^F -> R`` derived from a TGG rule.

    Element ids are those of the TGG rule's right-hand side. ``translated``
    is L^T, the part of L^F that the TGG rule would have created.
    """

    rule: Rule
    translated: frozenset
    origin: Optional[TGGRule] = None

    @property
    def name(self) -> str:
        return self.rule.name

    @property
    def lhs(self) -> TypedGraph:
        return self.rule.lhs

    @property
    def type_graph(self) -> TripleTypeGraph:
        return self.rule.lhs.type_graph

    @property
    def degenerate(self) -> bool:
        """True if nothing is translated; such a rule could fire forever."""
        return not self.translated

    @cached_property
    def context(self) -> frozenset:
        return frozenset(self.rule.lhs.elements()) - self.translated

    @cached_property
    def translated_nodes(self) -> tuple:
        return tuple(n for n in self.rule.lhs.nodes if n in self.translated)

    def __repr__(self):
        return f"ForwardRule({self.name!r}, |L^T|={len(self.translated)})"


def derive_forward_rule(tgg_rule: TGGRule) -> ForwardRule:
    base = tgg_rule.rule
    if not base.is_production:
        raise InputError(f"rule {base.name!r} is not a production")
    rhs = base.rhs
    # image of L in R along r ∘ l^-1
    l_inv_n = {v: k for k, v in base.left.nodes.items()}
    l_inv_e = {v: k for k, v in base.left.edges.items()}
    image = {base.right.nodes[l_inv_n[n]] for n in base.lhs.nodes}
    image |= {base.right.edges[l_inv_e[e]] for e in base.lhs.edges}
    created_source = [x for x in rhs.elements() if x not in image and element_domain(rhs, x) == SOURCE]
    for x in created_source:
        if x in rhs.edges:
            edge = rhs.edges[x]
            assert edge.src in image or edge.src in created_source
            assert edge.tgt in image or edge.tgt in created_source

    lf_elements = [x for x in rhs.elements() if x in image or x in created_source]
    translated = frozenset(created_source)
    lhs_f = unmarked(rhs.subgraph(lf_elements))
    for x in translated:
        lhs_f.mark(x)
    iface = unmarked(lhs_f)
    rhs_f = unmarked(rhs)

    nacs = []
    for x in lhs_f.elements():
        if x in translated:
            continue
        forbidden = lhs_f.copy()
        forbidden.mark(x)
        emb = GraphMorphism(lhs_f, forbidden, {n: n for n in lhs_f.nodes}, {e: e for e in lhs_f.edges})
        nacs.append(NAC(forbidden, emb))
    rule = Rule.from_inclusions(lhs_f, iface, rhs_f, nacs, name=base.name)
    return ForwardRule(rule, translated, tgg_rule)


def derive_forward_rules(rules: Iterable[TGGRule]) -> list[ForwardRule]:
    return [derive_forward_rule(r) for r in rules]


def init_forward(source: TypedGraph) -> TypedGraph:
    """``source`` with every element marked untranslated."""
    tg = _require_triple(source)
    result = source.copy()
    for x in source.elements():
        if tg.domain(source.type_of(x)) != SOURCE:
            raise InputError(f"element {x!r} of the source model is not in the source domain")
        result.mark(x)
    return result


def bookkeeping_set(g: TypedGraph) -> frozenset:
    """Elements carrying no untranslated-mark."""
    marks = g.bookkeeping
    return frozenset(x for x in g.elements() if x not in marks)


def source_elements(g: TypedGraph) -> list:
    tg = _require_triple(g)
    return [x for x in g.elements() if tg.domain(g.type_of(x)) == SOURCE]
