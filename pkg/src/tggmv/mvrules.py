"""Multi-version forward rules.

A forward rule is adapted by encoding its graphs like the models
themselves (every node and edge becomes an mv-node). Bookkeeping marks and
NACs disappear from the pattern; they are replaced by the version set

    P = ∩ p(all LHS nodes) ∩ ∩ u(translated nodes) minus ∪ u(context nodes)

and an application is allowed iff P is non-empty. Applying the rule creates
the adapted right-hand side with presence exactly P and removes P from the
untranslated set of every translated node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

from .errors import InputError, NotApplicable
from .graph import GraphMorphism, TypedGraph, unmarked
from .matching import Match
from .mvm import MultiVersionModel, MVTypeGraph, adapt_type_graph, rep_edge_id
from .rules import Rule, find_matches, rewrite_in_place
from .tgg import ForwardRule


def trans_prime(g: TypedGraph, types: Optional[MVTypeGraph] = None) -> TypedGraph:
    """Encode ``g`` over the adapted type graph, ignoring bookkeeping.

    Each node and each edge of ``g`` becomes an mv-node with the same id;
    edges additionally get ``src:``/``tgt:`` representation edges.
    """
    if types is None:
        types = adapt_type_graph(g.type_graph)
    elif types.base != g.type_graph:
        raise InputError("adapted type graph does not belong to the graph's type graph")
    out = TypedGraph(types)
    for n, t in g.nodes.items():
        out.add_node(t, n)
    for e, edge in g.edges.items():
        out.add_node(edge.type, e)
    for e, edge in g.edges.items():
        out.add_edge(f"src:{edge.type}", e, edge.src, rep_edge_id(e, "src"))
        out.add_edge(f"tgt:{edge.type}", e, edge.tgt, rep_edge_id(e, "tgt"))
    return out


@dataclass(frozen=True, eq=False)
class MVForwardRule:
    """Adapted forward rule plus the data needed for its version constraint."""

    rule: Rule
    forward: ForwardRule
    translated: frozenset
    context: frozenset
    created: frozenset

    @property
    def name(self) -> str:
        return self.rule.name

    @property
    def lhs(self) -> TypedGraph:
        return self.rule.lhs

    def __repr__(self):
        return f"MVForwardRule({self.name!r}, translated={len(self.translated)}, context={len(self.context)})"


def adapt(fr: ForwardRule, types: Optional[MVTypeGraph] = None) -> MVForwardRule:
    if types is None:
        types = adapt_type_graph(fr.type_graph)
    lhs = trans_prime(unmarked(fr.rule.lhs), types)
    rhs = trans_prime(unmarked(fr.rule.rhs), types)
    rule = Rule.from_inclusions(lhs, lhs, rhs, name=fr.name)
    translated = frozenset(x for x in lhs.nodes if x in fr.translated)
    context = frozenset(lhs.nodes) - translated
    created = frozenset(rule.created()[0])
    return MVForwardRule(rule, fr, translated, context, created)


def adapt_all(rules, types: Optional[MVTypeGraph] = None) -> list[MVForwardRule]:
    rules = list(rules)
    if rules and types is None:
        types = adapt_type_graph(rules[0].type_graph)
    return [adapt(r, types) for r in rules]


def version_mask(mvm: MultiVersionModel, rule: MVForwardRule, match) -> int:
    nodes = match.nodes
    P = mvm.version_graph.all_mask
    for x in rule.lhs.nodes:
        P &= mvm.p_mask(nodes[x])
        if not P:
            return 0
    for x in rule.translated:
        P &= mvm.u_mask(nodes[x])
        if not P:
            return 0
    for x in rule.context:
        P &= ~mvm.u_mask(nodes[x])
    return P


def compute_P(mvm: MultiVersionModel, rule: MVForwardRule, match) -> frozenset:
    """Versions affected by applying ``rule`` at ``match``; empty means the
    rule is not applicable there."""
    return mvm.version_graph.versions_of(version_mask(mvm, rule, match))


def candidate_filter(mvm: MultiVersionModel, rule: MVForwardRule):
    """Cheap necessary conditions for P to be non-empty, per pattern node."""
    translated = rule.translated

    def accept(pattern_node, host_node):
        if pattern_node in translated:
            return mvm.u_mask(host_node) != 0
        return (mvm.p_mask(host_node) & ~mvm.u_mask(host_node)) != 0

    return accept


def find_mv_matches(mvm: MultiVersionModel, rule: MVForwardRule) -> Iterator[Match]:
    """Matches of the adapted pattern; P may still be empty for some."""
    return find_matches(rule.rule, mvm.graph, node_filter=candidate_filter(mvm, rule), prefer=rule.translated)


def applicable_mv_matches(mvm: MultiVersionModel, rule: MVForwardRule) -> Iterator[tuple[Match, int]]:
    for m in find_mv_matches(mvm, rule):
        P = version_mask(mvm, rule, m)
        if P:
            yield m, P


class MVApplication(NamedTuple):
    comatch: GraphMorphism
    versions: int


def rewrite_mv(mvm: MultiVersionModel, rule: MVForwardRule, match, check: bool = True) -> MVApplication:
    """Apply ``rule`` at ``match`` to ``mvm`` in place.

    ``check=False`` skips re-validating the structural match (for matches
    fresh from the matcher); P is always recomputed.
    """
    P = version_mask(mvm, rule, match)
    if not P:
        raise NotApplicable(f"mv-rule {rule.name!r} not applicable: P is empty")
    nodes = match.nodes
    comatch = rewrite_in_place(rule.rule, mvm.graph, match, check=check)
    for c in rule.created:
        x = comatch.nodes[c]
        mvm.origin[x] = x
        mvm.set_presence(x, P)
    for t in rule.translated:
        x = nodes[t]
        mvm.set_untranslated(x, mvm.u_mask(x) & ~P)
    return MVApplication(comatch, P)


def apply_mv_rule(mvm: MultiVersionModel, rule: MVForwardRule, match) -> MultiVersionModel:
    """Value-semantics wrapper around :func:`rewrite_mv`."""
    out = mvm.copy()
    m = match.morphism if isinstance(match, Match) else match
    rewrite_mv(out, rule, GraphMorphism(rule.lhs, out.graph, m.nodes, m.edges))
    return out


def translate_match(mvm: MultiVersionModel, rule: MVForwardRule, match, target: TypedGraph) -> GraphMorphism:
    """The original forward rule's match ``trans(m)`` into a projection."""
    nodes = match.nodes
    lf = rule.forward.rule.lhs
    origin = mvm.origin
    return GraphMorphism(
        lf,
        target,
        {n: origin[nodes[n]] for n in lf.nodes},
        {e: origin[nodes[e]] for e in lf.edges},
    )
