"""DPO rules over typed graphs with bookkeeping marks.

Marks behave like the bookkeeping edges they stand for: a mark on an
element of L that is absent on its preimage in K is deleted by the
application, a mark on an element of R absent on its preimage in K is
created, and marks present in K are preserved.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Optional, Sequence

from .errors import DanglingConditionError, InputError, InvalidMatch, NotApplicable
from .graph import GraphMorphism, TypedGraph, inclusion, require_same_type_graph, same_type_graph
from .matching import NAC, Match, find_monomorphisms, satisfies_nacs


@dataclass(frozen=True, eq=False)
class Rule:
    """A span ``L <-l- K -r-> R`` of monomorphisms plus NACs on L."""

    lhs: TypedGraph
    interface: TypedGraph
    rhs: TypedGraph
    left: GraphMorphism
    right: GraphMorphism
    nacs: tuple = ()
    name: str = ""

    def __post_init__(self):
        for g in (self.interface, self.rhs):
            if not same_type_graph(g.type_graph, self.lhs.type_graph):
                raise InputError(f"rule {self.name!r}: component graphs use different type graphs")
        # marks may differ along the legs, so only structure is checked here
        if not self.left.is_injective() or self.left.violations(check_marks=False):
            raise InputError(f"rule {self.name!r}: l is not a monomorphism")
        if not self.right.is_injective() or self.right.violations(check_marks=False):
            raise InputError(f"rule {self.name!r}: r is not a monomorphism")

    @classmethod
    def from_inclusions(
        cls,
        lhs: TypedGraph,
        interface: TypedGraph,
        rhs: TypedGraph,
        nacs: Sequence[NAC] = (),
        name: str = "",
    ) -> "Rule":
        """Build a rule whose legs are the id-preserving inclusions."""
        return cls(lhs, interface, rhs, inclusion(interface, lhs), inclusion(interface, rhs), tuple(nacs), name)

    @classmethod
    def production(cls, lhs: TypedGraph, rhs: TypedGraph, nacs: Sequence[NAC] = (), name: str = "") -> "Rule":
        return cls.from_inclusions(lhs, lhs, rhs, nacs, name)

    @property
    def type_graph(self):
        return self.lhs.type_graph

    @property
    def is_production(self) -> bool:
        """True if nothing but bookkeeping marks is deleted (l surjective)."""
        return self.left.is_surjective()

    def inverse(self) -> "Rule":
        return Rule(self.rhs, self.interface, self.lhs, self.right, self.left, (), f"{self.name}^-1")

    def created(self) -> tuple[tuple, tuple]:
        """Nodes and edges of R outside the image of r."""
        return self._created

    def deleted(self) -> tuple[tuple, tuple]:
        """Nodes and edges of L outside the image of l."""
        return self._deleted

    @cached_property
    def _created(self):
        rn = set(self.right.nodes.values())
        re = set(self.right.edges.values())
        return tuple(n for n in self.rhs.nodes if n not in rn), tuple(e for e in self.rhs.edges if e not in re)

    @cached_property
    def _deleted(self):
        ln = set(self.left.nodes.values())
        le = set(self.left.edges.values())
        return tuple(n for n in self.lhs.nodes if n not in ln), tuple(e for e in self.lhs.edges if e not in le)

    def __repr__(self):
        return f"Rule({self.name!r}, |L|={len(self.lhs)}, |R|={len(self.rhs)}, nacs={len(self.nacs)})"


class Application(NamedTuple):
    graph: TypedGraph
    comatch: GraphMorphism


def find_matches(rule: Rule, host: TypedGraph, **kwargs) -> Iterator[Match]:
    return find_monomorphisms(rule.lhs, host, rule.nacs, rule=rule, **kwargs)


def _as_morphism(rule: Rule, host: TypedGraph, match) -> GraphMorphism:
    m = match.morphism if isinstance(match, Match) else match
    if not isinstance(m, GraphMorphism):
        raise InvalidMatch("match must be a Match or GraphMorphism")
    if m.source is not rule.lhs:
        m = GraphMorphism(rule.lhs, host, m.nodes, m.edges)
    elif m.target is not host:
        m = GraphMorphism(rule.lhs, host, m.nodes, m.edges)
    return m


def match_problems(rule: Rule, host: TypedGraph, match) -> list[str]:
    """Reasons why ``match`` cannot be used to apply ``rule`` to ``host``."""
    m = _as_morphism(rule, host, match)
    problems = m.violations()
    if not problems and not m.is_injective():
        problems.append("match is not injective")
    if problems:
        return problems
    if not satisfies_nacs(rule.nacs, m.nodes, m.edges, host):
        problems.append("a negative application condition is violated")
    return problems


def is_applicable(rule: Rule, host: TypedGraph, match) -> bool:
    if match_problems(rule, host, match):
        return False
    try:
        _check_dangling(rule, host, _as_morphism(rule, host, match))
    except DanglingConditionError:
        return False
    return True


def _check_dangling(rule: Rule, host: TypedGraph, m: GraphMorphism) -> None:
    del_nodes, del_edges = rule.deleted()
    doomed = {m.edges[e] for e in del_edges}
    for n in del_nodes:
        hn = m.nodes[n]
        for he in list(host.out_edges(hn)) + list(host.in_edges(hn)):
            if he not in doomed:
                raise DanglingConditionError(he, hn)


def rewrite_in_place(rule: Rule, host: TypedGraph, match, check: bool = True) -> GraphMorphism:
    """Apply ``rule`` at ``match`` by mutating ``host``; returns the comatch."""
    m = _as_morphism(rule, host, match)
    if check:
        problems = match_problems(rule, host, m)
        if problems:
            raise NotApplicable(f"rule {rule.name!r} not applicable: " + "; ".join(problems))
    _check_dangling(rule, host, m)

    left, right = rule.left, rule.right
    k_of_l_node = {v: k for k, v in left.nodes.items()}
    k_of_l_edge = {v: k for k, v in left.edges.items()}

    del_nodes, del_edges = rule.deleted()
    for e in del_edges:
        host.remove_edge(m.edges[e])
    for n in del_nodes:
        host.remove_node(m.nodes[n])

    # marks on preserved elements: L marked & K unmarked -> delete
    lhs, iface, rhs = rule.lhs, rule.interface, rule.rhs
    for x in lhs.bookkeeping:
        k = k_of_l_node[x] if x in k_of_l_node else k_of_l_edge.get(x)
        if (x in k_of_l_node or x in k_of_l_edge) and not iface.is_marked(k):
            host.unmark(m(x))

    co_nodes = {}
    co_edges = {}
    k_of_r = {}
    for k, rn in right.nodes.items():
        co_nodes[rn] = m.nodes[left.nodes[k]]
        k_of_r[rn] = k
    for k, re in right.edges.items():
        co_edges[re] = m.edges[left.edges[k]]
        k_of_r[re] = k
    # R marked & K unmarked -> create
    for x in rhs.bookkeeping:
        if x in k_of_r and not iface.is_marked(k_of_r[x]):
            host.mark(co_nodes[x] if x in co_nodes else co_edges[x])

    new_nodes, new_edges = rule.created()
    for n in new_nodes:
        co_nodes[n] = host.add_node(rhs.nodes[n], marked=rhs.is_marked(n))
    for e in new_edges:
        edge = rhs.edges[e]
        co_edges[e] = host.add_edge(edge.type, co_nodes[edge.src], co_nodes[edge.tgt], marked=rhs.is_marked(e))
    return GraphMorphism(rhs, host, co_nodes, co_edges)


def apply_rule(host: TypedGraph, rule: Rule, match) -> Application:
    """Apply ``rule`` at ``match`` to a copy of ``host``.

    Returns the result graph together with the comatch ``R -> result``.
    Raises :class:`NotApplicable` for invalid matches and
    :class:`DanglingConditionError` when a deleted node keeps an edge.
    """
    require_same_type_graph(rule.lhs, host)
    m = _as_morphism(rule, host, match)
    problems = match_problems(rule, host, m)
    if problems:
        raise InvalidMatch(f"invalid match for rule {rule.name!r}: " + "; ".join(problems))
    result = host.copy()
    comatch = rewrite_in_place(rule, result, GraphMorphism(rule.lhs, result, m.nodes, m.edges), check=False)
    return Application(result, comatch)


def first_match(rule: Rule, host: TypedGraph) -> Optional[Match]:
    for match in find_matches(rule, host):
        return match
    return None
