"""Subgraph-monomorphism search with negative application conditions.

The search is plain backtracking: pattern nodes are visited in a
connectivity order (each new node reached over an edge from an already
placed node whenever possible), candidates come from the host's adjacency
lists or, for the first node of a component, from the type index. Edges are
bound as soon as both endpoints are placed, which also handles parallel
edges. Enumeration order is fully determined by the insertion order of the
two graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Optional

from .errors import InputError
from .graph import ElementId, GraphMorphism, TypedGraph, require_same_type_graph

NodeFilter = Callable[[ElementId, ElementId], bool]


@dataclass(frozen=True, eq=False)
class NAC:
    """Negative application condition: no monomorphism ``graph -> host``
    may extend the match along ``embedding`` (a morphism from the rule's
    left-hand side into ``graph``)."""

    graph: TypedGraph
    embedding: GraphMorphism

    @cached_property
    def mark_only(self) -> Optional[tuple]:
        """With a bijective embedding the only candidate extension is the
        match itself, so the condition reduces to mark checks. Returns the
        ``(pattern element, is_node)`` pairs marked in ``graph``, or None
        when a real search is needed."""
        emb, g = self.embedding, self.graph
        if len(emb.nodes) != len(g.nodes) or len(emb.edges) != len(g.edges) or not emb.is_injective():
            return None
        return tuple((x, x in emb.nodes) for x in emb.source.elements() if g.is_marked(emb(x)))


@dataclass(eq=False)
class Match:
    morphism: GraphMorphism
    rule: Optional[object] = field(default=None, repr=False)

    @property
    def nodes(self) -> dict:
        return self.morphism.nodes

    @property
    def edges(self) -> dict:
        return self.morphism.edges

    def __call__(self, eid):
        return self.morphism(eid)

    def image(self) -> frozenset:
        return frozenset(self.morphism.nodes.values()) | frozenset(self.morphism.edges.values())


class _Step:
    __slots__ = ("node", "type", "marked", "anchor", "edges", "fixed")

    def __init__(self, node, type_, marked, anchor, edges, fixed):
        self.node = node
        self.type = type_
        self.marked = marked
        self.anchor = anchor  # (edge type, placed node, pattern node is target?) or None
        self.edges = edges  # [(pattern edge, src, tgt, type, marked, fixed image or None)]
        self.fixed = fixed


def _plan(pattern: TypedGraph, host: TypedGraph, fixed_nodes, fixed_edges, prefer) -> list[_Step]:
    nodes = list(pattern.nodes)
    pos = {n: i for i, n in enumerate(nodes)}
    adj: dict = {n: [] for n in nodes}
    for e, edge in pattern.edges.items():
        adj[edge.src].append((e, edge.tgt, True))
        if edge.tgt != edge.src:
            adj[edge.tgt].append((e, edge.src, False))

    placed: set = set()
    bound_edges: set = set()
    steps = []
    while len(steps) < len(nodes):
        unplaced = [n for n in nodes if n not in placed]
        pinned = [n for n in unplaced if n in fixed_nodes]
        if pinned:
            choice = pinned[0]
        else:
            frontier = [n for n in unplaced if any(o in placed for _, o, _ in adj[n])]
            if frontier:
                choice = max(
                    frontier,
                    key=lambda n: (
                        sum(1 for _, o, _ in adj[n] if o in placed),
                        n in prefer,
                        -pos[n],
                    ),
                )
            else:
                choice = min(
                    unplaced,
                    key=lambda n: (
                        n not in prefer,
                        not pattern.is_marked(n),
                        host.count_of_type(pattern.nodes[n]),
                        pos[n],
                    ),
                )
        anchor = None
        for e, other, outgoing in adj[choice]:
            if other in placed:
                # choice is the target of e when e leaves the placed node
                anchor = (pattern.edges[e].type, other, outgoing is False)
                break
        placed.add(choice)
        step_edges = []
        for e, other, _ in adj[choice]:
            if e in bound_edges or other not in placed:
                continue
            bound_edges.add(e)
            edge = pattern.edges[e]
            step_edges.append((e, edge.src, edge.tgt, edge.type, pattern.is_marked(e), fixed_edges.get(e)))
        steps.append(
            _Step(
                choice,
                pattern.nodes[choice],
                pattern.is_marked(choice),
                anchor,
                step_edges,
                fixed_nodes.get(choice),
            )
        )
    return steps


class _Search:
    def __init__(
        self,
        pattern: TypedGraph,
        host: TypedGraph,
        fixed_nodes: Mapping = None,
        fixed_edges: Mapping = None,
        node_filter: Optional[NodeFilter] = None,
        prefer: Iterable = (),
    ):
        self.pattern = pattern
        self.host = host
        self.node_filter = node_filter
        self.steps = _plan(pattern, host, dict(fixed_nodes or {}), dict(fixed_edges or {}), set(prefer))
        self.nmap: dict = {}
        self.emap: dict = {}
        self.used_n: set = set()
        self.used_e: set = set()

        # one slot per pattern node, followed by the edges it closes
        self.slots = []
        for step in self.steps:
            self.slots.append((True, step))
            for e in step.edges:
                self.slots.append((False, e))

    def _node_candidates(self, step: _Step) -> list:
        host = self.host
        if step.fixed is not None:
            ok = host.has_node(step.fixed) and host.nodes[step.fixed] == step.type
            found = [step.fixed] if ok else []
        elif step.anchor is None:
            found = list(host.nodes_of_type(step.type))
        else:
            etype, placed, is_target = step.anchor
            base = self.nmap[placed]
            hedges = host.edges
            if is_target:
                found = [hedges[e].tgt for e in host.out_edges(base) if hedges[e].type == etype]
            else:
                found = [hedges[e].src for e in host.in_edges(base) if hedges[e].type == etype]
            if len(found) > 1:
                found = list(dict.fromkeys(found))
        used = self.used_n
        flt = self.node_filter
        pn = step.node
        if step.marked:
            found = [c for c in found if host.is_marked(c)]
        if flt is not None:
            return [c for c in found if c not in used and flt(pn, c)]
        return [c for c in found if c not in used]

    def _edge_candidates(self, slot) -> list:
        _, ps, pt, ptype, pmarked, pfixed = slot
        host = self.host
        hs, ht = self.nmap[ps], self.nmap[pt]
        hedges = host.edges
        if pfixed is not None:
            cands = [pfixed] if pfixed in hedges else []
        else:
            cands = host.out_edges(hs)
        used = self.used_e
        out = []
        for he in cands:
            edge = hedges[he]
            if edge.type != ptype or edge.src != hs or edge.tgt != ht or he in used:
                continue
            if pmarked and not host.is_marked(he):
                continue
            out.append(he)
        return out

    def run(self) -> Iterator[tuple[dict, dict]]:
        slots = self.slots
        depth = len(slots)
        nmap, emap = self.nmap, self.emap
        if depth == 0:
            yield nmap, emap
            return
        used_n, used_e = self.used_n, self.used_e
        pending = [None] * depth
        bound = [None] * depth
        k = 0
        pending[0] = self._candidates_at(0)
        while k >= 0:
            is_node, item = slots[k]
            prev = bound[k]
            if prev is not None:
                if is_node:
                    used_n.discard(prev)
                    del nmap[item.node]
                else:
                    used_e.discard(prev)
                    del emap[item[0]]
                bound[k] = None
            cands = pending[k]
            if not cands:
                k -= 1
                continue
            cand = cands.pop()
            bound[k] = cand
            if is_node:
                nmap[item.node] = cand
                used_n.add(cand)
            else:
                emap[item[0]] = cand
                used_e.add(cand)
            if k + 1 == depth:
                yield nmap, emap
            else:
                k += 1
                pending[k] = self._candidates_at(k)

    def _candidates_at(self, k: int) -> list:
        is_node, item = self.slots[k]
        found = self._node_candidates(item) if is_node else self._edge_candidates(item)
        # popped from the end, so reverse to keep enumeration order
        found.reverse()
        return found


def _count_feasible(pattern: TypedGraph, host: TypedGraph) -> bool:
    need: dict = {}
    for t in pattern.nodes.values():
        need[t] = need.get(t, 0) + 1
    return all(host.count_of_type(t) >= k for t, k in need.items())


def iter_morphisms(
    pattern: TypedGraph,
    host: TypedGraph,
    *,
    fixed_nodes: Mapping = None,
    fixed_edges: Mapping = None,
    node_filter: Optional[NodeFilter] = None,
    prefer: Iterable = (),
) -> Iterator[tuple[dict, dict]]:
    """Raw enumeration of injective, typed, mark-respecting maps.

    Yields ``(node_map, edge_map)`` dicts that are reused between
    iterations; copy them if they must outlive the step.
    """
    if not _count_feasible(pattern, host) or len(pattern.edges) > len(host.edges):
        return iter(())
    return _Search(pattern, host, fixed_nodes, fixed_edges, node_filter, prefer).run()


def nac_violated(nac: NAC, node_map: Mapping, edge_map: Mapping, host: TypedGraph) -> bool:
    """True if some monomorphism of the NAC graph extends the match."""
    required = nac.mark_only
    if required is not None:
        return all(host.is_marked(node_map[x] if is_node else edge_map[x]) for x, is_node in required)
    emb = nac.embedding
    fixed_nodes = {emb.nodes[x]: node_map[x] for x in emb.nodes}
    fixed_edges = {emb.edges[x]: edge_map[x] for x in emb.edges}
    for _ in iter_morphisms(nac.graph, host, fixed_nodes=fixed_nodes, fixed_edges=fixed_edges):
        return True
    return False


def satisfies_nacs(nacs: Iterable[NAC], node_map: Mapping, edge_map: Mapping, host: TypedGraph) -> bool:
    return not any(nac_violated(nac, node_map, edge_map, host) for nac in nacs)


def find_monomorphisms(
    pattern: TypedGraph,
    host: TypedGraph,
    nacs: Iterable[NAC] = (),
    *,
    node_filter: Optional[NodeFilter] = None,
    prefer: Iterable = (),
    rule=None,
) -> Iterator[Match]:
    """Enumerate the matches of ``pattern`` in ``host``.

    Every yielded match is injective, type preserving, commutes with
    source/target, maps marked pattern elements onto marked host elements
    and admits no extension for any NAC. ``node_filter(pattern_node,
    host_node)`` prunes candidates early; ``prefer`` biases the choice of
    start nodes. Raises :class:`TypeGraphMismatch` when the graphs are
    typed differently.
    """
    require_same_type_graph(pattern, host)
    nacs = tuple(nacs)
    for nac in nacs:
        if nac.embedding.source is not pattern and nac.embedding.source != pattern:
            raise InputError("NAC embedding does not start at the pattern")
    for nmap, emap in iter_morphisms(pattern, host, node_filter=node_filter, prefer=prefer):
        if nacs and not satisfies_nacs(nacs, nmap, emap, host):
            continue
        yield Match(GraphMorphism(pattern, host, nmap, emap), rule)
