"""Exact isomorphism of typed graphs with bookkeeping marks."""

from __future__ import annotations

from collections import Counter
from typing import Optional

from .graph import GraphMorphism, TypedGraph, require_same_type_graph
from .matching import iter_morphisms


def _refine(graphs: list[TypedGraph], rounds: Optional[int] = None) -> list[dict]:
    """Joint 1-WL colour refinement; colours are comparable across graphs."""
    colours = [{n: (g.nodes[n], g.is_marked(n)) for n in g.nodes} for g in graphs]
    palette: dict = {}

    def canon(cols):
        return [{n: palette.setdefault(c, len(palette)) for n, c in col.items()} for col in cols]

    colours = canon(colours)
    limit = rounds if rounds is not None else max((len(g.nodes) for g in graphs), default=0)
    classes = len(set().union(*[set(c.values()) for c in colours])) if colours else 0
    for _ in range(limit):
        nxt = []
        for g, col in zip(graphs, colours):
            edges = g.edges
            new = {}
            for n in g.nodes:
                outs = sorted((edges[e].type, g.is_marked(e), col[edges[e].tgt]) for e in g.out_edges(n))
                ins = sorted((edges[e].type, g.is_marked(e), col[edges[e].src]) for e in g.in_edges(n))
                new[n] = (col[n], tuple(outs), tuple(ins))
            nxt.append(new)
        palette = {}
        nxt = canon(nxt)
        count = len(set().union(*[set(c.values()) for c in nxt]))
        colours = nxt
        if count == classes:
            break
        classes = count
    return colours


def _edge_signature(g: TypedGraph) -> Counter:
    return Counter((e.type, g.is_marked(x)) for x, e in g.edges.items())


def graph_isomorphic(g: TypedGraph, h: TypedGraph) -> Optional[GraphMorphism]:
    """A type-, structure- and mark-preserving bijection ``g -> h``, or None.

    Colour classes from joint refinement prune candidates; the remaining
    search is the ordinary backtracking matcher, so the answer is exact.
    """
    require_same_type_graph(g, h)
    if len(g.nodes) != len(h.nodes) or len(g.edges) != len(h.edges):
        return None
    if _edge_signature(g) != _edge_signature(h):
        return None
    if Counter((t, g.is_marked(n)) for n, t in g.nodes.items()) != Counter(
        (t, h.is_marked(n)) for n, t in h.nodes.items()
    ):
        return None
    cg, ch = _refine([g, h])
    if Counter(cg.values()) != Counter(ch.values()):
        return None

    def same_colour(pn, hn):
        return cg[pn] == ch[hn]

    # marked -> marked plus equal per-(type, mark) counts forces a bijection
    # that also maps unmarked onto unmarked
    for nmap, emap in iter_morphisms(g, h, node_filter=same_colour):
        witness = GraphMorphism(g, h, nmap, emap)
        if all(g.is_marked(x) == h.is_marked(witness(x)) for x in g.elements()):
            return witness
    return None


def isomorphic(g: TypedGraph, h: TypedGraph) -> bool:
    return graph_isomorphic(g, h) is not None
