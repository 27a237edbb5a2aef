import random

import pytest
from hypothesis import given, strategies as st

from tggmv.graph import GraphMorphism, TypedGraph
from tggmv.matching import NAC, find_monomorphisms

from oracles import SMALL_TYPES, brute_force_monomorphisms, connected_subpattern, random_typed_graph


def as_pairs(match):
    return frozenset(match.nodes.items()) | frozenset(match.edges.items())


def engine_set(pattern, host):
    found = [as_pairs(m) for m in find_monomorphisms(pattern, host)]
    assert len(found) == len(set(found)), "duplicate matches"
    return set(found)


@given(st.integers(0, 10**9))
def test_matches_equal_brute_force(seed):
    rng = random.Random(seed)
    host = random_typed_graph(rng, SMALL_TYPES, rng.randint(1, 7), rng.randint(0, 12), mark_prob=0.3)
    if rng.random() < 0.5:
        pattern = connected_subpattern(rng, host, 4)
    else:
        pattern = random_typed_graph(rng, SMALL_TYPES, rng.randint(0, 4), rng.randint(0, 4), mark_prob=0.2)
    assert engine_set(pattern, host) == brute_force_monomorphisms(pattern, host)


def test_every_match_is_a_valid_monomorphism():
    rng = random.Random(5)
    for _ in range(30):
        host = random_typed_graph(rng, SMALL_TYPES, 6, 10, mark_prob=0.3)
        pattern = connected_subpattern(rng, host, 4)
        for m in find_monomorphisms(pattern, host):
            assert m.morphism.is_monomorphism()


def test_parallel_edges_and_loops():
    host = TypedGraph(SMALL_TYPES)
    a, b = host.add_node("A"), host.add_node("B")
    host.add_edge("ab", a, b)
    host.add_edge("ab", a, b)
    host.add_edge("aa", a, a)
    pat = TypedGraph(SMALL_TYPES)
    pa, pb = pat.add_node("A"), pat.add_node("B")
    pat.add_edge("ab", pa, pb)
    pat.add_edge("ab", pa, pb)
    assert len(list(find_monomorphisms(pat, host))) == 2  # the two edge orders
    loop = TypedGraph(SMALL_TYPES)
    x = loop.add_node("A")
    loop.add_edge("aa", x, x)
    assert len(list(find_monomorphisms(loop, host))) == 1


def test_empty_pattern_has_one_match():
    host = random_typed_graph(random.Random(1), SMALL_TYPES, 3, 2)
    assert len(list(find_monomorphisms(TypedGraph(SMALL_TYPES), host))) == 1


def test_nac_blocks_extension():
    # pattern: one A; NAC: that A has an outgoing ab edge
    pat = TypedGraph(SMALL_TYPES)
    pat.add_node("A", "x")
    forbidden = TypedGraph(SMALL_TYPES)
    forbidden.add_node("A", "x")
    forbidden.add_node("B", "y")
    forbidden.add_edge("ab", "x", "y", "e")
    nac = NAC(forbidden, GraphMorphism(pat, forbidden, {"x": "x"}, {}))
    host = TypedGraph(SMALL_TYPES)
    host.add_node("A", 1)
    host.add_node("A", 2)
    host.add_node("B", 3)
    host.add_edge("ab", 1, 3)
    got = [m.nodes["x"] for m in find_monomorphisms(pat, host, [nac])]
    assert got == [2]


def test_node_filter_prunes():
    host = random_typed_graph(random.Random(2), SMALL_TYPES, 6, 0)
    pat = TypedGraph(SMALL_TYPES)
    pat.add_node("A", "x")
    allowed = {n for n, t in host.nodes.items() if t == "A"}
    keep = set(list(allowed)[:1])
    got = {m.nodes["x"] for m in find_monomorphisms(pat, host, node_filter=lambda p, h: h in keep)}
    assert got == keep


def test_enumeration_order_is_deterministic():
    rng = random.Random(9)
    host = random_typed_graph(rng, SMALL_TYPES, 7, 12)
    pattern = connected_subpattern(rng, host, 3)
    first = [as_pairs(m) for m in find_monomorphisms(pattern, host)]
    second = [as_pairs(m) for m in find_monomorphisms(pattern, host.copy())]
    assert first == second


@pytest.mark.parametrize("marked_pattern", [True, False])
def test_marks_restrict_candidates(marked_pattern):
    host = TypedGraph(SMALL_TYPES)
    host.add_node("A", "m", marked=True)
    host.add_node("A", "u")
    pat = TypedGraph(SMALL_TYPES)
    pat.add_node("A", "x", marked=marked_pattern)
    got = {m.nodes["x"] for m in find_monomorphisms(pat, host)}
    assert got == ({"m"} if marked_pattern else {"m", "u"})
