import pytest

from tggmv.errors import InputError, TypeGraphMismatch
from tggmv.graph import GraphMorphism, TypedGraph, TypeGraph, identity, inclusion, unmarked

from oracles import SMALL_TYPES


def small():
    g = TypedGraph(SMALL_TYPES)
    a = g.add_node("A", "a")
    b = g.add_node("B", "b")
    g.add_edge("ab", a, b, "e1")
    g.add_edge("ab", a, b, "e2")  # parallel
    g.add_edge("aa", a, a, "loop")
    return g


def test_typing_enforced():
    g = small()
    with pytest.raises(InputError):
        g.add_edge("ab", "b", "a")
    with pytest.raises(InputError):
        g.add_node("C")
    with pytest.raises(InputError):
        g.add_node("A", "a")  # duplicate id


def test_remove_node_with_edges_rejected():
    g = small()
    with pytest.raises(InputError):
        g.remove_node("b")
    g.remove_edge("e1")
    g.remove_edge("e2")
    g.remove_node("b")
    assert not g.has_node("b")


def test_marks_and_copy_are_independent():
    g = small()
    g.mark("e1")
    h = g.copy()
    h.unmark("e1")
    h.add_node("A")
    assert g.is_marked("e1") and not h.is_marked("e1")
    assert len(g) == 5 and len(h) == 6
    assert g.bookkeeping == frozenset({"e1"})
    assert unmarked(g).bookkeeping == frozenset()


def test_fresh_ids_skip_taken_ids():
    g = TypedGraph(SMALL_TYPES)
    g.add_node("A", 0)
    g.add_node("A", 1)
    n = g.add_node("A")
    assert n not in (0, 1)


def test_equality_includes_marks():
    g, h = small(), small()
    assert g == h
    h.mark("a")
    assert g != h


def test_subgraph_needs_endpoints():
    g = small()
    sub = g.subgraph(["a", "loop"])
    assert set(sub.elements()) == {"a", "loop"}
    with pytest.raises(InputError):
        g.subgraph(["e1"])


def test_morphism_checks():
    g = small()
    ident = identity(g)
    assert ident.is_monomorphism() and ident.is_surjective()
    sub = g.subgraph(["a", "b", "e1"])
    inc = inclusion(sub, g)
    assert inc.is_monomorphism()
    # e1 -> e2 is also a valid (non-inclusion) monomorphism
    alt = GraphMorphism(sub, g, {"a": "a", "b": "b"}, {"e1": "e2"})
    assert alt.is_valid()
    bad = GraphMorphism(sub, g, {"a": "a", "b": "b"}, {"e1": "loop"})
    assert not bad.is_valid()
    assert inc.compose(ident) == inc
    assert ident.inverse() == ident


def test_marked_source_must_map_to_marked_target():
    g = small()
    p = g.subgraph(["a"])
    p.mark("a")
    m = GraphMorphism(p, g, {"a": "a"}, {})
    assert not m.is_valid()
    assert m.is_valid(check_marks=False)


def test_type_graph_equality_and_mismatch():
    other = TypeGraph(["A", "B"], {"ab": ("A", "B")})
    assert other != SMALL_TYPES
    assert TypeGraph(["A", "B"], {"ab": ("A", "B")}) == other
    from tggmv.matching import find_monomorphisms

    with pytest.raises(TypeGraphMismatch):
        list(find_monomorphisms(TypedGraph(other), small()))
