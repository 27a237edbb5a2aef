import pytest

from tggmv.ast2cd import TRIPLE_TYPES, example_graph, example_tgg, field_rule
from tggmv.engine import transform_forward
from tggmv.errors import InputError
from tggmv.graph import TypedGraph
from tggmv.tgg import (
    CORRESPONDENCE,
    SOURCE,
    TARGET,
    TGGRule,
    TripleTypeGraph,
    bookkeeping_set,
    derive_forward_rule,
    derive_forward_rules,
    init_forward,
)


def test_triple_type_graph_domains():
    tg = TRIPLE_TYPES
    assert tg.domain("ClassDecl") == SOURCE
    assert tg.domain("declaration") == SOURCE
    assert tg.domain("Association") == TARGET
    assert tg.domain("CorrField") == CORRESPONDENCE
    assert tg.domain("CorrField.corrS") == CORRESPONDENCE
    assert set(tg.restrict(SOURCE).nodes) == {"ClassDecl", "FieldDecl", "TypeAccess"}
    with pytest.raises(InputError):
        TripleTypeGraph({"a": SOURCE, "b": TARGET}, {"x": ("a", "b")})


def test_field_forward_rule_shape():
    fr = derive_forward_rule(field_rule())
    lhs = fr.rule.lhs
    assert fr.translated == {"f1", "t1", "decl1", "acc1", "type1"}
    assert lhs.bookkeeping == fr.translated
    assert sum(1 for x in fr.translated if x in lhs.nodes) == 2
    assert sum(1 for x in fr.translated if x in lhs.edges) == 3
    # context: 2 ClassDecl, 2 CorrClass, 2 Class, 4 links
    assert len(fr.context) == 10
    assert len(fr.rule.nacs) == len(fr.context)
    created_nodes, created_edges = fr.rule.created()
    assert {fr.rule.rhs.nodes[n] for n in created_nodes} == {"CorrField", "Association"}
    assert len(created_edges) == 4
    assert fr.rule.deleted() == ((), ())
    assert fr.rule.rhs.bookkeeping == frozenset()


def test_axiom_forward_rule():
    fr = derive_forward_rules(example_tgg())[0]
    assert fr.translated == {"c1"}
    assert not fr.degenerate
    assert fr.origin.is_axiom


def test_init_forward_marks_everything():
    g = init_forward(example_graph())
    assert g.bookkeeping == frozenset(g.elements())
    assert bookkeeping_set(g) == frozenset()
    bad = example_graph()
    bad.add_node("Class")
    with pytest.raises(InputError):
        init_forward(bad)


def test_transform_example_graph():
    result = transform_forward(example_graph(), derive_forward_rules(example_tgg()))
    types = sorted(result.graph.nodes.values())
    assert types.count("Class") == 2
    assert types.count("Association") == 1
    assert types.count("CorrClass") + types.count("CorrField") == 3
    assert result.complete
    assert len(result.log) == 3
    assert result.graph.bookkeeping == frozenset()


def test_empty_source_without_axiom():
    rules = derive_forward_rules(example_tgg()[1:])
    result = transform_forward(TypedGraph(TRIPLE_TYPES), rules)
    assert result.complete and len(result.graph) == 0 and len(result.log) == 0


def test_untranslatable_element_leaves_incomplete():
    g = example_graph()
    g.add_node("TypeAccess", "stray")
    result = transform_forward(g, derive_forward_rules(example_tgg()))
    assert not result.complete
    assert result.graph.bookkeeping == frozenset({"stray"})


def test_tgg_rule_must_not_delete():
    from tggmv.rules import Rule

    lhs = TypedGraph(TRIPLE_TYPES)
    lhs.add_node("ClassDecl", "c")
    empty = TypedGraph(TRIPLE_TYPES)
    with pytest.raises(InputError):
        TGGRule(Rule.from_inclusions(lhs, empty, empty, name="del"))
