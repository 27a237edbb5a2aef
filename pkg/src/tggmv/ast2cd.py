"""Example grammar: Java-like abstract syntax graphs to class diagrams.

Source language: ``ClassDecl`` nodes own ``FieldDecl`` nodes via
``declaration`` edges; a field names its type through a ``TypeAccess``
node (``access`` edge) that points at a ``ClassDecl`` (``type`` edge).

Target language: ``Class`` nodes and ``Association`` nodes with
``assocFrom``/``assocTo`` edges.

Rules:

* ``class``: axiom creating a ClassDecl, a Class and a ``CorrClass`` link.
* ``field``: for two linked class pairs, creates a field with its type
  access on the source side and an Association between the classes on the
  target side, linked by ``CorrField``.
* ``self_field``: the same for a field whose type is its own class (the
  matcher is injective, so this needs its own rule).

The grammar is deterministic on models where each FieldDecl has exactly one
owner and one TypeAccess, and each TypeAccess exactly one type.
"""

from __future__ import annotations

from .graph import TypedGraph, TypeGraph
from .mvm import VersionHistory
from .rules import Rule
from .tgg import TGGRule, TripleTypeGraph

AST_TYPES = TypeGraph(
    ["ClassDecl", "FieldDecl", "TypeAccess"],
    {
        "declaration": ("ClassDecl", "FieldDecl"),
        "access": ("FieldDecl", "TypeAccess"),
        "type": ("TypeAccess", "ClassDecl"),
    },
)

CD_TYPES = TypeGraph(
    ["Class", "Association"],
    {
        "assocFrom": ("Association", "Class"),
        "assocTo": ("Association", "Class"),
    },
)

TRIPLE_TYPES = TripleTypeGraph.build(
    AST_TYPES,
    CD_TYPES,
    {"CorrClass": ("ClassDecl", "Class"), "CorrField": ("FieldDecl", "Association")},
)

CC_S, CC_T = "CorrClass.corrS", "CorrClass.corrT"
CF_S, CF_T = "CorrField.corrS", "CorrField.corrT"


def class_rule() -> TGGRule:
    return TGGRule.from_shorthand(
        TRIPLE_TYPES,
        "class",
        [("c1", "ClassDecl", True), ("cc1", "CorrClass", True), ("k1", "Class", True)],
        [("cc1s", CC_S, "cc1", "c1", True), ("cc1t", CC_T, "cc1", "k1", True)],
    )


def _field_parts(self_typed: bool):
    c2 = "c1" if self_typed else "c2"
    k2 = "k1" if self_typed else "k2"
    nodes = [("c1", "ClassDecl", False), ("cc1", "CorrClass", False), ("k1", "Class", False)]
    edges = [("cc1s", CC_S, "cc1", "c1", False), ("cc1t", CC_T, "cc1", "k1", False)]
    if not self_typed:
        nodes += [("c2", "ClassDecl", False), ("cc2", "CorrClass", False), ("k2", "Class", False)]
        edges += [("cc2s", CC_S, "cc2", "c2", False), ("cc2t", CC_T, "cc2", "k2", False)]
    nodes += [
        ("f1", "FieldDecl", True),
        ("t1", "TypeAccess", True),
        ("cf1", "CorrField", True),
        ("a1", "Association", True),
    ]
    edges += [
        ("decl1", "declaration", "c1", "f1", True),
        ("acc1", "access", "f1", "t1", True),
        ("type1", "type", "t1", c2, True),
        ("cf1s", CF_S, "cf1", "f1", True),
        ("cf1t", CF_T, "cf1", "a1", True),
        ("from1", "assocFrom", "a1", "k1", True),
        ("to1", "assocTo", "a1", k2, True),
    ]
    return nodes, edges


def field_rule() -> TGGRule:
    nodes, edges = _field_parts(self_typed=False)
    return TGGRule.from_shorthand(TRIPLE_TYPES, "field", nodes, edges)


def self_field_rule() -> TGGRule:
    nodes, edges = _field_parts(self_typed=True)
    return TGGRule.from_shorthand(TRIPLE_TYPES, "self_field", nodes, edges)


def example_tgg() -> list[TGGRule]:
    return [class_rule(), field_rule(), self_field_rule()]


def example_graph() -> TypedGraph:
    """Two class declarations; the first owns a field typed by the second."""
    g = TypedGraph(TRIPLE_TYPES)
    g.add_node("ClassDecl", "c1")
    g.add_node("ClassDecl", "c2")
    g.add_node("FieldDecl", "f1")
    g.add_node("TypeAccess", "t1")
    g.add_edge("declaration", "c1", "f1", "decl1")
    g.add_edge("access", "f1", "t1", "acc1")
    g.add_edge("type", "t1", "c2", "type1")
    return g


def add_field_production() -> Rule:
    """Plain production over the AST language: given two classes, add a
    field to the first whose type is the second."""
    rhs = TypedGraph(AST_TYPES)
    rhs.add_node("ClassDecl", "c1")
    rhs.add_node("ClassDecl", "c2")
    rhs.add_node("FieldDecl", "f1")
    rhs.add_node("TypeAccess", "t1")
    rhs.add_edge("declaration", "c1", "f1", "decl1")
    rhs.add_edge("access", "f1", "t1", "acc1")
    rhs.add_edge("type", "t1", "c2", "type1")
    return Rule.production(rhs.subgraph(["c1", "c2"]), rhs, name="add_field")


def add_field(g: TypedGraph, owner, type_class, prefix: str) -> None:
    """Add a typed field to ``g`` in place, ids derived from ``prefix``."""
    f, t = f"{prefix}.f", f"{prefix}.t"
    g.add_node("FieldDecl", f)
    g.add_node("TypeAccess", t)
    g.add_edge("declaration", owner, f, f"{prefix}.decl")
    g.add_edge("access", f, t, f"{prefix}.acc")
    g.add_edge("type", t, type_class, f"{prefix}.type")


def example_history() -> VersionHistory:
    """Two versions: the example graph, then the same with a second field
    in ``c2`` typed by ``c1``."""
    v1 = example_graph()
    v2 = v1.copy()
    add_field(v2, "c2", "c1", "f2")
    return VersionHistory(TRIPLE_TYPES, _linear(2), {"v1": v1, "v2": v2})


def _linear(n: int):
    from .versions import VersionGraph

    names = [f"v{i + 1}" for i in range(n)]
    return VersionGraph({v: ([names[i - 1]] if i else []) for i, v in enumerate(names)})
