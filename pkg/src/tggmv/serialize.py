"""JSON formats.

Every document carries a ``format`` field ``tggmv/<kind>@<version>``.
Output is canonical (sorted keys, elements in insertion order) so equal
inputs serialise to identical bytes. Element ids may be strings, integers
or tuples of those; tuples are written as JSON arrays and read back as
tuples.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping

from .errors import InputError
from .graph import GraphMorphism, TypedGraph, TypeGraph, unmarked
from .matching import NAC
from .mvm import KINDS, VERSION, MultiVersionModel, VersionHistory, rep_edge_id
from .mvrules import MVForwardRule, adapt
from .rules import Rule
from .tgg import ForwardRule, TGGRule, TripleTypeGraph
from .versions import VersionGraph

FORMAT_VERSION = 1


def fmt(kind: str) -> str:
    return f"tggmv/{kind}@{FORMAT_VERSION}"


def encode_id(x: Any) -> Any:
    if isinstance(x, tuple):
        return [encode_id(y) for y in x]
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise InputError(f"element id {x!r} is not serialisable (use str, int or tuples)")


def decode_id(x: Any) -> Any:
    if isinstance(x, list):
        return tuple(decode_id(y) for y in x)
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise InputError(f"invalid element id {x!r}")


def dumps(doc: Mapping) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _expect(doc: Mapping, kind: str) -> None:
    if not isinstance(doc, Mapping):
        raise InputError(f"expected a JSON object for {kind}")
    got = doc.get("format")
    if got != fmt(kind):
        raise InputError(f"expected format {fmt(kind)!r}, found {got!r}")


def _field(doc: Mapping, key: str):
    try:
        return doc[key]
    except KeyError:
        raise InputError(f"missing field {key!r}") from None


# -- type graphs and graphs --------------------------------------------


def type_graph_to_json(tg: TypeGraph) -> dict:
    doc = {"format": fmt("typegraph"), "edges": {e: list(st) for e, st in tg.edges.items()}}
    if isinstance(tg, TripleTypeGraph):
        doc["nodes"] = dict(tg.node_domains)
    else:
        doc["nodes"] = list(tg.nodes)
    return doc


def type_graph_from_json(doc: Mapping) -> TypeGraph:
    _expect(doc, "typegraph")
    nodes = _field(doc, "nodes")
    edges = {e: tuple(st) for e, st in _field(doc, "edges").items()}
    if isinstance(nodes, Mapping):
        return TripleTypeGraph(nodes, edges)
    return TypeGraph(nodes, edges)


def _graph_body(g: TypedGraph) -> dict:
    nodes = []
    for n, t in g.nodes.items():
        item = {"id": encode_id(n), "type": t}
        if g.is_marked(n):
            item["marked"] = True
        nodes.append(item)
    edges = []
    for e, edge in g.edges.items():
        item = {"id": encode_id(e), "type": edge.type, "src": encode_id(edge.src), "tgt": encode_id(edge.tgt)}
        if g.is_marked(e):
            item["marked"] = True
        edges.append(item)
    return {"nodes": nodes, "edges": edges}


def _graph_from_body(doc: Mapping, tg: TypeGraph) -> TypedGraph:
    g = TypedGraph(tg)
    for n in _field(doc, "nodes"):
        g.add_node(n["type"], decode_id(n["id"]), marked=bool(n.get("marked", False)))
    for e in _field(doc, "edges"):
        g.add_edge(e["type"], decode_id(e["src"]), decode_id(e["tgt"]), decode_id(e["id"]), marked=bool(e.get("marked", False)))
    return g


def graph_to_json(g: TypedGraph) -> dict:
    doc = {"format": fmt("graph"), "types": type_graph_to_json(g.type_graph)}
    doc.update(_graph_body(g))
    return doc


def graph_from_json(doc: Mapping, types: TypeGraph | None = None) -> TypedGraph:
    _expect(doc, "graph")
    tg = type_graph_from_json(_field(doc, "types")) if types is None else types
    return _graph_from_body(doc, tg)


# -- grammars and rules ------------------------------------------------


def tgg_to_json(rules: Iterable[TGGRule]) -> dict:
    rules = list(rules)
    if not rules:
        raise InputError("a grammar needs at least one rule")
    out = []
    for r in rules:
        base = r.rule
        kept = set(base.right.nodes.values()) | set(base.right.edges.values())
        rhs = base.rhs
        out.append(
            {
                "name": r.name,
                "nodes": [[encode_id(n), t, n not in kept] for n, t in rhs.nodes.items()],
                "edges": [
                    [encode_id(e), edge.type, encode_id(edge.src), encode_id(edge.tgt), e not in kept]
                    for e, edge in rhs.edges.items()
                ],
            }
        )
    return {"format": fmt("tgg"), "types": type_graph_to_json(rules[0].type_graph), "rules": out}


def tgg_from_json(doc: Mapping) -> list[TGGRule]:
    _expect(doc, "tgg")
    tg = type_graph_from_json(_field(doc, "types"))
    if not isinstance(tg, TripleTypeGraph):
        raise InputError("a grammar needs a triple type graph (nodes mapped to domains)")
    rules = []
    for r in _field(doc, "rules"):
        nodes = [(decode_id(i), t, bool(c)) for i, t, c in _field(r, "nodes")]
        edges = [(decode_id(i), t, decode_id(s), decode_id(d), bool(c)) for i, t, s, d, c in r.get("edges", [])]
        rules.append(TGGRule.from_shorthand(tg, _field(r, "name"), nodes, edges))
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise InputError("rule names must be unique")
    return rules


def forward_rule_to_json(fr: ForwardRule) -> dict:
    return {
        "format": fmt("forward-rule"),
        "name": fr.name,
        "lhs": _graph_body(fr.rule.lhs),
        "rhs": _graph_body(fr.rule.rhs),
        "translated": [encode_id(x) for x in fr.rule.lhs.elements() if x in fr.translated],
        "nacs": [encode_id(x) for x in fr.rule.lhs.elements() if x not in fr.translated],
    }


def forward_rule_from_json(doc: Mapping, types: TripleTypeGraph) -> ForwardRule:
    """Rebuild a forward rule; ``nacs`` lists the elements that must carry
    no untranslated-mark."""
    _expect(doc, "forward-rule")
    lhs = _graph_from_body(_field(doc, "lhs"), types)
    rhs = _graph_from_body(_field(doc, "rhs"), types)
    nacs = []
    for x in map(decode_id, doc.get("nacs", [])):
        forbidden = lhs.copy()
        forbidden.mark(x)
        nacs.append(NAC(forbidden, GraphMorphism(lhs, forbidden, {n: n for n in lhs.nodes}, {e: e for e in lhs.edges})))
    rule = Rule.from_inclusions(lhs, unmarked(lhs), rhs, nacs, name=_field(doc, "name"))
    return ForwardRule(rule, frozenset(map(decode_id, _field(doc, "translated"))))


def mv_rule_to_json(r: MVForwardRule) -> dict:
    return {
        "format": fmt("mv-rule"),
        "name": r.name,
        "lhs": _graph_body(r.rule.lhs),
        "rhs": _graph_body(r.rule.rhs),
        "translated": [encode_id(x) for x in r.rule.lhs.nodes if x in r.translated],
        "context": [encode_id(x) for x in r.rule.lhs.nodes if x in r.context],
        "forward": forward_rule_to_json(r.forward),
    }


def mv_rule_from_json(doc: Mapping, types: TripleTypeGraph) -> MVForwardRule:
    """The adapted rule is re-derived from the embedded forward rule and
    checked against the stored graphs."""
    _expect(doc, "mv-rule")
    rebuilt = adapt(forward_rule_from_json(_field(doc, "forward"), types))
    stored = _graph_from_body(_field(doc, "lhs"), rebuilt.rule.lhs.type_graph)
    if stored != rebuilt.rule.lhs:
        raise InputError(f"mv-rule {doc.get('name')!r}: stored pattern does not match its forward rule")
    return rebuilt


# -- histories and multi-version models --------------------------------


def history_to_json(h: VersionHistory) -> dict:
    vg = h.version_graph
    deltas = []
    for d in h.to_deltas():
        deltas.append(
            {
                "version": encode_id(d["version"]),
                "del_elements": [encode_id(x) for x in d["del_elements"]],
                "add_nodes": [{"id": encode_id(n["id"]), "type": n["type"]} for n in d["add_nodes"]],
                "add_edges": [
                    {"id": encode_id(e["id"]), "type": e["type"], "src": encode_id(e["src"]), "tgt": encode_id(e["tgt"])}
                    for e in d["add_edges"]
                ],
            }
        )
    return {
        "format": fmt("history"),
        "types": type_graph_to_json(h.type_graph),
        "initial": encode_id(vg.initial),
        "versions": [
            {"id": encode_id(v), "parents": [encode_id(p) for p in vg.parents[v]]} for v in vg.versions
        ],
        "base": _graph_body(h.models[vg.initial]),
        "deltas": deltas,
    }


def history_from_json(doc: Mapping) -> VersionHistory:
    _expect(doc, "history")
    tg = type_graph_from_json(_field(doc, "types"))
    parents = {}
    for v in _field(doc, "versions"):
        vid = decode_id(_field(v, "id"))
        if vid in parents:
            raise InputError(f"version {vid!r} declared twice")
        parents[vid] = [decode_id(p) for p in v.get("parents", [])]
    base = _graph_from_body(_field(doc, "base"), tg)
    deltas = []
    for d in doc.get("deltas", []):
        deltas.append(
            {
                "version": decode_id(_field(d, "version")),
                "del_elements": [decode_id(x) for x in d.get("del_elements", [])],
                "add_nodes": [{"id": decode_id(n["id"]), "type": n["type"]} for n in d.get("add_nodes", [])],
                "add_edges": [
                    {"id": decode_id(e["id"]), "type": e["type"], "src": decode_id(e["src"]), "tgt": decode_id(e["tgt"])}
                    for e in d.get("add_edges", [])
                ],
            }
        )
    initial = decode_id(doc["initial"]) if "initial" in doc else None
    return VersionHistory.from_deltas(tg, parents, base, deltas, initial)


def mvm_to_json(mvm: MultiVersionModel) -> dict:
    vg = mvm.version_graph
    g = mvm.graph
    nodes = []
    for x in mvm.structural_nodes():
        item = {"id": encode_id(x), "type": g.nodes[x], "origin": encode_id(mvm.origin[x])}
        if mvm.types.represents[g.nodes[x]] == "edge":
            s, t = mvm.endpoints(x)
            item["src"], item["tgt"] = encode_id(s), encode_id(t)
        for k in KINDS:
            mask = mvm.links(x, k)
            if mask:
                item[k] = [encode_id(v) for v in vg.ordered(mask)]
        nodes.append(item)
    return {
        "format": fmt("mvm"),
        "types": type_graph_to_json(mvm.base_type_graph),
        "versions": [
            {"id": encode_id(v), "parents": [encode_id(p) for p in vg.parents[v]]} for v in vg.versions
        ],
        "nodes": nodes,
    }


def mvm_from_json(doc: Mapping) -> MultiVersionModel:
    _expect(doc, "mvm")
    base = type_graph_from_json(_field(doc, "types"))
    vg = VersionGraph({decode_id(v["id"]): [decode_id(p) for p in v.get("parents", [])] for v in _field(doc, "versions")})
    mvm = MultiVersionModel.empty(base, vg)
    items = list(_field(doc, "nodes"))
    for item in items:
        if item["type"] == VERSION:
            raise InputError("version nodes are implied by 'versions'")
        mvm.add_element_node(item["type"], decode_id(item["id"]), decode_id(item["origin"]))
    for item in items:
        x = decode_id(item["id"])
        if "src" in item or "tgt" in item:
            ty = item["type"]
            mvm.graph.add_edge(f"src:{ty}", x, decode_id(item["src"]), rep_edge_id(x, "src"))
            mvm.graph.add_edge(f"tgt:{ty}", x, decode_id(item["tgt"]), rep_edge_id(x, "tgt"))
        for k in KINDS:
            if k in item:
                mvm._set_links(x, k, vg.mask(decode_id(v) for v in item[k]))
    return mvm


def load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def save(doc: Mapping, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
