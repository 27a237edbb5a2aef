"""Synthetic version histories of AST-like models.

Each version derives from a parent by a handful of edits (add/remove a
field, add/remove a class) until roughly ``change_rate`` of the parent's
elements were touched. Versions normally extend the latest version; with
``branch_probability`` they fork from a random earlier one, and with
``merge_probability`` they join two versions (union of both models).
Every generated model is translatable by the example grammar.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .ast2cd import TRIPLE_TYPES, add_field
from .errors import InputError
from .graph import TypedGraph
from .mvm import VersionHistory
from .versions import VersionGraph


@dataclass(frozen=True)
class BenchConfig:
    versions: int = 50
    base_classes: int = 20
    fields_per_class: int = 3
    change_rate: float = 0.02
    branch_probability: float = 0.0
    seed: int = 0
    merge_probability: float = 0.0

    def __post_init__(self):
        for name in ("versions", "base_classes"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if self.fields_per_class < 0:
            raise InputError("fields_per_class must not be negative")
        for name in ("change_rate", "branch_probability", "merge_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InputError(f"{name} must lie in [0, 1]")


class _Builder:
    """Fresh-id source shared by all versions of one history."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.classes = 0
        self.fields = 0

    def new_class(self, g: TypedGraph):
        self.classes += 1
        return g.add_node("ClassDecl", f"c{self.classes}")

    def new_field(self, g: TypedGraph, owner=None):
        classes = list(g.nodes_of_type("ClassDecl"))
        if not classes:
            return 0
        owner = owner if owner is not None else self.rng.choice(classes)
        self.fields += 1
        add_field(g, owner, self.rng.choice(classes), f"f{self.fields}")
        return 5

    def initial(self, cfg: BenchConfig) -> TypedGraph:
        g = TypedGraph(TRIPLE_TYPES)
        owners = [self.new_class(g) for _ in range(cfg.base_classes)]
        for c in owners:
            for _ in range(cfg.fields_per_class):
                self.new_field(g, c)
        return g


def _field_elements(g: TypedGraph, f) -> list:
    """A field node, its TypeAccess and the three edges around them."""
    out = [e for e in g.in_edges(f)]
    for acc in g.out_edges(f):
        t = g.edges[acc].tgt
        out += [acc] + list(g.out_edges(t)) + [t]
    return out + [f]


def _remove(g: TypedGraph, elements) -> int:
    elements = list(dict.fromkeys(elements))
    for x in elements:
        if g.has_edge(x):
            g.remove_edge(x)
    for x in elements:
        if g.has_node(x):
            g.remove_node(x)
    return len(elements)


def _remove_field(g: TypedGraph, rng: random.Random) -> int:
    fields = list(g.nodes_of_type("FieldDecl"))
    if not fields:
        return 0
    return _remove(g, _field_elements(g, rng.choice(fields)))


def _remove_class(g: TypedGraph, rng: random.Random) -> int:
    classes = list(g.nodes_of_type("ClassDecl"))
    if len(classes) < 2:
        return 0
    c = rng.choice(classes)
    doomed = []
    for e in g.out_edges(c):
        doomed += _field_elements(g, g.edges[e].tgt)
    for e in g.in_edges(c):
        access = g.edges[e].src
        for a in g.in_edges(access):
            doomed += _field_elements(g, g.edges[a].src)
    return _remove(g, doomed + [c])


def _edit(g: TypedGraph, b: _Builder, rate: float) -> TypedGraph:
    rng = b.rng
    if rate >= 1.0:
        # nothing shared: a brand-new model of similar shape
        fresh = TypedGraph(TRIPLE_TYPES)
        classes = max(1, g.count_of_type("ClassDecl"))
        fields = g.count_of_type("FieldDecl")
        for _ in range(classes):
            b.new_class(fresh)
        for _ in range(fields):
            b.new_field(fresh)
        return fresh
    g = g.copy()
    if rate <= 0.0:
        return g
    target = max(1, round(rate * len(g)))
    touched = 0
    while touched < target:
        op = rng.random()
        if op < 0.4:
            done = b.new_field(g)
        elif op < 0.7:
            done = _remove_field(g, rng)
        elif op < 0.85:
            b.new_class(g)
            done = 1
        else:
            done = _remove_class(g, rng)
        touched += done
    return g


def _union(a: TypedGraph, b: TypedGraph) -> TypedGraph:
    g = a.copy()
    for n, t in b.nodes.items():
        if not g.has_node(n):
            g.add_node(t, n)
    for e, edge in b.edges.items():
        if not g.has_edge(e):
            g.add_edge(edge.type, edge.src, edge.tgt, e)
    return g


def generate_history(cfg: BenchConfig) -> VersionHistory:
    """A correct, deterministic (per seed) history following ``cfg``."""
    rng = random.Random(cfg.seed)
    b = _Builder(rng)
    names = [f"v{i + 1}" for i in range(cfg.versions)]
    parents = {names[0]: []}
    models = {names[0]: b.initial(cfg)}
    for i in range(1, cfg.versions):
        v = names[i]
        first = names[i - 1]
        if i > 1 and rng.random() < cfg.branch_probability:
            first = names[rng.randrange(i - 1)]
        ps = [first]
        base = models[first]
        if i > 1 and rng.random() < cfg.merge_probability:
            other = rng.choice([w for w in names[:i] if w != first])
            ps.append(other)
            base = _union(base, models[other])
        parents[v] = ps
        models[v] = _edit(base, b, cfg.change_rate)
    return VersionHistory(TRIPLE_TYPES, VersionGraph(parents), models)


def sharing(history: VersionHistory) -> float:
    """Mean Jaccard overlap of element sets over all parent/child pairs
    (1.0 for a single version)."""
    vg = history.version_graph
    ratios = []
    for v in vg.versions:
        b = set(history.models[v].elements())
        for p in vg.parents[v]:
            a = set(history.models[p].elements())
            union = a | b
            ratios.append(len(a & b) / len(union) if union else 1.0)
    return sum(ratios) / len(ratios) if ratios else 1.0


def random_history(
    seed: int,
    max_versions: int = 6,
    max_elements: int = 60,
    *,
    untranslatable: float = 0.0,
) -> VersionHistory:
    """A small random history for property tests: 1..max_versions versions
    with branches and merges, every model capped at ``max_elements``.

    With ``untranslatable`` > 0 some versions also get stray FieldDecl or
    TypeAccess nodes that no rule covers.
    """
    rng = random.Random(seed)
    for attempt in range(100):
        cfg = BenchConfig(
            versions=rng.randint(1, max_versions),
            base_classes=rng.randint(1, 4),
            fields_per_class=rng.randint(0, 2),
            change_rate=rng.choice([0.05, 0.1, 0.3, 0.6, 1.0]),
            branch_probability=rng.random() * 0.6,
            merge_probability=rng.random() * 0.5,
            seed=rng.randrange(1 << 30),
        )
        h = generate_history(cfg)
        if untranslatable:
            h = _add_strays(h, rng, untranslatable)
        if max(len(m) for m in h.models.values()) <= max_elements:
            return h
    raise RuntimeError(f"no history within {max_elements} elements after {attempt + 1} attempts")


def _add_strays(h: VersionHistory, rng: random.Random, prob: float) -> VersionHistory:
    models = {}
    vg = h.version_graph
    stray = 0
    for v in vg.versions:
        m = h.models[v].copy()
        for p in vg.parents[v]:
            # keep strays inherited so they are shared across versions
            for x, t in models[p].nodes.items():
                if str(x).startswith("stray") and not m.has_node(x) and rng.random() < 0.8:
                    m.add_node(t, x)
        if rng.random() < prob:
            stray += 1
            m.add_node(rng.choice(["FieldDecl", "TypeAccess"]), f"stray{stray}")
        models[v] = m
    return VersionHistory(h.type_graph, vg, models)

