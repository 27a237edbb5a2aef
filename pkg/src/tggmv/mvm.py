"""Version histories and their consolidation into multi-version models.

A multi-version model (MVM) is a typed graph over an adapted type graph in
which every node and every edge of the original models becomes a node.
Source/target relationships of original edges are represented by ``src:``
and ``tgt:`` edges, and version membership by ``cv``/``dv`` edges pointing
at version nodes. ``ucv``/``udv`` edges record, in the same way, the
versions in which a source element is still untranslated.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .errors import HistoryError, InputError
from .graph import ElementId, GraphMorphism, TypedGraph, TypeGraph, inclusion, same_type_graph
from .tgg import SOURCE, TripleTypeGraph
from .versions import VersionGraph, VersionId, _bits

VERSION = "version"
SUC = "suc"
KINDS = ("cv", "dv", "ucv", "udv")


class MVTypeGraph(TypeGraph):
    """Adapted type graph TM_mv for a base type graph TM."""

    __slots__ = ("base", "represents", "edge_kind", "tracked")

    def __init__(self, base: TypeGraph):
        base_nodes = set(base.nodes)
        clash = base_nodes & set(base.edges)
        if clash:
            raise InputError(f"node and edge types share names {sorted(clash)}; cannot adapt")
        if VERSION in base_nodes or VERSION in base.edges:
            raise InputError(f"type name {VERSION!r} is reserved")
        nodes = list(base.nodes) + list(base.edges) + [VERSION]
        edges = {SUC: (VERSION, VERSION)}
        edge_kind = {SUC: ("suc", None)}
        represents = {n: "node" for n in base.nodes}
        for e, (s, t) in base.edges.items():
            represents[e] = "edge"
            edges[f"src:{e}"] = (e, s)
            edges[f"tgt:{e}"] = (e, t)
            edge_kind[f"src:{e}"] = ("src", e)
            edge_kind[f"tgt:{e}"] = ("tgt", e)
        if isinstance(base, TripleTypeGraph):
            tracked = frozenset(x for x in represents if base.domain(x) == SOURCE)
        else:
            tracked = frozenset(represents)
        for x in represents:
            kinds = KINDS if x in tracked else KINDS[:2]
            for k in kinds:
                edges[f"{k}:{x}"] = (x, VERSION)
                edge_kind[f"{k}:{x}"] = (k, x)
        super().__init__(nodes, edges)
        if len(self.edges) != len(edges):
            raise InputError("adapted type graph has clashing edge names")
        self.base = base
        self.represents = represents
        self.edge_kind = edge_kind
        self.tracked = tracked

    def _key(self):
        return (super()._key(), self.base._key())


def adapt_type_graph(tm: TypeGraph) -> MVTypeGraph:
    """Build TM_mv: a node per type node and per type edge of ``tm``, src/tgt
    representation edges, the version node with ``suc``, ``cv``/``dv`` for
    every element type and ``ucv``/``udv`` for source-domain ones."""
    return MVTypeGraph(tm)


class Span(NamedTuple):
    interface: TypedGraph
    left: GraphMorphism
    right: GraphMorphism


class VersionHistory:
    """Models M_1..M_n over one type graph, linked by modification spans.

    Element identity across versions is carried by element ids: the span
    between a parent and a child version is the common subgraph.
    """

    def __init__(self, type_graph: TypeGraph, version_graph: VersionGraph, models: Mapping[VersionId, TypedGraph]):
        self.type_graph = type_graph
        self.version_graph = version_graph
        self.models = {v: models[v] for v in version_graph.versions if v in models}
        missing = [v for v in version_graph.versions if v not in models]
        if missing:
            raise HistoryError(f"no model for versions {missing!r}")
        extra = [v for v in models if v not in version_graph]
        if extra:
            raise HistoryError(f"models for unknown versions {extra!r}")
        seen: dict = {}
        for v, m in self.models.items():
            if not same_type_graph(m.type_graph, type_graph):
                raise HistoryError(f"model of version {v!r} uses a different type graph")
            for n, t in m.nodes.items():
                sig = ("node", t)
                if seen.setdefault(n, sig) != sig:
                    raise HistoryError(f"element {n!r} changes its nature or type between versions")
            for e, edge in m.edges.items():
                sig = ("edge",) + tuple(edge)
                if seen.setdefault(e, sig) != sig:
                    raise HistoryError(f"element {e!r} changes its nature, type or endpoints between versions")

    @property
    def versions(self) -> tuple:
        return self.version_graph.versions

    def __len__(self):
        return len(self.models)

    def modification(self, parent: VersionId, child: VersionId) -> Span:
        if parent not in self.version_graph.parents.get(child, ()):
            raise HistoryError(f"{parent!r} is not a parent of {child!r}")
        a, b = self.models[parent], self.models[child]
        common = [x for x in a.elements() if x in b]
        k = a.subgraph(common)
        return Span(k, inclusion(k, a), inclusion(k, b))

    def total_size(self) -> int:
        return sum(len(m) for m in self.models.values())

    def distinct_elements(self) -> int:
        ids = set()
        for m in self.models.values():
            ids.update(m.elements())
        return len(ids)

    @classmethod
    def from_deltas(
        cls,
        type_graph: TypeGraph,
        parents: Mapping[VersionId, Sequence[VersionId]],
        base_model: TypedGraph,
        deltas: Iterable[Mapping],
        initial: Optional[VersionId] = None,
    ) -> "VersionHistory":
        """Rebuild all versions: each delta edits a copy of its version's
        first parent (``del_elements`` first, then ``add_nodes`` and
        ``add_edges``)."""
        vg = VersionGraph(parents, initial)
        by_version = {}
        for d in deltas:
            if d["version"] in by_version:
                raise HistoryError(f"two deltas for version {d['version']!r}")
            by_version[d["version"]] = d
        models = {vg.initial: base_model}
        for v in vg.versions:
            if v == vg.initial:
                if v in by_version:
                    raise HistoryError("the initial version cannot have a delta")
                continue
            parent = models[vg.parents[v][0]]
            m = parent.copy()
            d = by_version.get(v, {})
            dels = list(d.get("del_elements", ()))
            try:
                for x in dels:
                    if x not in parent:
                        raise HistoryError(f"version {v!r} deletes unknown element {x!r}")
                for x in dels:
                    if m.has_edge(x):
                        m.remove_edge(x)
                for x in dels:
                    if m.has_node(x):
                        m.remove_node(x)
                for n in d.get("add_nodes", ()):
                    m.add_node(n["type"], n["id"])
                for e in d.get("add_edges", ()):
                    m.add_edge(e["type"], e["src"], e["tgt"], e["id"])
            except InputError as exc:
                if isinstance(exc, HistoryError):
                    raise
                raise HistoryError(f"delta of version {v!r}: {exc}") from None
            models[v] = m
        return cls(type_graph, vg, models)

    def to_deltas(self) -> list[dict]:
        vg = self.version_graph
        out = []
        for v in vg.versions:
            if v == vg.initial:
                continue
            a, b = self.models[vg.parents[v][0]], self.models[v]
            out.append(
                {
                    "version": v,
                    "del_elements": [x for x in a.elements() if x not in b],
                    "add_nodes": [{"id": n, "type": t} for n, t in b.nodes.items() if not a.has_node(n)],
                    "add_edges": [
                        {"id": e, "type": edge.type, "src": edge.src, "tgt": edge.tgt}
                        for e, edge in b.edges.items()
                        if not a.has_edge(e)
                    ],
                }
            )
        return out


def version_node(vid: VersionId) -> tuple:
    return (VERSION, vid)


class MultiVersionModel:
    """A consolidated graph plus its version graph and origin map.

    Version links (cv/dv/ucv/udv) are real edges of ``graph`` but must be
    changed through :meth:`set_presence` and :meth:`set_untranslated`,
    which keep the per-node masks in sync.
    """

    def __init__(self, graph: TypedGraph, version_graph: VersionGraph, origin: Mapping[ElementId, ElementId]):
        if not isinstance(graph.type_graph, MVTypeGraph):
            raise InputError("a multi-version model must be typed over an adapted type graph")
        self.graph = graph
        self.types: MVTypeGraph = graph.type_graph
        self.version_graph = version_graph
        self.origin = dict(origin)
        self._masks: dict = {k: {} for k in KINDS}
        self._derived: dict = {"p": {}, "u": {}}
        self._version_of_node = {}
        for v in version_graph.versions:
            vn = version_node(v)
            if not graph.has_node(vn) or graph.nodes[vn] != VERSION:
                raise InputError(f"version node for {v!r} is missing")
            self._version_of_node[vn] = v
        for e, edge in graph.edges.items():
            kind = self.types.edge_kind[edge.type][0]
            if kind in self._masks:
                masks = self._masks[kind]
                masks[edge.src] = masks.get(edge.src, 0) | version_graph.bit(self._version_of_node[edge.tgt])
        for x in self.structural_nodes():
            if x not in self.origin:
                raise InputError(f"mv-node {x!r} has no origin")

    @classmethod
    def empty(cls, base: TypeGraph, version_graph: VersionGraph) -> "MultiVersionModel":
        types = adapt_type_graph(base)
        g = TypedGraph(types)
        for v in version_graph.versions:
            g.add_node(VERSION, version_node(v))
        for p, v in sorted(version_graph.suc, key=lambda pv: (version_graph.index[pv[1]], version_graph.index[pv[0]])):
            g.add_edge(SUC, version_node(p), version_node(v), (SUC, p, v))
        return cls(g, version_graph, {})

    def copy(self) -> "MultiVersionModel":
        new = MultiVersionModel.__new__(MultiVersionModel)
        new.graph = self.graph.copy()
        new.types = self.types
        new.version_graph = self.version_graph
        new.origin = dict(self.origin)
        new._masks = {k: dict(m) for k, m in self._masks.items()}
        new._derived = {k: dict(m) for k, m in self._derived.items()}
        new._version_of_node = self._version_of_node
        return new

    @property
    def base_type_graph(self) -> TypeGraph:
        return self.types.base

    def structural_nodes(self) -> Iterator[ElementId]:
        for n, t in self.graph.nodes.items():
            if t != VERSION:
                yield n

    def structural_size(self) -> int:
        return len(self.graph.nodes) - len(self.version_graph)

    def is_tracked(self, x: ElementId) -> bool:
        return self.graph.nodes[x] in self.types.tracked

    # -- version annotations ------------------------------------------

    def links(self, x: ElementId, kind: str) -> int:
        return self._masks[kind].get(x, 0)

    def _set_links(self, x: ElementId, kind: str, mask: int) -> None:
        g = self.graph
        etype = f"{kind}:{g.nodes[x]}"
        if etype not in self.types.edges:
            if mask:
                raise InputError(f"mv-node {x!r} of type {g.nodes[x]!r} cannot carry {kind} links")
            return
        old = self._masks[kind].get(x, 0)
        if old == mask:
            return
        self._derived["p" if kind in ("cv", "dv") else "u"].pop(x, None)
        versions = self.version_graph.versions
        for i in _bits(old & ~mask):
            g.remove_edge((kind, x, versions[i]))
        for i in _bits(mask & ~old):
            v = versions[i]
            g.add_edge(etype, x, version_node(v), (kind, x, v))
        if mask:
            self._masks[kind][x] = mask
        else:
            self._masks[kind].pop(x, None)

    def set_presence(self, x: ElementId, versions: int) -> None:
        cv, dv = self.version_graph.encode(versions)
        self._set_links(x, "cv", cv)
        self._set_links(x, "dv", dv)

    def set_untranslated(self, x: ElementId, versions: int) -> None:
        cv, dv = self.version_graph.encode(versions)
        self._set_links(x, "ucv", cv)
        self._set_links(x, "udv", dv)

    def p_mask(self, x: ElementId) -> int:
        cache = self._derived["p"]
        hit = cache.get(x)
        if hit is None:
            m = self._masks
            hit = cache[x] = self.version_graph.presence(m["cv"].get(x, 0), m["dv"].get(x, 0))
        return hit

    def u_mask(self, x: ElementId) -> int:
        cache = self._derived["u"]
        hit = cache.get(x)
        if hit is None:
            m = self._masks
            hit = cache[x] = self.version_graph.presence(m["ucv"].get(x, 0), m["udv"].get(x, 0))
        return hit

    # -- structure ----------------------------------------------------

    def add_element_node(self, type_: str, x: ElementId, origin: ElementId) -> ElementId:
        self.graph.add_node(type_, x)
        self.origin[x] = origin
        return x

    def endpoints(self, x: ElementId) -> tuple[ElementId, ElementId]:
        """mv-nodes representing the source and target of edge-node ``x``."""
        src = tgt = None
        g = self.graph
        for e in g.out_edges(x):
            edge = g.edges[e]
            kind = self.types.edge_kind[edge.type][0]
            if kind == "src":
                src = edge.tgt
            elif kind == "tgt":
                tgt = edge.tgt
        return src, tgt

    def __repr__(self):
        return f"MultiVersionModel({self.structural_size()} elements, {len(self.version_graph)} versions)"


def rep_edge_id(x: ElementId, end: str) -> tuple:
    return (end, x)


def comb(history: VersionHistory) -> MultiVersionModel:
    """Consolidate ``history`` into one multi-version model."""
    vg = history.version_graph
    mvm = MultiVersionModel.empty(history.type_graph, vg)
    presence: dict = {}
    node_types: dict = {}
    edge_info: dict = {}
    for v in vg.versions:
        bit = vg.bit(v)
        model = history.models[v]
        for n, t in model.nodes.items():
            presence[n] = presence.get(n, 0) | bit
            node_types.setdefault(n, t)
        for e, edge in model.edges.items():
            presence[e] = presence.get(e, 0) | bit
            edge_info.setdefault(e, edge)
    g = mvm.graph
    for n, t in node_types.items():
        mvm.add_element_node(t, n, n)
        mvm.set_presence(n, presence[n])
    for e, edge in edge_info.items():
        mvm.add_element_node(edge.type, e, e)
        g.add_edge(f"src:{edge.type}", e, edge.src, rep_edge_id(e, "src"))
        g.add_edge(f"tgt:{edge.type}", e, edge.tgt, rep_edge_id(e, "tgt"))
        mvm.set_presence(e, presence[e])
    return mvm


def _project(mvm: MultiVersionModel, t: VersionId, with_marks: bool) -> TypedGraph:
    vg = mvm.version_graph
    if t not in vg:
        raise HistoryError(f"unknown version {t!r}")
    bit = vg.bit(t)
    g = mvm.graph
    rep = mvm.types.represents
    out = TypedGraph(mvm.base_type_graph)
    origin = mvm.origin
    edges = []
    for x, ty in g.nodes.items():
        if ty == VERSION or not mvm.p_mask(x) & bit:
            continue
        marked = with_marks and bool(mvm.u_mask(x) & bit)
        if rep[ty] == "node":
            out.add_node(ty, origin[x], marked=marked)
        else:
            edges.append((x, ty, marked))
    for x, ty, marked in edges:
        s, tg = mvm.endpoints(x)
        if s is None or tg is None:
            raise InputError(f"mv-node {x!r} lacks a source or target representation edge")
        try:
            out.add_edge(ty, origin[s], origin[tg], origin[x], marked=marked)
        except InputError as exc:
            raise InputError(f"projection to version {t!r} is not a graph: {exc}") from None
    return out


def proj(mvm: MultiVersionModel, t: VersionId) -> TypedGraph:
    """The model of version ``t`` encoded in ``mvm``."""
    return _project(mvm, t, with_marks=False)


def proj_bookkeeping(mvm: MultiVersionModel, t: VersionId) -> TypedGraph:
    """Version ``t`` with elements marked untranslated iff ``t`` is in their
    untranslated set."""
    return _project(mvm, t, with_marks=True)


def presence_set(mvm: MultiVersionModel, x: ElementId) -> frozenset:
    return mvm.version_graph.versions_of(mvm.p_mask(x))


def untranslated_set(mvm: MultiVersionModel, x: ElementId) -> frozenset:
    return mvm.version_graph.versions_of(mvm.u_mask(x))


def init_mv_bookkeeping(mvm: MultiVersionModel) -> MultiVersionModel:
    """Drop all ucv/udv links, then mirror cv/dv onto ucv/udv for every
    source-domain mv-node, so that untranslated = present everywhere."""
    out = mvm.copy()
    for x in list(out.structural_nodes()):
        out._set_links(x, "ucv", 0)
        out._set_links(x, "udv", 0)
    for x in list(out.structural_nodes()):
        if out.is_tracked(x):
            out._set_links(x, "ucv", out.links(x, "cv"))
            out._set_links(x, "udv", out.links(x, "dv"))
    return out


def mvm_problems(mvm: MultiVersionModel) -> list[str]:
    """Structural invariant violations of a multi-version model."""
    problems = []
    g = mvm.graph
    rep = mvm.types.represents
    for x in mvm.structural_nodes():
        ty = g.nodes[x]
        if not mvm.links(x, "cv"):
            problems.append(f"{x!r} has no cv link")
        if rep[ty] == "edge":
            kinds = [mvm.types.edge_kind[g.edges[e].type][0] for e in g.out_edges(x)]
            if kinds.count("src") != 1 or kinds.count("tgt") != 1:
                problems.append(f"edge-node {x!r} needs exactly one src and one tgt link")
    origins = list(mvm.origin.values())
    if len(set(origins)) != len(origins):
        problems.append("origin is not injective")
    return problems
