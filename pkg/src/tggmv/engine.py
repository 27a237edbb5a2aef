"""Transformation drivers and the equivalence verifier.

Both drivers work in rounds: the matches of all rules (declaration order,
or shuffled when an RNG is supplied) are collected first and then applied
one after another, re-checking each before use. A round that finds no match
proves the sequence maximal.

The determinism guard is dynamic: when a collected match has lost
applicability because a different application consumed part of what it
would translate, two different translations of the same source element
existed and :class:`DeterminismError` is raised.
"""

from __future__ import annotations

import random
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import DeterminismError, InputError, NonTerminationError
from .graph import GraphMorphism, TypedGraph
from .iso import graph_isomorphic
from .mvm import MultiVersionModel, VersionHistory, comb, init_mv_bookkeeping, proj_bookkeeping
from .mvrules import MVForwardRule, adapt_all, find_mv_matches, rewrite_mv, version_mask
from .rules import find_matches, is_applicable, rewrite_in_place
from .tgg import ForwardRule, TGGRule, derive_forward_rules, init_forward, source_elements
from .versions import VersionId


DEFAULT_APP_FACTOR = 10


@dataclass(frozen=True)
class LogEntry:
    rule: str
    binding: Mapping
    versions: Optional[frozenset] = None
    created: Mapping = field(default_factory=dict)


@dataclass
class ApplicationLog:
    entries: list = field(default_factory=list)

    def append(
        self, rule: str, binding: Mapping, versions: Optional[frozenset] = None, created: Mapping = ()
    ) -> None:
        self.entries.append(LogEntry(rule, dict(binding), versions, dict(created)))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_json(self) -> list:
        from .serialize import encode_id

        out = []
        for e in self.entries:
            item = {"rule": e.rule, "binding": [[encode_id(k), encode_id(v)] for k, v in e.binding.items()]}
            if e.versions is not None:
                item["versions"] = sorted((encode_id(v) for v in e.versions), key=str)
            if e.created:
                item["created"] = [[encode_id(k), encode_id(v)] for k, v in e.created.items()]
            out.append(item)
        return out


class ForwardResult(NamedTuple):
    graph: TypedGraph
    log: ApplicationLog
    complete: bool


class MVResult(NamedTuple):
    mvm: MultiVersionModel
    log: ApplicationLog
    complete: dict


def _usable(rules: Sequence, what: str) -> list:
    usable = []
    for r in rules:
        fr = r.forward if isinstance(r, MVForwardRule) else r
        if fr.degenerate:
            warnings.warn(
                f"{what} {r.name!r} translates nothing and could apply without bound; "
                "it is excluded (the TGG is not deterministic with it)",
                stacklevel=3,
            )
            continue
        usable.append(r)
    return usable


def _check_names(rules: Sequence) -> None:
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise InputError("rule names must be unique")


def transform_forward(
    source: TypedGraph,
    rules: Iterable[ForwardRule],
    *,
    max_apps: Optional[int] = None,
    guard: bool = True,
    rng: Optional[random.Random] = None,
    initialized: bool = False,
) -> ForwardResult:
    """Translate ``source`` with forward rules until no rule applies.

    ``complete`` is the bookkeeping criterion: no source element is left
    marked. ``initialized=True`` skips marking (``source`` already carries
    its bookkeeping).
    """
    rules = _usable(list(rules), "forward rule")
    _check_names(rules)
    graph = source.copy() if initialized else init_forward(source)
    bound = max_apps if max_apps is not None else DEFAULT_APP_FACTOR * max(len(graph), 1)
    applog = ApplicationLog()
    applied = 0
    while True:
        pending = [(fr, m) for fr in rules for m in find_matches(fr.rule, graph, prefer=fr.translated)]
        if not pending:
            break
        if rng is not None:
            rng.shuffle(pending)
        consumed: dict = {}
        for fr, m in pending:
            if not is_applicable(fr.rule, graph, m):
                if guard:
                    _guard_single(fr, m, consumed)
                continue
            if applied >= bound:
                raise NonTerminationError(f"more than {bound} rule applications")
            comatch = rewrite_in_place(fr.rule, graph, m, check=False)
            applied += 1
            applog.append(fr.name, m.morphism.binding(), created=_created_binding(fr.rule, comatch))
            key = (fr.name, m.image())
            for x in fr.translated:
                consumed[m(x)] = (key, m)
    complete = not any(graph.is_marked(x) for x in source_elements(graph))
    return ForwardResult(graph, applog, complete)


def _created_binding(rule, comatch) -> dict:
    nodes, edges = rule.created()
    out = {n: comatch.nodes[n] for n in nodes}
    out.update({e: comatch.edges[e] for e in edges})
    return out


def _guard_single(fr: ForwardRule, m, consumed: dict) -> None:
    # a pending match only loses applicability when one of its translated
    # elements was consumed; by the same rule on the same image it is a
    # duplicate (pattern symmetry), otherwise a second translation existed
    key = (fr.name, m.image())
    for x in fr.translated:
        hit = consumed.get(m(x))
        if hit is not None and hit[0] != key:
            raise DeterminismError(
                f"element {m(x)!r} is translated by {hit[0][0]!r} but {fr.name!r} matched it as well",
                first=hit[1],
                second=m,
            )


def transform_forward_mv(
    mvm: MultiVersionModel,
    rules: Iterable[MVForwardRule],
    *,
    max_apps: Optional[int] = None,
    guard: bool = True,
    rng: Optional[random.Random] = None,
) -> MVResult:
    """Jointly translate every version encoded in ``mvm``.

    Bookkeeping is (re)initialised first. ``complete[t]`` holds iff every
    source element present in ``t`` ended up translated in ``t``.
    """
    rules = _usable(list(rules), "mv-rule")
    _check_names(rules)
    work = init_mv_bookkeeping(mvm)
    bound = max_apps if max_apps is not None else DEFAULT_APP_FACTOR * max(work.structural_size(), 1)
    vg = work.version_graph
    applog = ApplicationLog()
    applied = 0
    while True:
        pending = []
        for r in rules:
            for m in find_mv_matches(work, r):
                P = version_mask(work, r, m)
                if P:
                    pending.append((r, m, P))
        if not pending:
            break
        if rng is not None:
            rng.shuffle(pending)
        consumed: dict = {}
        for r, m, P_found in pending:
            P = version_mask(work, r, m)
            if guard and P_found & ~P:
                _guard_mv(r, m, P_found & ~P, consumed)
            if not P:
                continue
            if applied >= bound:
                raise NonTerminationError(f"more than {bound} rule applications")
            app = rewrite_mv(work, r, m, check=False)
            applied += 1
            applog.append(r.name, m.morphism.binding(), vg.versions_of(P), _created_binding(r.rule, app.comatch))
            key = (r.name, m.image())
            for x in r.translated:
                consumed.setdefault(m(x), []).append((P, key, m))
    complete = {}
    for t in vg.versions:
        bit = vg.bit(t)
        complete[t] = not any(
            work.u_mask(x) & bit for x in work.structural_nodes() if work.is_tracked(x) and work.p_mask(x) & bit
        )
    return MVResult(work, applog, complete)


def _guard_mv(r: MVForwardRule, m, lost: int, consumed: dict) -> None:
    key = (r.name, m.image())
    for x in r.translated:
        for P, other_key, other in consumed.get(m(x), ()):
            if P & lost and other_key != key:
                raise DeterminismError(
                    f"element {m(x)!r} is translated by {other_key[0]!r} but {r.name!r} matched it "
                    f"as well in a common version",
                    first=other,
                    second=m,
                )


def replay(source: TypedGraph, rules: Iterable[ForwardRule], applog: ApplicationLog) -> TypedGraph:
    """Re-run a single-version log from ``source`` (unmarked input)."""
    by_name = {r.name: r for r in rules}
    graph = init_forward(source)
    for entry in applog:
        fr = by_name[entry.rule]
        lhs = fr.rule.lhs
        m = GraphMorphism(
            lhs, graph, {n: entry.binding[n] for n in lhs.nodes}, {e: entry.binding[e] for e in lhs.edges}
        )
        rewrite_in_place(fr.rule, graph, m)
    return graph


def replay_mv(mvm: MultiVersionModel, rules: Iterable[MVForwardRule], applog: ApplicationLog) -> MultiVersionModel:
    by_name = {r.name: r for r in rules}
    work = init_mv_bookkeeping(mvm)
    vg = work.version_graph
    for entry in applog:
        r = by_name[entry.rule]
        lhs = r.lhs
        m = GraphMorphism(lhs, work.graph, {n: entry.binding[n] for n in lhs.nodes}, {})
        m.edges.update({e: entry.binding[e] for e in lhs.edges})
        app = rewrite_mv(work, r, m)
        if entry.versions is not None and vg.versions_of(app.versions) != entry.versions:
            raise DeterminismError(f"replayed application of {r.name!r} affected different versions")
    return work


def project_trace(
    mvm: MultiVersionModel,
    rules: Iterable[MVForwardRule],
    applog: ApplicationLog,
    t: VersionId,
    source: TypedGraph,
) -> ForwardResult:
    """Replay the entries of an mv run whose version set contains ``t`` with
    the original forward rules on ``init_forward(source)``; entries without
    ``t`` are skipped as no-ops.

    ``mvm`` is the mv input (its origin map names the source elements).
    Elements created by the mv run are renamed to the ids created here.
    """
    by_name = {r.name: r for r in rules}
    graph = init_forward(source)
    origin = mvm.origin
    rename: dict = {}
    out = ApplicationLog()

    def local(x):
        return rename[x] if x in rename else origin.get(x, x)

    for entry in applog:
        if entry.versions is None or t not in entry.versions:
            continue
        r = by_name[entry.rule]
        fr = r.forward.rule
        lf = fr.lhs
        m = GraphMorphism(
            lf,
            graph,
            {n: local(entry.binding[n]) for n in lf.nodes},
            {e: local(entry.binding[e]) for e in lf.edges},
        )
        comatch = rewrite_in_place(fr, graph, m)
        created = _created_binding(fr, comatch)
        out.append(r.name, m.binding(), created=created)
        # the adapted rule names created mv-nodes like the forward rule's
        # created nodes and edges
        for c, mv_id in entry.created.items():
            if c in created:
                rename[mv_id] = created[c]
    complete = not any(graph.is_marked(x) for x in source_elements(graph))
    return ForwardResult(graph, out, complete)


# -- equivalence -------------------------------------------------------


@dataclass
class VersionVerdict:
    version: VersionId
    isomorphic: bool
    bookkeeping_equal: bool
    witness: Optional[GraphMorphism]
    discrepancy: Optional[str]
    complete_mv: bool
    complete_single: bool
    applications: int
    seconds: float

    @property
    def ok(self) -> bool:
        return self.isomorphic and self.bookkeeping_equal


@dataclass
class EquivalenceReport:
    verdicts: list
    mv_applications: int
    mv_seconds: float
    single_seconds: float

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    @property
    def single_applications(self) -> int:
        return sum(v.applications for v in self.verdicts)

    def to_json(self) -> dict:
        from .serialize import encode_id

        versions = []
        for v in self.verdicts:
            item = {
                "version": encode_id(v.version),
                "isomorphic": v.isomorphic,
                "bookkeeping_equal": v.bookkeeping_equal,
                "complete_mv": v.complete_mv,
                "complete_single": v.complete_single,
                "applications": v.applications,
                "seconds": round(v.seconds, 6),
            }
            if v.witness is not None:
                item["witness"] = sorted(
                    ([encode_id(a), encode_id(b)] for a, b in v.witness.binding().items()), key=repr
                )
            if v.discrepancy is not None:
                item["discrepancy"] = v.discrepancy
            versions.append(item)
        return {
            "format": "tggmv/equivalence-report@1",
            "ok": self.ok,
            "mv_applications": self.mv_applications,
            "single_applications": self.single_applications,
            "mv_seconds": round(self.mv_seconds, 6),
            "single_seconds": round(self.single_seconds, 6),
            "versions": versions,
        }

    def to_text(self) -> str:
        lines = []
        for v in self.verdicts:
            status = "OK  " if v.ok else "FAIL"
            extra = f"  ({v.discrepancy})" if v.discrepancy else ""
            lines.append(
                f"{status} version {v.version!r}: isomorphic={v.isomorphic} "
                f"bookkeeping_equal={v.bookkeeping_equal} complete={v.complete_mv}{extra}"
            )
        lines.append(
            f"mv: {self.mv_applications} applications in {self.mv_seconds * 1000:.1f} ms; "
            f"per-version: {self.single_applications} applications in {self.single_seconds * 1000:.1f} ms"
        )
        lines.append("equivalent" if self.ok else "NOT equivalent")
        return "\n".join(lines)


def _discrepancy(g: TypedGraph, h: TypedGraph) -> str:
    from collections import Counter

    cg = Counter((t, g.is_marked(n)) for n, t in g.nodes.items())
    ch = Counter((t, h.is_marked(n)) for n, t in h.nodes.items())
    cg.update((e.type, g.is_marked(x)) for x, e in g.edges.items())
    ch.update((e.type, h.is_marked(x)) for x, e in h.edges.items())
    for key in sorted(set(cg) | set(ch), key=repr):
        if cg[key] != ch[key]:
            kind, marked = key
            state = "untranslated" if marked else "translated"
            return f"{kind} ({state}): mv projection has {cg[key]}, per-version result has {ch[key]}"
    return "element counts agree but no isomorphism exists"


def _marked_sources(g: TypedGraph) -> frozenset:
    return frozenset(x for x in source_elements(g) if g.is_marked(x))


def verify_equivalence(
    history: VersionHistory,
    tgg: Iterable[TGGRule],
    *,
    parallel: bool = False,
    max_apps: Optional[int] = None,
    guard: bool = True,
) -> EquivalenceReport:
    """Run the multi-version and the per-version pipeline on ``history`` and
    compare them version by version, bookkeeping included."""
    forward = derive_forward_rules(tgg)
    mv_rules = adapt_all(forward)
    t0 = time.perf_counter()
    res = transform_forward_mv(comb(history), mv_rules, max_apps=max_apps, guard=guard)
    mv_seconds = time.perf_counter() - t0

    def single(t):
        start = time.perf_counter()
        r = transform_forward(history.models[t], forward, max_apps=max_apps, guard=guard)
        return r, time.perf_counter() - start

    versions = history.versions
    t0 = time.perf_counter()
    if parallel and len(versions) > 1:
        with ThreadPoolExecutor() as pool:
            singles = list(pool.map(single, versions))
    else:
        singles = [single(t) for t in versions]
    single_seconds = time.perf_counter() - t0

    verdicts = []
    for t, (r, seconds) in zip(versions, singles):
        projected = proj_bookkeeping(res.mvm, t)
        witness = graph_isomorphic(projected, r.graph)
        same_marks = _marked_sources(projected) == _marked_sources(r.graph)
        discrepancy = None
        if witness is None:
            discrepancy = _discrepancy(projected, r.graph)
        elif not same_marks:
            discrepancy = "untranslated source elements differ"
        verdicts.append(
            VersionVerdict(
                t, witness is not None, same_marks, witness, discrepancy,
                res.complete[t], r.complete, len(r.log), seconds,
            )
        )
    return EquivalenceReport(verdicts, len(res.log), mv_seconds, single_seconds)
