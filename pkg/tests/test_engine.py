import random
from collections import Counter

import pytest

from tggmv.ast2cd import TRIPLE_TYPES, class_rule, example_graph, example_history, example_tgg
from tggmv.engine import (
    project_trace,
    replay,
    replay_mv,
    transform_forward,
    transform_forward_mv,
    verify_equivalence,
)
from tggmv.errors import DeterminismError, NonTerminationError
from tggmv.generate import random_history
from tggmv.graph import GraphMorphism, TypedGraph
from tggmv.iso import isomorphic
from tggmv.mvm import VersionHistory, comb, proj_bookkeeping
from tggmv.mvrules import adapt_all
from tggmv.rules import Rule, rewrite_in_place
from tggmv.tgg import TGGRule, bookkeeping_set, derive_forward_rules, init_forward
from tggmv.versions import VersionGraph

FORWARD = derive_forward_rules(example_tgg())
MV_RULES = adapt_all(FORWARD)


def test_replay_reproduces_single_version_result():
    h = random_history(3, untranslatable=0.3)
    for t in h.versions:
        res = transform_forward(h.models[t], FORWARD)
        assert replay(h.models[t], FORWARD, res.log) == res.graph


def test_replay_reproduces_mv_result():
    mvm = comb(random_history(4))
    res = transform_forward_mv(mvm, MV_RULES)
    again = replay_mv(mvm, MV_RULES, res.log)
    assert again.graph == res.mvm.graph


def test_single_version_mv_equals_single_transform():
    g = example_graph()
    h = VersionHistory(TRIPLE_TYPES, VersionGraph({"only": []}), {"only": g})
    res = transform_forward_mv(comb(h), MV_RULES)
    single = transform_forward(g, FORWARD)
    assert isomorphic(proj_bookkeeping(res.mvm, "only"), single.graph)
    assert len(res.log) == len(single.log)


def test_identical_versions_share_every_application():
    g = example_graph()
    h = VersionHistory(TRIPLE_TYPES, VersionGraph({"v1": [], "v2": ["v1"]}), {"v1": g, "v2": g.copy()})
    res = transform_forward_mv(comb(h), MV_RULES)
    assert len(res.log) == len(transform_forward(g, FORWARD).log)
    assert all(e.versions == {"v1", "v2"} for e in res.log)


def test_empty_mvm_has_no_applications():
    h = VersionHistory(TRIPLE_TYPES, VersionGraph({"v": []}), {"v": TypedGraph(TRIPLE_TYPES)})
    res = transform_forward_mv(comb(h), MV_RULES)
    assert len(res.log) == 0 and res.complete == {"v": True}


def test_example_history_uses_fewer_applications():
    report = verify_equivalence(example_history(), example_tgg())
    assert report.ok
    assert report.mv_applications < report.single_applications
    assert report.mv_applications == 4 and report.single_applications == 7


@pytest.mark.parametrize("seed", range(6))
def test_skipping_reproduces_per_version_sequence(seed):
    """Replaying, per version, only the mv-applications that include it
    yields a valid sequence with the same result and the same multiset of
    (rule, translated elements) as an ordinary per-version run."""
    h = random_history(seed, untranslatable=0.2)
    mvm = comb(h)
    res = transform_forward_mv(mvm, MV_RULES)
    for t in h.versions:
        traced = project_trace(mvm, MV_RULES, res.log, t, h.models[t])
        direct = transform_forward(h.models[t], FORWARD)
        assert isomorphic(traced.graph, direct.graph)
        assert bookkeeping_set(traced.graph) == bookkeeping_set(direct.graph)

        def signature(applog):
            by_name = {r.name: r for r in FORWARD}
            return Counter(
                (e.rule, frozenset(e.binding[x] for x in by_name[e.rule].translated)) for e in applog
            )

        assert signature(traced.log) == signature(direct.log)


def ambiguous_tgg():
    base = class_rule().rule
    twin = TGGRule(Rule.from_inclusions(base.lhs, base.interface, base.rhs, name="class_again"))
    return example_tgg() + [twin]


def test_guard_detects_competing_rules():
    rules = derive_forward_rules(ambiguous_tgg())
    with pytest.raises(DeterminismError) as info:
        transform_forward(example_graph(), rules)
    assert info.value.first is not None and info.value.second is not None
    with pytest.raises(DeterminismError):
        transform_forward_mv(comb(example_history()), adapt_all(rules))
    # without the guard the run completes; the verifier still sees a valid result
    res = transform_forward(example_graph(), rules, guard=False)
    assert res.complete


def test_application_bound():
    with pytest.raises(NonTerminationError):
        transform_forward(example_graph(), FORWARD, max_apps=2)
    with pytest.raises(NonTerminationError):
        transform_forward_mv(comb(example_history()), MV_RULES, max_apps=2)


def test_degenerate_rule_is_skipped_with_warning():
    target_only = TGGRule.from_shorthand(TRIPLE_TYPES, "orphan", [("k", "Class", True)])
    rules = derive_forward_rules(example_tgg() + [target_only])
    with pytest.warns(UserWarning, match="orphan"):
        res = transform_forward(example_graph(), rules)
    assert res.complete


@pytest.mark.parametrize("seed", range(5))
def test_shuffled_order_gives_isomorphic_results(seed):
    h = random_history(100 + seed)
    base = transform_forward_mv(comb(h), MV_RULES)
    shuffled = transform_forward_mv(comb(h), MV_RULES, rng=random.Random(seed))
    for t in h.versions:
        assert isomorphic(proj_bookkeeping(base.mvm, t), proj_bookkeeping(shuffled.mvm, t))


def test_mark_count_strictly_decreases():
    g = example_graph()
    res = transform_forward(g, FORWARD)
    graph = init_forward(g)
    marks = [len(graph.bookkeeping)]
    by_name = {r.name: r for r in FORWARD}
    for e in res.log:
        lhs = by_name[e.rule].rule.lhs
        m = GraphMorphism(lhs, graph, {n: e.binding[n] for n in lhs.nodes}, {x: e.binding[x] for x in lhs.edges})
        rewrite_in_place(by_name[e.rule].rule, graph, m)
        marks.append(len(graph.bookkeeping))
    assert all(b < a for a, b in zip(marks, marks[1:]))


def test_report_serialisations():
    report = verify_equivalence(example_history(), example_tgg(), parallel=True)
    doc = report.to_json()
    assert doc["ok"] and doc["format"].startswith("tggmv/equivalence-report")
    assert [v["version"] for v in doc["versions"]] == ["v1", "v2"]
    assert "equivalent" in report.to_text()
