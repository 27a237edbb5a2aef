import pytest

from tggmv.errors import InputError
from tggmv.generate import BenchConfig, generate_history, random_history, sharing
from tggmv.mvm import comb
from tggmv.engine import transform_forward_mv
from tggmv.mvrules import adapt_all
from tggmv.tgg import derive_forward_rules
from tggmv.ast2cd import example_tgg


def test_single_version():
    h = generate_history(BenchConfig(versions=1, base_classes=3))
    assert len(h) == 1
    assert comb(h).structural_size() == len(h.models["v1"])


def test_same_seed_same_history():
    cfg = BenchConfig(versions=8, base_classes=4, branch_probability=0.4, merge_probability=0.3, seed=3)
    a, b = generate_history(cfg), generate_history(cfg)
    assert a.version_graph == b.version_graph
    assert all(a.models[t] == b.models[t] for t in a.versions)


def test_low_change_rate_shares_elements():
    h = generate_history(BenchConfig(versions=50, change_rate=0.02, seed=1))
    assert sharing(h) >= 0.9
    assert comb(h).structural_size() < h.total_size()


def test_full_change_rate_shares_nothing():
    h = generate_history(BenchConfig(versions=4, base_classes=3, change_rate=1.0, seed=2))
    seen = set()
    for m in h.models.values():
        ids = set(m.elements())
        assert not ids & seen
        seen |= ids
    assert sharing(h) == 0.0


@pytest.mark.parametrize("kw", [{"versions": 0}, {"change_rate": -0.1}, {"branch_probability": 1.5}])
def test_invalid_configs(kw):
    with pytest.raises(InputError):
        BenchConfig(**kw)


def test_generated_histories_translate_completely():
    rules = adapt_all(derive_forward_rules(example_tgg()))
    for seed in range(10):
        h = random_history(seed)
        res = transform_forward_mv(comb(h), rules)
        assert all(res.complete.values())


def test_random_history_respects_bounds():
    for seed in range(30):
        h = random_history(seed, max_versions=6, max_elements=60)
        assert 1 <= len(h) <= 6
        assert max(len(m) for m in h.models.values()) <= 60
