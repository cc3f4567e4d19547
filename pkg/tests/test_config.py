import numpy as np
import pytest
from scipy import stats

from backbend_perc.config import (
    EdgeConfig,
    RngKey,
    edge_uniform,
    edge_uniform_reference,
    edge_uniforms,
    is_open,
    open_edge_count,
    trial_key,
    _uniform_batch,
)
from backbend_perc.lattice import Window


def _bulk(seed, trial, n):
    # n synthetic edges: lower = (i, 0, 0), all up_signs bit patterns
    lowers = np.zeros((n, 3), dtype=np.int64)
    lowers[:, 0] = np.arange(n) // 4
    bits = np.arange(n, dtype=np.int64) % 4
    return _uniform_batch(np.uint64(trial_key(np.uint64(seed), trial)), lowers, bits)


def test_deterministic_and_distinct():
    e0 = ((0, 0, 0), (-1, -1))
    e1 = ((0, 0, 0), (-1, 1))
    k = RngKey(1, 0)
    assert edge_uniform(k, e0) == edge_uniform(k, e0)
    assert edge_uniform(k, e0) != edge_uniform(k, e1)
    assert edge_uniform(k, e0) != edge_uniform(RngKey(1, 1), e0)


@pytest.mark.parametrize("seed,trial,lower,up", [
    (1, 0, (0, 0), (1,)), (2**64 - 1, 5, (-3, 7, 2), (-1, 1)), (0, 123456, (100, -100, 0, 4), (1, 1, -1)),
])
def test_matches_integer_reference(seed, trial, lower, up):
    assert edge_uniform(RngKey(seed, trial), (lower, up)) == edge_uniform_reference(seed, trial, lower, up)


def test_mean_and_chi_square():
    u = _bulk(1, 0, 10**6)
    assert 0.0 <= u.min() and u.max() < 1.0
    assert 0.498 <= u.mean() <= 0.502
    counts = np.histogram(u, bins=100, range=(0, 1))[0]
    chi2 = ((counts - 1e4) ** 2 / 1e4).sum()
    lo, hi = stats.chi2.ppf([0.005, 0.995], 99)
    assert lo <= chi2 <= hi


def test_trial_independence():
    a = _bulk(9, 0, 10**6)
    b = _bulk(9, 1, 10**6)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_is_open():
    assert is_open(0.3, 0.5)
    assert not is_open(0.0, 0.0)
    assert is_open(0.999999, 1.0)
    with pytest.raises(ValueError):
        is_open(0.5, 1.5)


def test_open_edge_count_extremes_and_monotone():
    cfg = EdgeConfig(RngKey(3, 2), Window((-3, -3, 0), (3, 3, 4)))
    E = len(cfg.edges())
    assert open_edge_count(cfg, 0.0) == 0
    assert open_edge_count(cfg, 1.0) == E
    prev = set()
    for p in np.linspace(0, 1, 11):
        cur = cfg.open_edges(p)
        assert prev <= cur
        prev = cur


def test_open_edge_count_concentration():
    # E = 10^6 at p = 0.5, across seeds: within 4 sigma
    for seed in range(5):
        u = _bulk(seed, 0, 10**6)
        assert abs((u < 0.5).sum() - 5e5) <= 4 * np.sqrt(1e6 / 4)


def test_window_extension_stability():
    key = RngKey(42, 7)
    small = Window((-2, -2, 0), (2, 2, 2))
    big = Window((-4, -4, -2), (4, 4, 6))
    us = dict(zip(small.edges(), edge_uniforms(key, small.edges())))
    ub = dict(zip(big.edges(), edge_uniforms(key, big.edges())))
    assert set(us) <= set(ub)
    assert all(us[e] == ub[e] for e in us)


def test_edge_config_index_access():
    cfg = EdgeConfig(RngKey(5), Window((0, 0), (2, 2)))
    edges = cfg.edges()
    assert cfg.uniform(1) == cfg.uniform(edges[1])
