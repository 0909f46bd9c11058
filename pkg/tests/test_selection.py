import itertools

import numpy as np
import pytest
from conftest import graphs_with_internal
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdsense.graph import IntervalGraph, covered_edges
from crowdsense.model import ConsistencyError, OracleGuardError
from crowdsense.selection import (
    coverage_utility,
    observability,
    select_greedy,
    select_hcontext,
    select_optimal_bruteforce,
    select_random,
)


def graph(*edges, nodes=()):
    return IntervalGraph.from_edges(0, 1, edges, nodes)


def rng(seed=42):
    return np.random.default_rng(seed)


def brute_force_best(truth, v_in, n):
    """Independent oracle: every size-n subset of v_in, scored with covered_edges."""
    size = min(n, len(v_in))
    return max(covered_edges(truth, set(c)) for c in itertools.combinations(sorted(v_in), size))


# -- observability and utility -------------------------------------------------


def test_observability_counts_sensing_neighbours():
    s1, s2, x = 1, 2, 10
    obs = observability(graph((s1, x), (s2, x)), {s1, s2})
    assert obs == {x: 2}


def test_observability_zero_and_no_sensing_entries():
    g = graph((1, 10), (5, 11))
    obs = observability(g, {1})
    assert obs[11] == 0 and obs[5] == 0
    assert 1 not in obs


def test_utility_hand_example():
    # u sees v1 (observed only by u) and v2 (observed by u and w): 1/1 + 1/2
    u, w, v1, v2 = 1, 2, 10, 11
    g = graph((u, v1), (u, v2), (w, v2))
    obs = observability(g, {u, w})
    util = coverage_utility(g, {u, w}, obs)
    assert util[u] == pytest.approx(1.5, abs=1e-9)
    assert util[w] == pytest.approx(0.5, abs=1e-9)


def test_utility_ignores_sensing_neighbours_and_isolated_nodes():
    g = graph((1, 2), nodes=[3])
    util = coverage_utility(g, {1, 2, 3}, observability(g, {1, 2, 3}))
    assert util == {1: 0.0, 2: 0.0, 3: 0.0}


def test_utility_rejects_inconsistent_observability():
    g = graph((1, 10))
    with pytest.raises(ConsistencyError):
        coverage_utility(g, {1}, {10: 0})


@given(graphs_with_internal(), st.data())
@settings(max_examples=150)
def test_utility_conservation(case, data):
    g, _ = case
    sensing = data.draw(st.sets(st.sampled_from(sorted(g.nodes))))
    obs = observability(g, sensing)
    util = coverage_utility(g, sensing, obs)
    touched = {v for v in g.nodes if v not in sensing and any(u in sensing for u in g.neighbors(v))}
    assert sum(util.values()) == pytest.approx(len(touched), abs=1e-9)
    assert all(obs[v] >= 1 for v in touched)


# -- greedy ----------------------------------------------------------------------


def test_greedy_star():
    c = 5
    g = graph(*[(c, leaf) for leaf in (1, 2, 3, 4)])
    assert select_greedy(g, {c, 1, 2}, 1) == {c}


def test_greedy_path():
    a, b, c, d = 1, 2, 3, 4
    g = graph((a, b), (b, c), (c, d))
    assert select_greedy(g, {a, b, c, d}, 2) == {b, c}


def test_greedy_triangle_tie_break():
    assert select_greedy(graph((1, 2), (2, 3), (1, 3)), {1, 2, 3}, 1) == {1}


def test_greedy_fills_by_id_when_edges_run_out():
    g = graph((7, 20))
    assert select_greedy(g, {1, 2, 3, 7}, 3) == {7, 1, 2}


@given(graphs_with_internal(), st.integers(1, 12))
def test_greedy_invariant_under_order_preserving_relabel(case, n):
    g, internal = case
    relabel = {v: 3 * v + 100 for v in g.nodes}
    g2 = IntervalGraph.from_edges(0, 1, [(relabel[a], relabel[b]) for a, b in g.edges], relabel.values())
    out = select_greedy(g, internal, n)
    assert {relabel[v] for v in out} == select_greedy(g2, {relabel[v] for v in internal}, n)


# -- random ------------------------------------------------------------------------


def test_random_single_edge():
    g = graph((1, 10))
    for seed in range(20):
        assert select_random(g, {1, 2, 3}, 1, rng(seed)) == {1}


def test_random_full_budget_and_determinism():
    g = graph((1, 10), (2, 3), (3, 11))
    assert select_random(g, {1, 2, 3, 4}, 4, rng()) == {1, 2, 3, 4}
    assert select_random(g, {1, 2, 3, 4}, 2, rng(42)) == select_random(g, {1, 2, 3, 4}, 2, rng(42))


def test_random_prefers_edge_bearing_nodes():
    g = graph((1, 10), (2, 11))
    for seed in range(20):
        assert select_random(g, {1, 2, 3, 4, 5}, 2, rng(seed)) == {1, 2}


# -- hcontext ---------------------------------------------------------------------


def test_hcontext_keep_and_replace():
    # s1 keeps (utility 1.5 > 0.5); p (observability 2) beats q (observability 1)
    s1, s2, p, q = 5, 2, 7, 3
    g = graph((s1, p), (s2, p), (s1, q))
    internal = {s1, s2, p, q}
    obs = observability(g, {s1, s2})
    util = coverage_utility(g, {s1, s2}, obs)
    assert util[s1] == pytest.approx(1.5) and util[s2] == pytest.approx(0.5)
    assert (obs[p], obs[q]) == (2, 1)
    assert select_hcontext(g, internal, {s1, s2}, n=2, k=1, rng=rng()) == {s1, p}


def test_hcontext_pseudocode_ordering_keeps_lowest():
    s1, s2, p, q = 5, 2, 7, 3
    g = graph((s1, p), (s2, p), (s1, q))
    out = select_hcontext(g, {s1, s2, p, q}, {s1, s2}, n=2, k=1, rng=rng(), keep_highest=False)
    assert out == {s2, p}


def test_hcontext_random_fill_when_nothing_observed():
    g = graph((1, 10), (2, 11))
    internal = set(range(1, 9))
    outs = {select_hcontext(g, internal, {1, 2}, n=4, k=2, rng=rng(seed)) for seed in range(30)}
    assert all({1, 2} <= out and len(out) == 4 for out in outs)
    assert len(outs) > 1
    assert select_hcontext(g, internal, {1, 2}, 4, 2, rng(3)) == select_hcontext(g, internal, {1, 2}, 4, 2, rng(3))


def test_hcontext_k_equals_n_keeps_previous():
    g = graph((1, 10), (2, 3), (4, 10))
    assert select_hcontext(g, {1, 2, 3, 4}, {1, 2}, n=2, k=2, rng=rng()) == {1, 2}


def test_hcontext_k_larger_than_previous_set():
    g = graph((1, 3), (1, 4), (2, 4))
    out = select_hcontext(g, {1, 2, 3, 4}, {1}, n=3, k=2, rng=rng())
    assert out == {1, 3, 4}


# -- shared selector properties ---------------------------------------------------


@given(graphs_with_internal(), st.integers(1, 14), st.integers(0, 2**32 - 1), st.data())
@settings(max_examples=120)
def test_selector_sizes(case, n, seed, data):
    g, internal = case
    size = min(n, len(internal))
    prev = data.draw(st.sets(st.sampled_from(sorted(internal)), min_size=1, max_size=size))
    k = data.draw(st.integers(1, n))
    outs = [
        select_random(g, internal, n, rng(seed)),
        select_greedy(g, internal, n),
        select_hcontext(g, internal, prev, n, k, rng(seed)),
        select_optimal_bruteforce(g, internal, n)[0],
    ]
    for out in outs:
        assert len(out) == size and out <= internal


# -- enumeration oracle -------------------------------------------------------------


def test_oracle_star():
    g = graph(*[(0, leaf) for leaf in range(1, 6)])
    chosen, count = select_optimal_bruteforce(g, {0, 1, 2}, 1)
    assert chosen == {0} and count == 5


def test_oracle_full_budget_covers_everything():
    g = graph((1, 2), (2, 10), (3, 11), (1, 12))
    assert select_optimal_bruteforce(g, {1, 2, 3}, 3)[1] == 4


def test_oracle_lexicographic_tie_break():
    g = graph((1, 10), (2, 11), (3, 12))
    assert select_optimal_bruteforce(g, {1, 2, 3}, 2) == ({1, 2}, 2)


def test_oracle_guard():
    g = graph(*[(i, 100 + i) for i in range(30)])
    with pytest.raises(OracleGuardError):
        select_optimal_bruteforce(g, set(range(30)), 15)
    with pytest.raises(OracleGuardError):
        select_optimal_bruteforce(g, set(range(30)), 3, limit=1000)


def test_oracle_on_fixture_graph_beats_greedy():
    # 8 internal nodes, 20 edges
    edges = [
        (0, 1), (0, 2), (0, 8), (0, 9), (1, 2), (1, 10), (2, 3), (3, 4), (3, 11), (3, 12),
        (4, 5), (4, 13), (5, 6), (5, 14), (6, 7), (6, 15), (7, 8), (7, 16), (2, 17), (5, 18),
    ]
    g = graph(*edges)
    internal = set(range(8))
    _, best = select_optimal_bruteforce(g, internal, 3)
    assert best == brute_force_best(g, internal, 3)
    assert best >= covered_edges(g, select_greedy(g, internal, 3))


@given(graphs_with_internal(max_nodes=10), st.integers(1, 4), st.integers(0, 1000), st.data())
@settings(max_examples=100)
def test_oracle_dominance_and_monotonicity(case, n, seed, data):
    g, internal = case
    chosen, best = select_optimal_bruteforce(g, internal, n)
    assert best == brute_force_best(g, internal, n) == covered_edges(g, chosen)
    prev = data.draw(st.sets(st.sampled_from(sorted(internal)), min_size=1, max_size=min(n, len(internal))))
    for out in (
        select_random(g, internal, n, rng(seed)),
        select_greedy(g, internal, n),
        select_hcontext(g, internal, prev, n, max(1, n // 2), rng(seed)),
    ):
        assert covered_edges(g, out) <= best
    if n < len(internal):
        assert select_optimal_bruteforce(g, internal, n + 1)[1] >= best
