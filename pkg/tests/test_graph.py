import pytest
from conftest import contact_traces, make_trace
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdsense.graph import IntervalGraph, coverage_ratio, covered_edges, ground_truth_graph, observed_graph
from crowdsense.model import ConsistencyError

S1, S2, P, X, Y = 1, 2, 3, 10, 11


@pytest.fixture
def small_trace():
    return make_trace([(10, S1, X), (20, S2, X), (30, P, Y)], internal={S1, S2, P}, external={X, Y})


def test_observed_graph_filters_on_sensing_set(small_trace):
    g = observed_graph(small_trace, 0, 60, {S1, S2})
    assert g.edges == {(S1, X), (S2, X)}
    assert g.nodes == {S1, S2, X}
    assert g.adjacency[X] == {S1, S2}


def test_empty_sensing_set(small_trace):
    g = observed_graph(small_trace, 0, 60, set())
    assert g.edges == frozenset() and g.nodes == frozenset()


def test_isolated_sensing_node_is_a_node(small_trace):
    g = observed_graph(small_trace, 0, 60, {P, S1})
    assert g.nodes == {P, S1, X, Y}
    g = observed_graph(small_trace, 40, 20, {S1})
    assert g.nodes == {S1} and not g.edges


def test_duplicate_and_reverse_scans_collapse():
    trace = make_trace([(10, 1, 2), (15, 1, 2), (18, 2, 1)], internal={1, 2})
    assert observed_graph(trace, 0, 60, {1, 2}).edges == {(1, 2)}


def test_window_is_half_open(small_trace):
    assert observed_graph(small_trace, 10, 10, {S1, S2}).edges == {(S1, X)}
    assert observed_graph(small_trace, 0, 10, {S1, S2}).edges == frozenset()


def test_ground_truth_is_all_internal(small_trace):
    truth = ground_truth_graph(small_trace, 0, 60)
    assert truth.edges == observed_graph(small_trace, 0, 60, {S1, S2, P}).edges
    assert truth.edges == {(S1, X), (S2, X), (P, Y)}


def test_ground_truth_recount_on_fixture(fixture_data):
    trace, _ = fixture_data
    truth = ground_truth_graph(trace, 0, 600)
    # brute force over the raw event list, no windowing helpers
    recount = {tuple(sorted((e.scanner, e.seen))) for e in trace.events if 0 <= e.time_s < 600}
    assert len(truth.edges) == len(recount)
    assert truth.edges == recount


def test_coverage_ratio_examples():
    truth = IntervalGraph.from_edges(0, 1, [(0, i) for i in range(1, 11)])
    observed = IntervalGraph.from_edges(0, 1, [(0, i) for i in range(1, 7)])
    assert coverage_ratio(observed, truth) == pytest.approx(0.6)
    empty = IntervalGraph.from_edges(0, 1, [])
    assert coverage_ratio(empty, empty) == 1.0
    with pytest.raises(ConsistencyError):
        coverage_ratio(truth, observed)


def test_full_sensing_ratio_is_one(fixture_data):
    trace, _ = fixture_data
    for start in range(0, 12000, 600):
        truth = ground_truth_graph(trace, start, 600)
        assert coverage_ratio(observed_graph(trace, start, 600, trace.registry.internal), truth) == 1.0


def test_covered_edges():
    truth = IntervalGraph.from_edges(0, 1, [(1, 2), (2, 3), (3, 4)])
    assert covered_edges(truth, {2}) == 2
    assert covered_edges(truth, {1, 4}) == 2
    assert covered_edges(truth, set()) == 0


@st.composite
def trace_and_subsets(draw):
    trace = draw(contact_traces())
    internal = sorted(trace.registry.internal)
    a = draw(st.sets(st.sampled_from(internal)))
    b = a | draw(st.sets(st.sampled_from(internal)))
    return trace, a, b


@given(trace_and_subsets(), st.integers(0, 100), st.integers(1, 100))
@settings(max_examples=150)
def test_observed_graph_properties(data, start, length):
    trace, a, b = data
    ga = observed_graph(trace, start, length, a)
    gb = observed_graph(trace, start, length, b)
    truth = ground_truth_graph(trace, start, length)
    assert ga.edges <= gb.edges <= truth.edges
    assert all(u in a or v in a for u, v in ga.edges)
    assert 0.0 <= coverage_ratio(ga, truth) <= 1.0
    for u, v in ga.edges:
        assert u != v and v in ga.adjacency[u] and u in ga.adjacency[v]
    assert sum(len(ns) for ns in ga.adjacency.values()) == 2 * len(ga.edges)


@given(contact_traces(), st.integers(0, 50), st.integers(1, 50))
@settings(max_examples=100)
def test_interval_partition(trace, start, delta):
    internal = trace.registry.internal
    whole = observed_graph(trace, start, 2 * delta, internal)
    first = observed_graph(trace, start, delta, internal)
    second = observed_graph(trace, start + delta, delta, internal)
    assert whole.edges == first.edges | second.edges
