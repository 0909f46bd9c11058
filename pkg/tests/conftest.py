from __future__ import annotations

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from crowdsense.graph import IntervalGraph
from crowdsense.ingest import SynthParams, generate_synthetic
from crowdsense.model import ContactEvent, ContactTrace, DeviceRegistry

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def standard_params() -> SynthParams:
    return SynthParams(n_internal=30, n_external=50, n_groups=5, steps=200, tau_s=60, p_detect=0.8)


@pytest.fixture(scope="session")
def fixture_data(standard_params):
    """The standard synthetic scenario at seed 7."""
    return generate_synthetic(standard_params, 7)


@pytest.fixture(scope="session")
def small_data():
    """Eight internal devices; small enough for the enumeration oracle."""
    params = SynthParams(n_internal=8, n_external=12, n_groups=2, steps=60, tau_s=60, n_locations=4)
    return generate_synthetic(params, 7)


def make_trace(events, internal, external=(), tau_s=10) -> ContactTrace:
    return ContactTrace(
        tuple(ContactEvent(*e) for e in sorted(events, key=lambda e: e[0])),
        DeviceRegistry(frozenset(internal), frozenset(external)),
        tau_s,
    )


@st.composite
def contact_traces(draw, max_internal=8, max_external=6, max_events=60, horizon=100):
    n_int = draw(st.integers(1, max_internal))
    n_ext = draw(st.integers(0, max_external))
    internal = list(range(n_int))
    devices = list(range(n_int + n_ext))
    raw = draw(
        st.lists(
            st.tuples(st.integers(0, horizon - 1), st.sampled_from(internal), st.sampled_from(devices)),
            max_size=max_events,
        )
    )
    events = [e for e in raw if e[1] != e[2]]
    return make_trace(events, internal, range(n_int, n_int + n_ext))


@st.composite
def graphs_with_internal(draw, max_nodes=12):
    """A contact graph plus its internal-device set; every edge touches an internal node."""
    n = draw(st.integers(1, max_nodes))
    n_int = draw(st.integers(1, n))
    internal = frozenset(range(n_int))
    possible = [(a, b) for a in range(n) for b in range(a + 1, n) if a in internal or b in internal]
    edges = draw(st.lists(st.sampled_from(possible), unique=True)) if possible else []
    graph = IntervalGraph.from_edges(0, 1, edges, range(n))
    return graph, internal


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, passed: bool | None, detail: str) -> None:
    status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number}: {status}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
