"""Per-interval contact graphs and the sensing coverage ratio."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Mapping

from .model import ConsistencyError, ContactTrace, DeviceId, Pair, pair


@dataclass(frozen=True)
class IntervalGraph:
    """Undirected contact graph of the half-open window ``[start_s, end_s)``."""

    start_s: int
    end_s: int
    nodes: frozenset[DeviceId]
    edges: frozenset[Pair]
    adjacency: Mapping[DeviceId, frozenset[DeviceId]] = field(compare=False, repr=False)

    @classmethod
    def from_edges(
        cls,
        start_s: int,
        end_s: int,
        edges: Iterable[tuple[DeviceId, DeviceId]],
        nodes: Iterable[DeviceId] = (),
    ) -> IntervalGraph:
        canon = set()
        for a, b in edges:
            if a == b:
                raise ConsistencyError(f"self-loop on {a}")
            canon.add(pair(a, b))
        adj: dict[DeviceId, set[DeviceId]] = {v: set() for v in nodes}
        for a, b in canon:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return cls(
            start_s=start_s,
            end_s=end_s,
            nodes=frozenset(adj),
            edges=frozenset(canon),
            adjacency={v: frozenset(ns) for v, ns in adj.items()},
        )

    def neighbors(self, v: DeviceId) -> frozenset[DeviceId]:
        return self.adjacency.get(v, frozenset())

    def degree(self, v: DeviceId) -> int:
        return len(self.adjacency.get(v, ()))


def observed_graph(
    trace: ContactTrace, start_s: int, ts_seconds: int, sensing_set: AbstractSet[DeviceId]
) -> IntervalGraph:
    """Contacts reported by ``sensing_set`` during ``[start_s, start_s + ts_seconds)``.

    Sensing devices are nodes of the graph even when they saw nobody.
    """
    end_s = start_s + ts_seconds
    sensing = frozenset(sensing_set)
    edges = {
        pair(ev.scanner, ev.seen)
        for ev in trace.window(start_s, end_s)
        if ev.scanner in sensing
    }
    return IntervalGraph.from_edges(start_s, end_s, edges, sorted(sensing))


def ground_truth_graph(trace: ContactTrace, start_s: int, ts_seconds: int) -> IntervalGraph:
    """What the interval would look like if every internal device sensed."""
    return observed_graph(trace, start_s, ts_seconds, trace.registry.internal)


def coverage_ratio(observed: IntervalGraph, truth: IntervalGraph) -> float:
    """``|observed edges| / |truth edges|``, or 1.0 when the truth graph has no edges."""
    if not observed.edges <= truth.edges:
        extra = sorted(observed.edges - truth.edges)[:3]
        raise ConsistencyError(f"observed edges missing from ground truth: {extra}")
    if not truth.edges:
        return 1.0
    return len(observed.edges) / len(truth.edges)


def covered_edges(truth: IntervalGraph, chosen: AbstractSet[DeviceId]) -> int:
    """Number of ``truth`` edges with at least one endpoint in ``chosen``."""
    return sum(1 for a, b in truth.edges if a in chosen or b in chosen)
