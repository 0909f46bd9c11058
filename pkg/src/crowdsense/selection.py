"""Policies that choose the next interval's sensing set from an observed contact graph.

All selectors return ``min(n, |v_in|)`` internal devices and break ties by the
smaller device id, so their output is a function of the graph (plus the rng for
the randomized ones).
"""

from __future__ import annotations

import itertools
import math
from typing import AbstractSet, Iterable

import numpy as np

from . import rng as rngmod
from .graph import IntervalGraph
from .model import ConsistencyError, DeviceId, OracleGuardError

ENUMERATION_LIMIT = 10**7


def observability(graph: IntervalGraph, sensing_set: AbstractSet[DeviceId]) -> dict[DeviceId, int]:
    """Number of sensing neighbours of every non-sensing node in ``graph``."""
    return {
        v: sum(1 for u in graph.neighbors(v) if u in sensing_set)
        for v in sorted(graph.nodes)
        if v not in sensing_set
    }


def coverage_utility(
    graph: IntervalGraph, sensing_set: AbstractSet[DeviceId], obs: dict[DeviceId, int]
) -> dict[DeviceId, float]:
    """Sum of ``1/observability`` over each sensing node's non-sensing neighbours.

    Neighbours are summed in ascending id order so results are reproducible
    to the last bit.
    """
    utility = {}
    for u in sorted(sensing_set):
        total = 0.0
        for v in sorted(graph.neighbors(u)):
            if v in sensing_set:
                continue
            sigma = obs.get(v, 0)
            if sigma <= 0:
                raise ConsistencyError(f"node {v} is adjacent to sensing node {u} but has observability 0")
            total += 1.0 / sigma
        utility[u] = total
    return utility


def _target(n: int, v_in: Iterable[DeviceId]) -> tuple[list[DeviceId], int]:
    pool = sorted(set(v_in))
    if n < 1:
        raise ValueError("n must be >= 1")
    return pool, min(n, len(pool))


def _remaining_adjacency(graph: IntervalGraph) -> dict[DeviceId, set[DeviceId]]:
    return {v: set(ns) for v, ns in graph.adjacency.items()}


def _remove_node_edges(adj: dict[DeviceId, set[DeviceId]], u: DeviceId) -> None:
    for w in adj.get(u, ()):
        adj[w].discard(u)
    adj[u] = set()


def select_random(
    graph: IntervalGraph, v_in: Iterable[DeviceId], n: int, rng: np.random.Generator
) -> frozenset[DeviceId]:
    """Top-n random cover.

    Draws uniformly among internal nodes that still have an uncovered edge and
    deletes the chosen node's edges. Once no such node is left, the remaining
    budget is filled uniformly from the other internal nodes.
    """
    pool, size = _target(n, v_in)
    adj = _remaining_adjacency(graph)
    chosen: list[DeviceId] = []
    taken: set[DeviceId] = set()
    while len(chosen) < size:
        eligible = [u for u in pool if u not in taken and adj.get(u)]
        if not eligible:
            break
        u = rngmod.pick(rng, eligible)
        chosen.append(u)
        taken.add(u)
        _remove_node_edges(adj, u)
    rest = [u for u in pool if u not in taken]
    chosen.extend(rngmod.sample(rng, rest, size - len(chosen)))
    return frozenset(chosen)


def select_greedy(graph: IntervalGraph, v_in: Iterable[DeviceId], n: int) -> frozenset[DeviceId]:
    """Top-n greedy cover: repeatedly take the internal node of highest remaining degree."""
    pool, size = _target(n, v_in)
    adj = _remaining_adjacency(graph)
    chosen: set[DeviceId] = set()
    while len(chosen) < size:
        best, best_deg = None, 0
        for u in pool:
            if u in chosen:
                continue
            deg = len(adj.get(u, ()))
            if deg > best_deg:
                best, best_deg = u, deg
        if best is None:
            break
        chosen.add(best)
        _remove_node_edges(adj, best)
    for u in pool:
        if len(chosen) >= size:
            break
        chosen.add(u)
    return frozenset(chosen)


def select_hcontext(
    graph: IntervalGraph,
    v_in: Iterable[DeviceId],
    prev_sensing: AbstractSet[DeviceId],
    n: int,
    k: int,
    rng: np.random.Generator,
    *,
    keep_highest: bool = True,
) -> frozenset[DeviceId]:
    """Context-aware re-selection.

    Keeps the ``k`` previous sensing nodes with the highest coverage utility and
    fills the other slots with non-sensing internal nodes of highest
    observability. When no observed candidate is left, the rest is drawn
    uniformly from unselected internal nodes.

    ``keep_highest=False`` keeps the lowest-utility nodes instead, the ordering
    given by the algorithm's pseudocode listing.
    """
    pool, size = _target(n, v_in)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in [1, n={n}]")
    prev = frozenset(prev_sensing)
    obs = observability(graph, prev)
    util = coverage_utility(graph, prev, obs)
    sign = -1 if keep_highest else 1
    kept = sorted(prev, key=lambda u: (sign * util.get(u, 0.0), u))[: min(k, size)]
    chosen = list(kept)
    taken = set(kept)
    candidates = sorted(
        (u for u in pool if u not in prev and obs.get(u, 0) > 0),
        key=lambda u: (-obs[u], u),
    )
    for u in candidates:
        if len(chosen) >= size:
            break
        chosen.append(u)
        taken.add(u)
    rest = [u for u in pool if u not in taken]
    chosen.extend(rngmod.sample(rng, rest, size - len(chosen)))
    return frozenset(chosen)


def select_optimal_bruteforce(
    truth_graph: IntervalGraph,
    v_in: Iterable[DeviceId],
    n: int,
    limit: int = ENUMERATION_LIMIT,
) -> tuple[frozenset[DeviceId], int]:
    """Hindsight optimum: the ``n`` internal nodes touching the most ``truth_graph`` edges.

    Only internal nodes with at least one edge are enumerated; if fewer than
    ``n`` exist, the set is padded with the smallest remaining ids. Among equal
    counts the lexicographically smallest subset wins.
    """
    pool, size = _target(n, v_in)
    relevant = [u for u in pool if truth_graph.degree(u) > 0]
    m = min(size, len(relevant))
    n_subsets = math.comb(len(relevant), m)
    if n_subsets > limit:
        raise OracleGuardError(
            f"C({len(relevant)}, {m}) = {n_subsets} subsets exceeds the enumeration limit {limit}"
        )
    edge_index = {e: i for i, e in enumerate(sorted(truth_graph.edges))}
    masks = []
    for u in relevant:
        mask = 0
        for w in truth_graph.neighbors(u):
            mask |= 1 << edge_index[(u, w) if u < w else (w, u)]
        masks.append(mask)

    best_combo: tuple[int, ...] = tuple(range(m))
    best = -1
    for combo in itertools.combinations(range(len(relevant)), m):
        mask = 0
        for i in combo:
            mask |= masks[i]
        count = mask.bit_count()
        if count > best:
            best, best_combo = count, combo
    chosen = {relevant[i] for i in best_combo}
    for u in pool:
        if len(chosen) >= size:
            break
        chosen.add(u)
    return frozenset(chosen), max(best, 0)
