"""Two-stage round engine: bootstrap once, then alternate sensing and re-selection."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping, Sequence

from . import rng as rngmod
from .bootstrap import bootstrap
from .graph import IntervalGraph, coverage_ratio, ground_truth_graph, observed_graph
from .model import ConfigError, ContactTrace, DeviceId, SimConfig, SocialProfiles
from .selection import select_greedy, select_hcontext, select_random

log = logging.getLogger(__name__)

SWEEP_FIELDS = ("ts_seconds", "n", "algorithm", "bootstrap", "seed")

TruthBuilder = Callable[[ContactTrace, int, int], IntervalGraph]


@dataclass(frozen=True)
class RoundReport:
    round_index: int
    start_s: int
    end_s: int
    sensing_set: frozenset[DeviceId]
    observed_edges: int
    truth_edges: int
    coverage_ratio: float
    algorithm: str
    bootstrap: str
    seed: int
    n: int
    k: int
    # set on the last report of a run: rounds dropped because they start past the trace end
    truncated_rounds: int = 0


def run(
    trace: ContactTrace,
    profiles: SocialProfiles,
    config: SimConfig,
    *,
    truth_builder: TruthBuilder = ground_truth_graph,
) -> list[RoundReport]:
    """Simulate ``config.rounds`` back-to-back sensing intervals.

    Round 0 senses with the bootstrap set. Every later round's set is chosen
    from the previous round's observed graph only; the ground truth is built
    by ``truth_builder`` purely to score the round.
    """
    v_in = sorted(trace.registry.internal)
    n, k = config.resolve(len(v_in), trace.tau_s)
    if not trace.events:
        raise ConfigError("trace has no events")
    if not trace.start_s <= config.start_time_s < trace.end_s:
        raise ConfigError(
            f"start_time_s {config.start_time_s} outside trace span [{trace.start_s}, {trace.end_s})"
        )
    boot_rng = rngmod.stream(config.seed, "bootstrap")
    sel_rng = rngmod.stream(config.seed, "selection")
    profiles = profiles.restricted_to(v_in)

    reports: list[RoundReport] = []
    sensing: frozenset[DeviceId] = frozenset()
    observed: IntervalGraph | None = None
    truncated = 0
    for r in range(config.rounds):
        start = config.start_time_s + r * config.ts_seconds
        if start >= trace.end_s:
            truncated = config.rounds - r
            log.warning("trace ends at %d s; dropping the last %d rounds", trace.end_s, truncated)
            break
        if r == 0:
            sensing = bootstrap(config.bootstrap, profiles, v_in, n, boot_rng)
        else:
            assert observed is not None
            if config.algorithm == "random":
                sensing = select_random(observed, v_in, n, sel_rng)
            elif config.algorithm == "greedy":
                sensing = select_greedy(observed, v_in, n)
            else:
                sensing = select_hcontext(observed, v_in, sensing, n, k, sel_rng)
        observed = observed_graph(trace, start, config.ts_seconds, sensing)
        truth = truth_builder(trace, start, config.ts_seconds)
        reports.append(
            RoundReport(
                round_index=r,
                start_s=start,
                end_s=start + config.ts_seconds,
                sensing_set=sensing,
                observed_edges=len(observed.edges),
                truth_edges=len(truth.edges),
                coverage_ratio=coverage_ratio(observed, truth),
                algorithm=config.algorithm,
                bootstrap=config.bootstrap,
                seed=config.seed,
                n=n,
                k=k,
            )
        )
    if truncated and reports:
        reports[-1] = replace(reports[-1], truncated_rounds=truncated)
    return reports


def _run_point(args: tuple[ContactTrace, SocialProfiles, SimConfig]) -> list[RoundReport]:
    return run(*args)


def run_sweep(
    trace: ContactTrace,
    profiles: SocialProfiles,
    base_config: SimConfig,
    vary: Mapping[str, Sequence[Any]],
    *,
    workers: int = 1,
) -> dict[tuple[Any, ...], list[RoundReport]]:
    """One run per point of the Cartesian grid ``vary``.

    Keys are tuples of values in the order of ``vary``'s keys. Each run seeds
    its own streams from its config, so results do not depend on ``workers``
    or on the order runs finish in.
    """
    if not vary or any(len(v) == 0 for v in vary.values()):
        raise ConfigError("sweep grid must be non-empty")
    unknown = set(vary) - set(SWEEP_FIELDS)
    if unknown:
        raise ConfigError(f"cannot sweep over {sorted(unknown)}; allowed: {SWEEP_FIELDS}")
    names = list(vary)
    keys = list(itertools.product(*(vary[name] for name in names)))
    configs = [replace(base_config, **dict(zip(names, key))) for key in keys]
    jobs = [(trace, profiles, c) for c in configs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(job) for job in jobs]
    return dict(zip(keys, results))


def mean_ratio(reports: Sequence[RoundReport], first: int = 0, last: int | None = None) -> float:
    """Mean coverage ratio of rounds ``first..last`` inclusive."""
    chosen = [
        r.coverage_ratio
        for r in reports
        if r.round_index >= first and (last is None or r.round_index <= last)
    ]
    if not chosen:
        raise ValueError("no rounds in range")
    return sum(chosen) / len(chosen)
