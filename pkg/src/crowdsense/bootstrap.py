"""Round-0 sensing sets, chosen before any contact graph exists."""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Iterable

import numpy as np

from . import rng as rngmod
from .model import ConfigError, DeviceId, SocialProfiles


def _check(v_in: Iterable[DeviceId], n: int) -> list[DeviceId]:
    pool = sorted(set(v_in))
    if not 1 <= n <= len(pool):
        raise ConfigError(f"bootstrap size {n} outside [1, {len(pool)}]")
    return pool


def bootstrap_random(v_in: Iterable[DeviceId], n: int, rng: np.random.Generator) -> frozenset[DeviceId]:
    pool = _check(v_in, n)
    return frozenset(rngmod.sample(rng, pool, n))


def bootstrap_friendship(profiles: SocialProfiles, v_in: Iterable[DeviceId], n: int) -> frozenset[DeviceId]:
    """The ``n`` participants with the most friends among participants."""
    pool = _check(v_in, n)
    members = set(pool)
    degree: Counter[DeviceId] = Counter()
    for a, b in profiles.friendships:
        if a in members and b in members:
            degree[a] += 1
            degree[b] += 1
    ranked = sorted(pool, key=lambda d: (-degree[d], d))
    return frozenset(ranked[:n])


def bootstrap_interest(
    profiles: SocialProfiles, v_in: Iterable[DeviceId], n: int, rng: np.random.Generator
) -> frozenset[DeviceId]:
    """One well-connected member from each of the largest interest groups.

    Groups are ranked by size (then tag). Each of the ``n`` largest groups
    contributes its unselected member with the most tags; groups with nobody
    left are skipped. Leftover slots go to the next groups in rank order, and
    only then to a uniform draw over the remaining participants.
    """
    pool = _check(v_in, n)
    members = set(pool)
    groups: dict[str, list[DeviceId]] = defaultdict(list)
    n_tags: dict[DeviceId, int] = {}
    for device, tags in profiles.interests.items():
        if device not in members:
            continue
        n_tags[device] = len(tags)
        for tag in tags:
            groups[tag].append(device)
    order = sorted(groups, key=lambda t: (-len(groups[t]), t))

    chosen: list[DeviceId] = []
    taken: set[DeviceId] = set()

    def walk(tags: list[str]) -> None:
        for tag in tags:
            if len(chosen) >= n:
                return
            left = [d for d in groups[tag] if d not in taken]
            if not left:
                continue
            best = min(left, key=lambda d: (-n_tags[d], d))
            chosen.append(best)
            taken.add(best)

    walk(order[:n])
    walk(order[n:])
    if len(chosen) < n:
        rest = [d for d in pool if d not in taken]
        chosen.extend(rngmod.sample(rng, rest, n - len(chosen)))
    return frozenset(chosen)


def bootstrap(
    strategy: str,
    profiles: SocialProfiles,
    v_in: Iterable[DeviceId],
    n: int,
    rng: np.random.Generator,
) -> frozenset[DeviceId]:
    if strategy == "random":
        return bootstrap_random(v_in, n, rng)
    if strategy == "friendship":
        return bootstrap_friendship(profiles, v_in, n)
    if strategy == "interest":
        return bootstrap_interest(profiles, v_in, n, rng)
    raise ConfigError(f"unknown bootstrap strategy {strategy!r}")
