"""Core domain types: devices, contact events, traces, social profiles, run config."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

DeviceId = int
Pair = tuple[int, int]
Budget = Union[int, float, Fraction]

ALGORITHMS = ("random", "greedy", "hcontext")
BOOTSTRAPS = ("random", "friendship", "interest")


class CrowdsenseError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CrowdsenseError, ValueError):
    """Invalid run or generator configuration."""


class TraceParseError(CrowdsenseError, ValueError):
    """Malformed input file. ``line`` is 1-based and counts the header."""

    def __init__(self, message: str, line: int | None = None, source: str = ""):
        self.line = line
        self.source = source
        where = f"{source}:" if source else ""
        if line is not None:
            where += f"line {line}: "
        super().__init__(f"{where}{message}")


class TraceSchemaError(TraceParseError):
    """Well-formed row that violates a trace invariant."""


class ConsistencyError(CrowdsenseError, RuntimeError):
    """Internal invariant broken, e.g. observed edges not a subset of truth."""


class OracleGuardError(CrowdsenseError):
    """Brute-force enumeration would exceed the configured subset limit."""


def pair(a: DeviceId, b: DeviceId) -> Pair:
    """Canonical unordered pair (smaller id first)."""
    return (a, b) if a < b else (b, a)


class ContactEvent(NamedTuple):
    time_s: int
    scanner: DeviceId
    seen: DeviceId


@dataclass(frozen=True)
class DeviceRegistry:
    internal: frozenset[DeviceId]
    external: frozenset[DeviceId] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "internal", frozenset(self.internal))
        object.__setattr__(self, "external", frozenset(self.external))
        if not self.internal:
            raise ConfigError("registry needs at least one internal device")
        both = self.internal & self.external
        if both:
            raise ConfigError(f"devices both internal and external: {sorted(both)[:5]}")
        if any(d < 0 for d in self.internal | self.external):
            raise ConfigError("device ids must be non-negative")

    @property
    def devices(self) -> frozenset[DeviceId]:
        return self.internal | self.external

    def is_internal(self, device: DeviceId) -> bool:
        return device in self.internal


@dataclass(frozen=True)
class ContactTrace:
    """Time-ordered scan records of the internal devices.

    ``events`` must be sorted by ``time_s`` and every scanner must be internal.
    """

    events: tuple[ContactEvent, ...]
    registry: DeviceRegistry
    tau_s: int
    epoch_s: int = 0
    _times: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        events = tuple(ContactEvent(*e) for e in self.events)
        object.__setattr__(self, "events", events)
        if self.tau_s <= 0:
            raise ConfigError("tau_s must be positive")
        internal = self.registry.internal
        prev = None
        for ev in events:
            if ev.time_s < 0:
                raise TraceSchemaError(f"negative timestamp in {ev}")
            if ev.scanner == ev.seen:
                raise TraceSchemaError(f"self contact in {ev}")
            if ev.scanner not in internal:
                raise TraceSchemaError(f"scanner {ev.scanner} is not internal")
            if prev is not None and ev.time_s < prev:
                raise TraceSchemaError("events are not sorted by time")
            prev = ev.time_s
        object.__setattr__(self, "_times", tuple(e.time_s for e in events))

    @property
    def end_s(self) -> int:
        """Exclusive end of the traced span; the last scan covers one inquiry interval."""
        if not self.events:
            return 0
        return self.events[-1].time_s + self.tau_s

    @property
    def start_s(self) -> int:
        return self.events[0].time_s if self.events else 0

    def window(self, start_s: int, end_s: int) -> tuple[ContactEvent, ...]:
        """Events with ``start_s <= time_s < end_s``, still sorted."""
        lo = bisect.bisect_left(self._times, start_s)
        hi = bisect.bisect_left(self._times, end_s, lo)
        return self.events[lo:hi]


@dataclass(frozen=True)
class SocialProfiles:
    friendships: frozenset[Pair] = frozenset()
    interests: Mapping[DeviceId, frozenset[str]] = field(default_factory=dict)
    # rows dropped at load because they referenced non-internal devices
    dropped_rows: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        friends = frozenset(pair(a, b) for a, b in self.friendships)
        if any(a == b for a, b in friends):
            raise ConfigError("friendship pairs need distinct endpoints")
        object.__setattr__(self, "friendships", friends)
        object.__setattr__(
            self,
            "interests",
            {d: frozenset(tags) for d, tags in sorted(self.interests.items()) if tags},
        )

    def restricted_to(self, devices: Iterable[DeviceId]) -> SocialProfiles:
        keep = frozenset(devices)
        return SocialProfiles(
            friendships=frozenset(p for p in self.friendships if p[0] in keep and p[1] in keep),
            interests={d: t for d, t in self.interests.items() if d in keep},
            dropped_rows=self.dropped_rows,
        )


def _as_fraction(value: Budget) -> Fraction:
    if isinstance(value, Fraction):
        return value
    # repr round-trips, so 0.7 becomes 7/10 rather than its binary expansion
    return Fraction(repr(float(value)))


def resolve_budget(spec: Budget, v_in_size: int) -> int:
    """Turn a sensing budget into a device count.

    Integers are absolute counts; floats and Fractions are shares of ``v_in_size``
    and round up.
    """
    if v_in_size < 1:
        raise ConfigError("need at least one internal device")
    if isinstance(spec, bool):
        raise ConfigError(f"invalid budget {spec!r}")
    if isinstance(spec, int):
        if not 1 <= spec <= v_in_size:
            raise ConfigError(f"budget {spec} outside [1, {v_in_size}]")
        return spec
    frac = _as_fraction(spec)
    if not 0 < frac <= 1:
        raise ConfigError(f"budget fraction {spec} outside (0, 1]")
    return min(max(math.ceil(frac * v_in_size), 1), v_in_size)


def resolve_k(k_fraction: Budget, n: int) -> int:
    """Number of sensing devices HCONTEXT keeps: ``floor(k_fraction * n)``, at least 1."""
    frac = _as_fraction(k_fraction)
    if not 0 < frac <= 1:
        raise ConfigError(f"k_fraction {k_fraction} outside (0, 1]")
    return max(1, math.floor(frac * n))


@dataclass(frozen=True)
class SimConfig:
    ts_seconds: int
    n: Budget
    rounds: int
    algorithm: str = "hcontext"
    bootstrap: str = "random"
    seed: int = 0
    k_fraction: Budget = Fraction(1, 2)
    td_seconds: int = 0
    start_time_s: int = 0

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.bootstrap not in BOOTSTRAPS:
            raise ConfigError(f"unknown bootstrap {self.bootstrap!r}; expected one of {BOOTSTRAPS}")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.ts_seconds < 1:
            raise ConfigError("ts_seconds must be positive")
        if self.td_seconds < 0:
            raise ConfigError("td_seconds must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        _as_fraction(self.k_fraction)

    def resolve(self, v_in_size: int, tau_s: int) -> tuple[int, int]:
        """Validate against a concrete trace and return ``(n, k)``."""
        if self.ts_seconds < tau_s:
            raise ConfigError(f"ts_seconds {self.ts_seconds} shorter than tau {tau_s}")
        n = resolve_budget(self.n, v_in_size)
        return n, resolve_k(self.k_fraction, n)
