"""Reading and writing traces and profiles, plus a seeded synthetic trace generator.

File formats (UTF-8, LF, header row required)::

    contacts.csv   time_s,scanner_id,seen_id
    devices.csv    device_id,class          class is internal or external
    friends.csv    device_id,friend_id
    interests.csv  device_id,interest
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import Hashable, Iterator

import numpy as np

from . import rng as rngmod
from .model import (
    ConfigError,
    ContactEvent,
    ContactTrace,
    DeviceId,
    DeviceRegistry,
    SocialProfiles,
    TraceParseError,
    TraceSchemaError,
    pair,
)

log = logging.getLogger(__name__)

CONTACTS_HEADER = ("time_s", "scanner_id", "seen_id")
DEVICES_HEADER = ("device_id", "class")
FRIENDS_HEADER = ("device_id", "friend_id")
INTERESTS_HEADER = ("device_id", "interest")


def _rows(text: str, header: tuple[str, ...], source: str) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for each data row after checking the header."""
    reader = csv.reader(io.StringIO(text))
    saw_header = False
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        fields = [f.strip() for f in row]
        if not saw_header:
            if tuple(fields) != header:
                raise TraceParseError(f"expected header {','.join(header)!r}", line, source)
            saw_header = True
            continue
        if len(fields) != len(header):
            raise TraceParseError(f"expected {len(header)} fields, got {len(fields)}", line, source)
        yield line, fields
    if not saw_header:
        raise TraceParseError(f"missing header {','.join(header)!r}", 1, source)


def _int(value: str, line: int, source: str, what: str) -> int:
    try:
        out = int(value)
    except ValueError:
        raise TraceParseError(f"{what} {value!r} is not an integer", line, source) from None
    if out < 0:
        raise TraceParseError(f"{what} {out} is negative", line, source)
    return out


def parse_devices(devices_text: str) -> tuple[set[DeviceId], set[DeviceId]]:
    source = "devices.csv"
    internal: set[DeviceId] = set()
    external: set[DeviceId] = set()
    for line, (dev, cls) in _rows(devices_text, DEVICES_HEADER, source):
        device = _int(dev, line, source, "device_id")
        if device in internal or device in external:
            raise TraceSchemaError(f"device {device} declared twice", line, source)
        if cls == "internal":
            internal.add(device)
        elif cls == "external":
            external.add(device)
        else:
            raise TraceParseError(f"class must be internal or external, got {cls!r}", line, source)
    if not internal:
        raise TraceSchemaError("no internal devices declared", None, source)
    return internal, external


def parse_contacts(contacts_text: str, devices_text: str, tau_s: int, epoch_s: int = 0) -> ContactTrace:
    """Build a trace from contacts.csv and devices.csv text.

    Devices that only appear as ``seen_id`` are registered as external.
    """
    internal, external = parse_devices(devices_text)
    source = "contacts.csv"
    events = []
    for line, (t, scanner, seen) in _rows(contacts_text, CONTACTS_HEADER, source):
        ev = ContactEvent(
            _int(t, line, source, "time_s"),
            _int(scanner, line, source, "scanner_id"),
            _int(seen, line, source, "seen_id"),
        )
        if ev.scanner not in internal:
            raise TraceSchemaError(f"scanner {ev.scanner} is not declared internal", line, source)
        if ev.scanner == ev.seen:
            raise TraceSchemaError(f"device {ev.scanner} scanned itself", line, source)
        if ev.seen not in internal:
            external.add(ev.seen)
        events.append(ev)
    events.sort(key=lambda e: e.time_s)
    return ContactTrace(tuple(events), DeviceRegistry(frozenset(internal), frozenset(external)), tau_s, epoch_s)


def parse_profiles(friends_text: str, interests_text: str, registry: DeviceRegistry) -> SocialProfiles:
    """Friendships and interests of internal devices; other rows are dropped and counted."""
    dropped = 0
    friends: set[tuple[int, int]] = set()
    for line, (a, b) in _rows(friends_text, FRIENDS_HEADER, "friends.csv"):
        u = _int(a, line, "friends.csv", "device_id")
        v = _int(b, line, "friends.csv", "friend_id")
        if u == v or u not in registry.internal or v not in registry.internal:
            dropped += 1
            continue
        friends.add(pair(u, v))
    interests: dict[DeviceId, set[str]] = {}
    for line, (a, tag) in _rows(interests_text, INTERESTS_HEADER, "interests.csv"):
        u = _int(a, line, "interests.csv", "device_id")
        if not tag:
            raise TraceParseError("empty interest", line, "interests.csv")
        if u not in registry.internal:
            dropped += 1
            continue
        interests.setdefault(u, set()).add(tag)
    if dropped:
        log.warning("dropped %d profile rows referencing non-internal devices", dropped)
    return SocialProfiles(frozenset(friends), {d: frozenset(t) for d, t in interests.items()}, dropped)


def _csv(header: tuple[str, ...], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def serialize_contacts(trace: ContactTrace) -> tuple[str, str]:
    """``(contacts_text, devices_text)`` that ``parse_contacts`` reads back to ``trace``."""
    contacts = _csv(CONTACTS_HEADER, trace.events)
    reg = trace.registry
    devices = _csv(
        DEVICES_HEADER,
        sorted([(d, "internal") for d in reg.internal] + [(d, "external") for d in reg.external]),
    )
    return contacts, devices


def serialize_profiles(profiles: SocialProfiles) -> tuple[str, str]:
    friends = _csv(FRIENDS_HEADER, sorted(profiles.friendships))
    interests = _csv(
        INTERESTS_HEADER,
        [(d, tag) for d in sorted(profiles.interests) for tag in sorted(profiles.interests[d])],
    )
    return friends, interests


class DeviceInterner:
    """Maps dataset-native device labels (MAC addresses, names) to dense integer ids."""

    def __init__(self) -> None:
        self._ids: dict[Hashable, int] = {}

    def __call__(self, label: Hashable) -> int:
        return self._ids.setdefault(label, len(self._ids))

    def __len__(self) -> int:
        return len(self._ids)

    def table(self) -> dict[Hashable, int]:
        return dict(self._ids)


@dataclass(frozen=True)
class SynthParams:
    n_internal: int = 30
    n_external: int = 50
    n_groups: int = 5
    steps: int = 200
    tau_s: int = 60
    p_detect: float = 0.8
    p_move: float = 0.05
    n_locations: int = 5
    friendship_within_group: float = 0.5
    interests_per_device: int = 2
    home_bias: float = 0.7

    def __post_init__(self) -> None:
        for name in ("n_internal", "n_external", "n_groups", "steps", "tau_s", "n_locations", "interests_per_device"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        for name in ("p_detect", "p_move", "friendship_within_group", "home_bias"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.n_groups > self.n_internal:
            raise ConfigError(f"n_groups {self.n_groups} exceeds n_internal {self.n_internal}")
        if self.interests_per_device > 2 * self.n_groups:
            raise ConfigError("interests_per_device exceeds the tag pool (2 * n_groups)")


def generate_synthetic(params: SynthParams, seed: int) -> tuple[ContactTrace, SocialProfiles]:
    """Group-mobility trace on a set of discrete locations.

    Internal devices ``0..n_internal-1`` join groups round-robin and start at
    their group's home location; externals follow and start anywhere. Each tick,
    every internal device scans and reports each co-located device with
    probability ``p_detect``; then each device moves with probability
    ``p_move``, an internal mover returning home with probability ``home_bias``.
    """
    p = params
    gen = rngmod.stream(seed, "ingest")
    n_int, n_dev = p.n_internal, p.n_internal + p.n_external
    group = np.arange(n_int) % p.n_groups
    homes = (np.arange(p.n_groups) * p.n_locations) // p.n_groups
    loc = np.empty(n_dev, dtype=np.int64)
    loc[:n_int] = homes[group]
    loc[n_int:] = gen.integers(p.n_locations, size=p.n_external)

    scanners = np.arange(n_int)
    times: list[np.ndarray] = []
    pairs: list[np.ndarray] = []
    for tick in range(p.steps):
        colocated = loc[:n_int, None] == loc[None, :]
        colocated[scanners, scanners] = False
        detected = gen.random((n_int, n_dev)) < p.p_detect
        s, d = np.nonzero(colocated & detected)
        if len(s):
            times.append(np.full(len(s), tick * p.tau_s, dtype=np.int64))
            pairs.append(np.stack([s, d], axis=1))
        moving = gen.random(n_dev) < p.p_move
        homeward = gen.random(n_int) < p.home_bias
        target = gen.integers(p.n_locations, size=n_dev)
        target[:n_int] = np.where(homeward, homes[group], target[:n_int])
        loc = np.where(moving, target, loc)

    if times:
        t_all = np.concatenate(times).tolist()
        sd = np.concatenate(pairs).tolist()
        events = tuple(ContactEvent(t, s, d) for t, (s, d) in zip(t_all, sd))
    else:
        events = ()
    registry = DeviceRegistry(frozenset(range(n_int)), frozenset(range(n_int, n_dev)))
    trace = ContactTrace(events, registry, p.tau_s)

    friends = set()
    for g in range(p.n_groups):
        members = [int(d) for d in np.flatnonzero(group == g)]
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                if gen.random() < p.friendship_within_group:
                    friends.add((a, b))
    tag_pool = [f"topic{j}" for j in range(2 * p.n_groups)]
    interests = {}
    for d in range(n_int):
        own = tag_pool[int(group[d])]
        others = [t for t in tag_pool if t != own]
        extra = rngmod.sample(gen, others, p.interests_per_device - 1)
        interests[d] = frozenset([own, *extra])
    return trace, SocialProfiles(frozenset(friends), interests)
