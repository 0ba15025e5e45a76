"""Seeded random tables and posets for the verification suites.

Every generator takes a :class:`random.Random`; suites derive one per instance
from ``(seed, index)`` so an instance can be regenerated on its own.
"""

from __future__ import annotations

import random

from finitary.core import FinitaryPoset, ObservationTable, finitary_substitute


def instance_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"finitary:{seed}:{index}")


def random_table(rng: random.Random, max_events: int, max_observers: int) -> ObservationTable:
    """Event and observer counts uniform on ``1..max``; each event's observer
    set uniform over the nonempty subsets."""
    if max_events < 1 or max_observers < 1:
        raise ValueError("need at least one event and one observer")
    n = rng.randint(1, max_events)
    m = rng.randint(1, max_observers)
    observers = tuple(f"O{k + 1}" for k in range(m))
    events = tuple(f"e{k + 1}" for k in range(n))
    rows = []
    for _ in events:
        mask = rng.randint(1, 2**m - 1)
        rows.append(tuple(bool(mask >> k & 1) for k in range(m)))
    return ObservationTable(events, observers, tuple(rows))


def random_tables(count: int, max_events: int, max_observers: int, seed: int) -> list[ObservationTable]:
    return [random_table(instance_rng(seed, i), max_events, max_observers) for i in range(count)]


def random_posets(count: int, max_points: int, seed: int, max_observers: int = 6) -> list[FinitaryPoset]:
    """Substitutes of random tables with at most ``max_points`` events."""
    return [
        finitary_substitute(random_table(instance_rng(seed, i), max_points, max_observers))
        for i in range(count)
    ]


def random_dag_poset(rng: random.Random, n: int, edge_prob: float = 0.3) -> FinitaryPoset:
    """Closure of a random relation oriented along a random linear order."""
    points = [f"p{k}" for k in range(n)]
    rng.shuffle(points)
    pairs = [
        (points[i], points[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_prob
    ]
    return FinitaryPoset.from_relation(points, pairs)


def chain(n: int) -> FinitaryPoset:
    pts = [f"c{k}" for k in range(n)]
    return FinitaryPoset.from_relation(pts, zip(pts, pts[1:]))


def antichain(n: int) -> FinitaryPoset:
    return FinitaryPoset.from_relation([f"a{k}" for k in range(n)], [])
