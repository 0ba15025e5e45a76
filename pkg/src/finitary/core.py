"""Observation tables and their finitary substitutes.

An observation table records which observer registered which event.  From it
we read off, for every event ``i``, the set ``lambda(i)`` of observers that saw
it, and order events by

    i -> j   iff   lambda(j) is a subset of lambda(i)

(``i`` was seen by at least everyone who saw ``j``).  This is a preorder; its
quotient by mutual comparability is a finite partial order, the finitary
substitute of the observed space.

Topology convention
-------------------
``x -> y`` is read as "the constant sequence x, x, ... converges to y".  In a
topological space that means every open neighbourhood of ``y`` contains ``x``,
so an open set must contain every predecessor of each of its points.  Opens
are therefore the *predecessor-closed* (down-closed) subsets, and the minimal
open neighbourhood of ``y`` is ``{x : x -> y}``.  Minimal elements of the order
are open points; maximal elements are closed points.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import TypeVar

T = TypeVar("T", bound=Hashable)

Matrix = tuple[tuple[bool, ...], ...]


class TableError(ValueError):
    """Raised when an observation table violates its invariants at ingest."""


class OrderError(ValueError):
    """Raised when a relation fails the axioms it is claimed to satisfy."""


def _freeze(rows: Iterable[Iterable[bool]]) -> Matrix:
    return tuple(tuple(bool(v) for v in row) for row in rows)


def _check_distinct(labels: Sequence[str], what: str) -> None:
    seen: set[str] = set()
    for label in labels:
        if not isinstance(label, str) or not label:
            raise TableError(f"{what} labels must be nonempty strings, got {label!r}")
        if label in seen:
            raise TableError(f"duplicate {what} label {label!r}")
        seen.add(label)


@dataclass(frozen=True)
class ObservationTable:
    """Boolean events x observers registration matrix."""

    events: tuple[str, ...]
    observers: tuple[str, ...]
    registered: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "observers", tuple(self.observers))
        object.__setattr__(self, "registered", _freeze(self.registered))
        _check_distinct(self.events, "event")
        _check_distinct(self.observers, "observer")
        if len(self.registered) != len(self.events):
            raise TableError(
                f"table has {len(self.registered)} rows for {len(self.events)} events"
            )
        for label, row in zip(self.events, self.registered):
            if len(row) != len(self.observers):
                raise TableError(
                    f"row {label!r} has {len(row)} cells for {len(self.observers)} observers"
                )
            if not any(row):
                raise TableError(f"event {label!r} is registered by no observer")

    @classmethod
    def from_sets(
        cls, observers: Sequence[str], events: Mapping[str, Iterable[str]] | Iterable[tuple[str, Iterable[str]]]
    ) -> ObservationTable:
        """Build a table from ``event -> observers that registered it``."""
        items = events.items() if isinstance(events, Mapping) else events
        observers = tuple(observers)
        known = set(observers)
        labels: list[str] = []
        rows: list[tuple[bool, ...]] = []
        for label, seen_by in items:
            seen = set(seen_by)
            unknown = seen - known
            if unknown:
                raise TableError(f"event {label!r} names unknown observers {sorted(unknown)}")
            labels.append(label)
            rows.append(tuple(o in seen for o in observers))
        return cls(tuple(labels), observers, tuple(rows))

    def column(self, observer: str) -> frozenset[str]:
        """Events registered by ``observer``."""
        k = self.observers.index(observer)
        return frozenset(e for e, row in zip(self.events, self.registered) if row[k])

    def row(self, event: str) -> tuple[bool, ...]:
        return self.registered[self.events.index(event)]


@dataclass(frozen=True)
class RegistrationSets:
    """The sets of observers registering each event."""

    sets: Mapping[str, frozenset[str]]

    def __getitem__(self, event: str) -> frozenset[str]:
        return self.sets[event]

    def __iter__(self) -> Iterator[str]:
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)


def registration_sets(table: ObservationTable) -> RegistrationSets:
    sets = {}
    for label, row in zip(table.events, table.registered):
        seen = frozenset(o for o, hit in zip(table.observers, row) if hit)
        if not seen:
            raise TableError(f"event {label!r} is registered by no observer")
        sets[label] = seen
    return RegistrationSets(sets)


def transitive_closure(rel: Sequence[Sequence[bool]]) -> list[list[bool]]:
    """Reflexive-transitive closure of a square boolean matrix (Warshall)."""
    n = len(rel)
    out = [[bool(rel[i][j]) or i == j for j in range(n)] for i in range(n)]
    for k in range(n):
        row_k = out[k]
        for i in range(n):
            if out[i][k]:
                row_i = out[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return out


def is_reflexive(rel: Sequence[Sequence[bool]]) -> bool:
    return all(rel[i][i] for i in range(len(rel)))


def is_transitive(rel: Sequence[Sequence[bool]]) -> bool:
    n = len(rel)
    return all(
        rel[i][k]
        for i in range(n)
        for j in range(n)
        if rel[i][j]
        for k in range(n)
        if rel[j][k]
    )


def is_antisymmetric(rel: Sequence[Sequence[bool]]) -> bool:
    n = len(rel)
    return not any(rel[i][j] and rel[j][i] for i in range(n) for j in range(n) if i != j)


def transitive_reduction(order: Sequence[Sequence[bool]]) -> set[tuple[int, int]]:
    """Covering pairs of a partial order given as a reflexive transitive matrix.

    Triple scan: ``(i, j)`` survives unless some ``k`` distinct from both sits
    strictly between them.
    """
    n = len(order)
    cover = set()
    for i in range(n):
        for j in range(n):
            if i == j or not order[i][j]:
                continue
            if not any(k != i and k != j and order[i][k] and order[k][j] for k in range(n)):
                cover.add((i, j))
    return cover


@dataclass(frozen=True)
class Preorder:
    """Reflexive transitive relation on an ordered carrier."""

    carrier: tuple[str, ...]
    rel: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "rel", _freeze(self.rel))
        n = len(self.carrier)
        if len(self.rel) != n or any(len(r) != n for r in self.rel):
            raise OrderError("relation matrix must be square over the carrier")
        if not is_reflexive(self.rel):
            raise OrderError("preorder is not reflexive")
        if not is_transitive(self.rel):
            raise OrderError("preorder is not transitive")

    def holds(self, i: str, j: str) -> bool:
        return self.rel[self.carrier.index(i)][self.carrier.index(j)]

    def strict_pairs(self) -> set[tuple[str, str]]:
        c = self.carrier
        return {
            (c[i], c[j])
            for i in range(len(c))
            for j in range(len(c))
            if i != j and self.rel[i][j]
        }


def quasiorder_from_table(table: ObservationTable) -> Preorder:
    lam = registration_sets(table)
    events = table.events
    rel = [[lam[j] <= lam[i] for j in events] for i in events]
    return Preorder(events, rel)


@dataclass(frozen=True)
class FinitaryPoset:
    """Finite partial order on equivalence classes of events.

    ``labels[k]`` names ``classes[k]`` (its lexicographically least member);
    classes are sorted by label.  ``order[a][b]`` is ``a -> b``.  ``covering``
    holds label pairs of the transitive reduction.
    """

    classes: tuple[frozenset[str], ...]
    order: Matrix
    covering: frozenset[tuple[str, str]] = field(default=frozenset())
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        classes = tuple(frozenset(c) for c in self.classes)
        if any(not c for c in classes):
            raise OrderError("empty equivalence class")
        labels = tuple(min(c) for c in classes)
        if list(labels) != sorted(labels):
            raise OrderError("classes must be sorted by canonical label")
        members = [e for c in classes for e in c]
        if len(members) != len(set(members)):
            raise OrderError("classes overlap")
        order = _freeze(self.order)
        n = len(classes)
        if len(order) != n or any(len(r) != n for r in order):
            raise OrderError("order matrix must be square over the classes")
        if not (is_reflexive(order) and is_transitive(order) and is_antisymmetric(order)):
            raise OrderError("relation is not a partial order")
        cover = frozenset((labels[i], labels[j]) for i, j in transitive_reduction(order))
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "covering", cover)
        object.__setattr__(self, "_index", {lab: k for k, lab in enumerate(labels)})

    @classmethod
    def from_relation(cls, points: Iterable[str], pairs: Iterable[tuple[str, str]]) -> FinitaryPoset:
        """Poset of singleton classes generated by ``pairs`` (closure is taken)."""
        labels = sorted(set(points))
        index = {p: k for k, p in enumerate(labels)}
        rel = [[False] * len(labels) for _ in labels]
        for a, b in pairs:
            if a not in index or b not in index:
                raise OrderError(f"pair {(a, b)!r} mentions an unknown point")
            rel[index[a]][index[b]] = True
        closed = transitive_closure(rel)
        if not is_antisymmetric(closed):
            raise OrderError("relation has a cycle; its closure is not antisymmetric")
        return cls(tuple(frozenset([p]) for p in labels), closed)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"unknown class {label!r}") from None

    def leq(self, x: str, y: str) -> bool:
        """``x -> y``."""
        return self.order[self.index(x)][self.index(y)]

    def pairs(self) -> list[tuple[str, str]]:
        """All ``(x, y)`` with ``x -> y``, reflexive ones included, in index order."""
        lab = self.labels
        return [
            (lab[i], lab[j])
            for i in range(len(lab))
            for j in range(len(lab))
            if self.order[i][j]
        ]

    def strict_pairs(self) -> set[tuple[str, str]]:
        return {(x, y) for x, y in self.pairs() if x != y}

    def class_of(self, event: str) -> str:
        for label, members in zip(self.labels, self.classes):
            if event in members:
                return label
        raise KeyError(f"event {event!r} is in no class")

    def predecessors(self, y: str) -> frozenset[str]:
        j = self.index(y)
        return frozenset(self.labels[i] for i in range(len(self)) if self.order[i][j])


def quotient_poset(pre: Preorder) -> FinitaryPoset:
    rel = pre.rel
    if not (is_reflexive(rel) and is_transitive(rel)):
        raise OrderError("input is not a preorder")
    n = len(pre.carrier)
    groups: list[list[int]] = []
    assigned = [-1] * n
    for i in range(n):
        if assigned[i] >= 0:
            continue
        assigned[i] = len(groups)
        group = [i]
        for j in range(i + 1, n):
            if assigned[j] < 0 and rel[i][j] and rel[j][i]:
                assigned[j] = assigned[i]
                group.append(j)
        groups.append(group)

    def key(g: list[int]) -> str:
        return min(pre.carrier[i] for i in g)

    groups.sort(key=key)
    order = []
    for ga in groups:
        row = []
        for gb in groups:
            votes = {rel[i][j] for i in ga for j in gb}
            if len(votes) != 1:
                raise OrderError("order between classes depends on the representatives")
            row.append(votes.pop())
        order.append(row)
    classes = tuple(frozenset(pre.carrier[i] for i in g) for g in groups)
    return FinitaryPoset(classes, order)


def finitary_substitute(table: ObservationTable) -> FinitaryPoset:
    return quotient_poset(quasiorder_from_table(table))


@dataclass(frozen=True)
class FiniteTopology:
    points: tuple
    opens: frozenset[frozenset]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "opens", frozenset(frozenset(u) for u in self.opens))

    def __len__(self) -> int:
        return len(self.opens)

    def is_topology(self) -> bool:
        whole = frozenset(self.points)
        if frozenset() not in self.opens or whole not in self.opens:
            return False
        if any(not u <= whole for u in self.opens):
            return False
        opens = list(self.opens)
        return all(
            (u | v) in self.opens and (u & v) in self.opens
            for k, u in enumerate(opens)
            for v in opens[k + 1 :]
        )

    def minimal_neighbourhood(self, y) -> frozenset:
        nbhd = frozenset(self.points)
        for u in self.opens:
            if y in u:
                nbhd &= u
        return nbhd

    def sorted_opens(self) -> list[list]:
        """Opens as sorted lists, ordered by size then contents."""
        return sorted((sorted(u) for u in self.opens), key=lambda u: (len(u), u))


def down_sets(points: Sequence[T], order: Sequence[Sequence[bool]]) -> Iterator[frozenset[T]]:
    """Enumerate predecessor-closed subsets of a finite partial order.

    Elements are decided in a linear extension; an element may join only when
    all its predecessors already have, so every branch is a down-set and no
    down-set is produced twice.
    """
    n = len(points)
    preds = [[i for i in range(n) if i != j and order[i][j]] for j in range(n)]
    remaining = set(range(n))
    linear: list[int] = []
    while remaining:
        nxt = min(j for j in remaining if not any(i in remaining for i in preds[j]))
        linear.append(nxt)
        remaining.remove(nxt)

    chosen = [False] * n

    def walk(k: int) -> Iterator[frozenset[T]]:
        if k == n:
            yield frozenset(points[i] for i in range(n) if chosen[i])
            return
        j = linear[k]
        yield from walk(k + 1)
        if all(chosen[i] for i in preds[j]):
            chosen[j] = True
            yield from walk(k + 1)
            chosen[j] = False

    return walk(0)


def alexandrov_topology(poset: FinitaryPoset) -> FiniteTopology:
    return FiniteTopology(poset.labels, frozenset(down_sets(poset.labels, poset.order)))


def topology_from_relation(points: Sequence[T], rel: Iterable[tuple[T, T]]) -> FiniteTopology:
    """Strongest topology in which ``(x, y)`` in ``rel`` makes x, x, ... converge to y."""
    points = list(points)
    index = {p: k for k, p in enumerate(points)}
    if len(index) != len(points):
        raise ValueError("duplicate points")
    mat = [[False] * len(points) for _ in points]
    for x, y in rel:
        if x not in index or y not in index:
            raise ValueError(f"pair {(x, y)!r} mentions an unknown point")
        mat[index[x]][index[y]] = True
    closed = transitive_closure(mat)
    if not is_antisymmetric(closed):
        # Non-T0 case: merge cycles, opens are unions of whole cycles.  The
        # down-set walker needs a partial order, so enumerate over classes.
        return _preorder_topology(points, closed)
    return FiniteTopology(points, frozenset(down_sets(points, closed)))


def _preorder_topology(points: list, closed: list[list[bool]]) -> FiniteTopology:
    n = len(points)
    reps: list[int] = []
    rep_of = [-1] * n
    for i in range(n):
        if rep_of[i] < 0:
            for j in range(n):
                if closed[i][j] and closed[j][i]:
                    rep_of[j] = len(reps)
            reps.append(i)
    order = [[closed[a][b] for b in reps] for a in reps]
    opens = set()
    for ds in down_sets(list(range(len(reps))), order):
        opens.add(frozenset(points[i] for i in range(n) if rep_of[i] in ds))
    return FiniteTopology(points, frozenset(opens))


def limits(poset: FinitaryPoset, x: str) -> frozenset[str]:
    """Every limit point of the constant sequence at ``x``."""
    i = poset.index(x)
    return frozenset(poset.labels[j] for j in range(len(poset)) if poset.order[i][j])


def overlap_matrix(table: ObservationTable) -> Matrix:
    """``[a][b]`` is true when observers ``a`` and ``b`` registered a common event."""
    m = len(table.observers)
    return tuple(
        tuple(any(row[a] and row[b] for row in table.registered) for b in range(m))
        for a in range(m)
    )


def specialization_order(topology: FiniteTopology) -> set[tuple]:
    """Pairs ``(x, y)`` such that ``x`` lies in every open set containing ``y``."""
    return {
        (x, y)
        for y in topology.points
        for x in topology.minimal_neighbourhood(y)
    }
