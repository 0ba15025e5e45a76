"""Geometric coverings of model spaces: sampling, tabulation and nerves.

Circle coordinates are kept as exact rationals in units of pi, reduced into
``[0, 2)``; an arc is ``(start, length)`` with ``0 < length < 2``.  Interval
and box coordinates are exact rationals.  Regions are open, so a point on a
region boundary is not registered by it.
"""

from __future__ import annotations

import logging
import math
import random
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from finitary.core import ObservationTable

log = logging.getLogger(__name__)

TWO = Fraction(2)
SAMPLER_ALGORITHM = "python-random-mt19937"


class CoveringError(ValueError):
    pass


# -- angles -----------------------------------------------------------------

_ANGLE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:"
    r"(?P<a>\d+(?:/\d+)?)?\*?pi(?:/(?P<b>\d+))?"  # 3pi/4, pi, 2/3pi
    r"|(?P<d>\d+(?:/\d+)?|\d*\.\d+)"  # bare number: already in units of pi
    r")\s*$"
)


def parse_angle(value) -> Fraction:
    """Angle in units of pi.

    Strings may name pi explicitly (``"3pi/4"``, ``"-2pi/3"``, ``"2/3pi"``,
    ``"pi"``); bare rational strings are taken as multiples of pi.  Numbers
    are radians and are rationalised, which is inexact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value / math.pi).limit_denominator(10**12)
    if not isinstance(value, str):
        raise CoveringError(f"cannot read angle {value!r}")
    m = _ANGLE.match(value.replace(" ", ""))
    if not m:
        raise CoveringError(f"cannot read angle {value!r}")
    if m.group("d") is not None:
        out = Fraction(m.group("d"))
    else:
        out = Fraction(m.group("a") or 1)
        if m.group("b"):
            out /= int(m.group("b"))
    return -out if m.group("sign") == "-" else out


def format_angle(x: Fraction) -> str:
    """``Fraction(3, 2)`` -> ``"3pi/2"``."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    num = "" if x.numerator == 1 else str(x.numerator)
    den = "" if x.denominator == 1 else f"/{x.denominator}"
    return f"{sign}{num}pi{den}"


def _format_rational(x: Fraction) -> str:
    return str(Fraction(x))


# -- spaces and regions ------------------------------------------------------


@dataclass(frozen=True)
class ModelSpace:
    kind: str
    dim: int = 1
    bounds: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "interval", "box"):
            raise CoveringError(f"unknown space kind {self.kind!r}")
        if self.kind in ("circle", "interval") and self.dim != 1:
            raise CoveringError(f"{self.kind} has dimension 1")
        if not 1 <= self.dim <= 3:
            raise CoveringError("box dimension must be between 1 and 3")
        bounds = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.bounds)
        if self.kind == "circle":
            bounds = ()
        elif not bounds:
            bounds = ((Fraction(0), Fraction(1)),) * self.dim
        if len(bounds) != (0 if self.kind == "circle" else self.dim):
            raise CoveringError("one bound pair per axis")
        if any(lo >= hi for lo, hi in bounds):
            raise CoveringError("empty axis interval")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def circle(cls) -> ModelSpace:
        return cls("circle")

    @classmethod
    def interval(cls) -> ModelSpace:
        return cls("interval")

    @classmethod
    def box(cls, dim: int, bounds=()) -> ModelSpace:
        return cls("box", dim, tuple(bounds))

    def normalize(self, coords: Sequence) -> tuple[Fraction, ...]:
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.dim:
            raise CoveringError(f"expected {self.dim} coordinate(s), got {len(coords)}")
        if self.kind == "circle":
            return (coords[0] % TWO,)
        for x, (lo, hi) in zip(coords, self.bounds):
            if not lo < x < hi:
                raise CoveringError(f"coordinate {x} lies outside ({lo}, {hi})")
        return coords

    def label(self, coords: Sequence[Fraction]) -> str:
        if self.kind == "circle":
            return format_angle(coords[0])
        if self.kind == "interval":
            return _format_rational(coords[0])
        return "(" + ",".join(_format_rational(c) for c in coords) + ")"


@dataclass(frozen=True)
class Arc:
    """Open counterclockwise arc from ``start`` of the given ``length``, units of pi."""

    start: Fraction
    length: Fraction

    def __post_init__(self) -> None:
        length = Fraction(self.length)
        if not 0 < length < TWO:
            raise CoveringError(f"arc length must lie strictly between 0 and 2pi, got {format_angle(length)}")
        object.__setattr__(self, "start", Fraction(self.start) % TWO)
        object.__setattr__(self, "length", length)

    @classmethod
    def between(cls, start, end) -> Arc:
        """The arc ``start < phi < end`` read counterclockwise."""
        s, e = Fraction(start), Fraction(end)
        return cls(s, (e - s) % TWO)

    @property
    def end(self) -> Fraction:
        return (self.start + self.length) % TWO

    def contains(self, phi: Fraction) -> bool:
        return 0 < (Fraction(phi) - self.start) % TWO < self.length

    def pieces(self) -> list[tuple[Fraction, Fraction]]:
        """Open subintervals of ``(0, 2)`` whose union is the arc minus the point 0.

        Dropping a single point never changes whether finitely many open sets
        meet, so these pieces decide intersections exactly.
        """
        lo, hi = self.start, self.start + self.length
        if hi <= TWO:
            return [(lo, hi)]
        return [(lo, TWO), (Fraction(0), hi - TWO)]


@dataclass(frozen=True)
class Box:
    """Product of open intervals, one per axis."""

    sides: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        sides = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.sides)
        if not sides or any(lo >= hi for lo, hi in sides):
            raise CoveringError("box regions need nonempty open sides")
        object.__setattr__(self, "sides", sides)

    def contains(self, coords: Sequence[Fraction]) -> bool:
        return all(lo < x < hi for x, (lo, hi) in zip(coords, self.sides))


Region = Arc | Box


@dataclass(frozen=True)
class CoveringSpec:
    space: ModelSpace
    regions: tuple[tuple[str, Region], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        regions = tuple((str(lab), reg) for lab, reg in self.regions)
        if not regions:
            raise CoveringError("a covering needs at least one region")
        labels = [lab for lab, _ in regions]
        if len(set(labels)) != len(labels):
            raise CoveringError("observer labels must be distinct")
        for lab, reg in regions:
            if self.space.kind == "circle" and not isinstance(reg, Arc):
                raise CoveringError(f"region {lab!r} on the circle must be an arc")
            if self.space.kind != "circle":
                if not isinstance(reg, Box) or len(reg.sides) != self.space.dim:
                    raise CoveringError(f"region {lab!r} must be a {self.space.dim}-dimensional box")
        object.__setattr__(self, "regions", regions)

    @property
    def observers(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.regions)

    def region(self, observer: str) -> Region:
        for lab, reg in self.regions:
            if lab == observer:
                return reg
        raise KeyError(observer)


# -- built-in fixtures -------------------------------------------------------


def paper_circle() -> CoveringSpec:
    """Four observers on the circle.

    The third arc is taken as ``-3pi/4 < phi < -pi/3`` (equivalently
    ``5pi/4 < phi < 5pi/3``): of the grid points 0, pi/2, pi, 3pi/2 it must
    contain only 3pi/2 for the published outcome table to come out.
    """
    arcs = [
        ("O1", Arc.between(Fraction(-2, 3), Fraction(2, 3))),
        ("O2", Arc.between(Fraction(1, 3), Fraction(5, 3))),
        ("O3", Arc.between(Fraction(-3, 4), Fraction(-1, 3))),
        ("O4", Arc.between(Fraction(1, 4), Fraction(3, 4))),
    ]
    return CoveringSpec(ModelSpace.circle(), tuple(arcs), name="paper-circle")


def paper_interval() -> CoveringSpec:
    """Three overlapping intervals covering (0, 1) whose nerve is a triangle."""
    ivs = [
        ("O1", Box(((Fraction(0), Fraction(3, 5)),))),
        ("O2", Box(((Fraction(2, 5), Fraction(1)),))),
        ("O3", Box(((Fraction(1, 5), Fraction(4, 5)),))),
    ]
    return CoveringSpec(ModelSpace.interval(), tuple(ivs), name="paper-interval")


FIXTURES = {"paper-circle": paper_circle, "paper-interval": paper_interval}


def fixture(name: str) -> CoveringSpec:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise CoveringError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


# -- sampling and tabulation -------------------------------------------------

Event = tuple[str, tuple[Fraction, ...]]


@dataclass(frozen=True)
class Grid:
    n: int


@dataclass(frozen=True)
class Uniform:
    n: int
    seed: int = 0


def sample_events(spec: CoveringSpec, mode: Grid | Uniform) -> list[Event]:
    """Grid: circle angles ``2k/n`` (units of pi); interval and box axes use
    the interior points ``lo + k (hi - lo) / (n + 1)``, giving n per axis.
    Uniform: n points from a seeded Mersenne Twister, on a 2**-32 lattice."""
    if mode.n < 1:
        raise CoveringError("sample size must be at least 1")
    space = spec.space
    if isinstance(mode, Grid):
        if space.kind == "circle":
            points = [(Fraction(2 * k, mode.n),) for k in range(mode.n)]
        else:
            axes = [
                [lo + (hi - lo) * Fraction(k, mode.n + 1) for k in range(1, mode.n + 1)]
                for lo, hi in space.bounds
            ]
            points = list(product(*axes))
    else:
        rng = random.Random(mode.seed)
        points = []
        for _ in range(mode.n):
            if space.kind == "circle":
                points.append((Fraction(rng.getrandbits(32), 2**31),))
            else:
                points.append(
                    tuple(lo + (hi - lo) * Fraction(rng.randrange(1, 2**32), 2**32) for lo, hi in space.bounds)
                )
    events: list[Event] = []
    seen: set[str] = set()
    for pt in points:
        pt = space.normalize(pt)
        label = space.label(pt)
        if label not in seen:
            seen.add(label)
            events.append((label, pt))
    return events


def _registers(region: Region, coords: tuple[Fraction, ...]) -> bool:
    if isinstance(region, Arc):
        return region.contains(coords[0])
    return region.contains(coords)


def tabulate_counted(spec: CoveringSpec, events: Iterable[Event]) -> tuple[ObservationTable, list[str]]:
    """Observation table plus the labels of events no region registered."""
    rows = []
    labels = []
    dropped = []
    for label, coords in events:
        coords = spec.space.normalize(coords)
        row = tuple(_registers(reg, coords) for _, reg in spec.regions)
        if any(row):
            labels.append(label)
            rows.append(row)
        else:
            dropped.append(label)
    if dropped:
        log.warning("dropped %d event(s) registered by no observer", len(dropped))
    return ObservationTable(tuple(labels), spec.observers, tuple(rows)), dropped


def tabulate(spec: CoveringSpec, events: Iterable[Event]) -> ObservationTable:
    return tabulate_counted(spec, events)[0]


def covers(spec: CoveringSpec) -> bool:
    """Whether the union of the regions is the whole space."""
    space = spec.space
    if space.kind == "circle":
        cuts = sorted({Fraction(0)} | {p for _, a in spec.regions for p in (a.start, a.end)})
        probes = cuts + [(a + b) / 2 for a, b in zip(cuts, cuts[1:] + [TWO])]
        return all(any(a.contains(p) for _, a in spec.regions) for p in probes)
    axes = []
    for k, (lo, hi) in enumerate(space.bounds):
        cuts = sorted({lo, hi} | {c for _, b in spec.regions for c in b.sides[k] if lo < c < hi})
        axes.append([c for c in cuts if lo < c < hi] + [(a + b) / 2 for a, b in zip(cuts, cuts[1:])])
    return all(any(b.contains(p) for _, b in spec.regions) for p in product(*axes))


# -- nerves ------------------------------------------------------------------


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple[str, ...]
    faces: frozenset[frozenset[str]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "faces", frozenset(frozenset(f) for f in self.faces if f))

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1

    def is_downward_closed(self) -> bool:
        return all(
            frozenset(sub) in self.faces
            for f in self.faces
            for k in range(1, len(f))
            for sub in combinations(sorted(f), k)
        )

    def maximal_faces(self) -> list[frozenset[str]]:
        out = [f for f in self.faces if not any(f < g for g in self.faces)]
        return sorted(out, key=self._key)

    def edges(self) -> list[tuple[str, str]]:
        pos = {v: k for k, v in enumerate(self.vertices)}
        return sorted(
            (tuple(sorted(f, key=pos.__getitem__)) for f in self.faces if len(f) == 2),
            key=lambda e: (pos[e[0]], pos[e[1]]),
        )

    def __le__(self, other: SimplicialComplex) -> bool:
        return self.faces <= other.faces

    def _key(self, face: frozenset[str]):
        pos = {v: k for k, v in enumerate(self.vertices)}
        return (len(face), sorted(pos.get(v, len(pos)) for v in face))

    def sorted_faces(self) -> list[list[str]]:
        pos = {v: k for k, v in enumerate(self.vertices)}
        return [sorted(f, key=pos.__getitem__) for f in sorted(self.faces, key=self._key)]


def _meet(pieces_a: list, pieces_b: list) -> list:
    out = []
    for lo1, hi1 in pieces_a:
        for lo2, hi2 in pieces_b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi:
                out.append((lo, hi))
    return out


def _region_sets(spec: CoveringSpec) -> dict[str, list]:
    """Each region as a list of cells; a cell is one open interval per axis."""
    if spec.space.kind == "circle":
        return {lab: [((lo, hi),) for lo, hi in arc.pieces()] for lab, arc in spec.regions}
    return {lab: [box.sides] for lab, box in spec.regions}


def _meet_cells(a: list, b: list) -> list:
    out = []
    for ca in a:
        for cb in b:
            sides = tuple(_meet([sa], [sb]) for sa, sb in zip(ca, cb))
            if all(sides):
                out.append(tuple(s[0] for s in sides))
    return out


def _grow_faces(vertices: Sequence[str], is_face) -> frozenset[frozenset[str]]:
    """Level-wise search; faces are downward closed, so only faces extend."""
    level = [frozenset([v]) for v in vertices if is_face(frozenset([v]))]
    faces = set(level)
    pos = {v: k for k, v in enumerate(vertices)}
    while level:
        nxt = set()
        for f in level:
            top = max(pos[v] for v in f)
            for v in vertices[top + 1 :]:
                cand = f | {v}
                if all(cand - {u} in faces for u in f) and is_face(cand):
                    nxt.add(cand)
        faces |= nxt
        level = list(nxt)
    return frozenset(faces)


def nerve_exact(spec: CoveringSpec) -> SimplicialComplex:
    sets = _region_sets(spec)
    cache: dict[frozenset[str], list] = {}

    def common(face: frozenset[str]) -> list:
        if face in cache:
            return cache[face]
        members = sorted(face, key=spec.observers.index)
        if len(members) == 1:
            out = sets[members[0]]
        else:
            out = _meet_cells(common(frozenset(members[:-1])), sets[members[-1]])
        cache[face] = out
        return out

    return SimplicialComplex(spec.observers, _grow_faces(spec.observers, lambda f: bool(common(f))))


def nerve_empirical(table: ObservationTable) -> SimplicialComplex:
    """Faces are observer sets that jointly registered some single event."""
    faces: set[frozenset[str]] = set()
    for row in table.registered:
        seen = [o for o, hit in zip(table.observers, row) if hit]
        for k in range(1, len(seen) + 1):
            faces.update(frozenset(c) for c in combinations(seen, k))
    return SimplicialComplex(table.observers, frozenset(faces))


def random_circle_covering(rng: random.Random, observers: int, denominator: int = 24) -> CoveringSpec:
    """Random arcs with starts and lengths on a 1/denominator lattice (units of pi)."""
    arcs = []
    for k in range(observers):
        start = Fraction(rng.randrange(0, 2 * denominator), denominator)
        length = Fraction(rng.randrange(1, 2 * denominator), denominator)
        arcs.append((f"O{k + 1}", Arc(start, length)))
    return CoveringSpec(ModelSpace.circle(), tuple(arcs))


# -- JSON --------------------------------------------------------------------


def spec_from_dict(doc: dict) -> CoveringSpec:
    try:
        sp = doc["space"]
        kind = sp["kind"] if isinstance(sp, dict) else sp
        if kind == "circle":
            space = ModelSpace.circle()
        elif kind == "interval":
            space = ModelSpace("interval", 1, tuple(_pairs(sp.get("bounds", []))) if isinstance(sp, dict) else ())
        else:
            space = ModelSpace.box(int(sp.get("dim", 1)), _pairs(sp.get("bounds", [])))
        regions = []
        for item in doc["regions"]:
            obs = item["observer"]
            if "arc" in item:
                arc = item["arc"]
                if "length" in arc:
                    reg: Region = Arc(parse_angle(arc["start"]), parse_angle(arc["length"]))
                else:
                    reg = Arc.between(parse_angle(arc["start"]), parse_angle(arc["end"]))
            elif "interval" in item:
                reg = Box(tuple(_pairs([item["interval"]])))
            elif "box" in item:
                reg = Box(tuple(_pairs(item["box"])))
            else:
                raise CoveringError(f"region for {obs!r} has no arc, interval or box")
            regions.append((obs, reg))
        return CoveringSpec(space, tuple(regions), name=doc.get("name", ""))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, CoveringError):
            raise
        raise CoveringError(f"malformed covering spec: {exc}") from exc


def _pairs(items) -> list[tuple[Fraction, Fraction]]:
    out = []
    for lo, hi in items:
        out.append((_rational(lo), _rational(hi)))
    return out


def _rational(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def spec_to_dict(spec: CoveringSpec) -> dict:
    space: dict = {"kind": spec.space.kind}
    if spec.space.kind == "box":
        space["dim"] = spec.space.dim
    if spec.space.kind != "circle":
        space["bounds"] = [[str(lo), str(hi)] for lo, hi in spec.space.bounds]
    regions = []
    for obs, reg in spec.regions:
        if isinstance(reg, Arc):
            regions.append({"observer": obs, "arc": {"start": format_angle(reg.start), "length": format_angle(reg.length)}})
        elif spec.space.kind == "interval":
            lo, hi = reg.sides[0]
            regions.append({"observer": obs, "interval": [str(lo), str(hi)]})
        else:
            regions.append({"observer": obs, "box": [[str(lo), str(hi)] for lo, hi in reg.sides]})
    out = {"space": space, "regions": regions}
    if spec.name:
        out["name"] = spec.name
    return out


def nerve_to_dict(cx: SimplicialComplex, spec: CoveringSpec | None = None) -> dict:
    out = {
        "vertices": list(cx.vertices),
        "faces": cx.sorted_faces(),
        "maximal_faces": [c for c in (sorted(f, key=cx.vertices.index) for f in cx.maximal_faces())],
        "dimension": cx.dimension,
    }
    if spec is not None:
        out["space_dimension"] = spec.space.dim
        out["artifact"] = cx.dimension > spec.space.dim
    return out
