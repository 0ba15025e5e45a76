from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finitary.core import finitary_substitute
from finitary.covering import (
    Arc,
    Box,
    CoveringError,
    CoveringSpec,
    Grid,
    ModelSpace,
    Uniform,
    covers,
    fixture,
    format_angle,
    nerve_empirical,
    nerve_exact,
    paper_circle,
    paper_interval,
    parse_angle,
    random_circle_covering,
    sample_events,
    spec_from_dict,
    spec_to_dict,
    tabulate,
    tabulate_counted,
)

PAPER_TABLE = {
    "0": (True, False, False, False),
    "pi/2": (True, True, False, True),
    "pi": (False, True, False, False),
    "3pi/2": (True, True, True, False),
}


@pytest.mark.parametrize(
    "text, value",
    [
        ("pi", Fraction(1)),
        ("3pi/4", Fraction(3, 4)),
        ("-2pi/3", Fraction(-2, 3)),
        ("2/3pi", Fraction(2, 3)),
        ("5pi/3", Fraction(5, 3)),
        ("1/2", Fraction(1, 2)),
        ("0", Fraction(0)),
        ("2 pi", Fraction(2)),
    ],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == value


def test_parse_angle_radians_and_errors():
    assert parse_angle(3.141592653589793) == 1
    with pytest.raises(CoveringError):
        parse_angle("three")


@given(st.fractions(min_value=-4, max_value=4, max_denominator=50))
def test_angle_format_round_trip(x):
    assert parse_angle(format_angle(x)) == x


def test_arc_membership_wraps():
    arc = Arc.between(Fraction(-2, 3), Fraction(2, 3))
    assert arc.contains(0) and arc.contains(Fraction(3, 2))
    assert not arc.contains(1)
    assert not arc.contains(Fraction(2, 3))  # open at the boundary
    assert arc.length == Fraction(4, 3)


@pytest.mark.parametrize("length", [0, 2, Fraction(5, 2), -1])
def test_arc_length_bounds(length):
    with pytest.raises(CoveringError):
        Arc(0, length)


def test_space_validation():
    with pytest.raises(CoveringError):
        ModelSpace("torus")
    with pytest.raises(CoveringError):
        ModelSpace.box(4)
    with pytest.raises(CoveringError):
        CoveringSpec(ModelSpace.circle(), ())
    with pytest.raises(CoveringError):
        CoveringSpec(ModelSpace.circle(), (("A", Box(((0, 1),))),))
    with pytest.raises(CoveringError, match="distinct"):
        CoveringSpec(ModelSpace.circle(), (("A", Arc(0, 1)), ("A", Arc(1, 1))))


# -- sampling -------------------------------------------------------------------


def test_grid_circle_four():
    events = sample_events(paper_circle(), Grid(4))
    assert events == [("0", (0,)), ("pi/2", (Fraction(1, 2),)), ("pi", (1,)), ("3pi/2", (Fraction(3, 2),))]


def test_grid_interval_midpoint():
    assert sample_events(paper_interval(), Grid(1)) == [("1/2", (Fraction(1, 2),))]


def test_grid_box_points():
    spec = CoveringSpec(ModelSpace.box(2), (("A", Box(((0, 1), (0, 1)))),))
    events = sample_events(spec, Grid(2))
    assert [lab for lab, _ in events] == ["(1/3,1/3)", "(1/3,2/3)", "(2/3,1/3)", "(2/3,2/3)"]


def test_uniform_is_reproducible():
    spec = paper_circle()
    a = sample_events(spec, Uniform(10, seed=7))
    assert a == sample_events(spec, Uniform(10, seed=7))
    assert a != sample_events(spec, Uniform(10, seed=8))
    assert all(0 <= c[0] < 2 for _, c in a)


def test_sampling_rejects_zero():
    with pytest.raises(CoveringError):
        sample_events(paper_circle(), Grid(0))


# -- tabulation --------------------------------------------------------------------


def test_paper_circle_table():
    spec = paper_circle()
    table = tabulate(spec, sample_events(spec, Grid(4)))
    assert table.observers == ("O1", "O2", "O3", "O4")
    assert dict(zip(table.events, table.registered)) == PAPER_TABLE


def test_paper_circle_poset():
    spec = paper_circle()
    p = finitary_substitute(tabulate(spec, sample_events(spec, Grid(4))))
    x, y, z, w = "pi/2", "3pi/2", "0", "pi"
    assert all(len(c) == 1 for c in p.classes)
    assert p.strict_pairs() == p.covering == {(x, z), (x, w), (y, z), (y, w)}


def test_whole_interval_single_column():
    spec = CoveringSpec(ModelSpace.interval(), (("A", Box(((0, 1),))),))
    table = tabulate(spec, sample_events(spec, Grid(5)))
    assert table.registered == ((True,),) * 5


def test_boundary_event_unregistered():
    spec = paper_circle()
    table = tabulate(spec, [("2pi/3", (Fraction(2, 3),))])
    assert table.row("2pi/3")[0] is False


def test_uncovered_events_dropped(caplog):
    spec = CoveringSpec(ModelSpace.interval(), (("A", Box(((0, Fraction(1, 2)),))),))
    table, dropped = tabulate_counted(spec, sample_events(spec, Grid(3)))
    assert table.events == ("1/4",)
    assert dropped == ["1/2", "3/4"]
    assert "dropped 2" in caplog.text


def test_coordinate_outside_space():
    with pytest.raises(CoveringError, match="outside"):
        tabulate(paper_interval(), [("far", (Fraction(3, 2),))])


def test_circle_coordinates_reduced():
    table = tabulate(paper_circle(), [("wrap", (Fraction(5, 2),))])
    assert table.registered == (PAPER_TABLE["pi/2"],)


def test_interval_grid_nine_all_registered():
    spec = paper_interval()
    table, dropped = tabulate_counted(spec, sample_events(spec, Grid(9)))
    assert not dropped and len(table.events) == 9 and len(table.observers) == 3


# -- coverage -----------------------------------------------------------------------


def test_covers():
    assert covers(paper_circle())
    assert covers(paper_interval())
    gap = CoveringSpec(ModelSpace.interval(), (("A", Box(((0, Fraction(1, 2)),))), ("B", Box(((Fraction(1, 2), 1),)))))
    assert not covers(gap)  # the point 1/2 is missed
    arc = CoveringSpec(ModelSpace.circle(), (("A", Arc(0, Fraction(3, 2))), ("B", Arc(1, 1))))
    assert not covers(arc)  # phi = 0 lies on both boundaries


# -- nerves -------------------------------------------------------------------------


def _brute_nerve(spec, probes):
    faces = set()
    obs = spec.observers
    for k in range(1, len(obs) + 1):
        for sub in combinations(obs, k):
            if any(all(spec.region(o).contains(p if spec.space.kind != "circle" else p[0]) for o in sub) for p in probes):
                faces.add(frozenset(sub))
    return faces


def test_paper_interval_nerve_is_triangle():
    cx = nerve_exact(paper_interval())
    assert cx.maximal_faces() == [frozenset({"O1", "O2", "O3"})]
    assert cx.dimension == 2


def test_disjoint_intervals_nerve():
    spec = CoveringSpec(ModelSpace.interval(), (("A", Box(((0, Fraction(1, 3)),))), ("B", Box(((Fraction(1, 2), 1),)))))
    cx = nerve_exact(spec)
    assert cx.faces == {frozenset("A"), frozenset("B")}
    assert cx.dimension == 0


def test_touching_intervals_do_not_meet():
    spec = CoveringSpec(ModelSpace.interval(), (("A", Box(((0, Fraction(1, 2)),))), ("B", Box(((Fraction(1, 2), 1),)))))
    assert frozenset("AB") not in nerve_exact(spec).faces


def test_paper_circle_nerves():
    spec = paper_circle()
    exact = nerve_exact(spec)
    assert set(exact.maximal_faces()) == {frozenset({"O1", "O2", "O3"}), frozenset({"O1", "O2", "O4"})}
    emp = nerve_empirical(tabulate(spec, sample_events(spec, Grid(4))))
    assert set(emp.maximal_faces()) == set(exact.maximal_faces())
    assert frozenset({"O3", "O4"}) not in emp.faces


def test_circle_arc_wraparound_intersection():
    spec = CoveringSpec(
        ModelSpace.circle(),
        (("A", Arc(Fraction(7, 4), Fraction(1, 2))), ("B", Arc(Fraction(1, 8), Fraction(1, 2))), ("C", Arc(1, Fraction(1, 2)))),
    )
    cx = nerve_exact(spec)
    assert frozenset("AB") in cx.faces
    assert frozenset("AC") not in cx.faces


def test_box_nerve():
    spec = CoveringSpec(
        ModelSpace.box(2),
        (
            ("A", Box(((0, Fraction(2, 3)), (0, Fraction(2, 3))))),
            ("B", Box(((Fraction(1, 3), 1), (0, 1)))),
            ("C", Box(((0, 1), (Fraction(3, 4), 1)))),
        ),
    )
    cx = nerve_exact(spec)
    assert frozenset("AB") in cx.faces and frozenset("BC") in cx.faces
    assert frozenset("AC") not in cx.faces


def test_single_region_nerve():
    spec = CoveringSpec(ModelSpace.interval(), (("A", Box(((0, 1),))),))
    assert nerve_exact(spec).faces == {frozenset("A")}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_exact_nerve_matches_dense_probe(seed, m):
    # every intersection of arcs on the 1/24 lattice contains a point of the
    # 1/48 lattice, so probing that lattice decides the nerve exactly
    spec = random_circle_covering(random.Random(seed), m)
    probes = [(Fraction(k, 48),) for k in range(96)]
    assert nerve_exact(spec).faces == _brute_nerve(spec, probes)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 30))
def test_empirical_nerve_properties(seed, m, n):
    spec = random_circle_covering(random.Random(seed), m)
    events = sample_events(spec, Uniform(n, seed=seed))
    small = nerve_empirical(tabulate(spec, events[: n // 2]))
    big = nerve_empirical(tabulate(spec, events))
    exact = nerve_exact(spec)
    assert small <= big <= exact
    assert small.is_downward_closed() and big.is_downward_closed() and exact.is_downward_closed()


def test_fixture_lookup():
    assert fixture("paper-circle") == paper_circle()
    with pytest.raises(CoveringError, match="unknown fixture"):
        fixture("torus")


# -- spec JSON --------------------------------------------------------------------------


@pytest.mark.parametrize("make", [paper_circle, paper_interval])
def test_spec_json_round_trip(make):
    spec = make()
    assert spec_from_dict(spec_to_dict(spec)) == spec


def test_spec_json_paper_typography():
    doc = {
        "space": {"kind": "circle"},
        "regions": [
            {"observer": "O3", "arc": {"start": "-3pi/4", "end": "2/3pi"}},
            {"observer": "O4", "arc": {"start": "pi/4", "length": "pi/2"}},
        ],
    }
    spec = spec_from_dict(doc)
    assert spec.region("O3") == Arc.between(Fraction(-3, 4), Fraction(2, 3))
    assert spec.region("O4") == Arc(Fraction(1, 4), Fraction(1, 2))


def test_spec_json_box_and_errors():
    spec = spec_from_dict({"space": {"kind": "box", "dim": 2}, "regions": [{"observer": "A", "box": [[0, 0.5], ["1/4", 1]]}]})
    assert spec.region("A").sides == ((0, Fraction(1, 2)), (Fraction(1, 4), 1))
    with pytest.raises(CoveringError):
        spec_from_dict({"space": {"kind": "circle"}, "regions": [{"observer": "A"}]})
    with pytest.raises(CoveringError):
        spec_from_dict({"regions": []})


def test_published_o3_column_excludes_o4():
    # The published table has O3 registering only 3pi/2 among 0, pi/2, pi,
    # 3pi/2.  Enumerate every arc on the 1/24 lattice with that column: none
    # meets O4, so no reading of O3 gives both that table and a face {O3, O4}.
    grid = [Fraction(k, 2) for k in range(4)]
    o4 = paper_circle().region("O4")
    found = 0
    for s in range(48):
        for ln in range(1, 48):
            arc = Arc(Fraction(s, 24), Fraction(ln, 24))
            if [arc.contains(p) for p in grid] != [False, False, False, True]:
                continue
            found += 1
            spec = CoveringSpec(ModelSpace.circle(), (("O3", arc), ("O4", o4)))
            assert frozenset({"O3", "O4"}) not in nerve_exact(spec).faces
    assert found > 0


def test_literal_o3_reading_contradicts_table():
    literal = Arc.between(Fraction(-3, 4), Fraction(2, 3))
    assert [literal.contains(Fraction(k, 2)) for k in range(4)] == [True, True, False, True]
