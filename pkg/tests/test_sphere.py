import json
import random
from functools import reduce

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropos.polyhedra import UNKNOWN, Constraint
from tropos.sphere import SphericalSet

dirs2 = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(any)


@st.composite
def circle_sets(draw):
    parts = []
    for _ in range(draw(st.integers(0, 3))):
        if draw(st.booleans()):
            parts.append(SphericalSet.points([draw(dirs2)]))
        else:
            d1, d2 = draw(dirs2), draw(dirs2)
            if d1[0] * d2[1] - d1[1] * d2[0] == 0:
                continue
            parts.append(SphericalSet.arc(d1, d2, draw(st.booleans()), draw(st.booleans())))
    S = reduce(lambda a, b: a | b, parts, SphericalSet.empty(2))
    return ~S if draw(st.booleans()) else S


def probes(*sets):
    out = {(1, 0), (0, 1), (-1, 0), (0, -1)}
    for S in sets:
        for d in S.critical_directions():
            out.add(tuple(d))
    ds = sorted(out, key=lambda d: __import__("math").atan2(d[1], d[0]))
    extra = []
    for a, b in zip(ds, ds[1:] + ds[:1]):
        s = (a[0] + b[0], a[1] + b[1])
        if any(s):
            extra.append(s)
        else:
            extra.append((-a[1], a[0]))
    return ds + extra


@given(circle_sets(), circle_sets())
def test_boolean_algebra_pointwise(A, B):
    for d in probes(A, B):
        assert (A | B).contains(d) == (A.contains(d) or B.contains(d))
        assert (A & B).contains(d) == (A.contains(d) and B.contains(d))
        assert (~A).contains(d) == (not A.contains(d))


@given(circle_sets(), circle_sets())
def test_canonical_equality_matches_search(A, B):
    canon = A.canonical() == B.canonical()
    search = A.issubset(B) is True and B.issubset(A) is True
    assert canon == search
    assert A.equals(B) == canon


@given(circle_sets())
def test_json_round_trip(A):
    doc = json.loads(json.dumps(A.to_json()))
    assert SphericalSet.from_json(doc).equals(A)
    # the explicit point/arc listing alone also reconstructs the set
    slim = {k: v for k, v in doc.items() if k != "expr"}
    assert SphericalSet.from_json(slim).equals(A)


def test_complement_of_two_points_is_two_open_arcs():
    S = ~SphericalSet.points([(0, 1), (0, -1)])
    full, pts, arcs = S.components_2d()
    assert not full and pts == []
    assert sorted(arcs) == sorted([((0, 1), (0, -1), False, False), ((0, -1), (0, 1), False, False)])


def test_full_and_empty():
    assert SphericalSet.full(2).canonical() is True
    assert SphericalSet.empty(2).is_empty() is True
    assert (~SphericalSet.full(3)).is_empty() is True


def test_circle_minus_point():
    S = ~SphericalSet.points([(1, 0)])
    assert not S.contains((1, 0)) and S.contains((2, 1)) and S.contains((-1, 0))
    assert S.components_2d()[2] == [((1, 0), (1, 0), False, False)]


def test_rank_one_sphere():
    S = SphericalSet.points([(-1,)])
    assert S.canonical() == (False, True)
    assert (~S).canonical() == (True, False)
    assert S.describe() == "{-1}"


def coord_plane(i, j):
    n = 3
    k = ({0, 1, 2} - {i, j}).pop()
    a = [0] * n
    a[k] = 1
    return SphericalSet.from_cones(3, [[Constraint.make(a, 0, "eq")]])


def test_exact_equality_in_three_dimensions():
    A = coord_plane(0, 1) | coord_plane(1, 2)
    B = coord_plane(1, 2) | coord_plane(0, 1)
    assert A.equals(B) is True
    assert A.equals(coord_plane(0, 1)) is False
    assert (coord_plane(0, 1) & coord_plane(1, 2)).equals(
        SphericalSet.points([(0, 1, 0), (0, -1, 0)])) is True


@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)).filter(any),
                min_size=1, max_size=4))
def test_three_dim_de_morgan(ds):
    A = SphericalSet.points(ds[:2])
    B = SphericalSet.points(ds[2:]) if ds[2:] else SphericalSet.empty(3)
    assert (~(A | B)).equals(~A & ~B) is True
    for d in ds:
        assert A.contains(d) or B.contains(d)


def test_budget_returns_unknown():
    rng = random.Random(3)
    parts = [SphericalSet.from_cones(3, [[Constraint.make([rng.randint(-3, 3) for _ in range(3)], 0, "ge"),
                                          Constraint.make([rng.randint(-3, 3) for _ in range(3)], 0, "gt")]])
             for _ in range(12)]
    A = reduce(lambda a, b: a | b, parts)
    assert (~A & A).is_empty(limit=1) in (UNKNOWN, True)


def test_mismatched_dimensions_rejected():
    with pytest.raises(ValueError):
        SphericalSet.full(2) | SphericalSet.full(3)
