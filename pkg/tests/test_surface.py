import random

import pytest

from artifact.pantsgraph import random_walk, standard_pants
from artifact.surface import (Curve, Multicurve, Surface, SurfaceError, cut_pieces, dehn_twist,
                              engine_graph, intersection, parse_curve)
from oracles import geodesic_intersection, slope_intersection

TORUS = Surface(1, 1)
SPHERE4 = Surface(0, 4)


def curves_near(S, seed, steps=3, n=12):
    rng = random.Random(seed)
    out = set()
    while len(out) < n:
        for p in random_walk(standard_pants(S), steps, rng):
            out.update(p.curves)
    return sorted(out)


@pytest.mark.parametrize("g,n", [(1, 0), (0, 3), (3, 1), (0, 8), (-1, 2)])
def test_unsupported_surfaces_raise(g, n):
    with pytest.raises(SurfaceError):
        Surface(g, n)


def test_complexity_and_euler():
    assert Surface(0, 5).complexity == 2
    assert Surface(2, 0).complexity == 3
    assert Surface(1, 2).euler == -2


@pytest.mark.parametrize("S", [TORUS, SPHERE4])
def test_slope_intersections_match_determinants(S):
    m = 1 if S == TORUS else 2
    slopes = [(1, 0), (0, 1), (1, 1), (2, 1), (-3, 2), (5, 3), (1, -4)]
    for a in slopes:
        for b in slopes:
            got = intersection(Curve.from_slope(S, *a), Curve.from_slope(S, *b))
            assert got == slope_intersection(a, b, m)


@pytest.mark.parametrize("S", [Surface(0, 5), Surface(1, 2)])
def test_intersection_matches_geodesic_count(S):
    cs = curves_near(S, 11, n=8)
    G = engine_graph(S)
    for a in cs[:6]:
        for b in cs[:6]:
            if a != b:
                assert intersection(a, b) == geodesic_intersection(G, a.word, b.word)


def test_intersection_is_symmetric():
    cs = curves_near(Surface(0, 5), 4)
    for a in cs:
        for b in cs:
            assert intersection(a, b) == intersection(b, a)


def test_serialize_round_trip():
    for S in (TORUS, Surface(0, 5), Surface(2, 0)):
        for c in curves_near(S, 2, n=5):
            assert parse_curve(c.serialize()) == c


@pytest.mark.parametrize("text", ["S(1,1):slope:1", "S(0,5):normal:[1,2]", "garbage", "S(0,5):normal:1,2"])
def test_parse_errors(text):
    with pytest.raises(SurfaceError):
        parse_curve(text)


def test_twist_properties():
    cs = curves_near(Surface(0, 5), 9)
    for a in cs[:5]:
        for b in cs[:5]:
            i = intersection(a, b)
            t = dehn_twist(b, a)
            # twisting fixes the twist curve, preserves i(., a) and is undone by the inverse
            assert intersection(t, a) == i
            assert dehn_twist(t, a, -1) == b
            if i:
                assert intersection(t, b) == i * i


def test_torus_twist_sends_infinity_to_one():
    a = Curve.from_slope(TORUS, 0, 1)
    b = Curve.from_slope(TORUS, 1, 0)
    assert dehn_twist(b, a).slope == (1, 1)


def test_pieces_of_pants_decompositions():
    for S in (Surface(0, 5), Surface(1, 2), Surface(2, 0), Surface(0, 6)):
        p = standard_pants(S)
        pieces = cut_pieces(Multicurve(p.curves), S)
        assert len(pieces) == -S.euler
        assert all(y.is_pants for y in pieces)


def test_multicurve_rejects_intersecting_curves():
    a = Curve.from_slope(TORUS, 0, 1)
    b = Curve.from_slope(TORUS, 1, 0)
    with pytest.raises(SurfaceError):
        Multicurve([a, b])


def test_peripheral_curves_are_rejected():
    S = Surface(0, 4)
    G = engine_graph(S)
    with pytest.raises(SurfaceError):
        Curve.from_word(S, G.faces[0])
