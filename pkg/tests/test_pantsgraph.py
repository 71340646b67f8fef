import random

import pytest

from artifact.pantsgraph import (ElementaryMove, PantsDecomposition, continued_fraction_move,
                                 elementary_moves, lower_bound, pants_distance, pants_geodesic,
                                 random_move, random_walk, standard_pants, total_intersection)
from artifact.surface import Curve, Surface, SurfaceError
from oracles import farey_distance_cf

TORUS = Surface(1, 1)


def torus_pants(p, q):
    return PantsDecomposition([Curve.from_slope(TORUS, p, q)])


def test_equal_inputs_have_distance_zero():
    p = standard_pants(Surface(0, 5))
    assert pants_distance(p, p)["exact"] == 0


@pytest.mark.parametrize("a,b", [((0, 1), (1, 0)), ((0, 1), (7, 3)), ((2, 5), (-3, 4)), ((1, 1), (13, 8))])
def test_torus_distance_is_farey_distance(a, b):
    assert pants_distance(torus_pants(*a), torus_pants(*b))["exact"] == farey_distance_cf(a, b)


def test_decomposition_validation():
    S = Surface(0, 5)
    p = standard_pants(S)
    with pytest.raises(SurfaceError):
        PantsDecomposition(p.curves[:1])


@pytest.mark.parametrize("S", [Surface(0, 5), Surface(1, 2), Surface(0, 6), Surface(2, 0)])
def test_random_moves_are_elementary(S):
    rng = random.Random(5)
    p = standard_pants(S)
    for _ in range(8):
        m = random_move(p, rng)
        m.validate()
        p = m.target


def test_elementary_moves_are_valid_and_capped():
    p = standard_pants(Surface(0, 5))
    moves = elementary_moves(p, cap=6)
    assert moves
    for m in moves:
        m.validate()
        assert sum(1 for _ in m.target.curves) == 2


def test_bad_move_is_rejected():
    p = standard_pants(Surface(0, 5))
    a, b = p.curves
    with pytest.raises(SurfaceError):
        ElementaryMove(p, a, b, "genus0").validate()


def test_geodesic_is_a_path_of_moves():
    S = Surface(0, 5)
    rng = random.Random(2)
    walk = random_walk(standard_pants(S), 4, rng, outward=True)
    g = pants_geodesic(walk[0], walk[-1])
    assert g.vertices[0] == walk[0] and g.vertices[-1] == walk[-1]
    for m in g.moves:
        m.validate()
    assert len(g) <= len(walk) - 1


def test_lower_bound_never_exceeds_distance():
    S = Surface(0, 5)
    rng = random.Random(8)
    for _ in range(10):
        walk = random_walk(standard_pants(S), rng.randint(1, 4), rng)
        d = pants_distance(walk[0], walk[-1])
        assert lower_bound(walk[0], walk[-1]) <= d["exact"] <= len(walk) - 1


def test_uncertified_search_reports_bounds():
    p = standard_pants(Surface(0, 5))
    q = continued_fraction_move(p, p.curves[0], [2] * 7)
    d = pants_distance(p, q, budget=3)
    assert "exact" not in d
    assert d["lower_bound"] >= 1


def test_continued_fraction_move_changes_one_curve():
    p = standard_pants(Surface(0, 5))
    q = continued_fraction_move(p, p.curves[1], [2, 2, 2])
    assert len(set(p.curves) & set(q.curves)) == 1
    assert total_intersection(p, q) > 0
