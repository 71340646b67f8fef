import random

import pytest

from artifact.pantsgraph import (alpha_piece, continued_fraction_move, pants_distance, random_walk,
                                 standard_pants)
from artifact.projection import (SessionConstants, candidate_subsurfaces, distance_formula_estimate,
                                 farey_distance, farey_ladder, project, projection_distance,
                                 slope_of, support_bound_report)
from artifact.pantsgraph import PantsPath
from artifact.slopes import det
from artifact.surface import Multicurve, Surface, SurfaceError, cut_pieces, intersection
from oracles import farey_distance_cf

S5 = Surface(0, 5)


def test_farey_distance_matches_continued_fractions():
    rng = random.Random(1)
    for _ in range(300):
        a = (rng.randint(-30, 30), rng.randint(0, 30))
        b = (rng.randint(-30, 30), rng.randint(0, 30))
        if a == (0, 0) or b == (0, 0):
            continue
        from math import gcd
        if gcd(*a) != 1 or gcd(*b) != 1:
            continue
        assert farey_distance(a, b) == farey_distance_cf(a, b)


def test_ladder_contains_endpoints_and_is_connected_by_unit_steps():
    lad = farey_ladder((0, 1), (7, 5))
    assert (0, 1) in lad and (7, 5) in lad
    for v in lad:
        assert any(abs(det(u, v)) == 1 for u in lad if u != v)


def test_projection_of_contained_curve_is_itself():
    p = standard_pants(S5)
    a, b = p.curves
    y = alpha_piece(p, a)
    assert project(a, y).curves == (a,)
    assert project(b, y).empty


def test_projection_of_crossing_curve_is_disjoint_from_it_in_complexity_two():
    p = standard_pants(S5)
    a, b = p.curves
    q = continued_fraction_move(p, a, [2, 3])
    (new,) = set(q.curves) - set(p.curves)
    # the piece cut out by b has complexity one; new curve sits inside it
    y = alpha_piece(p, a)
    assert project(new, y).curves == (new,)
    # cutting along a only: the piece of complexity one not containing b
    for z in cut_pieces(Multicurve([b]), S5):
        if z.complexity == 1:
            proj = project(new, z)
            assert len(proj) >= 1


def test_single_simplex_projection_has_small_diameter():
    rng = random.Random(3)
    for _ in range(10):
        p = random_walk(standard_pants(S5), 3, rng)[-1]
        for y in candidate_subsurfaces(p, p, 6):
            d = projection_distance(p, p, y)
            if d.value is not None:
                assert d.value <= 2


def test_projection_rejects_closed_surfaces():
    p = standard_pants(Surface(2, 0))
    y = cut_pieces(Multicurve(p.curves[:1]), p.surface)[0]
    with pytest.raises(SurfaceError):
        project(p.curves[1], y)


def test_piece_distance_is_farey_distance():
    p = standard_pants(S5)
    a = p.curves[0]
    q = continued_fraction_move(p, a, [2] * 6)
    y = alpha_piece(p, a)
    (new,) = set(q.curves) - set(p.curves)
    d = projection_distance([a], [new], y)
    assert d.value == farey_distance(slope_of(a, y), slope_of(new, y))
    assert intersection(a, new) > 0


def test_estimator_threshold_must_be_at_least_five():
    p = standard_pants(S5)
    with pytest.raises(ValueError):
        distance_formula_estimate(p, p, threshold=4)


def test_estimator_counts_a_deep_piece():
    p = standard_pants(S5)
    q = continued_fraction_move(p, p.curves[1], [2] * 6)
    est = distance_formula_estimate(p, q, threshold=5)
    assert est.sum == 6
    assert not est.complete
    assert [w[1] for w in est.witnesses] == [6]


def test_estimator_vanishes_on_equal_inputs():
    p = standard_pants(S5)
    assert distance_formula_estimate(p, p).sum == 0


def test_session_constants_fit():
    s = SessionConstants()
    for d, x in [(1, 0), (3, 0), (6, 6), (7, 7)]:
        s.add_pair(d, x)
    c0, c1 = s.fit_comparability()
    for d, x in s.pairs:
        assert d <= c0 * x + c1 and x <= c0 * d + c1
    assert s.as_dict()["provenance"] == "empirical fit"


def test_support_bound_report_on_a_walk():
    rng = random.Random(4)
    walk = random_walk(standard_pants(S5), 3, rng)
    session = SessionConstants()
    rep = support_bound_report(PantsPath(walk), session=session)
    assert rep["support_size"] >= 2
    assert rep["distance"] == pants_distance(walk[0], walk[-1])["exact"]
    assert session.k0 == rep["ratio"]


def test_twist_family_stays_bounded():
    # twisting about a curve of one piece moves its slope a bounded Farey distance;
    # the growth is annular and the estimator ignores annuli
    from artifact.hyperbolic import dual_curve
    from artifact.pantsgraph import PantsDecomposition
    from artifact.surface import dehn_twist
    p = standard_pants(S5)
    beta = dual_curve(p, p.curves[0])
    for n in (1, 3, 5):
        q = PantsDecomposition([dehn_twist(c, beta, n) for c in p.curves])
        assert pants_distance(p, q)["exact"] == 2
        assert distance_formula_estimate(p, q).sum == 0
