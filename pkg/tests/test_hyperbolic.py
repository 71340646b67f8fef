import math
import random

import numpy as np
import pytest

import artifact.hyperbolic as H
from artifact.pantsgraph import PantsDecomposition, random_walk, standard_pants
from artifact.surface import Curve, Surface, dehn_twist
from oracles import farey_distance_cf, markov_residual, product_inverse_trace

TORUS = Surface(1, 1)


def torus_point(length, twist):
    return H.FNPoint(standard_pants(TORUS), (length,), (twist,))


def test_fn_point_validation():
    with pytest.raises(ValueError):
        torus_point(-1.0, 0.0)
    with pytest.raises(ValueError):
        H.FNPoint(standard_pants(TORUS), (1.0, 2.0), (0.0,))


@pytest.mark.parametrize("S", [TORUS, Surface(0, 4), Surface(0, 5), Surface(1, 2)])
def test_fn_round_trip(S):
    rng = random.Random(2)
    base = standard_pants(S)
    for _ in range(3):
        x = H.random_fn_point(base, rng)
        back = H.fn_coordinates(x.structure, base)
        assert np.allclose(back.lengths, x.lengths, atol=1e-9)
        assert np.allclose(back.twists, x.twists, atol=1e-9)
        assert H.holonomy_from_fn(x).relator_residual < 1e-9


def test_markov_identity_on_torus():
    x = torus_point(1.7, 0.3)
    tr = [abs(x.structure.trace(Curve.from_slope(TORUS, *s).word)) for s in ((1, 0), (0, 1), (1, 1))]
    assert markov_residual(*tr) < 1e-9


def test_square_torus():
    st = H.square_torus()
    want = 2 * math.acosh(1.5)
    for s in ((0, 1), (1, 0)):
        assert abs(st.length(Curve.from_slope(TORUS, *s)) - want) < 1e-12


def test_twist_changes_dual_length_but_not_own():
    base = standard_pants(TORUS)
    alpha = base.curves[0]
    beta = H.dual_curve(base, alpha)
    lens = [H.curve_length(torus_point(1.2, t), beta) for t in (-1.0, 0.0, 1.0)]
    own = [H.curve_length(torus_point(1.2, t), alpha) for t in (-1.0, 0.0, 1.0)]
    assert max(own) - min(own) < 1e-9
    # the dual is shortest at zero twist
    assert lens[1] < lens[0] and lens[1] < lens[2]


def test_full_twist_matches_dehn_twist():
    base = standard_pants(TORUS)
    alpha = base.curves[0]
    beta = H.dual_curve(base, alpha)
    ell = 1.1
    x = torus_point(ell, 0.25)
    y = torus_point(ell, 0.25 + ell)
    for k in (-1, 1):
        tb = dehn_twist(beta, alpha, k)
        a = H.curve_length(y, beta)
        b = H.curve_length(x, tb)
        c = H.curve_length(x, dehn_twist(beta, alpha, -k))
        assert min(abs(a - b), abs(a - c)) < 1e-7


def test_length_is_continuous():
    base = standard_pants(Surface(0, 5))
    c = random_walk(base, 2, random.Random(1))[-1].curves[0]
    x = H.FNPoint(base, (1.0, 1.5), (0.2, -0.4))
    y = H.FNPoint(base, (1.0 + 1e-6, 1.5), (0.2, -0.4 + 1e-6))
    assert abs(H.curve_length(x, c) - H.curve_length(y, c)) < 1e-4


def test_figure8_matches_group_words():
    rng = random.Random(5)
    for _ in range(20):
        ls = [rng.uniform(0.1, 5) for _ in range(3)]
        assert abs(H.figure8_length(*ls) - H.figure8_length_from_group(*ls)) < 1e-9


def test_figure8_trace_identity():
    A, B = H.pants_group(1.0, 2.0, 3.0)
    t = product_inverse_trace(np.trace(A), np.trace(B), np.trace(A @ B))
    assert abs(t - np.trace(A @ np.linalg.inv(B))) < 1e-9


def test_figure8_cusp_limit():
    # the thrice-punctured sphere's figure-eight has length 4 arcsinh(1)
    assert abs(H.figure8_length(1e-9, 1e-9, 1e-9) - 4 * math.asinh(1)) < 1e-6


def test_figure8_monotone_in_small_cuffs():
    vals = [H.figure8_length(e, e, e) for e in (0.01, 0.1, 0.5, 1.0, 2.0)]
    assert vals == sorted(vals)


def test_figure8_bound_dominates_sweep():
    for L in (2.0, 4.0):
        assert H.empirical_figure8_sup(L, 300) <= H.figure8_bound(L) + 1e-9


def test_wolpert_bound():
    assert H.wolpert_pinch_bound(0) == 0
    assert abs(H.wolpert_pinch_bound(2 * math.pi) - 2 * math.pi) < 1e-12
    with pytest.raises(ValueError):
        H.wolpert_pinch_bound(-1)


def test_short_pants_keeps_short_base():
    x = torus_point(1.0, 0.1)
    assert H.short_pants(x, 2.0) == x.base


def test_short_pants_finds_twisted_curve():
    base = standard_pants(TORUS)
    x = torus_point(3.0, 7.0)
    p = H.short_pants(x, 4.0)
    c = p.curves[0]
    best = min((H.curve_length(x, Curve.from_slope(TORUS, r, q)), (r, q))
               for q in range(0, 12) for r in range(-12, 13)
               if math.gcd(r, q) == 1 and (q > 0 or r == 1))
    assert abs(H.curve_length(x, c) - best[0]) < 1e-9
    assert c != base.curves[0]


def test_short_pants_fails_explicitly():
    x = torus_point(1.0, 0.0)
    with pytest.raises(H.ShortPantsError, match="cap"):
        H.short_pants(x, 0.5, cap=3)


def test_level_set_membership():
    x = torus_point(1.0, 0.0)
    assert H.LevelSetSpec(x.base, 1.5).contains(x)
    assert not H.LevelSetSpec(x.base, 0.9).contains(x)


def test_coarse_wp_distance():
    x = torus_point(1.0, 0.0)
    res = H.coarse_wp_distance(x, x, 2.0)
    assert res["pants_distance"]["exact"] == 0
    assert res["diameter_slack"] > 0
    # a point whose short curve is the slope 5/3: distance is the Farey distance
    far = H.FNPoint(PantsDecomposition([Curve.from_slope(TORUS, 5, 3)]), (0.5,), (0.0,))
    res = H.coarse_wp_distance(x, far, 2.0)
    assert res["pants_distance"]["exact"] == farey_distance_cf((5, 3), x.base.curves[0].slope)


def test_degenerate_lengths_raise():
    with pytest.raises(H.HolonomyRangeError):
        H.trace_from_length(2000.0)
