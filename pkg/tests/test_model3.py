import random

import pytest

import artifact.model3 as M
from artifact.pantsgraph import PantsPath, random_move, random_walk, standard_pants
from artifact.surface import Surface, SurfaceError, dehn_twist
from oracles import regular_ideal_tetrahedron_volume, twist_scan

S5 = Surface(0, 5)


def walk(S, steps, seed):
    return random_walk(standard_pants(S), steps, random.Random(seed))


def test_genus_two_counts():
    t = M.suited_triangulation(standard_pants(Surface(2, 0)))
    assert t.counts() == (6, 24, 16)
    assert M.validate(t) == []


@pytest.mark.parametrize("S", [Surface(1, 1), Surface(0, 4), S5, Surface(1, 2), Surface(0, 6)])
def test_triangle_count_is_eight_per_pants(S):
    p = standard_pants(S)
    t = M.suited_triangulation(p)
    assert t.counts()[2] == 8 * (-S.euler)
    assert M.validate(t, p) == []


def test_validator_catches_a_broken_gluing():
    t = M.suited_triangulation(standard_pants(S5))
    side = next(iter(t.surf.glue))
    del t.surf.glue[side]
    assert M.validate(t)


def test_validator_catches_a_wrong_target():
    p = standard_pants(S5)
    t = M.suited_triangulation(p)
    q = random_move(p, random.Random(1)).target
    assert M.validate(t, q)


def test_flip_twice_restores_the_surface():
    t = M.suited_triangulation(standard_pants(S5))
    s = t.surf
    root = s.find_named(("e", 0, 0))
    before = s.key(root)
    side = next(x for x in s.edges() if s.flippable(x))
    info = s.flip(side)
    assert set(info["faces"]) == {0, 1, 2, 3}
    assert s.key(s.find_named(("e", 0, 0))) != before
    A = info["faces"][1][0]
    s.flip((A, 1))
    assert s.key(s.find_named(("e", 0, 0))) == before


def test_named_sides_cannot_be_flipped():
    s = M.suited_triangulation(standard_pants(S5)).surf
    side = s.find_named(("e", 0, 0))
    assert not s.flippable(side)
    with pytest.raises(M.TriangulationError):
        s.flip(side)


def test_twist_moves_are_inverse():
    p = standard_pants(S5)
    t = M.suited_triangulation(p)
    alpha = p.curves[0]
    u = M.apply_move(M.apply_move(t, M.TriMove("TW+", alpha)), M.TriMove("TW-", alpha))
    assert u.key() == t.key()
    assert u.duals == t.duals


def test_twist_move_twists_the_dual():
    p = standard_pants(S5)
    t = M.suited_triangulation(p)
    alpha = p.curves[1]
    u = M.apply_move(t, M.TriMove("TW+", alpha))
    k = t.slot(alpha)
    assert u.duals[k] == dehn_twist(t.duals[k], alpha, 1)
    assert M.validate(u, p) == []


@pytest.mark.parametrize("S", [Surface(1, 1), S5, Surface(1, 2)])
def test_twist_offset_matches_exhaustive_scan(S):
    p = standard_pants(S)
    t = M.suited_triangulation(p)
    rng = random.Random(3)
    for alpha in p.curves:
        beta = M.beta_of(t, alpha)
        for _ in range(4):
            n = rng.randint(-9, 9)
            target = dehn_twist(beta, alpha, n)
            assert M.twist_offset(t, alpha, target) == twist_scan(beta, alpha, target, dehn_twist) == n


def test_twist_offset_rejects_curves_off_the_orbit():
    p = standard_pants(Surface(1, 1))
    t = M.suited_triangulation(p)
    alpha = p.curves[0]
    with pytest.raises(M.TriangulationError):
        M.twist_offset(t, alpha, alpha)


@pytest.mark.parametrize("S,seed", [(Surface(1, 1), 1), (Surface(0, 4), 2), (S5, 3), (Surface(1, 2), 4)])
def test_compiled_path_replays_to_the_terminal_decomposition(S, seed):
    w = walk(S, 3, seed)
    moves = M.compile_path(PantsPath(w))
    t = M.replay(w[0], moves)
    assert M.validate(t, w[-1]) == []
    assert sum(1 for m in moves if m.kind.startswith("BU")) == len(w) - 1


def test_move_sequence_shape():
    w = walk(S5, 1, 7)
    (alpha,) = set(w[0].curves) - set(w[1].curves)
    (beta,) = set(w[1].curves) - set(w[0].curves)
    seq = M.move_sequence(M.suited_triangulation(w[0]), alpha, beta)
    kinds = [m.kind for m in seq]
    assert kinds[-3][:2] == "BD" and kinds[-2] == "ST" and kinds[-1][:2] == "BU"
    assert all(k in ("TW+", "TW-") for k in kinds[:-3])
    assert len(set(kinds[:-3])) <= 1


def test_apply_move_preconditions():
    p = standard_pants(S5)
    t = M.suited_triangulation(p)
    with pytest.raises(M.TriangulationError):
        M.apply_move(t, M.TriMove("ST", p.curves[0]))
    with pytest.raises(ValueError):
        M.TriMove("XX", p.curves[0])


def test_closed_surfaces_are_not_compiled():
    w = walk(Surface(2, 0), 1, 1)
    with pytest.raises(SurfaceError):
        M.compile_path(PantsPath(w))


def test_length_one_model_census():
    mc = M.assemble_model(PantsPath(walk(S5, 1, 5)))
    c = mc.census
    assert c["non_twist_blocks"] == 3
    assert c["path_length"] == 1
    assert mc.check() == []
    assert mc.spun_fraction() == 1.0


def test_gluing_table_format():
    mc = M.assemble_model(PantsPath(walk(S5, 2, 6)))
    lines = mc.gluing_table().splitlines()
    assert len(lines) == len(mc.tetrahedra)
    for i, line in enumerate(lines):
        faces = line.split()[2:]
        assert line.startswith(f"tet {i}:")
        assert len(faces) == 4
        for f in faces:
            assert f == f[:4] + "-" or f.endswith(">")


def test_gluings_are_involutive():
    mc = M.assemble_model(PantsPath(walk(S5, 2, 8)))
    for (T, f), (T2, f2, perm) in mc.gluing.items():
        assert mc.gluing[(T2, f2)][:2] == (T, f)


def test_empty_path_is_rejected():
    with pytest.raises(M.TriangulationError):
        M.assemble_model(PantsPath([]))


def test_volume_constant():
    assert abs(M.regular_ideal_volume() - regular_ideal_tetrahedron_volume()) < 1e-9
    mc = M.assemble_model(PantsPath(walk(S5, 1, 2)))
    vb = M.volume_bound(mc)
    assert vb["bound"] == pytest.approx(vb["non_twist_tets"] * vb["v3"] + 1)
