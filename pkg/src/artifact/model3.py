"""Suited triangulations, triangulation moves and layered model complexes.

A surface triangulation is a set of oriented triangles with explicit side
gluings; side ``s`` of a triangle runs from corner ``s`` to corner ``s + 1``.
Each pants curve of slot ``k`` is drawn as two edges ``("e", k, 0)`` and
``("e", k, 1)`` through the vertices ``("p", k, 0)`` and ``("p", k, 1)``.
Each puncture is a boundary circle with two vertices ``("q", ref, i)`` and
two arcs ``("b", ref, i)``.  Named edges are never flipped.

Every diagonal flip is recorded as one tetrahedron layered on top of the
current surface, so a replayed move sequence assembles into a complex whose
bottom and top boundaries are the initial and final triangulations.
"""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.integrate import quad

from .pantsgraph import PantsDecomposition, PantsPath, alpha_piece, genus_type
from .projection import curve_of_slope, slope_of
from .slopes import det, farey_base, normalize
from .surface import Curve, Multicurve, Surface, SurfaceError, cut_pieces, dehn_twist, intersection


class TriangulationError(ValueError):
    """A triangulation fails an invariant or a move precondition."""


# pants template: vertex (c, 0) and (c, 1) on cuff c, triangles counterclockwise
_FRONT = (((0, 1), (1, 1), (2, 1)), ((0, 1), (1, 0), (1, 1)),
          ((1, 1), (2, 0), (2, 1)), ((2, 1), (0, 0), (0, 1)))
_BACK = (((0, 0), (2, 0), (1, 0)), ((0, 0), (2, 1), (2, 0)),
         ((2, 0), (1, 1), (1, 0)), ((1, 0), (0, 1), (0, 0)))
_TEMPLATE = _FRONT + _BACK


class TriSurface:
    """Oriented triangles with side gluings and names on fixed edges."""

    def __init__(self):
        self.tri: dict[int, tuple] = {}
        self.glue: dict[tuple[int, int], tuple[int, int]] = {}
        self.name: dict[tuple[int, int], tuple] = {}
        self.next_uid = 0

    def copy(self) -> "TriSurface":
        t = TriSurface()
        t.tri = dict(self.tri)
        t.glue = dict(self.glue)
        t.name = dict(self.name)
        t.next_uid = self.next_uid
        return t

    def add(self, verts) -> int:
        uid = self.next_uid
        self.next_uid += 1
        self.tri[uid] = tuple(verts)
        return uid

    def ends(self, side) -> tuple:
        t, s = side
        v = self.tri[t]
        return v[s], v[(s + 1) % 3]

    def sides(self):
        for t in sorted(self.tri):
            for s in range(3):
                yield t, s

    def edges(self):
        """One representative side per edge."""
        for side in self.sides():
            g = self.glue.get(side)
            if g is None or side < g:
                yield side

    def flippable(self, side) -> bool:
        g = self.glue.get(side)
        return g is not None and side not in self.name and g[0] != side[0]

    def quad_sides(self, side) -> list:
        t, s = side
        t2, s2 = self.glue[side]
        return [(t, (s + 1) % 3), (t, (s + 2) % 3), (t2, (s2 + 1) % 3), (t2, (s2 + 2) % 3)]

    def flip(self, side) -> dict:
        """Replace the diagonal at ``side``; returns the tetrahedron data.

        Tetrahedron vertices 0..3 are the quad corners a, b, c, d where the
        flipped side runs a -> b, c is opposite in its triangle and d is
        opposite in the other.  ``faces`` maps each face index to
        (triangle uid, corner -> tetrahedron vertex).
        """
        if not self.flippable(side):
            raise TriangulationError(f"side {side} cannot be flipped")
        t, s = side
        t2, s2 = self.glue[side]
        v, w = self.tri[t], self.tri[t2]
        a, b, c = v[s], v[(s + 1) % 3], v[(s + 2) % 3]
        d = w[(s2 + 2) % 3]
        A = self.add((a, d, c))
        B = self.add((d, b, c))
        moved = {(t, (s + 1) % 3): (B, 1), (t, (s + 2) % 3): (A, 2),
                 (t2, (s2 + 1) % 3): (A, 0), (t2, (s2 + 2) % 3): (B, 0)}
        for old, new in moved.items():
            g = self.glue.pop(old, None)
            if g is not None:
                g2 = moved.get(g, g)
                self.glue[new] = g2
                if g not in moved:
                    self.glue[g2] = new
            nm = self.name.pop(old, None)
            if nm is not None:
                self.name[new] = nm
        self.glue.pop((t, s))
        self.glue.pop((t2, s2))
        self.glue[(A, 1)] = (B, 2)
        self.glue[(B, 2)] = (A, 1)
        del self.tri[t], self.tri[t2]
        cm_t = [0, 0, 0]
        cm_t[s], cm_t[(s + 1) % 3], cm_t[(s + 2) % 3] = 0, 1, 2
        cm_t2 = [0, 0, 0]
        cm_t2[s2], cm_t2[(s2 + 1) % 3], cm_t2[(s2 + 2) % 3] = 1, 0, 3
        return {
            "vertices": (a, b, c, d),
            "faces": {3: (t, tuple(cm_t)), 2: (t2, tuple(cm_t2)), 1: (A, (0, 3, 2)), 0: (B, (3, 1, 2))},
            "quad": [self.name.get(x) for x in ((A, 0), (B, 1), (A, 2), (B, 0))],
        }

    # traversal and keys -----------------------------------------------------
    def traverse(self, root) -> tuple[list[int], dict[int, int]]:
        """Triangles in breadth-first order from ``root``, with entry rotations."""
        t0, s0 = root
        rot = {t0: s0}
        order = [t0]
        i = 0
        while i < len(order):
            t = order[i]
            i += 1
            r = rot[t]
            for j in range(3):
                g = self.glue.get((t, (r + j) % 3))
                if g is not None and g[0] not in rot and g[0] in self.tri:
                    rot[g[0]] = g[1]
                    order.append(g[0])
        return order, rot

    def key(self, root, slot=None) -> tuple:
        """Canonical encoding from ``root``; labels off ``slot`` are abstracted."""
        order, rot = self.traverse(root)
        idx = {t: i for i, t in enumerate(order)}
        seen: dict = {}

        def lab(x):
            if x is None:
                return None
            if slot is None:
                return x
            if len(x) == 3 and x[1] == slot and x[0] in "epm":
                return (x[0], x[2])
            if x not in seen:
                seen[x] = len(seen)
            return seen[x]

        rows = []
        for t in order:
            r = rot[t]
            v = self.tri[t]
            row = []
            for j in range(3):
                side = (t, (r + j) % 3)
                g = self.glue.get(side)
                nb = (idx[g[0]], (g[1] - rot[g[0]]) % 3) if g is not None and g[0] in idx else None
                row.append((lab(v[(r + j) % 3]), nb, lab(self.name.get(side))))
            rows.append(tuple(row))
        return tuple(rows)

    def address(self, root, side) -> tuple[int, int]:
        order, rot = self.traverse(root)
        t, s = side
        return order.index(t), (s - rot[t]) % 3

    def locate(self, root, addr) -> tuple[int, int]:
        order, rot = self.traverse(root)
        i, j = addr
        t = order[i]
        return t, (rot[t] + j) % 3

    def find_named(self, nm, tail=None):
        for side, x in sorted(self.name.items()):
            if x == nm and (tail is None or self.ends(side)[0] == tail):
                return side
        raise TriangulationError(f"no side named {nm}")

    # regions -------------------------------------------------------------
    def flood(self, start: int, cross) -> set[int]:
        out = {start}
        todo = [start]
        while todo:
            t = todo.pop()
            for s in range(3):
                g = self.glue.get((t, s))
                if g is not None and g[0] not in out and cross((t, s)):
                    out.add(g[0])
                    todo.append(g[0])
        return out

    def restrict(self, uids) -> "TriSurface":
        sub = TriSurface()
        uids = set(uids)
        sub.tri = {t: self.tri[t] for t in uids}
        sub.glue = {k: v for k, v in self.glue.items() if k[0] in uids and v[0] in uids}
        sub.name = {k: v for k, v in self.name.items() if k[0] in uids}
        sub.next_uid = self.next_uid
        return sub

    def components(self) -> list[set[int]]:
        """Pieces cut out by the named edges."""
        left = set(self.tri)
        out = []
        while left:
            comp = self.flood(min(left), lambda side: side not in self.name)
            out.append(comp)
            left -= comp
        return out

    def euler(self) -> int:
        verts = {v for tri in self.tri.values() for v in tri}
        glued = sum(1 for side in self.glue) // 2
        free = 3 * len(self.tri) - 2 * glued
        return len(verts) - (glued + free) + len(self.tri)

    # corners and boundary cycles of a piece ---------------------------------
    def corner_anchor(self, t: int, i: int, inside: set[int]):
        """The fixed side reached by turning around corner i of t inside a piece."""
        cur = (t, i)
        for _ in range(6 * len(self.tri) + 6):
            if cur in self.name or cur not in self.glue or self.glue[cur][0] not in inside:
                return cur
            t2, s2 = self.glue[cur]
            cur = (t2, (s2 + 1) % 3)
        raise TriangulationError("corner rotation does not close")

    def cuffs(self, inside: set[int]) -> list[list[tuple[int, int]]]:
        fixed = [(t, s) for t in sorted(inside) for s in range(3)
                 if (t, s) in self.name or (t, s) not in self.glue or self.glue[(t, s)][0] not in inside]
        seen = set()
        out = []
        for side in fixed:
            if side in seen:
                continue
            cyc = []
            cur = side
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                t, s = cur
                cur = self.corner_anchor(t, (s + 1) % 3, inside)
            out.append(cyc)
        return out


def _edge_label(nm) -> tuple:
    """Curve slot or puncture that a fixed edge name belongs to."""
    return (nm[0], nm[1])


def standard_piece_errors(surf: TriSurface, inside: set[int]) -> list[str]:
    """Reasons the piece fails to be a standard pants triangulation."""
    errs = []
    if len(inside) != 8:
        errs.append(f"piece has {len(inside)} triangles, expected 8")
        return errs
    cuffs = surf.cuffs(inside)
    if len(cuffs) != 3:
        return [f"piece has {len(cuffs)} boundary cycles, expected 3"]
    cuff_of = {}
    for c, cyc in enumerate(cuffs):
        names = [surf.name.get(side) for side in cyc]
        if len(cyc) != 2 or any(n is None for n in names):
            return ["boundary cycle is not two named arcs"]
        if _edge_label(names[0]) != _edge_label(names[1]) or names[0] == names[1]:
            return ["boundary cycle mixes arcs of different curves"]
        for side in cyc:
            cuff_of[side] = c
    anchor = {(t, i): surf.corner_anchor(t, i, inside) for t in inside for i in range(3)}
    spanning = [t for t in sorted(inside) if len({cuff_of[anchor[(t, i)]] for i in range(3)}) == 3]
    if len(spanning) != 2:
        return [f"piece has {len(spanning)} spanning triangles, expected 2"]
    top, bot = spanning
    tv = [anchor[(top, i)] for i in range(3)]
    bv = {cuff_of[anchor[(bot, i)]]: anchor[(bot, i)] for i in range(3)}
    if set(tv) & set(bv.values()):
        return ["spanning triangles share a vertex"]
    order = [cuff_of[x] for x in tv]
    border = [cuff_of[anchor[(bot, i)]] for i in range(3)]
    j = border.index(order[0])
    if [border[j], border[(j + 1) % 3], border[(j + 2) % 3]] != [order[0], order[2], order[1]]:
        errs.append("spanning triangles have the same cyclic cuff order")
    others = Counter(frozenset(anchor[(t, i)] for i in range(3)) for t in inside if t not in spanning)
    for i in range(3):
        c, c1 = order[i], order[(i + 1) % 3]
        hi, lo = tv[i], bv[c1]
        want = (frozenset((hi, lo, tv[(i + 1) % 3])), frozenset((hi, lo, bv[c])))
        for w in want:
            if others[w] != 1:
                errs.append(f"quadrilateral between cuffs {c} and {c1} is not standard")
                break
    return errs


# suited triangulations ------------------------------------------------------

@dataclass
class SuitedTriangulation:
    """A surface triangulation with two vertices and two edges per pants curve.

    ``curves[k]`` is the pants curve of slot k and ``duals[k]`` its
    distinguished dual curve beta(alpha, T).
    """
    surface: Surface
    surf: TriSurface
    curves: list[Curve]
    duals: list[Curve]
    marks: dict = field(default_factory=dict)

    def copy(self) -> "SuitedTriangulation":
        return SuitedTriangulation(self.surface, self.surf.copy(), list(self.curves), list(self.duals),
                                   dict(self.marks))

    @property
    def pants(self) -> PantsDecomposition:
        return PantsDecomposition(self.curves, self.surface, check=False)

    def slot(self, alpha: Curve) -> int:
        try:
            return self.curves.index(alpha)
        except ValueError:
            raise TriangulationError(f"{alpha} is not a curve of the triangulation") from None

    def counts(self) -> tuple[int, int, int]:
        s = self.surf
        verts = {v for tri in s.tri.values() for v in tri}
        glued = len(s.glue) // 2
        free = 3 * len(s.tri) - 2 * glued
        return len(verts), glued + free, len(s.tri)

    def key(self) -> tuple:
        s = self.surf
        root = min(s.name, key=lambda side: (s.name[side], s.ends(side)))
        return s.key(root)

    def label_of(self, nm):
        if nm[0] == "e":
            return self.curves[nm[1]]
        return ("puncture", nm[1])

    def gluing_lines(self) -> list[str]:
        s = self.surf
        ids = {t: i for i, t in enumerate(sorted(s.tri))}
        out = []
        for t in sorted(s.tri):
            parts = []
            for k in range(3):
                g = s.glue.get((t, k))
                parts.append(f"s{k}->" + (f"<{ids[g[0]]},{g[1]}>" if g else "-"))
            out.append(f"tri {ids[t]}: {' '.join(parts)} " + " ".join(map(_vname, s.tri[t])))
        return out


def _vname(v) -> str:
    return f"{v[0]}{v[1]}{'b' if v[2] else ''}"


def _cuff_sort_key(ref, slot_of):
    if isinstance(ref, Curve):
        return (0, slot_of[ref])
    return (1, ref[1])


def initial_duals(p: PantsDecomposition) -> list[Curve]:
    out = []
    for alpha in p.curves:
        y = alpha_piece(p, alpha)
        out.append(curve_of_slope(y, farey_base(slope_of(alpha, y))))
    return out


def suited_triangulation(p: PantsDecomposition) -> SuitedTriangulation:
    """The standard triangulation suited to p, glued with even parity."""
    S = p.surface
    curves = list(p.curves)
    slot_of = {c: k for k, c in enumerate(curves)}
    pieces = cut_pieces(Multicurve(curves), S)
    cuff_lists = [sorted(y.boundary_refs, key=lambda r: _cuff_sort_key(r, slot_of)) for y in pieces
                  if y.complexity == 0]
    cuff_lists.sort(key=lambda cl: [_cuff_sort_key(r, slot_of) for r in cl])
    if len(cuff_lists) != -S.euler or any(len(c) != 3 for c in cuff_lists):
        raise TriangulationError("complementary pieces are not pairs of pants")
    # global vertex of template vertex (pants j, cuff c, bar)
    seen: dict[int, int] = {}
    vname = {}
    for j, cl in enumerate(cuff_lists):
        for c, ref in enumerate(cl):
            if isinstance(ref, Curve):
                k = slot_of[ref]
                seen[k] = seen.get(k, 0) + 1
                tag = ("p", k)
            else:
                tag = ("q", ref[1])
            vname[(j, c, 0)] = tag + (0,)
            vname[(j, c, 1)] = tag + (1,)
    if any(n != 2 for n in seen.values()) or len(seen) != len(curves):
        raise TriangulationError("pants curves do not bound exactly two cuffs each")
    surf = TriSurface()
    front = {}
    back = {}
    for j, cl in enumerate(cuff_lists):
        uids = [surf.add([vname[(j,) + v] for v in tri]) for tri in _TEMPLATE]
        local = {}
        for u, tri in zip(uids, _TEMPLATE):
            for s in range(3):
                x, y = tri[s], tri[(s + 1) % 3]
                if x[0] == y[0]:
                    (front if x[1] == 0 else back)[(j, x[0])] = (u, s)
                else:
                    local[(x, y)] = (u, s)
        for (x, y), side in local.items():
            surf.glue[side] = local[(y, x)]
    arcs: dict[int, list] = {}
    for j, cl in enumerate(cuff_lists):
        for c, ref in enumerate(cl):
            if isinstance(ref, Curve):
                arcs.setdefault(slot_of[ref], []).append((j, c))
            else:
                surf.name[front[(j, c)]] = ("b", ref[1], 0)
                surf.name[back[(j, c)]] = ("b", ref[1], 1)
    for k in range(len(curves)):
        (a, i), (b, j) = arcs[k]
        fa, ba, fb, bb = front[(a, i)], back[(a, i)], front[(b, j)], back[(b, j)]
        for x, y, nm in ((fa, bb, ("e", k, 0)), (ba, fb, ("e", k, 1))):
            surf.glue[x] = y
            surf.glue[y] = x
            surf.name[x] = surf.name[y] = nm
    return SuitedTriangulation(S, surf, curves, initial_duals(p) if not S.closed else list(curves))


def validate(t: SuitedTriangulation, target: PantsDecomposition | None = None) -> list[str]:
    """All violated invariants of a suited triangulation (empty when valid)."""
    s = t.surf
    errs = []
    for side, g in s.glue.items():
        if s.glue.get(g) != side:
            errs.append(f"gluing at {side} is not an involution")
        elif s.ends(side) != s.ends(g)[::-1]:
            errs.append(f"gluing at {side} reverses orientation")
        if s.name.get(side) != s.name.get(g):
            errs.append(f"named edge at {side} has mismatched sides")
    if s.euler() != t.surface.euler:
        errs.append(f"Euler characteristic {s.euler()} differs from {t.surface.euler}")
    for k in range(len(t.curves)):
        ends = []
        for i in (0, 1):
            sides = [side for side, nm in s.name.items() if nm == ("e", k, i)]
            if len(sides) != 2:
                errs.append(f"curve slot {k} edge {i} has {len(sides)} sides")
                continue
            ends.append(s.ends(sides[0]))
        if len(ends) == 2 and not all(set(e) == {("p", k, 0), ("p", k, 1)} for e in ends):
            errs.append(f"curve slot {k} does not run through its two vertices")
    if errs:
        return errs
    labels = []
    for comp in s.components():
        ce = standard_piece_errors(s, comp)
        errs.extend(ce)
        if not ce:
            labels.append(sorted(map(repr, (t.label_of(s.name[cyc[0]]) for cyc in s.cuffs(comp)))))
    if target is not None and sorted(target.curves) != sorted(t.curves):
        errs.append("pants curves differ from the target decomposition")
    if not errs:
        P = t.pants
        want = sorted(sorted(map(repr, y.boundary_refs)) for y in cut_pieces(Multicurve(P.curves), P.surface))
        if sorted(labels) != want:
            errs.append("pants pieces do not match the complementary pieces of the curves")
    return errs


# local flip searches -----------------------------------------------------------

SEARCH_LIMIT = 400000
_SEARCH_CACHE: dict = {}


def _slot_of_name(nm, k) -> bool:
    return nm is not None and nm[0] in "em" and nm[1] == k


def _swap_slot(patch: TriSurface, k: int) -> TriSurface:
    sw = {("p", k, 0): ("p", k, 1), ("p", k, 1): ("p", k, 0),
          ("e", k, 0): ("e", k, 1), ("e", k, 1): ("e", k, 0)}
    q = patch.copy()
    q.tri = {t: tuple(sw.get(v, v) for v in vs) for t, vs in patch.tri.items()}
    q.name = {s: sw.get(n, n) for s, n in patch.name.items()}
    return q


def _bfs(patch: TriSurface, root_of, moves_of, goal, limit: int = SEARCH_LIMIT) -> list:
    """Shortest flip sequence, as root-relative addresses, reaching ``goal``."""
    if goal(patch):
        return []
    seen = {patch.key(root_of(patch))}
    queue = deque([(patch, ())])
    while queue:
        cur, path = queue.popleft()
        order, rot = cur.traverse(root_of(cur))
        pos = {t: i for i, t in enumerate(order)}
        for side in moves_of(cur):
            nxt = cur.copy()
            nxt.flip(side)
            kk = nxt.key(root_of(nxt))
            if kk in seen:
                continue
            seen.add(kk)
            step = path + ((pos[side[0]], (side[1] - rot[side[0]]) % 3),)
            if goal(nxt):
                return list(step)
            if len(seen) > limit:
                raise TriangulationError("flip search exceeded its state limit")
            queue.append((nxt, step))
    raise TriangulationError("no flip sequence reaches the goal")


def _cached_search(tag, patch: TriSurface, root_of, k: int, variant, moves_of, goal) -> list:
    ck = (tag, variant, patch.key(root_of(patch), slot=k))
    if ck not in _SEARCH_CACHE:
        _SEARCH_CACHE[ck] = _bfs(patch, root_of, moves_of, goal)
    return _SEARCH_CACHE[ck]


def _replay(t: SuitedTriangulation, patch_of, root_of, addrs, record, block: str, k: int) -> None:
    for addr in addrs:
        patch = patch_of(t.surf)
        side = patch.locate(root_of(patch), addr)
        data = t.surf.flip(side)
        if record is not None:
            record(data, block, k)


def _alpha_moves(k):
    def moves(s: TriSurface):
        return [side for side in s.edges() if s.flippable(side)
                and any(_slot_of_name(s.name.get(x), k) for x in s.quad_sides(side))]
    return moves


def _free_moves(s: TriSurface):
    return [side for side in s.edges() if s.flippable(side)]


# patches around slot k
def _side_root(k: int, bar: int, nm: int = 0):
    return lambda s: s.find_named(("e", k, nm), tail=("p", k, bar))


def _unique_root(k: int, nm: int = 0):
    return lambda s: s.find_named(("e", k, nm))


def _component_of(k: int, bar: int):
    def patch(s: TriSurface) -> TriSurface:
        side = s.find_named(("e", k, 0), tail=("p", k, bar))
        return s.restrict(s.flood(side[0], lambda x: x not in s.name))
    return patch


def _region_of(k: int):
    def patch(s: TriSurface) -> TriSurface:
        side = s.find_named(("e", k, 0), tail=("p", k, 0))
        return s.restrict(s.flood(side[0], lambda x: x not in s.name or _slot_of_name(s.name[x], k)))
    return patch


def _half_shift(t: SuitedTriangulation, k: int, patch_of, root_of, back_root_of, sign: int,
                record, block: str) -> None:
    """Rotate the triangulation on one side of slot k by half a turn.

    The forward rotation is the shortest flip sequence, restricted to quads
    with a side on the curve, that swaps the two curve vertices.  The
    backward rotation replays the reverse of the forward one, transported
    to the current triangulation through the vertex swap.
    """
    patch = patch_of(t.surf)
    target = _swap_slot(patch, k)
    tk = target.key(root_of(target))
    moves = _alpha_moves(k)
    fwd = _cached_search("half", patch, root_of, k, None, moves, lambda s: s.key(root_of(s)) == tk)
    if sign > 0:
        _replay(t, patch_of, root_of, fwd, record, block, k)
        return
    ck = ("half-back", None, patch.key(root_of(patch), slot=k))
    if ck not in _SEARCH_CACHE:
        # undoing the forward flips leads from the rotated triangulation back;
        # read through the vertex swap it rotates the other way
        scratch = patch.copy()
        back = []
        for addr in fwd:
            scratch.flip(scratch.locate(root_of(scratch), addr))
            back.append(scratch.address(root_of(scratch), (scratch.next_uid - 2, 1)))
        _SEARCH_CACHE[ck] = back[::-1]
    _replay(t, patch_of, back_root_of, _SEARCH_CACHE[ck], record, block, k)


def _arc_side_labels(s: TriSurface, k: int, arc) -> set:
    """Cuff labels in the part of a piece cut by ``arc`` that contains edge e_k."""
    arc_sides = {arc, s.glue[arc]}
    start = s.find_named(("e", k, 0))
    part = s.flood(start[0], lambda x: x not in s.name and x not in arc_sides)
    out = set()
    for t in part:
        for i in range(3):
            nm = s.name.get((t, i))
            if nm is not None and not _slot_of_name(nm, k):
                out.add(_edge_label(nm))
    return out


def _vertex_arcs(s: TriSurface, k: int) -> list:
    pk = {("p", k, 0), ("p", k, 1)}
    return [side for side in s.edges() if side not in s.name and side in s.glue and set(s.ends(side)) == pk]


def _rotation(s: TriSurface, v) -> list:
    """Edges (as sorted side pairs) leaving v in counterclockwise order."""
    start = next((t, i) for t in sorted(s.tri) for i in range(3) if s.tri[t][i] == v)
    out = []
    cur = start
    for _ in range(3 * len(s.tri) + 3):
        g = s.glue.get(cur)
        out.append(tuple(sorted((cur, g))) if g else (cur,))
        t, i = cur
        prev = (t, (i + 2) % 3)
        g2 = s.glue.get(prev)
        if g2 is None:
            raise TriangulationError("vertex rotation hits the boundary")
        cur = g2
        if cur == start:
            return out
        cur = (cur[0], cur[1])
    raise TriangulationError("vertex rotation does not close")


def _crossings(s: TriSurface, k: int, arcs) -> int:
    """Number of curve vertices where the two arcs cross slot k's curve."""
    a_edges = set()
    for i in (0, 1):
        for side, nm in s.name.items():
            if nm == ("e", k, i):
                g = s.glue.get(side)
                a_edges.add(tuple(sorted((side, g))) if g else (side,))
    b_edges = {tuple(sorted((x, s.glue[x]))) for x in arcs}
    n = 0
    for v in (("p", k, 0), ("p", k, 1)):
        rot = _rotation(s, v)
        marks = [1 if e in a_edges else 2 if e in b_edges else 0 for e in rot]
        seq = [m for m in marks if m]
        if len(seq) != 4:
            raise TriangulationError("unexpected valence of curve edges at a vertex")
        i = seq.index(1)
        seq = seq[i:] + seq[:i]
        if seq[1] == 2 and seq[3] == 2:
            n += 1
    return n


# triangulation moves ---------------------------------------------------------

MOVE_KINDS = ("TW+", "TW-", "BD0", "BD1", "ST", "BU0", "BU1")
BLOCK_OF = {"TW+": "twist+", "TW-": "twist-", "BD0": "blowdown", "BD1": "blowdown",
            "ST": "straighten", "BU0": "blowup", "BU1": "blowup"}
MAX_OFFSET = 512


class TwistOrbitError(TriangulationError):
    """The target curve is not in the twist orbit of the dual curve."""


@dataclass(frozen=True)
class TriMove:
    kind: str
    curve: Curve
    inserted: Curve | None = None
    shifted: bool = False

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise TriangulationError(f"unknown move kind {self.kind!r}")

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "curve": self.curve.serialize()}
        if self.inserted is not None:
            out["inserted"] = self.inserted.serialize()
        if self.shifted:
            out["shifted"] = True
        return out


def piece_genus(t: SuitedTriangulation, k: int) -> int:
    """1 if both sides of the curve in slot k bound the same pants."""
    s = t.surf
    a = s.find_named(("e", k, 0), tail=("p", k, 0))
    b = s.find_named(("e", k, 0), tail=("p", k, 1))
    comp = s.flood(a[0], lambda x: x not in s.name or s.name[x][0] == "m")
    return 1 if b[0] in comp else 0


def _twist(t: SuitedTriangulation, k: int, sign: int, record) -> None:
    block = BLOCK_OF["TW+" if sign > 0 else "TW-"]
    if piece_genus(t, k):
        _half_shift(t, k, _region_of(k), _side_root(k, 0, 0), _side_root(k, 1, 1), sign, record, block)
    else:
        for bar in (0, 1):
            _half_shift(t, k, _component_of(k, bar), _unique_root(k, 0), _unique_root(k, 1), sign,
                        record, block)
    t.duals[k] = dehn_twist(t.duals[k], t.curves[k], sign)


def _name_label(t: SuitedTriangulation, ref) -> tuple:
    if isinstance(ref, Curve):
        return ("e", t.curves.index(ref))
    return ("b", ref[1])


def _partition_pairs(t: SuitedTriangulation, k: int, beta: Curve) -> list[tuple]:
    """Cuff labels grouped with beta by the pants of (P - alpha) + beta."""
    new = list(t.curves)
    new[k] = beta
    out = []
    for y in cut_pieces(Multicurve(new), t.surface):
        refs = list(y.boundary_refs)
        if beta in refs:
            refs.remove(beta)
            labs = []
            for r in refs:
                labs.append(("e", k) if r == beta else _name_label(t, r))
            out.append(tuple(sorted(labs)))
    return out


def _cuff_labels(s: TriSurface, k: int) -> list:
    return sorted({_edge_label(nm) for nm in s.name.values() if not _slot_of_name(nm, k)})


def _blow_down0(t: SuitedTriangulation, k: int, m: TriMove, record) -> None:
    if m.shifted:
        _half_shift(t, k, _component_of(k, 0), _unique_root(k, 0), _unique_root(k, 1), 1, record, "blowdown")
        t.duals[k] = _shifted_dual(t, k)
    pairs = _partition_pairs(t, k, m.inserted)
    patches = [_component_of(k, bar)(t.surf) for bar in (0, 1)]
    root = _unique_root(k, 0)
    moves = _free_moves
    best = None
    for la in _cuff_labels(patches[0], k):
        for lb in _cuff_labels(patches[1], k):
            if tuple(sorted((la, lb))) not in pairs:
                continue
            seqs = []
            for patch, lab in zip(patches, (la, lb)):
                variant = tuple(sorted(patch.address(root(patch), side) for side, nm in patch.name.items()
                                    if _edge_label(nm) == lab))
                goal = _arc_goal(k, lab)
                seqs.append(_cached_search("bd0", patch, root, k, variant, moves, goal))
            cand = (len(seqs[0]) + len(seqs[1]), (la, lb), seqs)
            if best is None or cand[0] < best[0]:
                best = cand
    if best is None:
        raise TriangulationError("blow-down: no cuff grouping matches the inserted curve")
    _, labs, seqs = best
    for bar, lab, seq in zip((0, 1), labs, seqs):
        patch_of = _component_of(k, bar)
        _replay(t, patch_of, root, seq, record, "blowdown", k)
        patch = patch_of(t.surf)
        arcs = [a for a in _vertex_arcs(patch, k) if _arc_side_labels(patch, k, a) == {lab}]
        arc = min(arcs, key=lambda a: patch.address(root(patch), a))
        _mark(t.surf, arc, ("m", k, bar))


def _arc_goal(k: int, lab):
    def goal(s: TriSurface) -> bool:
        return any(_arc_side_labels(s, k, a) == {lab} for a in _vertex_arcs(s, k))
    return goal


def _mark(s: TriSurface, side, nm) -> None:
    s.name[side] = nm
    s.name[s.glue[side]] = nm


def _crossing_pairs(s: TriSurface, k: int) -> list:
    arcs = _vertex_arcs(s, k)
    return [(a, b) for i, a in enumerate(arcs) for b in arcs[i + 1:] if _crossings(s, k, (a, b)) == 1]


def _blow_down1(t: SuitedTriangulation, k: int, record) -> None:
    patch_of = _region_of(k)
    root = _side_root(k, 0, 0)
    patch = patch_of(t.surf)
    seq = _cached_search("bd1", patch, root, k, None, _free_moves, lambda s: bool(_crossing_pairs(s, k)))
    _replay(t, patch_of, root, seq, record, "blowdown", k)
    patch = patch_of(t.surf)
    pair = min(_crossing_pairs(patch, k), key=lambda ab: sorted(patch.address(root(patch), x) for x in ab))
    pair = sorted(pair, key=lambda x: patch.address(root(patch), x))
    for i, side in enumerate(pair):
        _mark(t.surf, side, ("m", k, i))


def _straighten(t: SuitedTriangulation, k: int, record) -> None:
    """A flip and its inverse: the pillow joining the two blown-down sides."""
    patch_of = _region_of(k)
    root = _side_root(k, 0, 0)
    patch = patch_of(t.surf)
    order, rot = patch.traverse(root(patch))
    first = next((tt, (rot[tt] + j) % 3) for tt in order for j in range(3) if patch.flippable((tt, (rot[tt] + j) % 3)))
    addr = patch.address(root(patch), first)
    _replay(t, patch_of, root, [addr], record, "straighten", k)
    d = (t.surf.next_uid - 2, 1)
    data = t.surf.flip(d)
    if record is not None:
        record(data, "straighten", k)


def _blow_up(t: SuitedTriangulation, k: int, beta: Curve, record) -> None:
    s = t.surf
    for side, nm in list(s.name.items()):
        if nm[0] == "e" and nm[1] == k:
            del s.name[side]
    for side, nm in list(s.name.items()):
        if nm[0] == "m" and nm[1] == k:
            s.name[side] = ("e", k, nm[2])
    genus = piece_genus(t, k)
    for bar in ((0,) if genus else (0, 1)):
        patch_of = _component_of(k, bar)
        root = _side_root(k, bar, 0)
        patch = patch_of(s)
        seq = _cached_search("bu", patch, root, k, None, _free_moves,
                             lambda x: not standard_piece_errors(x, set(x.tri)))
        _replay(t, patch_of, root, seq, record, "blowup", k)
    old = t.curves[k]
    t.curves[k] = beta
    t.duals[k] = old
    _refresh_duals(t, k)


def _valid_dual(P: PantsDecomposition, c: Curve, d: Curve) -> bool:
    want = 1 if genus_type(P, c) == "genus1" else 2
    return intersection(c, d) == want and all(intersection(o, d) == 0 for o in P.curves if o != c)


def _refresh_duals(t: SuitedTriangulation, keep: int) -> None:
    """Replace dual labels that no longer fit, by the closest valid one."""
    P = t.pants
    for j, c in enumerate(t.curves):
        if j == keep or _valid_dual(P, c, t.duals[j]):
            continue
        y = alpha_piece(P, c)
        s = slope_of(c, y)
        r0, q0 = farey_base(s)
        cands = [(i, curve_of_slope(y, (r0 + i * s[0], q0 + i * s[1]))) for i in range(-6, 7)]
        cands = [(intersection(x, t.duals[j]), abs(i), i, x) for i, x in cands if _valid_dual(P, c, x)]
        t.duals[j] = min(cands, key=lambda z: z[:3])[3]


def _farey_index(s, x) -> int:
    """The j with x = base(s) + j*s."""
    base = farey_base(s)
    d = det(base, s)
    x = normalize(*x)
    for sign in (1, -1):
        j = sign * det(base, x) * d
        if normalize(base[0] + j * s[0], base[1] + j * s[1]) == x:
            return j
    raise TwistOrbitError("curve is not a Farey neighbour of the pants curve")


def _dual_index(t: SuitedTriangulation, k: int, c: Curve):
    alpha = t.curves[k]
    y = alpha_piece(t.pants, alpha)
    s = slope_of(alpha, y)
    try:
        x = slope_of(c, y)
    except (SurfaceError, ValueError) as exc:
        raise TwistOrbitError(f"curve does not lie in the piece around the pants curve: {exc}") from None
    return y, s, _farey_index(s, x)


def _shifted_dual(t: SuitedTriangulation, k: int) -> Curve:
    y, s, j = _dual_index(t, k, t.duals[k])
    r0, q0 = farey_base(s)
    return curve_of_slope(y, (r0 + (j + 1) * s[0], q0 + (j + 1) * s[1]))


def twist_offset(t: SuitedTriangulation, alpha: Curve, target: Curve, cap: int = MAX_OFFSET) -> int:
    """The n with tau_alpha^n(beta(alpha, t)) = target."""
    k = t.slot(alpha)
    beta = t.duals[k]
    _, _, j0 = _dual_index(t, k, beta)
    _, _, j1 = _dual_index(t, k, target)
    _, _, jt = _dual_index(t, k, dehn_twist(beta, alpha, 1))
    step = jt - j0
    if (j1 - j0) % step:
        raise TwistOrbitError("target is not in the twist orbit of the dual curve")
    n = (j1 - j0) // step
    if abs(n) > cap:
        raise TwistOrbitError(f"twist offset {n} exceeds the cap {cap}")
    return n


def beta_of(t: SuitedTriangulation, alpha: Curve) -> Curve:
    return t.duals[t.slot(alpha)]


def apply_move(t: SuitedTriangulation, m: TriMove, record=None) -> SuitedTriangulation:
    """The triangulation after move m; ``record`` receives every flip."""
    k = t.slot(m.curve)
    down = k in t.marks
    out = t.copy()
    if m.kind in ("TW+", "TW-", "BD0", "BD1") and down:
        raise TriangulationError(f"{m.kind} needs a suited curve, but slot {k} is blown down")
    if m.kind in ("ST", "BU0", "BU1") and not down:
        raise TriangulationError(f"{m.kind} needs a blown-down curve")
    genus = piece_genus(t, k)
    if m.kind in ("BD0", "BU0") and genus != 0:
        raise TriangulationError(f"{m.kind} needs a genus-0 piece around the curve")
    if m.kind in ("BD1", "BU1") and genus != 1:
        raise TriangulationError(f"{m.kind} needs a genus-1 piece around the curve")
    if m.kind in ("BD0", "BU0", "BU1") and m.inserted is None:
        raise TriangulationError(f"{m.kind} needs the inserted curve")
    if m.kind == "TW+":
        _twist(out, k, 1, record)
    elif m.kind == "TW-":
        _twist(out, k, -1, record)
    elif m.kind == "BD0":
        _blow_down0(out, k, m, record)
        out.marks[k] = "down"
    elif m.kind == "BD1":
        _blow_down1(out, k, record)
        out.marks[k] = "down"
    elif m.kind == "ST":
        _straighten(out, k, record)
    else:
        _blow_up(out, k, m.inserted, record)
        del out.marks[k]
    return out


def _path_move(p0: PantsDecomposition, p1: PantsDecomposition) -> tuple[Curve, Curve]:
    gone = [c for c in p0.curves if c not in p1.curves]
    new = [c for c in p1.curves if c not in p0.curves]
    if len(gone) != 1 or len(new) != 1:
        raise TriangulationError("consecutive path vertices do not differ by one curve")
    return gone[0], new[0]


def move_sequence(t: SuitedTriangulation, alpha: Curve, beta: Curve) -> list[TriMove]:
    """The moves [TW^n, BD, ST, BU] replacing alpha by beta."""
    genus = piece_genus(t, t.slot(alpha))
    shifted = False
    try:
        n = twist_offset(t, alpha, beta)
    except TwistOrbitError:
        if genus:
            raise
        shifted = True
        half = t.copy()
        half.duals[t.slot(alpha)] = _shifted_dual(t, t.slot(alpha))
        n = twist_offset(half, alpha, beta)
    out = [TriMove("TW+" if n > 0 else "TW-", alpha)] * abs(n)
    out.append(TriMove(f"BD{genus}", alpha, beta, shifted))
    out.append(TriMove("ST", alpha))
    out.append(TriMove(f"BU{genus}", alpha, beta))
    return out


def _check_surface(S: Surface) -> None:
    if S.closed:
        raise SurfaceError("move compilation is implemented for punctured surfaces")


def compile_path(g: PantsPath, start: SuitedTriangulation | None = None) -> list[TriMove]:
    """Triangulation moves realizing every elementary move of the path."""
    if not g.vertices:
        return []
    _check_surface(g.vertices[0].surface)
    t = start if start is not None else suited_triangulation(g.vertices[0])
    out = []
    for p0, p1 in zip(g.vertices, g.vertices[1:]):
        alpha, beta = _path_move(p0, p1)
        for m in move_sequence(t, alpha, beta):
            t = apply_move(t, m)
            out.append(m)
    return out


def replay(p: PantsDecomposition, moves, record=None) -> SuitedTriangulation:
    t = suited_triangulation(p)
    for m in moves:
        t = apply_move(t, m, record)
    return t


# layered model complex ----------------------------------------------------------

@dataclass
class Block:
    kind: str
    curve: Curve
    move: TriMove
    tetrahedra: list[int] = field(default_factory=list)
    spun_edges: dict[int, list[tuple[int, int]]] = field(default_factory=dict)
    bottom: SuitedTriangulation | None = None
    top: SuitedTriangulation | None = None

    @property
    def is_twist(self) -> bool:
        return self.kind.startswith("twist")


def _perm_str(p) -> str:
    return "".join(map(str, p))


def _inverse(p) -> tuple:
    out = [0] * 4
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _parity(p) -> int:
    n = 0
    for i in range(4):
        for j in range(i + 1, 4):
            n += p[i] > p[j]
    return n % 2


# quad sides of a flip as tetrahedron edges, in the order of the flip data
_QUAD_EDGES = ((0, 3), (1, 2), (2, 0), (3, 1))


class _Recorder:
    def __init__(self):
        self.tets: list[tuple] = []
        self.block_of: list[int] = []
        self.gluing: dict = {}
        self.owner: dict = {}
        self.bottom: dict = {}
        self.blocks: list[Block] = []

    def __call__(self, data, block_kind, k):
        T = len(self.tets)
        self.tets.append(data["vertices"])
        self.block_of.append(len(self.blocks) - 1)
        blk = self.blocks[-1]
        blk.tetrahedra.append(T)
        spun = [e for e, nm in zip(_QUAD_EDGES, data["quad"]) if nm is not None and nm[0] == "e" and nm[1] == k]
        if spun:
            blk.spun_edges[T] = spun
        for f in (3, 2):
            uid, cm = data["faces"][f]
            if uid in self.owner:
                T0, f0, cm0 = self.owner.pop(uid)
                perm = [0] * 4
                perm[f] = f0
                for i in range(3):
                    perm[cm[i]] = cm0[i]
                perm = tuple(perm)
                self.gluing[(T, f)] = (T0, f0, perm)
                self.gluing[(T0, f0)] = (T, f, _inverse(perm))
            else:
                self.bottom[(T, f)] = uid
        for f in (1, 0):
            uid, cm = data["faces"][f]
            self.owner[uid] = (T, f, cm)


@dataclass
class ModelComplex:
    surface: Surface
    path_length: int
    blocks: list[Block]
    tetrahedra: list[tuple]
    block_of: list[int]
    gluing: dict
    bottom: SuitedTriangulation
    top: SuitedTriangulation
    bottom_faces: dict
    top_faces: dict
    offsets: list[int]

    @property
    def spin_set(self) -> list[Curve]:
        out = []
        for b in self.blocks:
            if b.is_twist and b.curve not in out:
                out.append(b.curve)
        return out

    @property
    def census(self) -> dict:
        kinds = Counter(b.kind for b in self.blocks)
        tets = Counter()
        for b in self.blocks:
            tets[b.kind] += len(b.tetrahedra)
        twist = sum(len(b.tetrahedra) for b in self.blocks if b.is_twist)
        per_move = []
        cur = 0
        for b in self.blocks:
            if not b.is_twist:
                cur += len(b.tetrahedra)
                if b.kind == "blowup":
                    per_move.append(cur)
                    cur = 0
        return {
            "path_length": self.path_length,
            "blocks": len(self.blocks),
            "twist_blocks": sum(1 for b in self.blocks if b.is_twist),
            "non_twist_blocks": sum(1 for b in self.blocks if not b.is_twist),
            "blocks_by_kind": dict(sorted(kinds.items())),
            "tetrahedra": len(self.tetrahedra),
            "twist_tetrahedra": twist,
            "non_twist_tetrahedra": len(self.tetrahedra) - twist,
            "tetrahedra_by_kind": dict(sorted(tets.items())),
            "max_non_twist_per_move": max(per_move, default=0),
            "twist_offsets": list(self.offsets),
        }

    def spun_fraction(self) -> float:
        tw = [T for b in self.blocks if b.is_twist for T in b.tetrahedra]
        if not tw:
            return 1.0
        spun = {T for b in self.blocks if b.is_twist for T in b.spun_edges}
        return sum(1 for T in tw if T in spun) / len(tw)

    def check(self) -> list[str]:
        """Pseudo-manifold, orientation and boundary checks."""
        errs = []
        for (T, f), (T2, f2, perm) in self.gluing.items():
            back = self.gluing.get((T2, f2))
            if back is None or back[:2] != (T, f) or back[2] != _inverse(perm):
                errs.append(f"gluing of face ({T},{f}) with ({T2},{f2}) is not an involution")
            if perm[f] != f2:
                errs.append(f"gluing of face ({T},{f}) does not map the face to ({T2},{f2})")
            if _parity(perm) != 1:
                errs.append(f"gluing of face ({T},{f}) with ({T2},{f2}) reverses orientation")
            for v in range(4):
                if v != f and self.tetrahedra[T][v] != self.tetrahedra[T2][perm[v]]:
                    errs.append(f"gluing of face ({T},{f}) with ({T2},{f2}) mismatches vertex labels")
                    break
        faces = {(T, f) for T in range(len(self.tetrahedra)) for f in range(4)}
        free = faces - set(self.gluing)
        if free != set(self.bottom_faces) | set(self.top_faces):
            errs.append("unglued faces are not the two boundary surfaces")
        start, end = set(self.bottom.surf.tri), set(self.top.surf.tri)
        below, above = set(self.bottom_faces.values()), set(self.top_faces.values())
        if not below <= start or not above <= end or start - below != end - above:
            errs.append("boundary faces do not match the end triangulations")
        for label, t in (("bottom", self.bottom), ("top", self.top)):
            for e in validate(t):
                errs.append(f"{label} boundary: {e}")
        for b in self.blocks:
            if b.is_twist and any(T not in b.spun_edges for T in b.tetrahedra):
                errs.append(f"twist block about {b.curve} has a tetrahedron without a spun edge")
        return errs

    def gluing_table(self) -> str:
        lines = []
        for T in range(len(self.tetrahedra)):
            parts = []
            for f in range(4):
                g = self.gluing.get((T, f))
                parts.append(f"f{f}->" + (f"<{g[0]},{_perm_str(g[2])}>" if g else "-"))
            lines.append(f"tet {T}: " + " ".join(parts))
        return "\n".join(lines) + ("\n" if lines else "")


def assemble_model(g: PantsPath) -> ModelComplex:
    """Layer one tetrahedron per flip along the compiled move sequence."""
    if not g.vertices:
        raise TriangulationError("empty path")
    p0 = g.vertices[0]
    _check_surface(p0.surface)
    t = suited_triangulation(p0)
    start = t.copy()
    rec = _Recorder()
    offsets = []
    for q0, q1 in zip(g.vertices, g.vertices[1:]):
        alpha, beta = _path_move(q0, q1)
        seq = move_sequence(t, alpha, beta)
        offsets.append(sum(1 if m.kind == "TW+" else -1 for m in seq if m.kind.startswith("TW")))
        for m in seq:
            rec.blocks.append(Block(BLOCK_OF[m.kind], m.curve, m, bottom=t))
            t = apply_move(t, m, rec)
            rec.blocks[-1].top = t
    top_faces = {(T, f): uid for uid, (T, f, _) in rec.owner.items()}
    mc = ModelComplex(p0.surface, len(g), rec.blocks, rec.tets, rec.block_of, rec.gluing, start, t,
                      rec.bottom, top_faces, offsets)
    errs = [e for e in mc.check() if "boundary:" not in e]
    if errs:
        raise TriangulationError(errs[0])
    return mc


@lru_cache(maxsize=None)
def regular_ideal_volume() -> float:
    """Volume of the regular ideal tetrahedron, 3 * Lobachevsky(pi/3)."""
    val, _ = quad(lambda x: -math.log(abs(2 * math.sin(x))), 0, math.pi / 3, limit=200)
    return 3 * val


def volume_bound(mc: ModelComplex) -> dict:
    """Non-twist tetrahedra times V3, plus 1 for the spun twist blocks."""
    v3 = regular_ideal_volume()
    n = mc.census["non_twist_tetrahedra"]
    return {"non_twist_tets": n, "bound": n * v3 + 1, "v3": v3}
