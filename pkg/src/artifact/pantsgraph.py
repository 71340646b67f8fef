"""Pants decompositions, elementary moves and distances in the pants graph.

The pants graph is locally infinite: the curves that can replace alpha form
a twist family beta_k = tau_alpha^k(beta_0).  Moves are therefore filtered
by a cap on their total intersection with a reference multicurve; the cost
of beta_k is convex in k, so the admissible twists form an interval.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache

from .projection import farey_distance, slope_of, curve_of_slope
from .slopes import det, farey_base, normalize
from .surface import (Curve, Multicurve, SubsurfaceSpec, Surface, SurfaceError, cut_pieces,
                      engine_pieces, intersection)
from . import words as W

# twist window used when the cap alone leaves infinitely many neighbours
DEFAULT_TWIST_WINDOW = 2
# hard limit on the twist range scanned for a single curve
MAX_TWIST_SCAN = 512


@dataclass(frozen=True, order=True)
class PantsDecomposition:
    surface: Surface
    curves: tuple[Curve, ...]

    def __init__(self, curves, surface: Surface | None = None, check: bool = True):
        curves = tuple(sorted(set(curves)))
        if surface is None:
            if not curves:
                raise SurfaceError("empty pants decomposition needs a surface")
            surface = curves[0].surface
        object.__setattr__(self, "surface", surface)
        object.__setattr__(self, "curves", curves)
        if check:
            self.validate()

    def validate(self) -> None:
        S = self.surface
        if len(self.curves) != S.complexity:
            raise SurfaceError(f"a pants decomposition of {S} has {S.complexity} curves")
        Multicurve(self.curves)
        if any(p.complexity != 0 for p in cut_pieces(Multicurve(self.curves), S)):
            raise SurfaceError("complementary pieces are not all pairs of pants")

    def key(self) -> tuple:
        return tuple(c.coords for c in self.curves)

    def replace(self, old: Curve, new: Curve) -> "PantsDecomposition":
        return PantsDecomposition([c for c in self.curves if c != old] + [new], self.surface, check=False)

    def serialize(self) -> list[str]:
        return [c.serialize() for c in self.curves]

    def __iter__(self):
        return iter(self.curves)

    def __len__(self):
        return len(self.curves)


@dataclass(frozen=True)
class ElementaryMove:
    source: PantsDecomposition
    removed: Curve
    inserted: Curve
    genus_type: str

    @property
    def target(self) -> PantsDecomposition:
        return self.source.replace(self.removed, self.inserted)

    def validate(self) -> None:
        if self.removed not in self.source.curves:
            raise SurfaceError("removed curve is not in the source")
        want = 1 if self.genus_type == "genus1" else 2
        if intersection(self.removed, self.inserted) != want:
            raise SurfaceError("inserted curve does not meet the removed one minimally")
        if any(intersection(self.inserted, c) for c in self.source.curves if c != self.removed):
            raise SurfaceError("inserted curve meets the rest of the decomposition")
        self.target.validate()

    def reverse(self) -> "ElementaryMove":
        return ElementaryMove(self.target, self.inserted, self.removed, self.genus_type)


@dataclass
class PantsPath:
    vertices: list[PantsDecomposition]
    jump_bound: int = 2
    moves: list[ElementaryMove] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.vertices) - 1

    @property
    def support(self) -> set[Curve]:
        out = set()
        for p in self.vertices:
            out.update(p.curves)
        return out

    def serialize(self) -> list[list[str]]:
        return [p.serialize() for p in self.vertices]


# the piece S_alpha -----------------------------------------------------------

@lru_cache(maxsize=100000)
def alpha_piece(p: PantsDecomposition, alpha: Curve) -> SubsurfaceSpec:
    """The complexity-one piece of S - (P - alpha) containing alpha (engine level)."""
    rest = Multicurve([c for c in p.curves if c != alpha])
    for y in engine_pieces(rest, p.surface):
        if y.complexity == 1 and slope_profile_kind(alpha, y) == "inside":
            return y
    raise SurfaceError("no complexity-one piece contains the curve")


def slope_profile_kind(c: Curve, y: SubsurfaceSpec) -> str:
    from .projection import slope_profile
    return slope_profile(c, y)[0]


def genus_type(p: PantsDecomposition, alpha: Curve) -> str:
    S = p.surface
    if S.closed:
        rest = Multicurve([c for c in p.curves if c != alpha])
        for y in cut_pieces(rest, S):
            if y.complexity == 1:
                return "genus1" if y.genus == 1 else "genus0"
    return "genus1" if alpha_piece(p, alpha).genus == 1 else "genus0"


def _cost_terms(y: SubsurfaceSpec, refs) -> list[tuple[int, tuple[int, int]]]:
    """Weighted slopes whose |det| against beta sum to i(beta, refs)."""
    from .projection import slope_profile
    terms = []
    for r in refs:
        kind, data = slope_profile(r, y)
        if kind == "inside":
            terms.append((y.frame.m, data))
        elif kind == "arcs":
            terms.extend((wt, t) for t, wt in data)
    return terms


def _twist_range(s, terms, cap: int, window: int):
    """Integers k with cost(base + k*s) <= cap, as (k_lo, k_hi) or None."""
    base = farey_base(s)
    lin = [(wt * det(base, t), wt * det(s, t)) for wt, t in terms]

    def cost(k):
        return sum(abs(c + k * d) for c, d in lin)

    moving = [(c, d) for c, d in lin if d]
    if not moving:
        if cost(0) > cap:
            return None, cost
        return (-window, window), cost
    pts = sorted({math.floor(-c / d) for c, d in moving} | {math.ceil(-c / d) for c, d in moving})
    kmin = min(pts, key=lambda k: (cost(k), abs(k), k))
    if cost(kmin) > cap:
        return None, cost
    lo = hi = kmin
    while cost(lo - 1) <= cap and kmin - lo < MAX_TWIST_SCAN:
        lo -= 1
    while cost(hi + 1) <= cap and hi - kmin < MAX_TWIST_SCAN:
        hi += 1
    return (lo, hi), cost


def elementary_moves(p: PantsDecomposition, cap: int, reference=None,
                     window: int = DEFAULT_TWIST_WINDOW) -> list[ElementaryMove]:
    """Moves whose inserted curve meets the reference at most ``cap`` times in total."""
    refs = tuple(sorted(set(reference if reference is not None else p.curves)))
    out = []
    for alpha in p.curves:
        for beta in _replacements(p, alpha, refs, cap, window):
            out.append(ElementaryMove(p, alpha, beta, genus_type(p, alpha)))
    out.sort(key=lambda m: (m.removed.coords, m.inserted.coords))
    return out


def _replacements(p: PantsDecomposition, alpha: Curve, refs, cap: int, window: int) -> list[Curve]:
    y = alpha_piece(p, alpha)
    s = slope_of(alpha, y)
    if p.surface.closed:
        return _closed_replacements(p, alpha, y, s, refs, cap, window)
    rng, _ = _twist_range(s, _cost_terms(y, refs), cap, window)
    if rng is None:
        return []
    r0, t0 = farey_base(s)
    return [curve_of_slope(y, (r0 + k * s[0], t0 + k * s[1])) for k in range(rng[0], rng[1] + 1)]


def _closed_replacements(p, alpha, y, s, refs, cap, window) -> list[Curve]:
    # quotient costs bound the lifted ones from below by a factor 1/2
    want = 1 if genus_type(p, alpha) == "genus1" else 2
    rng, _ = _twist_range(s, _cost_terms(y, refs), 2 * cap, 2 * window + 1)
    if rng is None:
        return []
    r0, t0 = farey_base(s)
    out = []
    for k in range(rng[0], rng[1] + 1):
        beta = curve_of_slope(y, (r0 + k * s[0], t0 + k * s[1]))
        if intersection(alpha, beta) != want:
            continue
        if sum(intersection(beta, r) for r in refs) <= cap:
            out.append(beta)
    return out


def total_intersection(a: PantsDecomposition, b: PantsDecomposition) -> int:
    return sum(intersection(x, y) for x in a.curves for y in b.curves)


# base decompositions ----------------------------------------------------------

@lru_cache(maxsize=None)
def standard_pants(S: Surface) -> PantsDecomposition:
    """A deterministic pants decomposition built by repeatedly cutting."""
    curves: list[Curve] = []
    while len(curves) < S.complexity:
        added = False
        for y in engine_pieces(Multicurve(curves), S) if curves else engine_pieces(Multicurve(), S):
            if y.complexity < 1:
                continue
            for curve in _candidate_curves(y):
                if curve not in curves:
                    curves.append(curve)
                    added = True
                    break
            if added:
                break
        if not added:
            raise SurfaceError(f"could not complete a pants decomposition of {S}")
    return PantsDecomposition(curves, S)


def _candidate_curves(y: SubsurfaceSpec):
    if y.complexity == 1:
        yield curve_of_slope(y, (1, 0))
        return
    from .projection import _graph_cycles
    G = y._piece.graph
    for c in _graph_cycles(G):
        if not W.is_peripheral(G, c):
            yield Curve.from_word(y.surface, y._piece.to_ambient(c))


def random_move(p: PantsDecomposition, rng, max_twist: int = 2) -> ElementaryMove:
    """A random elementary move with a twist drawn from [-max_twist, max_twist]."""
    alpha = rng.choice(p.curves)
    y = alpha_piece(p, alpha)
    s = slope_of(alpha, y)
    r0, t0 = farey_base(s)
    want = genus_type(p, alpha)
    for _ in range(50):
        k = rng.randint(-max_twist, max_twist)
        beta = curve_of_slope(y, (r0 + k * s[0], t0 + k * s[1]))
        if p.surface.closed and intersection(alpha, beta) != (1 if want == "genus1" else 2):
            continue
        return ElementaryMove(p, alpha, beta, want)
    raise SurfaceError("no admissible random move found")


def random_walk(p: PantsDecomposition, steps: int, rng, max_twist: int = 2,
                outward: bool = False, tries: int = 50) -> list[PantsDecomposition]:
    """A random move sequence; ``outward`` keeps only moves that raise i(., p)."""
    out = [p]
    for _ in range(steps):
        cur = out[-1]
        here = total_intersection(cur, p)
        for _ in range(tries):
            m = random_move(cur, rng, max_twist)
            if not outward or total_intersection(m.target, p) > here:
                break
        else:
            break
        out.append(m.target)
    return out



def continued_fraction_move(p: PantsDecomposition, alpha: Curve, terms) -> PantsDecomposition:
    """Replace alpha by the curve of its piece whose slope has these partial quotients.

    Long runs of small quotients give pairs far apart in one piece's curve
    graph, which is where the distance formula has nonzero terms.
    """
    y = alpha_piece(p, alpha)
    x = Fraction(terms[-1])
    for t in reversed(terms[:-1]):
        x = t + 1 / x
    beta = curve_of_slope(y, normalize(x.numerator, x.denominator))
    if beta == alpha:
        raise SurfaceError("continued fraction gives back the removed curve")
    return p.replace(alpha, beta)

# distances ------------------------------------------------------------------

CAP_SLACK = 2


def default_cap(a: PantsDecomposition, b: PantsDecomposition) -> int:
    return total_intersection(a, b) + CAP_SLACK


def lower_bound(a: PantsDecomposition, b: PantsDecomposition) -> int:
    """A certified lower bound on d_P(a, b).

    Every move changes one curve, and changes d_Y by at most 4 for every
    complexity-one piece Y met by both sides; at complexity one the pants
    graph is the Farey graph and the bound is the exact distance.
    """
    if a == b:
        return 0
    S = a.surface
    if S.complexity == 1:
        y = engine_pieces(Multicurve(), S)[0]
        return farey_distance(slope_of(a.curves[0], y), slope_of(b.curves[0], y))
    lb = len(set(a.curves) - set(b.curves))
    if S.closed:
        return lb
    from .projection import projection_distance
    for p, q in ((a, b), (b, a)):
        for alpha in p.curves:
            y = alpha_piece(p, alpha)
            d = projection_distance(list(p.curves), list(q.curves), y)
            if d.value is not None and d.certified:
                lb = max(lb, -(-d.value // 4))
    return lb


@dataclass
class _Search:
    parent: dict
    dist: dict
    frontier: list


def _neighbours_fn(a: PantsDecomposition, b: PantsDecomposition, cap: int, window: int):
    refs = tuple(sorted(set(a.curves) | set(b.curves)))
    S = a.surface
    if S.complexity == 1 and not S.closed:
        # states are slopes in the surface frame
        y = engine_pieces(Multicurve(), S)[0]
        m = y.frame.m
        ref_slopes = [slope_of(r, y) for r in refs]

        def to_state(p):
            return slope_of(p.curves[0], y)

        def from_state(s):
            return PantsDecomposition([curve_of_slope(y, s)], S, check=False)

        def neighbours(s):
            terms = [(m, t) for t in ref_slopes]
            rng, _ = _twist_range(s, terms, cap, window)
            if rng is None:
                return []
            r0, t0 = farey_base(s)
            return [normalize(r0 + k * s[0], t0 + k * s[1]) for k in range(rng[0], rng[1] + 1)]

        def key(s):
            return from_state(s).key()

        return to_state, from_state, neighbours, key

    def neighbours(p):
        return [mv.target for mv in elementary_moves(p, cap, refs, window)]

    return (lambda p: p), (lambda p: p), neighbours, (lambda p: p.key())


def _bidirectional(a, b, cap: int, budget: int, window: int):
    to_state, from_state, neighbours, key = _neighbours_fn(a, b, cap, window)
    sa, sb = to_state(a), to_state(b)
    sides = [_Search({sa: None}, {sa: 0}, [sa]), _Search({sb: None}, {sb: 0}, [sb])]
    expanded = 0
    keys: dict = {}

    def k(s):
        if s not in keys:
            keys[s] = key(s)
        return keys[s]

    while sides[0].frontier and sides[1].frontier:
        side = 0 if len(sides[0].frontier) <= len(sides[1].frontier) else 1
        me, other = sides[side], sides[1 - side]
        nxt = []
        meets = []
        for s in sorted(me.frontier, key=k):
            if expanded >= budget:
                return None, expanded, sides, from_state, k
            expanded += 1
            for t in sorted(neighbours(s), key=k):
                if t in me.dist:
                    continue
                me.dist[t] = me.dist[s] + 1
                me.parent[t] = s
                nxt.append(t)
                if t in other.dist:
                    meets.append(t)
        me.frontier = nxt
        if meets:
            best = min(meets, key=lambda t: (sides[0].dist[t] + sides[1].dist[t], k(t)))
            return best, expanded, sides, from_state, k
    return None, expanded, sides, from_state, k


def _assemble(meet, sides, from_state):
    left = []
    s = meet
    while s is not None:
        left.append(s)
        s = sides[0].parent[s]
    left.reverse()
    s = sides[1].parent[meet]
    while s is not None:
        left.append(s)
        s = sides[1].parent[s]
    return [from_state(s) for s in left]


def pants_distance(a: PantsDecomposition, b: PantsDecomposition, budget: int = 2000,
                   cap: int | None = None, window: int = DEFAULT_TWIST_WINDOW) -> dict:
    """{"exact": d} when the capped bidirectional search closes, else bounds."""
    res, _ = _distance_and_path(a, b, budget, cap, window)
    return res


def _distance_and_path(a, b, budget, cap, window):
    if a.surface != b.surface:
        raise SurfaceError("decompositions on different surfaces")
    if a == b:
        return {"exact": 0, "lower_bound": 0, "upper_bound": 0, "certified": True, "cap": 0}, [a]
    if cap is None:
        cap = default_cap(a, b)
    lb = lower_bound(a, b)
    meet, expanded, sides, from_state, _ = _bidirectional(a, b, cap, budget, window)
    if meet is None:
        ub = _greedy_upper(a, b)
        return {"lower_bound": lb, "upper_bound": ub, "cap": cap, "expanded": expanded}, None
    path = _assemble(meet, sides, from_state)
    d = len(path) - 1
    if d < lb:
        raise AssertionError("search found a path shorter than the certified lower bound")
    return {"exact": d, "lower_bound": lb, "upper_bound": d, "certified": d == lb, "cap": cap,
            "expanded": expanded}, path


def _greedy_upper(a, b, limit: int = 64):
    """Length of a path that lowers i(., b) at every move, if one is found."""
    cur = a
    refs = tuple(b.curves)
    for step in range(limit):
        if cur == b:
            return step
        best = None
        for alpha in cur.curves:
            if alpha in b.curves:
                continue
            y = alpha_piece(cur, alpha)
            s = slope_of(alpha, y)
            terms = _cost_terms(y, refs)
            now = sum(wt * abs(det(s, t)) for wt, t in terms)
            rng, cost = _twist_range(s, terms, now - 1, 0)
            if rng is None:
                continue
            k = min(range(rng[0], rng[1] + 1), key=lambda k: (cost(k), abs(k), k))
            gain = now - cost(k)
            if best is None or gain > best[0]:
                r0, t0 = farey_base(s)
                best = (gain, alpha, curve_of_slope(y, (r0 + k * s[0], t0 + k * s[1])))
        if best is None:
            return None
        cur = cur.replace(best[1], best[2])
    return None


def pants_geodesic(a: PantsDecomposition, b: PantsDecomposition, budget: int = 2000,
                   cap: int | None = None, window: int = DEFAULT_TWIST_WINDOW) -> PantsPath:
    res, path = _distance_and_path(a, b, budget, cap, window)
    if path is None:
        raise SurfaceError(f"search did not close within budget: {res}")
    moves = []
    for x, y in zip(path, path[1:]):
        (old,) = set(x.curves) - set(y.curves)
        (new,) = set(y.curves) - set(x.curves)
        mv = ElementaryMove(x, old, new, genus_type(x, old))
        moves.append(mv)
    return PantsPath(path, 2, moves)
