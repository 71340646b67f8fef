"""Subsurface projections and curve-graph distances inside subsurfaces."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from . import words as W
from .cutting import fine_to_coarse, lift_arcs, surgery_words
from .ribbon import reduce_cyclic
from .slopes import det, normalize
from .surface import Curve, Multicurve, SubsurfaceSpec, SurfaceError, cut_pieces, intersection


@dataclass(frozen=True)
class ProjectionSet:
    curves: tuple[Curve, ...]

    @property
    def empty(self) -> bool:
        return not self.curves

    @property
    def status(self) -> str:
        return "empty" if self.empty else "defined"

    def __iter__(self):
        return iter(self.curves)

    def __len__(self):
        return len(self.curves)


def _check_piece(y: SubsurfaceSpec) -> None:
    if y._piece is None:
        raise SurfaceError("projections are only implemented on punctured surfaces")
    if y.complexity < 1:
        raise SurfaceError("pairs of pants carry no curves to project to")


@lru_cache(maxsize=200000)
def _profile(a: Curve, y: SubsurfaceSpec):
    """How a sits in y as piece words.

    ("inside", (word,)), ("empty", ()) or ("arcs", ((words, same_side), ...))
    listing the essential surgery curves of each essential arc; same_side
    records whether the arc returns to the boundary component it left.
    """
    _check_piece(y)
    if a.surface != y.surface:
        raise SurfaceError("curve and subsurface on different surfaces")
    if a in y.boundary_curves or a in y.boundary:
        return "empty", ()
    cut, piece = y._cut, y._piece
    kind, data = lift_arcs(cut, piece, a.word)
    G = piece.graph
    if kind == "inside":
        pw = reduce_cyclic(fine_to_coarse(piece, cut, data))
        if W.is_peripheral(G, pw):
            return "empty", ()
        return "inside", (pw,)
    out = []
    done: dict = {}
    for arc in data:
        key = arc.signature(cut, piece)
        if key not in done:
            found = []
            for fw in surgery_words(cut, arc):
                cw = fine_to_coarse(piece, cut, fw) if fw else None
                if not cw:
                    continue
                cw = reduce_cyclic(cw)
                if cw and not W.is_peripheral(G, cw) and not W.self_intersection(G, cw):
                    found.append(cw)
            done[key] = tuple(found)
        if done[key]:
            out.append((done[key], arc.same_side))
    if not out:
        return "empty", ()
    return "arcs", tuple(out)


def project(a: Curve | Multicurve | list, y: SubsurfaceSpec) -> ProjectionSet:
    """pi_Y of a curve or of a collection of curves."""
    if not isinstance(a, Curve):
        found = set()
        for c in a:
            found.update(project(c, y).curves)
        return ProjectionSet(tuple(sorted(found)))
    kind, words = _profile(a, y)
    if kind == "empty":
        return ProjectionSet(())
    if kind == "inside":
        return ProjectionSet((a,))
    piece = y._piece
    found = {Curve.from_word(y.surface, piece.to_ambient(w)) for ws, _ in words for w in ws}
    return ProjectionSet(tuple(sorted(found)))


def piece_word(c: Curve, y: SubsurfaceSpec):
    kind, words = _profile(c, y)
    if kind != "inside":
        raise SurfaceError("curve is not contained in the subsurface")
    return words[0]


# slopes in complexity-one pieces ------------------------------------------

@lru_cache(maxsize=200000)
def slope_profile(c: Curve, y: SubsurfaceSpec):
    """("inside", slope), ("empty", ()) or ("arcs", ((slope, weight), ...)).

    An arc meets the curve of slope s in weight * |det| points: the weight
    is m for an arc returning to its own boundary component, 1 otherwise.
    """
    kind, words = _profile(c, y)
    F = y.frame
    if kind == "inside":
        return "inside", F.slope(words[0])
    if kind == "empty":
        return "empty", ()
    arcs = tuple((F.slope(ws[0]), F.m if same else 1) for ws, same in words)
    return "arcs", arcs


def slope_intersection(s, c: Curve, y: SubsurfaceSpec) -> int:
    """i(curve of slope s in y, c) from the arc data of c."""
    kind, data = slope_profile(c, y)
    if kind == "inside":
        return y.frame.m * abs(det(s, data))
    if kind == "empty":
        return 0
    return sum(wt * abs(det(s, t)) for t, wt in data)


def curve_of_slope(y: SubsurfaceSpec, s) -> Curve:
    return Curve.from_word(y.surface, y._piece.to_ambient(y.frame.word(normalize(*s))))


def slope_of(c: Curve, y: SubsurfaceSpec):
    kind, data = slope_profile(c, y)
    if kind != "inside":
        raise SurfaceError("curve is not contained in the subsurface")
    return data


# Farey distance ------------------------------------------------------------

def farey_distance(a, b) -> int:
    """Exact distance in the Farey graph, by search inside the ladder."""
    a, b = normalize(*a), normalize(*b)
    if a == b:
        return 0
    if abs(det(a, b)) == 1:
        return 1
    ladder = farey_ladder(a, b)
    adj = {v: [u for u in ladder if abs(det(u, v)) == 1] for v in ladder}
    dist = {a: 0}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                if u == b:
                    return dist[u]
                queue.append(u)
    raise AssertionError("ladder is disconnected")


def farey_ladder(a, b) -> list[tuple[int, int]]:
    """Vertices of the Farey triangles crossed by the geodesic from a to b."""
    p, q = a
    # M sends a to 1/0
    if q == 0:
        r, t = 0, 1
    else:
        from .slopes import farey_base
        r, t = farey_base(a)
    # columns of M^-1 are a and (r, t); M = [[t, -r], [-q, p]]
    def fwd(v):
        return (t * v[0] - r * v[1], -q * v[0] + p * v[1])

    def back(v):
        return normalize(p * v[0] + r * v[1], q * v[0] + t * v[1])

    x, y = fwd(b)
    if y < 0:
        x, y = -x, -y
    fl = x // y
    left, right = (fl, 1), (fl + 1, 1)
    verts = [(1, 0), left, right]
    while True:
        med = (left[0] + right[0], left[1] + right[1])
        if med[1] > y:
            break
        verts.append(med)
        if med[0] * y == x * med[1]:
            break
        if x * med[1] < med[0] * y:
            right = med
        else:
            left = med
    if (x // 1, y) not in verts and y == 1:
        verts.append((x, 1))
    return sorted({back(v) for v in verts})


# curve-graph distance in a subsurface ---------------------------------------

@dataclass(frozen=True)
class DY:
    value: int | None
    status: str  # "defined", "empty" or "unknown"
    certified: bool = True
    lower: int = 0

    def __int__(self):
        if self.value is None:
            raise ValueError(f"d_Y is {self.status}")
        return self.value


def _pair_distance(a: Curve, b: Curve, y: SubsurfaceSpec, budget: int):
    """(distance, certified) between curves of y in C(y)."""
    if a == b:
        return 0, True
    if y.complexity == 1:
        return farey_distance(slope_of(a, y), slope_of(b, y)), True
    if intersection(a, b) == 0:
        return 1, True
    if _has_common_disjoint(a, b, y):
        return 2, True
    return _capped_search(a, b, y, budget)


def _inner_pieces(a: Curve, y: SubsurfaceSpec) -> list[SubsurfaceSpec]:
    """Pieces of y minus a, as pieces of the surface cut along boundary plus a."""
    bd = set(y.boundary_curves) | {a}
    out = []
    for z in cut_pieces(Multicurve(bd), y.surface):
        if z.complexity < 1:
            continue
        inside = True
        # z lies in y when its interior curves project into y
        probe = _some_curve(z)
        if probe is None or project(probe, y).curves != (probe,):
            inside = False
        if inside:
            out.append(z)
    return out


def _some_curve(z: SubsurfaceSpec) -> Curve | None:
    if z.complexity == 1:
        return curve_of_slope(z, (1, 0))
    G = z._piece.graph
    for c in _graph_cycles(G):
        if not W.is_peripheral(G, c):
            return Curve.from_word(z.surface, z._piece.to_ambient(c))
    return None


def _graph_cycles(G):
    found = []
    for d0 in range(G.n_darts):
        stack = [(d0, (d0,), frozenset([G.vert[d0]]))]
        while stack:
            d, path, seen = stack.pop()
            v = G.head(d)
            if v == G.vert[d0]:
                found.append(path)
                continue
            if v in seen:
                continue
            for x in (G.sigma[d ^ 1], G.sigma[G.sigma[d ^ 1]]):
                stack.append((x, path + (x,), seen | {v}))
    uniq = {W.canonical_word(p): p for p in found}
    return [uniq[k] for k in sorted(uniq, key=lambda k: (len(k), k))]


def _has_common_disjoint(a: Curve, b: Curve, y: SubsurfaceSpec) -> bool:
    """Is some curve of y disjoint from both a and b?"""
    for z in _inner_pieces(a, y):
        pb = project(b, z)
        if pb.empty:
            return True
        if z.complexity == 1:
            if any(intersection(c, b) == 0 for c in pb.curves):
                return True
        else:
            if any(intersection(c, b) == 0 for c in pb.curves):
                return True
    return False


def _capped_search(a: Curve, b: Curve, y: SubsurfaceSpec, budget: int):
    """Breadth-first search through curves disjoint from the current one.

    Neighbours are drawn from projections of b to the complementary pieces,
    which keeps the search finite; the result is an upper bound, certified
    only when it matches the lower bound of 3.
    """
    frontier = {a}
    dist = {a: 0}
    expanded = 0
    while frontier and expanded < budget:
        nxt = set()
        for x in sorted(frontier):
            expanded += 1
            for z in _inner_pieces(x, y):
                cands = set(project(b, z).curves)
                for c in cands:
                    if c == b or intersection(c, b) == 0:
                        d = dist[x] + 1 + (0 if c == b else 1)
                        return d, d <= 3
                    if c not in dist:
                        dist[c] = dist[x] + 1
                        nxt.add(c)
        frontier = nxt
    return None, False


def projection_distance(p, q, y: SubsurfaceSpec, budget: int = 200) -> DY:
    """Diameter of pi_Y(p) union pi_Y(q) in the curve graph of y."""
    pp = project(list(p) if not isinstance(p, Curve) else [p], y)
    pq = project(list(q) if not isinstance(q, Curve) else [q], y)
    if pp.empty or pq.empty:
        return DY(None, "empty", True, 0)
    pts = sorted(set(pp.curves) | set(pq.curves))
    best = 0
    certified = True
    for a, b in combinations(pts, 2):
        d, cert = _pair_distance(a, b, y, budget)
        if d is None:
            return DY(None, "unknown", False, max(best, 3))
        certified &= cert
        best = max(best, d)
    return DY(best, "defined", certified, best if certified else 2)


# distance formula -------------------------------------------------------------

def _candidate_curves(a, b, search_cap: int) -> list[Curve]:
    """Curves of a and b and their mutual projections, capped against a union b."""
    refs = sorted(set(a) | set(b))
    S = refs[0].surface
    found = set(refs)
    for p, q in ((a, b), (b, a)):
        rest = list(p)
        for alpha in rest:
            for y in cut_pieces(Multicurve([c for c in rest if c != alpha]), S):
                if y.complexity >= 1 and y._piece is not None:
                    found.update(project(list(q), y).curves)
    out = [c for c in found if sum(intersection(c, r) for r in refs) <= search_cap]
    return sorted(out)


def candidate_subsurfaces(a, b, search_cap: int) -> list[SubsurfaceSpec]:
    """Essential non-pants pieces cut out by single candidate curves, plus S."""
    curves = list(a) + list(b)
    S = curves[0].surface
    if S.closed:
        raise SurfaceError("subsurface enumeration is only implemented on punctured surfaces")
    out = {}
    whole = cut_pieces(Multicurve(), S)[0]
    out[(whole.boundary, whole.piece_id)] = whole
    for c in _candidate_curves(a, b, search_cap):
        for y in cut_pieces(Multicurve([c]), S):
            if y.complexity >= 1:
                out[(y.boundary, y.piece_id)] = y
    return list(out.values())


@dataclass
class FormulaEstimate:
    sum: int
    witnesses: list = field(default_factory=list)
    threshold: int = 5
    search_cap: int = 0
    examined: int = 0
    complete: bool = False

    def as_dict(self) -> dict:
        return {
            "sum": self.sum,
            "threshold": self.threshold,
            "search_cap": self.search_cap,
            "subsurfaces_examined": self.examined,
            "complete": self.complete,
            "witnesses": [dict(y.describe(), d_Y=d) for y, d in self.witnesses],
        }


def distance_formula_estimate(a, b, threshold: int = 5, search_cap: int | None = None,
                              budget: int = 200) -> FormulaEstimate:
    """Sum of d_Y(a, b) over discovered subsurfaces Y with d_Y > threshold.

    Only certified values enter the sum, so raising the cap can only add
    terms.  ``complete`` is never claimed: the candidate family is finite
    while the set of subsurfaces is not.
    """
    if threshold < 5:
        raise ValueError("threshold must be at least 5")
    a, b = list(a), list(b)
    if search_cap is None:
        search_cap = sum(intersection(x, y) for x in a for y in b)
    total = 0
    witnesses = []
    ys = candidate_subsurfaces(a, b, search_cap)
    for y in ys:
        d = projection_distance(a, b, y, budget)
        if d.value is None or not d.certified:
            continue
        if d.value > threshold:
            total += d.value
            witnesses.append((y, d.value))
    return FormulaEstimate(total, witnesses, threshold, search_cap, len(ys), False)


# session constants ----------------------------------------------------------

@dataclass
class SessionConstants:
    """Empirical constants accumulated over a session of samples.

    ``k0`` is the largest observed d_P / |support| ratio; ``pairs`` holds
    (d_P, estimator sum) samples for the comparability fit.
    """
    k0: float = 0.0
    ratios: list = field(default_factory=list)
    pairs: list = field(default_factory=list)

    def add_ratio(self, r: float) -> None:
        self.ratios.append(r)
        self.k0 = max(self.k0, r)

    def add_pair(self, d: int, s: int) -> None:
        self.pairs.append((d, s))

    def fit_comparability(self, slopes=(1, 2, 3, 4)) -> tuple[int, int]:
        """Smallest (c0, c1), c1 first, with d <= c0*s + c1 and s <= c0*d + c1 on all pairs."""
        if not self.pairs:
            return 1, 0
        best = None
        for c0 in slopes:
            c1 = max(max(d - c0 * s, s - c0 * d) for d, s in self.pairs)
            c1 = max(c1, 0)
            if best is None or (c1, c0) < (best[1], best[0]):
                best = (c0, c1)
        return best

    def as_dict(self) -> dict:
        c0, c1 = self.fit_comparability()
        return {
            "K0": self.k0,
            "support_samples": len(self.ratios),
            "c0": c0,
            "c1": c1,
            "comparability_samples": len(self.pairs),
            "provenance": "empirical fit",
        }


def support_bound_report(path, budget: int = 2000, session: SessionConstants | None = None) -> dict:
    """Endpoint distance against the number of curves used along a path."""
    from .pantsgraph import pants_distance  # pantsgraph depends on this module
    a, b = path.vertices[0], path.vertices[-1]
    d = pants_distance(a, b, budget)
    support = len(path.support)
    if d.get("exact") is not None:
        dist = d["exact"]
    else:
        # the path itself is a witness
        dist = min(x for x in (d.get("upper_bound"), len(path)) if x is not None)
    ratio = dist / support if support else 0.0
    if session is not None:
        session.add_ratio(ratio)
    return {
        "distance": dist,
        "distance_lb": d["lower_bound"],
        "exact": d.get("exact") is not None,
        "support_size": support,
        "ratio": ratio,
        "K0": session.k0 if session is not None else ratio,
    }
