"""Hyperbolic structures from Fenchel-Nielsen coordinates.

Punctured surfaces are realised through shear coordinates on the ideal
triangulation dual to the engine graph: a closed edge path has holonomy
given by an edge matrix for each edge crossed and a turn matrix at each
vertex.  Shears summing to zero around every face make the cusps parabolic
and give a complete finite-area structure.

Fenchel-Nielsen twists are measured against a dual curve beta_i for each
pants curve alpha_i.  Along the Dehn-twist orbit of beta_i the traces
satisfy tr(tau^k beta) = C + 2 sqrt(PQ) cosh(kappa (k l + theta)), with
kappa = 1/2 in a one-holed torus and 1 in a four-holed sphere; theta is
the twist.  It vanishes when tau(beta) and tau^-1(beta) have equal length
and grows by l(alpha) per Dehn twist of the marking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import least_squares

from .pantsgraph import PantsDecomposition, alpha_piece, pants_distance
from .projection import curve_of_slope, slope_intersection, slope_of
from .slopes import farey_base, normalize
from .surface import Curve, Surface, SurfaceError, dehn_twist, engine_graph

TURN = np.array([[0.0, -1.0], [1.0, 1.0]])
TURN_BACK = np.linalg.inv(TURN)
# traces above this overflow the double-precision length computation
MAX_TRACE = 1e150


class HolonomyRangeError(ArithmeticError):
    """Lengths too large or too small to represent."""


def edge_matrix(s: float) -> np.ndarray:
    h = math.exp(s / 2)
    return np.array([[0.0, h], [-1.0 / h, 0.0]])


def length_from_trace(t: float) -> float:
    t = abs(t)
    if not math.isfinite(t) or t > MAX_TRACE:
        raise HolonomyRangeError("trace overflow")
    if t < 2:
        if t > 2 - 1e-9:
            return 0.0
        raise SurfaceError("elliptic element has no geodesic length")
    return 2 * math.acosh(t / 2)


def trace_from_length(length: float) -> float:
    if length <= 0:
        raise ValueError("lengths must be positive")
    if length / 2 > 700:
        raise HolonomyRangeError("cosh overflow")
    return 2 * math.cosh(length / 2)


# shear holonomy ----------------------------------------------------------------

class ShearStructure:
    """A complete hyperbolic structure given by edge shears."""

    def __init__(self, surface: Surface, shears):
        if surface.closed:
            raise SurfaceError("shear coordinates need a punctured surface")
        self.surface = surface
        self.G = engine_graph(surface)
        self.shears = np.asarray(shears, dtype=float)
        if self.shears.shape != (self.G.n_edges,):
            raise ValueError(f"expected {self.G.n_edges} shears")
        self._edges = [edge_matrix(s) for s in self.shears]

    def matrix(self, word) -> np.ndarray:
        G = self.G
        n = len(word)
        M = np.eye(2)
        for i, d in enumerate(word):
            nxt = word[(i + 1) % n]
            turn = TURN if nxt == G.sigma[d ^ 1] else TURN_BACK
            M = M @ self._edges[d >> 1] @ turn
        return M

    def trace(self, word) -> float:
        return float(np.trace(self.matrix(word)))

    def length(self, c: Curve) -> float:
        return length_from_trace(self.trace(c.word))

    def cusp_residual(self) -> float:
        return max(abs(abs(self.trace(f)) - 2) for f in self.G.faces)

    def holonomy(self) -> "Holonomy":
        G = self.G
        gens = {name: self.based_matrix(word, 0) for name, word in _generators(G).items()}
        res = max((abs(np.linalg.det(m) - 1) for m in gens.values()), default=0.0)
        # peripheral loops conjugated back to the base frame must stay parabolic
        for f in G.faces:
            d = f[0]
            lead = _tree_path(G, G.vert[d])
            loop = lead + list(f) + [x ^ 1 for x in reversed(lead)]
            res = max(res, abs(abs(np.trace(self.based_matrix(loop, 0))) - 2))
        if G.genus == 1 and len(gens) == 2:
            A, B = gens["g0"], gens["g1"]
            comm = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
            res = max(res, abs(np.trace(comm) + 2))
        return Holonomy(gens, res, self.cusp_residual())

    def _turn(self, d_in: int, d_out: int) -> np.ndarray:
        """Rotation inside a triangle from the side of outgoing dart d_in to d_out."""
        M = np.eye(2)
        x = d_in
        while x != d_out:
            M = M @ TURN
            x = self.G.sigma[x]
        return M

    def based_matrix(self, path, base: int) -> np.ndarray:
        """Holonomy of a closed dart path leaving and returning to the tail of ``base``.

        Frames are attached to outgoing darts; the result is expressed in the
        frame of ``base`` so that products of based loops are meaningful.
        """
        if not path:
            return np.eye(2)
        M = self._turn(base, path[0])
        for i, d in enumerate(path):
            M = M @ self._edges[d >> 1]
            nxt = path[i + 1] if i + 1 < len(path) else base
            M = M @ self._turn(d ^ 1, nxt)
        return M


def _tree_path(G, v: int) -> list[int]:
    """Darts of the breadth-first spanning tree from the root vertex to v."""
    parent = _spanning_tree(G)
    out = []
    while parent[v] is not None:
        d = parent[v]
        out.append(d)
        v = G.vert[d]
    return out[::-1]


def _spanning_tree(G) -> dict:
    from collections import deque
    root = G.vert[0]
    parent: dict[int, int | None] = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for d in G.darts_at[v]:
            w = G.head(d)
            if w not in parent:
                parent[w] = d
                queue.append(w)
    return parent


def _generators(G) -> dict[str, tuple[int, ...]]:
    """Free generators of the fundamental group as closed dart paths based at the root."""
    parent = _spanning_tree(G)
    tree = {d >> 1 for d in parent.values() if d is not None}
    gens = {}
    for e in range(G.n_edges):
        if e in tree:
            continue
        d = 2 * e
        p = _tree_path(G, G.vert[d]) + [d] + [x ^ 1 for x in reversed(_tree_path(G, G.head(d)))]
        gens[f"g{len(gens)}"] = tuple(p)
    return gens


@dataclass
class Holonomy:
    generators: dict
    relator_residual: float
    cusp_residual: float

    def as_dict(self) -> dict:
        return {
            "generators": {k: np.asarray(v).tolist() for k, v in self.generators.items()},
            "relator_residual": self.relator_residual,
            "cusp_residual": self.cusp_residual,
        }


def square_torus() -> ShearStructure:
    """The punctured torus glued from an ideal square: all shears zero."""
    S = Surface(1, 1)
    return ShearStructure(S, np.zeros(engine_graph(S).n_edges))


# Fenchel-Nielsen coordinates ---------------------------------------------------

@dataclass(frozen=True)
class FNPoint:
    base: PantsDecomposition
    lengths: tuple[float, ...]
    twists: tuple[float, ...]

    def __post_init__(self):
        n = len(self.base.curves)
        if len(self.lengths) != n or len(self.twists) != n:
            raise ValueError("one length and one twist per pants curve")
        if any(not (x > 0) for x in self.lengths):
            raise ValueError("lengths must be positive")

    @property
    def surface(self) -> Surface:
        return self.base.surface

    def as_dict(self) -> dict:
        return {c.serialize(): {"length": l, "twist": t}
                for c, l, t in zip(self.base.curves, self.lengths, self.twists)}

    @cached_property
    def structure(self) -> ShearStructure:
        return shears_from_fn(self)


def dual_curve(p: PantsDecomposition, alpha: Curve) -> Curve:
    """The twist-zero reference curve crossing alpha minimally inside S_alpha."""
    y = alpha_piece(p, alpha)
    return curve_of_slope(y, farey_base(slope_of(alpha, y)))


def marking(p: PantsDecomposition) -> list[Curve]:
    return list(p.curves) + [dual_curve(p, a) for a in p.curves]


def _twist_words(p: PantsDecomposition):
    out = []
    for alpha in p.curves:
        beta = dual_curve(p, alpha)
        kappa = 0.5 if alpha_piece(p, alpha).genus == 1 else 1.0
        orbit = [dehn_twist(beta, alpha, k).word for k in (-1, 0, 1)]
        out.append((alpha.word, orbit, kappa))
    return out


def _fn_of(struct: ShearStructure, twist_words) -> tuple[list[float], list[float]]:
    lengths, twists = [], []
    for aw, orbit, kappa in twist_words:
        la = length_from_trace(struct.trace(aw))
        fm, f0, fp = (abs(struct.trace(w)) for w in orbit)
        u = math.exp(kappa * la)
        plus = (fp + fm - 2 * f0) / (u + 1 / u - 2)
        minus = (fp - fm) / (u - 1 / u)
        P, Q = (plus + minus) / 2, (plus - minus) / 2
        if P <= 0 or Q <= 0:
            raise HolonomyRangeError("twist orbit traces are not of cosh type")
        lengths.append(la)
        twists.append(math.log(P / Q) / (2 * kappa))
    return lengths, twists


def fn_coordinates(struct: ShearStructure, base: PantsDecomposition) -> FNPoint:
    lengths, twists = _fn_of(struct, _twist_words(base))
    return FNPoint(base, tuple(lengths), tuple(twists))


def _cusp_nullspace(G) -> np.ndarray:
    C = np.zeros((G.n_faces, G.n_edges))
    for i, f in enumerate(G.faces):
        for d in f:
            C[i, d >> 1] += 1
    _, s, vt = np.linalg.svd(C)
    rank = int((s > 1e-9).sum())
    return vt[rank:].T


def shears_from_fn(x: FNPoint, tol: float = 1e-12) -> ShearStructure:
    """Solve for cusp-compatible shears realising the FN point."""
    S = x.surface
    if S.closed:
        raise SurfaceError("holonomy is implemented for punctured surfaces only")
    G = engine_graph(S)
    N = _cusp_nullspace(G)
    words = _twist_words(x.base)
    target = np.array(list(x.lengths) + list(x.twists))
    for l in x.lengths:
        trace_from_length(l)

    def resid(u):
        try:
            ls, ts = _fn_of(ShearStructure(S, N @ u), words)
        except (HolonomyRangeError, SurfaceError, OverflowError):
            return np.full(len(target), 1e6)
        return np.array(ls + ts) - target

    # continuation from the structure with zero shears
    u = np.zeros(N.shape[1])
    start = np.array(list(_fn_of(ShearStructure(S, N @ u), words)[0]) +
                     list(_fn_of(ShearStructure(S, N @ u), words)[1]))
    for frac in (0.25, 0.5, 0.75, 1.0):
        goal = start + frac * (target - start)

        def r(u, goal=goal):
            return resid(u) + target - goal

        sol = least_squares(r, u, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        u = sol.x
    res = np.max(np.abs(resid(u)))
    if not res < 1e-9:
        raise HolonomyRangeError(f"could not realise the FN point (residual {res:.2e})")
    return ShearStructure(S, N @ u)


def holonomy_from_fn(x: FNPoint) -> Holonomy:
    return x.structure.holonomy()


def curve_length(x: FNPoint | ShearStructure, a: Curve) -> float:
    struct = x if isinstance(x, ShearStructure) else x.structure
    return struct.length(a)


def random_fn_point(base: PantsDecomposition, rng, lengths=(0.5, 3.0), twists=(-2.0, 2.0)) -> FNPoint:
    n = len(base.curves)
    return FNPoint(base, tuple(rng.uniform(*lengths) for _ in range(n)),
                   tuple(rng.uniform(*twists) for _ in range(n)))


# pairs of pants and figure-eight curves -----------------------------------------

def pants_group(l1: float, l2: float, l3: float) -> tuple[np.ndarray, np.ndarray]:
    """Generators A, B of a pants group with A, B, (AB)^-1 the cuffs.

    tr A = x, tr B = y and tr AB = -z with x, y, z = 2 cosh(l_i/2); the sign
    of tr AB is what makes the group discrete with three boundary cuffs.
    """
    x, y, z = (trace_from_length(l) for l in (l1, l2, l3))
    lam = (x + math.sqrt(x * x - 4)) / 2
    A = np.array([[lam, 0.0], [0.0, 1 / lam]])
    # B = [[a, b], [c, y - a]] with tr AB = lam a + (y - a)/lam = -z
    a = (-z - y / lam) / (lam - 1 / lam)
    d = y - a
    # b c = a d - 1; take b = 1
    B = np.array([[a, 1.0], [a * d - 1, d]])
    return A, B


def figure8_traces(l1: float, l2: float, l3: float) -> list[float]:
    x, y, z = (trace_from_length(l) for l in (l1, l2, l3))
    return [x * y + z, y * z + x, z * x + y]


def figure8_length(l1: float, l2: float, l3: float) -> float:
    """Shortest figure-eight geodesic in the pair of pants with these cuffs."""
    return min(length_from_trace(t) for t in figure8_traces(l1, l2, l3))


def figure8_length_from_group(l1: float, l2: float, l3: float) -> float:
    """The same length read off holonomy words A B^-1, B C^-1, C A^-1."""
    A, B = pants_group(l1, l2, l3)
    C = np.linalg.inv(A @ B)
    words = [A @ np.linalg.inv(B), B @ np.linalg.inv(C), C @ np.linalg.inv(A)]
    return min(length_from_trace(float(np.trace(w))) for w in words)


def figure8_bound(level: float) -> float:
    """Largest figure-eight length over cuffs of length at most ``level``."""
    x = trace_from_length(level)
    return length_from_trace(x * x + x)


def empirical_figure8_sup(level: float, samples: int = 2000, rng=None) -> float:
    """Sweep cuffs in (0, level] and return the largest figure-eight length seen."""
    rng = rng or np.random.default_rng(0)
    best = 0.0
    for l in rng.uniform(1e-3, level, size=(samples, 3)):
        best = max(best, figure8_length(*l))
    return max(best, figure8_length(level, level, level))


# short pants and Weil-Petersson estimates ---------------------------------------

@dataclass(frozen=True)
class LevelSetSpec:
    pants: PantsDecomposition
    level: float

    def contains(self, x: FNPoint | ShearStructure) -> bool:
        return max(curve_length(x, a) for a in self.pants.curves) < self.level


class ShortPantsError(RuntimeError):
    pass


def _slope_candidates(p: PantsDecomposition, refs, cap: int) -> set[Curve]:
    out = set(p.curves)
    for alpha in p.curves:
        y = alpha_piece(p, alpha)
        for q in range(0, cap + 1):
            for r in range(-cap, cap + 1):
                if math.gcd(q, r) != 1:
                    continue
                s = normalize(r, q)
                if sum(slope_intersection(s, c, y) for c in refs) <= cap:
                    out.add(curve_of_slope(y, s))
    return out


def short_pants(x: FNPoint, level: float, cap: int = 12, rounds: int = 20) -> PantsDecomposition:
    """A decomposition with every curve shorter than ``level``.

    Coordinate descent: each curve is replaced by the shortest curve of its
    complexity-one piece whose intersection with the marking of x is at most
    ``cap``.
    """
    struct = x.structure
    refs = marking(x.base)
    cur = x.base
    for _ in range(rounds):
        changed = False
        for alpha in list(cur.curves):
            if alpha not in cur.curves:
                continue
            y = alpha_piece(cur, alpha)
            best = (struct.length(alpha), alpha.coords, alpha)
            for q in range(0, cap + 1):
                for r in range(-cap, cap + 1):
                    if math.gcd(q, r) != 1:
                        continue
                    s = normalize(r, q)
                    if sum(slope_intersection(s, c, y) for c in refs) > cap:
                        continue
                    c = curve_of_slope(y, s)
                    cand = (struct.length(c), c.coords, c)
                    if cand[:2] < best[:2]:
                        best = cand
            if best[2] != alpha:
                cur = cur.replace(alpha, best[2])
                changed = True
        if not changed:
            break
    lengths = [struct.length(a) for a in cur.curves]
    if max(lengths) >= level:
        raise ShortPantsError(f"no decomposition below level {level} within intersection cap {cap} "
                              f"(best has max length {max(lengths):.6f})")
    cur.validate()
    return cur


def wolpert_pinch_bound(total_length: float) -> float:
    if total_length < 0:
        raise ValueError("length must be non-negative")
    return math.sqrt(2 * math.pi * total_length)


def coarse_wp_distance(x: FNPoint, y: FNPoint, level: float, budget: int = 2000, cap: int = 12) -> dict:
    if x.surface != y.surface:
        raise SurfaceError("points on different surfaces")
    px = short_pants(x, level, cap)
    py = short_pants(y, level, cap)
    res = pants_distance(px, py, budget)
    slack = 2 * wolpert_pinch_bound(len(px.curves) * level)
    return {"pants_distance": res, "diameter_slack": slack,
            "short_pants": [px.serialize(), py.serialize()]}
