"""Slope coordinates on complexity-one pieces (S_{1,1} and S_{0,4}).

In a frame (mu, lam, nu) with mu = 1/0, lam = 0/1, nu = 1/1 the curve
p/q meets mu in m|q| points and lam in m|p| points, where m is 1 on the
punctured torus and 2 on the four-holed sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd

from .ribbon import RibbonGraph
from .words import CoordinateError, canonical_word, dehn_twist, intersection, is_peripheral, trace


def normalize(p: int, q: int) -> tuple[int, int]:
    g = gcd(p, q)
    if g == 0:
        raise ValueError("0/0 is not a slope")
    p, q = p // g, q // g
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    return p, q


def det(a, b) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _egcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def farey_base(s) -> tuple[int, int]:
    """Some slope r/t with det(s, r/t) = 1."""
    p, q = s
    if q == 0:
        return (0, p)  # 1/0 -> det((1,0),(0,1)) = 1
    g, x, y = _egcd(abs(p), abs(q))
    # x*|p| + y*|q| = 1
    t = x * (1 if p >= 0 else -1)
    r = -y * (1 if q >= 0 else -1)
    assert p * t - q * r == 1
    return r, t


def farey_neighbours(s, ks) -> list[tuple[int, int]]:
    r, t = farey_base(s)
    p, q = s
    return [normalize(r + k * p, t + k * q) for k in ks]


@dataclass
class SlopeFrame:
    graph: RibbonGraph  # the piece's own graph
    m: int
    mu: tuple[int, ...]  # piece words
    lam: tuple[int, ...]
    nu: tuple[int, ...]
    arcs: tuple[tuple[int, int], ...]  # (r_e, s_e) per piece edge

    def coords(self, s) -> tuple[int, ...]:
        p, q = s
        return tuple(abs(p * se - q * re) for re, se in self.arcs)

    def word(self, s) -> tuple[int, ...]:
        comps = trace(self.graph, self.coords(s))
        if len(comps) != 1:
            raise CoordinateError(f"slope {s} did not trace to a single curve")
        return comps[0]

    def slope_from_counts(self, im: int, il: int, inu: int) -> tuple[int, int]:
        q, p = im // self.m, il // self.m
        if p and q and inu != self.m * abs(p - q):
            p = -p
        return normalize(p, q)

    def slope(self, word) -> tuple[int, int]:
        G = self.graph
        return self.slope_from_counts(intersection(G, word, self.mu), intersection(G, word, self.lam),
                                      intersection(G, word, self.nu))


def _small_curves(G: RibbonGraph, bound: int):
    found = {}
    for w in product(range(bound + 1), repeat=G.n_edges):
        if not any(w):
            continue
        try:
            comps = trace(G, w)
        except CoordinateError:
            continue
        if len(comps) != 1 or is_peripheral(G, comps[0]):
            continue
        c = canonical_word(comps[0])
        found.setdefault(c, w)
    return sorted(found, key=lambda c: (len(c), found[c]))


def _nu_candidates(G: RibbonGraph, mu, lam, m: int):
    """Curves meeting mu and lam m times, read off from signed arc data."""
    wm, wl = G.edge_word(mu), G.edge_word(lam)
    both = [e for e in range(G.n_edges) if wm[e] and wl[e]]
    out = set()
    for signs in product((1, -1), repeat=len(both)):
        sg = dict(zip(both, signs))
        w = tuple(abs(wm[e] - sg.get(e, 1) * wl[e]) for e in range(G.n_edges))
        try:
            comps = trace(G, w)
        except CoordinateError:
            continue
        if len(comps) != 1 or is_peripheral(G, comps[0]):
            continue
        c = canonical_word(comps[0])
        if intersection(G, c, mu) == m and intersection(G, c, lam) == m:
            out.add(c)
    return sorted(out, key=lambda c: (len(c), c))


def build_frame(G: RibbonGraph) -> SlopeFrame:
    """A slope frame on a complexity-one ribbon graph."""
    m = 1 if G.genus == 1 else 2
    for bound in (1, 2):
        cands = _small_curves(G, bound)
        for mu in cands:
            for lam in (c for c in cands if intersection(G, mu, c) == m):
                twisted = canonical_word(dehn_twist(G, lam, mu, 1))
                nus = _nu_candidates(G, mu, lam, m)
                if not nus:
                    continue
                nu = min(nus, key=lambda c: (intersection(G, c, twisted), len(c), c))
                wm, wl, wn = G.edge_word(mu), G.edge_word(lam), G.edge_word(nu)
                arcs = []
                for e in range(G.n_edges):
                    s_e, r_e = wm[e], wl[e]
                    if s_e and r_e and wn[e] != abs(s_e - r_e):
                        r_e = -r_e
                    arcs.append((r_e, s_e))
                frame = SlopeFrame(G, m, mu, lam, nu, tuple(arcs))
                if _check(frame):
                    return frame
    raise RuntimeError("no slope frame found")


def _check(frame: SlopeFrame) -> bool:
    try:
        for s in [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (3, -2)]:
            w = frame.word(s)
            if frame.slope(w) != normalize(*s):
                return False
    except CoordinateError:
        return False
    return canonical_word(frame.word((1, 0))) == canonical_word(frame.mu)
