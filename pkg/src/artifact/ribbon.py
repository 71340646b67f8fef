"""Trivalent ribbon graphs and cyclic dart words.

Edge ``e`` owns darts ``2e`` and ``2e+1``; ``d ^ 1`` is the reverse dart.
``sigma[d]`` is the next outgoing dart counterclockwise around the vertex
``vert[d]``.  Walking ``d`` then ``sigma[d ^ 1]`` traces a face.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product


@dataclass(frozen=True)
class RibbonGraph:
    vert: tuple[int, ...]
    sigma: tuple[int, ...]

    @property
    def n_darts(self) -> int:
        return len(self.vert)

    @property
    def n_edges(self) -> int:
        return len(self.vert) // 2

    @cached_property
    def n_vertices(self) -> int:
        return len(set(self.vert))

    def head(self, d: int) -> int:
        return self.vert[d ^ 1]

    def phi(self, d: int) -> int:
        return self.sigma[d ^ 1]

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        seen = set()
        out = []
        for d in range(self.n_darts):
            if d in seen:
                continue
            cyc = []
            x = d
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.phi(x)
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        f = [0] * self.n_darts
        for i, cyc in enumerate(self.faces):
            for d in cyc:
                f[d] = i
        return tuple(f)

    @cached_property
    def genus(self) -> int:
        chi = self.n_vertices - self.n_edges + len(self.faces)
        return (2 - chi) // 2

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def darts_at(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for d in range(self.n_darts):
            if d not in {x for v in out.values() for x in v}:
                cyc = [d]
                x = self.sigma[d]
                while x != d:
                    cyc.append(x)
                    x = self.sigma[x]
                out[self.vert[d]] = cyc
        return {v: tuple(c) for v, c in out.items()}

    def edge_word(self, word) -> tuple[int, ...]:
        w = [0] * self.n_edges
        for d in word:
            w[d >> 1] += 1
        return tuple(w)


# builders ------------------------------------------------------------------

class _Builder:
    def __init__(self):
        self.rot: list[list[int]] = []  # ccw darts at each vertex
        self.n_edges = 0

    def vertex(self) -> int:
        self.rot.append([])
        return len(self.rot) - 1

    def edge(self) -> int:
        self.n_edges += 1
        return self.n_edges - 1

    def copy(self) -> "_Builder":
        b = _Builder()
        b.rot = [list(r) for r in self.rot]
        b.n_edges = self.n_edges
        return b

    def freeze(self) -> RibbonGraph:
        vert = [0] * (2 * self.n_edges)
        sigma = [0] * (2 * self.n_edges)
        for v, r in enumerate(self.rot):
            for i, d in enumerate(r):
                vert[d] = v
                sigma[d] = r[(i + 1) % len(r)]
        return RibbonGraph(tuple(vert), tuple(sigma))

    def _where(self, d):
        for v, r in enumerate(self.rot):
            if d in r:
                return v, r.index(d)
        raise KeyError(d)

    def subdivide(self, e: int, flip: bool) -> tuple[int, int]:
        """Split edge ``e`` by a new vertex; return (vertex, new dart slot)."""
        x = self.vertex()
        f = self.edge()
        v, i = self._where(2 * e + 1)
        self.rot[v][i] = 2 * f + 1
        g = self.edge()
        # new dart 2g sits on one side of the edge
        self.rot[x] = [2 * e + 1, 2 * f, 2 * g] if not flip else [2 * e + 1, 2 * g, 2 * f]
        return x, g

    def lollipop(self, e: int, flip: bool) -> None:
        x, g = self.subdivide(e, flip)
        y = self.vertex()
        loop = self.edge()
        self.rot[y] = [2 * g + 1, 2 * loop, 2 * loop + 1]

    def chord(self, e1: int, f1: bool, e2: int, f2: bool) -> None:
        x, g = self.subdivide(e1, f1)
        y, h = self.subdivide(e2, f2)
        # glue the two pending edges g and h into one: reuse g, drop h
        _, i = self._where(2 * h)
        self.rot[y][i] = 2 * g + 1
        # renumber the last edge into slot h so edges stay contiguous
        last = self.n_edges - 1
        if h != last:
            for r in self.rot:
                for k, d in enumerate(r):
                    if d >> 1 == last:
                        r[k] = 2 * h + (d & 1)
        self.n_edges -= 1


def _theta(twisted: bool) -> _Builder:
    b = _Builder()
    v0, v1 = b.vertex(), b.vertex()
    for _ in range(3):
        b.edge()
    b.rot[v0] = [0, 2, 4]
    b.rot[v1] = [1, 3, 5] if twisted else [1, 5, 3]
    return b


def _signature(b: _Builder) -> tuple[int, int]:
    g = b.freeze()
    return g.genus, g.n_faces


def build_graph(genus: int, punctures: int) -> RibbonGraph:
    """A trivalent ribbon graph whose thickening is S_{genus, punctures}."""
    if punctures < 1:
        raise ValueError("ribbon graph spines need at least one puncture")
    if 2 * genus - 2 + punctures <= 0:
        raise ValueError("surface must have negative Euler characteristic")
    if genus == 0:
        b = _theta(False)
    else:
        b = _theta(True)
    gcur, ncur = _signature(b)
    while gcur < genus:
        b.lollipop(0, False)
        done = False
        for e1 in range(b.n_edges):
            for e2 in range(b.n_edges):
                if e1 == e2:
                    continue
                for f1, f2 in product((False, True), repeat=2):
                    c = b.copy()
                    c.chord(e1, f1, e2, f2)
                    if _signature(c) == (gcur + 1, ncur):
                        b = c
                        done = True
                        break
                if done:
                    break
            if done:
                break
        if not done:
            raise RuntimeError("could not add a handle")
        gcur, ncur = _signature(b)
    while ncur < punctures:
        b.lollipop(b.n_edges - 1, False)
        gcur, ncur = _signature(b)
    g = b.freeze()
    assert (g.genus, g.n_faces) == (genus, punctures)
    assert all(len(r) == 3 for r in b.rot)
    return g


# cyclic words --------------------------------------------------------------

def reduce_cyclic(word) -> tuple[int, ...]:
    st: list[int] = []
    for d in word:
        if st and st[-1] == d ^ 1:
            st.pop()
        else:
            st.append(d)
    i, j = 0, len(st) - 1
    while i < j and st[i] == st[j] ^ 1:
        i += 1
        j -= 1
    return tuple(st[i:j + 1])


def invert(word) -> tuple[int, ...]:
    return tuple(d ^ 1 for d in reversed(word))


def primitive_root(word) -> tuple[tuple[int, ...], int]:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and tuple(word[:k]) * (n // k) == tuple(word):
            return tuple(word[:k]), n // k
    return tuple(word), 1


def min_rotation(word) -> tuple[int, ...]:
    if not word:
        return ()
    return min(tuple(word[i:]) + tuple(word[:i]) for i in range(len(word)))


def same_cycle(a, b) -> bool:
    """Whether b is a rotation of a."""
    n = len(a)
    if n != len(b):
        return False
    if not n:
        return True
    a, b = tuple(a), tuple(b)
    aa = a + a
    return any(aa[i:i + n] == b for i in range(n) if a[i] == b[0])
