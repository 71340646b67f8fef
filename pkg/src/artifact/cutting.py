"""Cutting a ribbon graph along a drawn multicurve.

The complement of the strands splits the neighbourhood of each vertex into
one central region and nested corner regions.  Regions joined through the
bands between parallel strands form the complementary pieces.  A piece's
central regions with the chains of bands between them form its own
trivalent ribbon graph, immersed in the ambient one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ribbon import RibbonGraph
from .words import corner_counts


def label_strands(G: RibbonGraph, comps: list[tuple[int, ...]]):
    """Total weights and a strand -> component map for disjoint curves."""
    w = [0] * G.n_edges
    for c in comps:
        for e, x in enumerate(G.edge_word(c)):
            w[e] += x
    k = corner_counts(G, w)
    target = {}
    for idx, c in enumerate(comps):
        target.setdefault(G.edge_word(c), []).append(idx)
    label = {}
    seen = set()
    for e in range(G.n_edges):
        for p in range(w[e]):
            if (e, p) in seen:
                continue
            d, pos = 2 * e, p
            keys = []
            word = []
            while True:
                key = (d >> 1, pos if not d & 1 else w[d >> 1] - 1 - pos)
                if key in seen:
                    break
                seen.add(key)
                keys.append(key)
                word.append(d)
                e0 = d ^ 1
                q = w[e0 >> 1] - 1 - pos
                e1 = G.sigma[e0]
                if q < k[e0]:
                    d, pos = e1, w[e1 >> 1] - 1 - q
                else:
                    d, pos = G.sigma[e1], w[e0 >> 1] - 1 - q
            ew = G.edge_word(word)
            if not target.get(ew):
                raise ValueError("curves are not disjoint")
            idx = target[ew].pop()
            for key in keys:
                label[key] = idx
    return tuple(w), k, label


@dataclass
class Piece:
    graph: RibbonGraph
    paths: tuple[tuple[int, ...], ...]  # coarse dart -> ambient darts
    fine: tuple[tuple[tuple, ...], ...]  # coarse dart -> fine darts
    face_labels: tuple[tuple[str, int], ...]
    nodes: frozenset
    central: tuple  # coarse vertex -> fine node
    chain_start: dict = field(default_factory=dict)  # fine dart id -> (coarse dart, chain length)
    chain_of: dict = field(default_factory=dict)  # fine dart id -> coarse dart containing it

    @property
    def genus(self) -> int:
        return self.graph.genus

    @property
    def n_boundary(self) -> int:
        return self.graph.n_faces

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.n_boundary

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - self.n_boundary

    def to_ambient(self, word) -> tuple[int, ...]:
        out = []
        for D in word:
            out.extend(self.paths[D])
        return tuple(out)


class Cut:
    """The fine region graph of a multicurve drawn on G."""

    def __init__(self, G: RibbonGraph, comps: list[tuple[int, ...]]):
        self.G = G
        self.comps = comps
        self.w, self.k, self.label = label_strands(G, comps)
        self._build()

    # regions and bands ---------------------------------------------------
    def region(self, d: int, b: int):
        G, w, k = self.G, self.w, self.k
        if b < k[d]:
            return ("c", d, b)
        if b == k[d]:
            return ("v", G.vert[d])
        d2 = G.sigma[G.sigma[d]]
        return ("c", d2, w[d >> 1] - b)

    def fine_dart_index(self, f) -> int:
        """Band index of a fine dart, measured along its own direction."""
        e, b, s = f
        return b if s == 0 else self.w[e] - b

    def ambient(self, f) -> int:
        return 2 * f[0] + f[2]

    def tail(self, f):
        e, b, s = f
        return self.region(2 * e + s, self.fine_dart_index(f))

    def head(self, f):
        return self.tail(rev(f))

    def right_side(self, f):
        d = self.ambient(f)
        bd = self.fine_dart_index(f)
        if bd < self.w[d >> 1]:
            pos = bd if not d & 1 else self.w[d >> 1] - 1 - bd
            return ("curve", self.label[(d >> 1, pos)])
        return ("puncture", self.G.face_of[d])

    def _build(self):
        G, w = self.G, self.w
        out: dict = {}
        for e in range(G.n_edges):
            for b in range(w[e] + 1):
                for s in (0, 1):
                    f = (e, b, s)
                    out.setdefault(self.tail(f), {})[2 * e + s] = f
        self.out = out
        # rotation: central nodes follow sigma, corner nodes swap
        rot = {}
        for node, darts in out.items():
            if node[0] == "v":
                for d, f in darts.items():
                    rot[f] = darts[G.sigma[d]]
            else:
                a, b = list(darts.values())
                rot[a] = b
                rot[b] = a
        self.rot = rot
        # components
        parent = {n: n for n in out}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for node, darts in out.items():
            for f in darts.values():
                parent[find(node)] = find(self.head(f))
        groups: dict = {}
        for n in out:
            groups.setdefault(find(n), set()).add(n)
        self.components = [frozenset(g) for g in sorted(groups.values(), key=lambda s: min(map(repr, s)))]
        self._index()

    def _index(self):
        """Integer ids for fine darts, with reversal, face cycles and central tails."""
        darts = sorted(self.rot)
        fid = {f: i for i, f in enumerate(darts)}
        self.fid = fid
        self.darts = darts
        self.rev_id = [fid[rev(f)] for f in darts]
        self.central_tail = [self.tail(f)[0] == "v" for f in darts]
        self.head_of = {f: self.head(f) for f in darts}
        phi = [fid[self.rot[rev(f)]] for f in darts]
        self.cycle_of: list = [None] * len(darts)
        self.cycles: list[list[int]] = []
        for i in range(len(darts)):
            if self.cycle_of[i] is not None:
                continue
            cyc = []
            x = i
            while self.cycle_of[x] is None:
                self.cycle_of[x] = (len(self.cycles), len(cyc))
                cyc.append(x)
                x = phi[x]
            self.cycles.append(cyc)

    def phi(self, f):
        return self.rot[rev(f)]

    def inner_gap_dart(self, node):
        """First fine dart of the boundary walk through a corner's inner gap."""
        _, d, _ = node
        return self.out[node][d]

    def boundary_walk(self, f) -> list:
        c, p = self.cycle_of[self.fid[f]]
        cyc = self.cycles[c]
        return [self.darts[x] for x in cyc[p:] + cyc[:p]]

    # pieces --------------------------------------------------------------
    def piece(self, comp: frozenset) -> Piece:
        central = sorted((n for n in comp if n[0] == "v"), key=lambda n: n[1])
        if not central:
            raise ValueError("annular complementary region")
        vid = {n: i for i, n in enumerate(central)}
        chains = {}
        for n in central:
            for d in (self.out[n][x] for x in self._ccw(n)):
                chain = [d]
                m = self.head(d)
                while m[0] != "v":
                    nxt = self.rot[rev(chain[-1])]
                    chain.append(nxt)
                    m = self.head(nxt)
                chains[d] = tuple(chain)
        # pair chains with their reverses
        starts = sorted(chains, key=lambda f: (vid[self.tail(f)], f))
        index = {}
        fine = []
        for f in starts:
            if f in index:
                continue
            ch = chains[f]
            back = tuple(rev(x) for x in reversed(ch))
            index[f] = len(fine)
            fine.append(ch)
            index[back[0]] = len(fine)
            fine.append(back)
        vert = [0] * len(fine)
        sigma = [0] * len(fine)
        for f, D in index.items():
            n = self.tail(f)
            vert[D] = vid[n]
            sigma[D] = index[self.rot[f]]
        graph = RibbonGraph(tuple(vert), tuple(sigma))
        paths = tuple(tuple(self.ambient(x) for x in ch) for ch in fine)
        labels = []
        for face in graph.faces:
            sides = {self.right_side(x) for D in face for x in fine[D]}
            if len(sides) != 1:
                raise AssertionError("boundary face with mixed sides")
            labels.append(sides.pop())
        starts = {self.fid[ch[0]]: (D, len(ch)) for D, ch in enumerate(fine)}
        chain_of = {self.fid[f]: D for D, ch in enumerate(fine) for f in ch}
        return Piece(graph, paths, tuple(fine), tuple(labels), comp, tuple(central), starts, chain_of)

    def _ccw(self, n):
        d0 = min(self.out[n])
        ds = [d0, self.G.sigma[d0], self.G.sigma[self.G.sigma[d0]]]
        return ds

    def pieces(self) -> list[Piece]:
        return [self.piece(c) for c in self.components]


def rev(f):
    return (f[0], f[1], 1 - f[2])


def reduce_fine(cut: Cut, word) -> list[int]:
    """Cyclically reduce a closed path of fine dart ids."""
    inv = cut.rev_id
    st: list = []
    for f in word:
        if st and st[-1] == inv[f]:
            st.pop()
        else:
            st.append(f)
    i, j = 0, len(st) - 1
    while i < j and st[i] == inv[st[j]]:
        i += 1
        j -= 1
    return st[i:j + 1]


def fine_to_coarse(piece: Piece, cut: Cut, word) -> tuple[int, ...] | None:
    """Rewrite a cyclic path of fine dart ids through a piece as coarse darts."""
    if not word:
        return ()
    n = len(word)
    central = cut.central_tail
    start = next((i for i, f in enumerate(word) if central[f]), None)
    if start is None:
        return None
    out = []
    i = 0
    while i < n:
        D, length = piece.chain_start[word[(start + i) % n]]
        out.append(D)
        i += length
    if i != n:
        raise AssertionError("fine path does not split into chains")
    return tuple(out)


@dataclass
class Arc:
    path: tuple  # fine dart ids from entry node to exit node
    start: tuple  # (boundary cycle, position) of the walk at entry
    end: tuple  # (boundary cycle, position) of the walk at exit

    @property
    def same_side(self) -> bool:
        return self.start[0] == self.end[0]

    def signature(self, cut: "Cut", piece: Piece) -> tuple:
        """Equal for arcs isotopic through arcs with ends sliding on the boundary."""
        chains = tuple(piece.chain_of[f] for k, f in enumerate(self.path) if k == 0 or cut.central_tail[f])
        return self.start[0], self.end[0], chains


def lift_arcs(cut: Cut, piece: Piece, word):
    """Maximal lifts of the cyclic word into the piece.

    Returns ("inside", closed path of fine ids) when the curve lifts
    periodically, else ("arcs", list of Arc).
    """
    G = cut.G
    fid = cut.fid
    heads = cut.head_of
    out = cut.out
    n = len(word)
    at_vertex: dict[int, list] = {}
    for node in piece.nodes:
        v = node[1] if node[0] == "v" else G.vert[node[1]]
        at_vertex.setdefault(v, []).append(node)
    for v in at_vertex:
        at_vertex[v].sort(key=repr)
    seen = set()
    arcs = []
    for i in range(n):
        for node in at_vertex.get(G.vert[word[i]], ()):
            if (i, node) in seen:
                continue
            # walk backwards to the entry
            j, m = i, node
            steps = 0
            periodic = False
            while True:
                f = out[m].get(word[(j - 1) % n] ^ 1)
                if f is None:
                    break
                m = heads[f]
                j -= 1
                steps += 1
                if (j % n, m) == (i, node) or steps > n * len(piece.nodes) + 1:
                    periodic = True
                    break
            if periodic:
                return "inside", [fid[f] for f in _periodic_word(cut, word, i, node)]
            entry = m
            path = []
            seen.add((j % n, m))
            while True:
                f = out[m].get(word[j % n])
                if f is None:
                    break
                path.append(fid[f])
                m = heads[f]
                j += 1
                seen.add((j % n, m))
            start = cut.cycle_of[fid[cut.inner_gap_dart(entry)]]
            end = cut.cycle_of[fid[cut.inner_gap_dart(m)]]
            arcs.append(Arc(tuple(path), start, end))
    return "arcs", arcs


def _periodic_word(cut: Cut, word, i: int, node) -> tuple:
    n = len(word)
    out = []
    j, m = i, node
    while True:
        f = cut.out[m][word[j % n]]
        out.append(f)
        m = cut.head(f)
        j += 1
        if (j - i) % n == 0 and m == node:
            return tuple(out)


def _join(inv, a: list, b: list) -> list:
    """Concatenate two reduced paths, cancelling at the seam."""
    i, n = 0, min(len(a), len(b))
    while i < n and a[-1 - i] == inv[b[i]]:
        i += 1
    return a[:len(a) - i] + b[i:]


def _cyclic(inv, w: list) -> list:
    i, j = 0, len(w) - 1
    while i < j and w[i] == inv[w[j]]:
        i += 1
        j -= 1
    return w[i:j + 1]


def surgery_words(cut: Cut, arc: Arc) -> list[list[int]]:
    """Closed fine paths obtained by banding the arc to its boundary.

    Arcs and boundary walks are reduced, so cancellation happens only at
    the seams.
    """
    inv = cut.rev_id
    P = list(arc.path)
    c0, p0 = arc.start
    c1, p1 = arc.end
    cyc0 = cut.cycles[c0]
    B0 = cyc0[p0:] + cyc0[:p0]
    B0i = [inv[x] for x in reversed(B0)]
    out = []
    if c0 == c1:
        t = (p1 - p0) % len(cyc0)
        Q2 = B0[t:]
        out.append(_cyclic(inv, _join(inv, P, Q2)))
        out.append(_cyclic(inv, _join(inv, P, B0i[len(B0) - t:])))
        if t == 0:
            # entry and exit share a gap; their order along it is unknown
            out.append(_cyclic(inv, _join(inv, P, B0i)))
    else:
        cyc1 = cut.cycles[c1]
        B1 = cyc1[p1:] + cyc1[:p1]
        Pi = [inv[x] for x in reversed(P)]
        tail = _join(inv, _join(inv, P, B1), Pi)
        out.append(_cyclic(inv, _join(inv, B0, tail)))
        out.append(_cyclic(inv, _join(inv, B0i, tail)))
    return out
