"""Curve algorithms on a trivalent ribbon graph.

A curve is a cyclically reduced closed dart path.  Its canonical form is
the vector of edge traversal counts (normal coordinates on the dual ideal
triangulation).  Strand positions on an outgoing dart run left to right.
"""
from __future__ import annotations

from functools import cmp_to_key

from .ribbon import RibbonGraph, invert, min_rotation, primitive_root, reduce_cyclic, same_cycle


class CoordinateError(ValueError):
    pass


def corner_counts(G: RibbonGraph, w) -> dict[int, int]:
    """Map each outgoing dart d to the strands turning from d into sigma[d]."""
    k = {}
    for d in range(G.n_darts):
        d1 = G.sigma[d]
        d2 = G.sigma[d1]
        s = w[d >> 1] + w[d1 >> 1] - w[d2 >> 1]
        if s < 0 or s % 2:
            raise CoordinateError("coordinates violate the triangle conditions")
        k[d] = s // 2
    return k


def trace(G: RibbonGraph, w) -> list[tuple[int, ...]]:
    """All closed components drawn by the coordinate vector ``w``."""
    k = corner_counts(G, w)
    seen = set()
    comps = []
    for e in range(G.n_edges):
        for p in range(w[e]):
            if (e, p) in seen:
                continue
            d, pos = 2 * e, p
            word = []
            while True:
                key = (d >> 1, pos if not d & 1 else w[d >> 1] - 1 - pos)
                if key in seen:
                    break
                seen.add(key)
                word.append(d)
                e0 = d ^ 1
                q = w[e0 >> 1] - 1 - pos
                e1 = G.sigma[e0]
                if q < k[e0]:
                    d, pos = e1, w[e1 >> 1] - 1 - q
                else:
                    d, pos = G.sigma[e1], w[e0 >> 1] - 1 - q
            comps.append(tuple(word))
    return comps


def canonical_word(word) -> tuple[int, ...]:
    """Orientation-free canonical rotation of a cyclic word."""
    return min(min_rotation(word), min_rotation(invert(word)))


def face_words(G: RibbonGraph) -> list[tuple[int, ...]]:
    return [tuple(f) for f in G.faces]


def is_peripheral(G: RibbonGraph, word) -> bool:
    root, _ = primitive_root(tuple(word))
    back = invert(root)
    return any(len(f) == len(root) and (same_cycle(root, f) or same_cycle(back, f)) for f in G.faces)


def _segments(G: RibbonGraph, a, b):
    """Yield (i, j, length, left_u, linked) for maximal common segments."""
    m, n = len(a), len(b)
    sig = G.sigma
    cap = m + n
    where: dict[int, list[int]] = {}
    for j, d in enumerate(b):
        where.setdefault(d, []).append(j)
    for i in range(m):
        ai = a[i]
        ap = a[i - 1]
        for j in where.get(ai, ()):
            if b[j - 1] == ap:
                continue
            k = 1
            while k < cap and a[(i + k) % m] == b[(j + k) % n]:
                k += 1
            if k >= cap:
                continue  # same closed curve at this alignment
            pb = b[j - 1] ^ 1
            left_u = sig[ai] == pb
            t = a[(i + k - 1) % m] ^ 1
            qa = a[(i + k) % m]
            above_w = sig[t] == qa
            yield i, j, k, left_u, left_u != above_w


def crossings(G: RibbonGraph, a, b):
    """Linked segments of a against b and against b reversed.

    Each item is (i, j, reversed_b, left_u): the segment starts at a[i],
    and b (or b reversed) is aligned there starting at its index j.
    """
    out = []
    rb = invert(b)
    for bb, flag in ((tuple(b), False), (rb, True)):
        for i, j, _, left_u, linked in _segments(G, a, bb):
            if linked:
                out.append((i, j, flag, left_u))
    return out


def intersection(G: RibbonGraph, a, b) -> int:
    if canonical_word(a) == canonical_word(b):
        return 0
    return len(crossings(G, a, b))


def self_intersection(G: RibbonGraph, a) -> int:
    n = 0
    ra = invert(a)
    for i, j, _, _, linked in _segments(G, a, a):
        if linked and i != j:
            n += 1
    for i, j, _, _, linked in _segments(G, a, ra):
        if linked:
            n += 1
    return n // 2


def _right_of(G: RibbonGraph, x, y) -> int:
    """Compare two closed lifts through the same first dart.

    Returns 1 if x runs to the right of y, -1 if left, 0 if equal.
    """
    m, n = len(x), len(y)
    for k in range(1, m * n + 1):
        dx, dy = x[k % m], y[k % n]
        if dx != dy:
            t = x[(k - 1) % m] ^ 1
            return 1 if G.sigma[t] == dx else -1
    return 0


# sign making the (0,1)-twist send slope 1/0 to 1/1 on the punctured torus
TWIST_SIGN = 1


def dehn_twist(G: RibbonGraph, c, a, power: int = 1) -> tuple[int, ...]:
    """Image of the cyclic word ``a`` under the power of the twist about c."""
    if power == 0:
        return tuple(a)
    cr = crossings(G, a, c)
    if not cr:
        return tuple(a)
    rc = invert(c)
    ins: dict[int, list] = {}
    for i, j, flag, left_u in cr:
        base = rc if flag else tuple(c)
        loop = base[j:] + base[:j]
        ins.setdefault(i, []).append((loop, left_u))
    sgn = TWIST_SIGN * (1 if power > 0 else -1)
    reps = abs(power)
    word = []
    for i in range(len(a)):
        items = ins.get(i)
        if items:
            if len(items) > 1:
                left = items[0][1]
                # first crossed lift is the one farthest from a
                items = sorted(items, key=cmp_to_key(lambda p, q: _right_of(G, p[0], q[0])))
                if left:
                    items = items[::-1]
            for loop, left_u in items:
                fwd = left_u if sgn > 0 else not left_u
                seg = loop if fwd else invert(loop)
                word.extend(seg * reps)
        word.append(a[i])
    return reduce_cyclic(word)
