"""Independent reference computations used to freeze expected values.

Nothing here imports the package's algorithms; each oracle recomputes its
quantity by a different route.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import mpmath


# Farey graph -----------------------------------------------------------------

def _continued_fraction(x: Fraction) -> list[int]:
    out = []
    while True:
        a = x.numerator // x.denominator
        out.append(a)
        frac = x - a
        if frac == 0:
            return out
        x = 1 / frac


def _bezout(a: int, b: int) -> tuple[int, int]:
    """x, y with a*x + b*y = 1 for coprime a, b (iterative Euclid)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_x, x = x, old_x - k * x
        old_y, y = y, old_y - k * y
    if old_r < 0:
        old_x, old_y = -old_x, -old_y
    return old_x, old_y


def farey_distance_cf(a: tuple[int, int], b: tuple[int, int]) -> int:
    """Farey distance via continued fractions.

    Move a to infinity with an integral unimodular map, expand the image of
    b as a regular continued fraction, then walk the convergents: c_k and
    c_{k+1} are always adjacent and c_{k-1}, c_{k+1} are adjacent exactly
    when the partial quotient a_{k+1} equals one.
    """
    p, q = a
    g = gcd(p, q)
    p, q = p // g, q // g
    r, s = b
    g = gcd(r, s)
    r, s = r // g, s // g
    if p * s - q * r == 0:
        return 0
    # find (u, v) with p*v - q*u = 1 from Bezout coefficients
    x0, y0 = _bezout(p, -q)
    v, u = x0, y0
    # M = [[v, -u], [-q, p]] sends (p, q) to (1, 0)
    x = v * r - u * s
    y = -q * r + p * s
    if y == 0:
        return 0
    if y < 0:
        x, y = -x, -y
    if y == 1:
        return 1
    cf = _continued_fraction(Fraction(x, y))
    # distances along the convergent chain c_{-1} = infinity, c_0, ..., c_n
    n = len(cf) - 1
    dist = {-1: 0, 0: 1}
    for k in range(1, n + 1):
        best = dist[k - 1] + 1
        if cf[k] == 1:
            best = min(best, dist[k - 2] + 1)
        dist[k] = best
    return dist[n]


def slope_intersection(a, b, m: int = 1) -> int:
    return m * abs(a[0] * b[1] - a[1] * b[0])


# ideal tetrahedra ----------------------------------------------------------

def regular_ideal_tetrahedron_volume() -> float:
    """Volume of the regular ideal tetrahedron by quadrature of -log|2 sin t|."""
    mpmath.mp.dps = 30
    lob = mpmath.quad(lambda t: -mpmath.log(abs(2 * mpmath.sin(t))), [0, mpmath.pi / 3])
    return float(3 * lob)


# geodesic intersection --------------------------------------------------------
#
# Closed geodesics are in minimal position, so counting how often two of
# them cross gives the geometric intersection number.  Each curve is a
# reduced closed dart path on a trivalent ribbon graph, i.e. the sequence of
# ideal triangles its geodesic visits.  The geodesic is developed into the
# upper half plane, pulled back into a fixed frame of every triangle it
# visits, and chords of the two curves are tested for crossing there.

def _mat(a, b, c, d):
    return mpmath.matrix([[a, b], [c, d]])


def _cusp_shears(graph, rng_seed: int):
    import numpy as np
    C = np.zeros((len(graph.faces), graph.n_edges))
    for i, f in enumerate(graph.faces):
        for d in f:
            C[i, d >> 1] += 1
    _, s, vt = np.linalg.svd(C)
    rank = int((s > 1e-9).sum())
    N = vt[rank:].T
    r = np.random.default_rng(rng_seed).normal(size=N.shape[1])
    return [float(x) for x in N @ r * 0.3]


def _axis(M):
    """Fixed points of a hyperbolic Moebius map as a pair of reals (or inf)."""
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    tr = a + d
    if abs(tr) <= 2:
        raise ValueError("not hyperbolic")
    if abs(c) < mpmath.mpf(10) ** (-mpmath.mp.dps + 10):
        return (b / (d - a), mpmath.inf)
    disc = mpmath.sqrt(tr * tr - 4)
    return ((a - d + disc) / (2 * c), (a - d - disc) / (2 * c))


def _apply(M, z):
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    if z == mpmath.inf:
        return mpmath.inf if c == 0 else a / c
    den = c * z + d
    if den == 0:
        return mpmath.inf
    return (a * z + b) / den


def _chords(graph, word, shears):
    """Yield (triangle, endpoints) for every triangle the geodesic crosses."""
    turn = _mat(0, -1, 1, 1)
    back = mpmath.inverse(turn)
    n = len(word)
    steps = []
    for i, d in enumerate(word):
        h = mpmath.exp(mpmath.mpf(shears[d >> 1]) / 2)
        E = _mat(0, h, -1 / h, 0)
        T = turn if word[(i + 1) % n] == graph.sigma[d ^ 1] else back
        steps.append((E, T))
    Q = mpmath.eye(2)
    frames = []
    for E, T in steps:
        frames.append(Q * E)
        Q = Q * E * T
    ends = _axis(Q)
    for d, R in zip(word, frames):
        v = graph.vert[d ^ 1]
        ring = graph.darts_at[v]
        k = ring.index(d ^ 1)
        F = mpmath.inverse(R)
        for _ in range(k):
            F = turn * F
        yield v, tuple(_apply(F, z) for z in ends)


def _crossing_weight(g, h) -> Fraction:
    """1 if two geodesics meet inside the ideal triangle (0, inf, -1), 1/2 on its boundary.

    On the punctured torus simple geodesics meet at Weierstrass points, which
    sit on the ideal edges; such a crossing is seen from both adjacent
    triangles and counted half in each.
    """
    (p, q), (r, s) = g, h
    pts = sorted([(p, 0), (q, 0), (r, 1), (s, 1)], key=lambda t: t[0])
    labels = [t[1] for t in pts]
    if labels in ([0, 0, 1, 1], [1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1]):
        return Fraction(0)
    z = _meet(g, h)
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps // 2)
    half = mpmath.mpf(1) / 2
    margins = [-z.real, z.real + 1, abs(z + half) - half]
    if min(margins) < -eps:
        return Fraction(0)
    if min(margins) < eps:
        return Fraction(1, 2)
    return Fraction(1)


def _meet(g, h):
    """Intersection point of two crossing geodesics in the upper half plane."""
    def circle(p, q):
        if p == mpmath.inf:
            return ("line", q)
        if q == mpmath.inf:
            return ("line", p)
        return ("circle", (p + q) / 2, abs(p - q) / 2)

    A, B = circle(*g), circle(*h)
    if A[0] == "line" and B[0] == "line":
        raise ValueError("parallel vertical geodesics")
    if A[0] == "line":
        A, B = B, A
    if B[0] == "line":
        x = B[1]
        y2 = A[2] ** 2 - (x - A[1]) ** 2
        return mpmath.mpc(x, mpmath.sqrt(y2))
    (_, c1, r1), (_, c2, r2) = A, B
    x = (r1 ** 2 - r2 ** 2 - c1 ** 2 + c2 ** 2) / (2 * (c2 - c1))
    return mpmath.mpc(x, mpmath.sqrt(r1 ** 2 - (x - c1) ** 2))


def geodesic_intersection(graph, word_a, word_b, seed: int = 1) -> int:
    # matrix entries grow geometrically along the words; keep ample guard digits
    mpmath.mp.dps = 40 + len(word_a) + len(word_b)
    shears = _cusp_shears(graph, seed)
    ca = list(_chords(graph, word_a, shears))
    cb = list(_chords(graph, word_b, shears))
    n = Fraction(0)
    for v, g in ca:
        for w, h in cb:
            if v == w:
                n += _crossing_weight(g, h)
    if n.denominator != 1:
        raise ArithmeticError("unpaired boundary crossing")
    return int(n)


# trace identities ---------------------------------------------------------------

def markov_residual(x: float, y: float, z: float) -> float:
    return abs(x * x + y * y + z * z - x * y * z)


def markov_third(x: float, y: float) -> float:
    """Larger root z of z^2 - x y z + x^2 + y^2 = 0."""
    b = x * y
    return (b + (b * b - 4 * (x * x + y * y)) ** 0.5) / 2


def product_inverse_trace(tr_a: float, tr_b: float, tr_ab: float) -> float:
    """tr(A B^-1) from tr A, tr B and tr AB in SL(2)."""
    return tr_a * tr_b - tr_ab


# twist orbits ------------------------------------------------------------------

def twist_scan(beta, alpha, target, twist, window: int = 40):
    """The power n in [-window, window] with twist(beta, alpha, n) == target, or None."""
    for n in sorted(range(-window, window + 1), key=abs):
        if twist(beta, alpha, n) == target:
            return n
    return None
