"""Surfaces, curves, intersection numbers, Dehn twists and cutting.

Punctured surfaces carry a fixed trivalent ribbon graph whose dual is an
ideal triangulation; a curve is stored as its normal coordinates, i.e. the
number of times its reduced cyclic path crosses each ideal edge.  The closed
genus-two surface is handled through the hyperelliptic quotient: its curves
are stored as curves on the six-punctured sphere.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from . import words as W
from .cutting import Cut, Piece
from .ribbon import RibbonGraph, build_graph
from .slopes import SlopeFrame, build_frame, normalize

MAX_COMPLEXITY = 4


class SurfaceError(ValueError):
    """Raised for unsupported surfaces or mismatched arguments."""


@dataclass(frozen=True, order=True)
class Surface:
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise SurfaceError("genus and punctures must be non-negative")
        if self.euler >= 0 or self.complexity < 1:
            raise SurfaceError(f"{self} has complexity below 1")
        if self.complexity > MAX_COMPLEXITY:
            raise SurfaceError(f"{self} exceeds the supported complexity {MAX_COMPLEXITY}")
        if self.punctures == 0 and self.genus != 2:
            raise SurfaceError("the only supported closed surface is genus 2")

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - self.punctures

    @property
    def closed(self) -> bool:
        return self.punctures == 0

    def __str__(self) -> str:
        return f"S({self.genus},{self.punctures})"

    @property
    def graph(self) -> RibbonGraph:
        return engine_graph(self)


@lru_cache(maxsize=None)
def engine_graph(s: Surface) -> RibbonGraph:
    if s.closed:
        return build_graph(0, 6)
    return build_graph(s.genus, s.punctures)


@lru_cache(maxsize=None)
def surface_frame(s: Surface) -> SlopeFrame:
    if s.complexity != 1:
        raise SurfaceError("slope encodings exist only on complexity-one surfaces")
    return build_frame(engine_graph(s))


@lru_cache(maxsize=200000)
def _word(s: Surface, coords: tuple[int, ...]) -> tuple[int, ...]:
    comps = W.trace(engine_graph(s), coords)
    if len(comps) != 1:
        raise SurfaceError("normal coordinates do not describe a single curve")
    return comps[0]


@dataclass(frozen=True, order=True)
class Curve:
    surface: Surface
    coords: tuple[int, ...]

    @classmethod
    def from_normal(cls, surface: Surface, coords) -> "Curve":
        coords = tuple(int(x) for x in coords)
        G = engine_graph(surface)
        if len(coords) != G.n_edges or min(coords, default=0) < 0:
            raise SurfaceError(f"expected {G.n_edges} non-negative coordinates")
        try:
            word = _word(surface, coords)
        except W.CoordinateError as exc:
            raise SurfaceError(str(exc)) from None
        if W.is_peripheral(G, word):
            raise SurfaceError("curve is peripheral")
        return cls(surface, coords)

    @classmethod
    def from_slope(cls, surface: Surface, p: int, q: int) -> "Curve":
        p, q = normalize(p, q)
        F = surface_frame(surface)
        return cls(surface, F.coords((p, q)))

    @classmethod
    def from_word(cls, surface: Surface, word) -> "Curve":
        G = engine_graph(surface)
        w = W.reduce_cyclic(word)
        if not w:
            raise SurfaceError("trivial curve")
        return cls.from_normal(surface, G.edge_word(w))

    @property
    def word(self) -> tuple[int, ...]:
        return _word(self.surface, self.coords)

    @property
    def slope(self) -> tuple[int, int]:
        return surface_frame(self.surface).slope(self.word)

    def serialize(self) -> str:
        if self.surface.complexity == 1:
            p, q = self.slope
            return f"{self.surface}:slope:{p}/{q}"
        return f"{self.surface}:normal:[{','.join(map(str, self.coords))}]"

    def __str__(self) -> str:
        return self.serialize()


_CURVE_RE = re.compile(r"^\s*S\((\d+),(\d+)\):(slope|normal):(.+?)\s*$")


def parse_curve(text: str) -> Curve:
    m = _CURVE_RE.match(text)
    if not m:
        raise SurfaceError(f"cannot parse curve {text!r}")
    s = Surface(int(m.group(1)), int(m.group(2)))
    body = m.group(4)
    if m.group(3) == "slope":
        try:
            p, q = (int(x) for x in body.split("/"))
        except ValueError:
            raise SurfaceError(f"bad slope {body!r}") from None
        return Curve.from_slope(s, p, q)
    body = body.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise SurfaceError(f"bad normal vector {body!r}")
    inner = body[1:-1].strip()
    coords = [int(x) for x in inner.split(",")] if inner else []
    return Curve.from_normal(s, coords)


def _same_surface(a: Curve, b: Curve) -> None:
    if a.surface != b.surface:
        raise SurfaceError(f"curves live on different surfaces {a.surface} and {b.surface}")


# closed genus two ------------------------------------------------------------

@lru_cache(maxsize=100000)
def branch_count(c: Curve) -> int:
    """Branch points on the smaller side of a quotient curve (2 or 3)."""
    G = engine_graph(c.surface)
    cut = Cut(G, [c.word])
    sides = [sum(1 for lab in p.face_labels if lab[0] == "puncture") for p in cut.pieces()]
    return min(sides)


def lift_multiplicity(c: Curve) -> int:
    """Number of parallel lifts of the quotient curve (2 if nonseparating)."""
    return 2 if branch_count(c) % 2 == 0 else 1


def intersection(a: Curve, b: Curve) -> int:
    """Geometric intersection number of two curves."""
    _same_surface(a, b)
    if a == b:
        return 0
    G = engine_graph(a.surface)
    i = W.intersection(G, a.word, b.word)
    if a.surface.closed:
        return 2 * i // (lift_multiplicity(a) * lift_multiplicity(b))
    return i


def dehn_twist(a: Curve, about: Curve, power: int = 1) -> Curve:
    """Image of ``a`` under ``power`` right Dehn twists about ``about``."""
    _same_surface(a, about)
    if power == 0 or a == about:
        return a
    G = engine_graph(a.surface)
    if a.surface.closed:
        if lift_multiplicity(about) == 1:
            power = 2 * power
        elif power % 2 == 0:
            power = power // 2
        else:
            raise SurfaceError("odd twists about nonseparating genus-two curves need half twists "
                               "on the quotient, which are not implemented")
    return Curve.from_word(a.surface, W.dehn_twist(G, about.word, a.word, power))


def is_simple_word(surface: Surface, word) -> bool:
    return W.self_intersection(engine_graph(surface), word) == 0


# multicurves and pieces ----------------------------------------------------

@dataclass(frozen=True)
class Multicurve:
    components: tuple[Curve, ...]

    def __init__(self, components=()):
        comps = tuple(sorted(set(components)))
        object.__setattr__(self, "components", comps)
        if comps:
            s = comps[0].surface
            if any(c.surface != s for c in comps):
                raise SurfaceError("multicurve components on different surfaces")
            if len(comps) > s.complexity:
                raise SurfaceError("too many components for a multicurve")
            for i, x in enumerate(comps):
                for y in comps[i + 1:]:
                    if intersection(x, y):
                        raise SurfaceError("multicurve components intersect")

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __contains__(self, c):
        return c in self.components


@dataclass(frozen=True)
class SubsurfaceSpec:
    surface: Surface
    boundary: Multicurve
    piece_id: int
    genus: int = field(compare=False)
    n_boundary: int = field(compare=False)
    boundary_refs: tuple = field(compare=False)
    _piece: Piece | None = field(default=None, compare=False, repr=False)
    _cut: Cut | None = field(default=None, compare=False, repr=False)

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.n_boundary

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - self.n_boundary

    @property
    def is_pants(self) -> bool:
        return self.genus == 0 and self.n_boundary == 3

    @property
    def boundary_curves(self) -> tuple[Curve, ...]:
        return tuple(r for r in self.boundary_refs if isinstance(r, Curve))

    def describe(self) -> dict:
        return {
            "surface": str(self.surface),
            "boundary": [c.serialize() for c in self.boundary],
            "piece_id": self.piece_id,
            "genus": self.genus,
            "boundary_components": self.n_boundary,
            "complexity": self.complexity,
        }

    @cached_property
    def frame(self) -> SlopeFrame:
        if self.complexity != 1 or self._piece is None:
            raise SurfaceError("slope frames exist only on complexity-one punctured pieces")
        return build_frame(self._piece.graph)

    def contains(self, c: Curve) -> bool:
        """Whether c is an essential non-peripheral curve inside this piece."""
        from .projection import project  # local import to avoid a cycle
        return project(c, self).curves == (c,)


@lru_cache(maxsize=20000)
def _cut(surface: Surface, comps: tuple[Curve, ...]) -> tuple[Cut, list[Piece]]:
    cut = Cut(engine_graph(surface), [c.word for c in comps])
    return cut, cut.pieces()


def cut_pieces(m: Multicurve | tuple | list, surface: Surface | None = None) -> list[SubsurfaceSpec]:
    """Complementary pieces of a multicurve, with genus and boundary references."""
    if not isinstance(m, Multicurve):
        m = Multicurve(m)
    if surface is None:
        if not m.components:
            raise SurfaceError("pass the surface when cutting along the empty multicurve")
        surface = m.components[0].surface
    if surface.closed:
        return _closed_pieces(surface, m)
    return engine_pieces(m, surface)


def engine_pieces(m: Multicurve | tuple | list, surface: Surface) -> list[SubsurfaceSpec]:
    """Pieces of the engine graph; on genus two these live in the quotient."""
    if not isinstance(m, Multicurve):
        m = Multicurve(m)
    comps = m.components
    cut, pieces = _cut(surface, comps)
    out = []
    for i, p in enumerate(pieces):
        refs = tuple(comps[lab[1]] if lab[0] == "curve" else ("puncture", lab[1]) for lab in p.face_labels)
        out.append(SubsurfaceSpec(surface, m, i, p.genus, p.n_boundary, refs, p, cut))
    return out


def _closed_pieces(surface: Surface, m: Multicurve) -> list[SubsurfaceSpec]:
    comps = m.components
    cut, pieces = _cut(surface, comps)
    out = []
    idx = 0
    for p in pieces:
        k = sum(1 for lab in p.face_labels if lab[0] == "puncture")
        bd = [comps[lab[1]] for lab in p.face_labels if lab[0] == "curve"]
        chi = 4 - 2 * len(bd) - k
        circles = []
        for c in bd:
            circles.extend([c] * lift_multiplicity(c))
        copies = 2 if k == 0 and all(lift_multiplicity(c) == 2 for c in bd) else 1
        if copies == 2:
            chi //= 2
            circles = list(bd)
        nb = len(circles)
        genus = (2 - chi - nb) // 2
        if chi == 0:
            continue  # annulus between parallel lifts
        for _ in range(copies):
            out.append(SubsurfaceSpec(surface, m, idx, genus, nb, tuple(circles)))
            idx += 1
    return out
