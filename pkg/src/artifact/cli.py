"""Command-line entry point.

Every subcommand prints one JSON document on stdout and sends diagnostics to
stderr.  Pants decompositions are given as a JSON list of curve strings, as
``@file`` holding such a list, or as ``standard:S(g,n)``.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import hyperbolic as H
from . import model3 as M
from .pantsgraph import (PantsDecomposition, PantsPath, ElementaryMove, continued_fraction_move,
                         genus_type, pants_distance, pants_geodesic, random_walk, standard_pants)
from .projection import (SessionConstants, distance_formula_estimate, project, projection_distance,
                         support_bound_report)
from .surface import Surface, SurfaceError, cut_pieces, parse_curve

log = logging.getLogger("artifact")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNCERTIFIED = 2


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    """Tunable constants.  None of the defaults is a proven value; all are empirical."""

    bers_level: float = 4.0
    mm_threshold: int = 5
    intersection_cap: int = 12
    search_cap: int = -1  # -1: use the total intersection of the inputs
    search_budget: int = 2000
    projection_budget: int = 200
    seed: int = 0

    def validate(self) -> None:
        if not self.bers_level > 0:
            raise ConfigError("bers_level must be positive")
        if self.mm_threshold < 5:
            raise ConfigError("mm_threshold must be at least 5")
        if self.intersection_cap < 1:
            raise ConfigError("intersection_cap must be positive")
        if self.search_cap < -1:
            raise ConfigError("search_cap must be -1 or non-negative")
        if self.search_budget < 1 or self.projection_budget < 1:
            raise ConfigError("budgets must be positive")

    @classmethod
    def load(cls, path: str | None) -> "Config":
        cfg = cls()
        if path is None:
            return cfg
        types = {f.name: f.type for f in fields(cls)}
        for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected key = value")
            key, value = (x.strip() for x in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"{path}:{n}: unknown key {key!r}")
            conv = float if types[key] == "float" else int
            try:
                setattr(cfg, key, conv(value))
            except ValueError:
                raise ConfigError(f"{path}:{n}: bad value for {key}: {value!r}") from None
        cfg.validate()
        return cfg


# input parsing -------------------------------------------------------------------

def _read_json(text: str):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return json.loads(text)


def parse_surface(text: str) -> Surface:
    text = text.strip()
    if not (text.startswith("S(") and text.endswith(")")):
        raise SurfaceError(f"cannot parse surface {text!r}")
    g, n = (int(x) for x in text[2:-1].split(","))
    return Surface(g, n)


def parse_pants(text: str) -> PantsDecomposition:
    if text.startswith("standard:"):
        return standard_pants(parse_surface(text[len("standard:"):]))
    data = _read_json(text)
    return _pants_of(data)


def _pants_of(data) -> PantsDecomposition:
    if not isinstance(data, list) or not all(isinstance(c, str) for c in data):
        raise SurfaceError("a pants decomposition is a list of curve strings")
    return PantsDecomposition([parse_curve(c) for c in data])


def parse_path(text: str) -> PantsPath:
    data = _read_json(text)
    if isinstance(data, dict):
        data = data["vertices"]
    verts = [_pants_of(v) for v in data]
    moves = []
    for x, y in zip(verts, verts[1:]):
        old = set(x.curves) - set(y.curves)
        new = set(y.curves) - set(x.curves)
        if len(old) != 1 or len(new) != 1:
            raise SurfaceError("consecutive decompositions must differ in one curve")
        removed = old.pop()
        mv = ElementaryMove(x, removed, new.pop(), genus_type(x, removed))
        mv.validate()
        moves.append(mv)
    return PantsPath(verts, 2, moves)


def parse_fn(text: str) -> H.FNPoint:
    data = _read_json(text)
    curves = [parse_curve(k) for k in data]
    base = PantsDecomposition(curves)
    by = dict(zip(curves, data.values()))
    return H.FNPoint(base, tuple(float(by[c]["length"]) for c in base.curves),
                     tuple(float(by[c]["twist"]) for c in base.curves))


# subcommands ---------------------------------------------------------------------

def cmd_pants_dist(args, cfg):
    a, b = parse_pants(args.a), parse_pants(args.b)
    if a == b:
        return {"distance": 0}, EXIT_OK
    res = pants_distance(a, b, args.budget or cfg.search_budget, cap=args.cap)
    out = {"distance": res.get("exact"), **{k: v for k, v in res.items() if k != "exact"}}
    return out, EXIT_OK if out["distance"] is not None else EXIT_UNCERTIFIED


def _dot_path(path: PantsPath) -> str:
    lines = ["graph pants_path {"]
    for i, v in enumerate(path.vertices):
        label = "\\n".join(v.serialize())
        lines.append(f'  v{i} [label="{label}"];')
    for i in range(len(path)):
        lines.append(f"  v{i} -- v{i + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_pants_geodesic(args, cfg):
    a, b = parse_pants(args.a), parse_pants(args.b)
    try:
        path = pants_geodesic(a, b, args.budget or cfg.search_budget, cap=args.cap)
    except SurfaceError as exc:
        log.error("%s", exc)
        return {"path": None, "error": str(exc)}, EXIT_UNCERTIFIED
    if args.format == "dot":
        return _dot_path(path), EXIT_OK
    return {
        "length": len(path),
        "vertices": path.serialize(),
        "moves": [{"removed": m.removed.serialize(), "inserted": m.inserted.serialize(),
                   "genus_type": m.genus_type} for m in path.moves],
    }, EXIT_OK


def cmd_project(args, cfg):
    curves = [parse_curve(c) for c in _read_json(args.curves)]
    boundary = [parse_curve(c) for c in _read_json(args.boundary)]
    S = (curves or boundary)[0].surface
    pieces = [y for y in cut_pieces(boundary, S) if y.complexity >= 1]
    if not pieces:
        raise SurfaceError("the boundary multicurve leaves no piece of positive complexity")
    out = []
    for y in pieces:
        entry = y.describe()
        entry["projection"] = [c.serialize() for c in project(curves, y)]
        if args.other is not None:
            other = [parse_curve(c) for c in _read_json(args.other)]
            d = projection_distance(curves, other, y, cfg.projection_budget)
            entry["d_Y"] = d.value
            entry["d_Y_status"] = d.status
            entry["d_Y_certified"] = d.certified
        out.append(entry)
    return {"pieces": out}, EXIT_OK


def cmd_dist_formula(args, cfg):
    a, b = parse_pants(args.a), parse_pants(args.b)
    cap = args.search_cap if args.search_cap is not None else cfg.search_cap
    est = distance_formula_estimate(a, b, threshold=args.threshold or cfg.mm_threshold,
                                    search_cap=None if cap < 0 else cap,
                                    budget=cfg.projection_budget)
    return est.as_dict(), EXIT_OK


def cmd_fn_lengths(args, cfg):
    x = parse_fn(args.point)
    hol = H.holonomy_from_fn(x)
    extra = [parse_curve(c) for c in _read_json(args.curves)] if args.curves else []
    out = {
        "point": x.as_dict(),
        "lengths": {c.serialize(): H.curve_length(x, c) for c in H.marking(x.base) + extra},
        "relator_residual": hol.relator_residual,
        "cusp_residual": hol.cusp_residual,
    }
    ok = hol.relator_residual < 1e-9
    return out, EXIT_OK if ok else EXIT_UNCERTIFIED


def cmd_short_pants(args, cfg):
    x = parse_fn(args.point)
    level = args.level or cfg.bers_level
    try:
        p = H.short_pants(x, level, args.cap or cfg.intersection_cap)
    except H.ShortPantsError as exc:
        log.error("%s", exc)
        return {"pants": None, "error": str(exc)}, EXIT_UNCERTIFIED
    return {"pants": p.serialize(), "level": level,
            "lengths": [H.curve_length(x, c) for c in p.curves]}, EXIT_OK


def cmd_wp_est(args, cfg):
    x, y = parse_fn(args.x), parse_fn(args.y)
    level = args.level or cfg.bers_level
    try:
        res = H.coarse_wp_distance(x, y, level, cfg.search_budget, args.cap or cfg.intersection_cap)
    except H.ShortPantsError as exc:
        log.error("%s", exc)
        return {"error": str(exc)}, EXIT_UNCERTIFIED
    res["diameter_slack_provenance"] = "stand-in for an existence-only constant"
    ok = res["pants_distance"].get("exact") is not None
    return res, EXIT_OK if ok else EXIT_UNCERTIFIED


def cmd_compile_model(args, cfg):
    path = parse_path(args.path)
    mc = M.assemble_model(path)
    if args.out:
        Path(args.out).write_text(mc.gluing_table())
        log.info("gluing table written to %s", args.out)
    errors = mc.check()
    out = dict(mc.census)
    out["pseudo_manifold_errors"] = errors
    out["spun_fraction"] = mc.spun_fraction()
    out["volume_bound"] = M.volume_bound(mc)
    return out, EXIT_OK if not errors else EXIT_UNCERTIFIED


def _dot_tri(t: M.SuitedTriangulation) -> str:
    s = t.surf
    ids = {u: i for i, u in enumerate(sorted(s.tri))}
    lines = ["graph triangulation {"]
    for u in sorted(s.tri):
        lines.append(f"  t{ids[u]};")
    for u in sorted(s.tri):
        for k in range(3):
            g = s.glue.get((u, k))
            if g and (u, k) < g:
                nm = s.name.get((u, k))
                attr = f' [label="{nm[0]}{nm[1]}"]' if nm else ""
                lines.append(f"  t{ids[u]} -- t{ids[g[0]]}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_tri(args, cfg):
    p = parse_pants(args.pants)
    t = M.suited_triangulation(p)
    if args.format == "dot":
        return _dot_tri(t), EXIT_OK
    if args.format == "table":
        return "\n".join(t.gluing_lines()) + "\n", EXIT_OK
    errors = M.validate(t, p)
    V, E, F = t.counts()
    return {"pants": p.serialize(), "vertices": V, "edges": E, "faces": F,
            "gluing": t.gluing_lines(), "errors": errors}, EXIT_OK if not errors else EXIT_UNCERTIFIED


def selftest(seed: int = 0, samples: int = 5, cfg: Config | None = None) -> dict:
    """Small-sample versions of the acceptance checks plus the fitted constants."""
    cfg = cfg or Config()
    rng = random.Random(seed)
    checks = {}
    S = Surface(0, 5)
    P = standard_pants(S)
    session = SessionConstants()

    fails = 0
    for _ in range(samples):
        walk = random_walk(P, rng.randint(1, 4), rng)
        path = PantsPath(walk)
        rep = support_bound_report(path, cfg.search_budget, session)
        fails += rep["support_size"] < S.complexity
        t = M.replay(P, M.compile_path(path))
        fails += bool(M.validate(t, walk[-1]))
    checks["support_and_compile"] = fails == 0

    for a, b in [(P, random_walk(P, 2, rng)[-1]), (P, continued_fraction_move(P, P.curves[1], [2] * 5))]:
        d = pants_distance(a, b, cfg.search_budget).get("exact")
        s = distance_formula_estimate(a, b, cfg.mm_threshold, budget=cfg.projection_budget).sum
        if d is not None:
            session.add_pair(d, s)

    walk = random_walk(P, 1, rng)
    mc = M.assemble_model(PantsPath(walk))
    c = mc.census
    checks["model_census"] = not mc.check() and c["non_twist_blocks"] == 3 * c["path_length"]

    T = Surface(1, 1)
    x = H.FNPoint(standard_pants(T), (1.3,), (0.4,))
    hol = H.holonomy_from_fn(x)
    checks["holonomy"] = (hol.relator_residual < 1e-9
                          and abs(H.curve_length(x, x.base.curves[0]) - 1.3) < 1e-9)
    sq = H.square_torus()
    want = 2 * np.arccosh(1.5)
    checks["square_torus"] = all(abs(sq.length(parse_curve(f"S(1,1):slope:{s}")) - want) < 1e-9
                                 for s in ("0/1", "1/0"))

    constants = session.as_dict()
    constants["V3"] = M.regular_ideal_volume()
    constants["L8"] = {str(L): H.empirical_figure8_sup(L, 500, np.random.default_rng(seed)) for L in (2, 4, 8)}
    return {"seed": seed, "checks": checks, "passed": all(checks.values()), "constants": constants}


def cmd_selftest(args, cfg):
    t0 = time.perf_counter()
    res = selftest(args.seed if args.seed is not None else cfg.seed, args.samples, cfg)
    log.info("selftest took %.1f s", time.perf_counter() - t0)
    for name, ok in res["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    for k, v in res["constants"].items():
        print(f"{k:>22} {v}", file=sys.stderr)
    return res, EXIT_OK if res["passed"] else EXIT_UNCERTIFIED


# argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="artifact")
    ap.add_argument("--config", help="flat key = value file")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def pair(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("a")
        sp.add_argument("b")
        sp.set_defaults(fn=fn)
        return sp

    sp = pair("pants-dist", cmd_pants_dist, "distance in the pants graph")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--cap", type=int)
    sp = pair("pants-geodesic", cmd_pants_geodesic, "a shortest path in the pants graph")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--cap", type=int)
    sp.add_argument("--format", choices=("json", "dot"), default="json")
    sp = pair("dist-formula", cmd_dist_formula, "sum of large subsurface projections")
    sp.add_argument("--threshold", type=int)
    sp.add_argument("--search-cap", type=int)

    sp = sub.add_parser("project", help="project curves to the pieces cut out by a multicurve")
    sp.add_argument("curves")
    sp.add_argument("--boundary", required=True)
    sp.add_argument("--other", help="second curve list; reports d_Y")
    sp.set_defaults(fn=cmd_project)

    sp = sub.add_parser("fn-lengths", help="curve lengths at a Fenchel-Nielsen point")
    sp.add_argument("point")
    sp.add_argument("--curves")
    sp.set_defaults(fn=cmd_fn_lengths)
    sp = sub.add_parser("short-pants", help="a decomposition below the given level")
    sp.add_argument("point")
    sp.add_argument("--level", type=float)
    sp.add_argument("--cap", type=int)
    sp.set_defaults(fn=cmd_short_pants)
    sp = sub.add_parser("wp-est", help="coarse Weil-Petersson distance")
    sp.add_argument("x")
    sp.add_argument("y")
    sp.add_argument("--level", type=float)
    sp.add_argument("--cap", type=int)
    sp.set_defaults(fn=cmd_wp_est)

    sp = sub.add_parser("compile-model", help="assemble the model complex of a pants path")
    sp.add_argument("--path", required=True)
    sp.add_argument("--out", help="file for the gluing table")
    sp.set_defaults(fn=cmd_compile_model)
    sp = sub.add_parser("export-tri", help="suited triangulation of a decomposition")
    sp.add_argument("pants")
    sp.add_argument("--format", choices=("json", "table", "dot"), default="json")
    sp.set_defaults(fn=cmd_export_tri)
    sp = sub.add_parser("selftest", help="quick checks and fitted constants")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--samples", type=int, default=5)
    sp.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = Config.load(args.config)
        log.info("config %s", asdict(cfg))
        out, code = args.fn(args, cfg)
    except (ConfigError, SurfaceError, M.TriangulationError, ValueError, KeyError,
            OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(out, str):
        sys.stdout.write(out)
    else:
        sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
