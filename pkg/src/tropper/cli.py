"""Command line interface: ``tropper <subcommand> [options]``.

Every subcommand prints deterministic JSON (or a short text line for the
lemma checks).  Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import amoeba
from .cycles import check_balancing, crossings, normalize_cycle, twisted_homology
from .errors import SceneError, TropperError
from .geometry import as_point
from .io import DATA_DIR, cycle_to_toml, dumps, load_complex, load_pairings, load_scene
from .period import (
    alternating_roots,
    gamma_v_fraction,
    monodromy,
    pair_c1,
    pair_gluing,
    per_vertex_report,
    period,
    picard_for_cycles,
    picard_sublattice,
    ronkin_series,
)
from .scene import validate_scene
from .series import SeriesRing, factorize_binomials, find_grading, graded, log_series, normalize_slab
from .walls import check_consistency_codim0, check_consistency_codim1, loop_crossings


class UsageError(Exception):
    """Bad command line usage (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    for cand in (DATA_DIR / p.name, DATA_DIR / f"{p.name}.toml"):
        if cand.exists():
            return cand
    raise SceneError(f"no such scene file: {path}")


def _scene(args):
    if not args.scene:
        raise UsageError("--scene is required")
    scene = load_scene(_resolve(args.scene))
    if args.params:
        for item in args.params.split(","):
            name, _, value = item.partition("=")
            if not value:
                raise UsageError(f"bad --params entry {item!r}")
            scene.params[name.strip()] = float(Fraction(value.strip()))
    if args.k is not None:
        scene.k = args.k
    return scene


def _cycle(scene, args):
    if not args.cycle:
        raise UsageError("--cycle is required")
    if args.cycle not in scene.cycles:
        raise SceneError(f"scene has no cycle {args.cycle!r} (available: {sorted(scene.cycles)})")
    return scene.cycles[args.cycle]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(Fraction(x)) for x in text.split(",") if x.strip())


def _function(args):
    """A series from ``--function``/``--vars``/``--series-var`` or from ``--scene``/``--slab``."""
    if args.function:
        names = tuple(v for v in (args.vars or "u").split(",") if v)
        k = args.k if args.k is not None else 4
        ring = SeriesRing(names, args.series_var or "t", k)
        params = {}
        if args.params:
            for item in args.params.split(","):
                name, _, value = item.partition("=")
                params[name.strip()] = float(Fraction(value.strip()))
        return ring.parse(args.function), params
    scene = _scene(args)
    if not args.slab:
        raise UsageError("give --function or --scene with --slab")
    return scene.slab_function(scene.slab(args.slab)), dict(scene.params)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args):
    scene = _scene(args)
    problems = validate_scene(scene)
    for name, c in scene.cycles.items():
        try:
            bal = check_balancing(c, scene)
            if not bal.ok:
                problems.append(f"cycle {name}: unbalanced at {sorted(bal.residuals)}")
        except TropperError as exc:
            problems.append(f"cycle {name}: {exc}")
    return {"valid": not problems, "violations": problems}, (1 if problems else 0)


def cmd_period(args):
    scene = _scene(args)
    p = period(_cycle(scene, args), scene, scene.k, normalized_slabs=args.normalized)
    return p.to_json(), 0


def cmd_pair_c1(args):
    scene = _scene(args)
    return {"c1": pair_c1(_cycle(scene, args), scene)}, 0


def cmd_pair_gluing(args):
    scene = _scene(args)
    g = pair_gluing(_cycle(scene, args), scene)
    return {"gluing": g.to_json(), "text": str(g)}, 0


def cmd_monodromy(args):
    scene = _scene(args)
    c = _cycle(scene, args)
    return {"monodromy": monodromy(c, scene), "c1": pair_c1(c, scene)}, 0


def cmd_report(args):
    scene = _scene(args)
    rows = per_vertex_report(_cycle(scene, args), scene, scene.k, args.normalized)
    return {"report": [r.to_json() for r in rows]}, 0


def cmd_ronkin(args):
    f, params = _function(args)
    if args.order:
        m = _ints(args.order)
    elif args.point:
        m = amoeba.complement_order(amoeba.specialize(f, params), _floats(args.point))
    else:
        m = (0,) * f.ring.rank
    point = _floats(args.point) if args.point else None
    r = ronkin_series(f, m, point, params if point else None)
    out = {"order": list(m), "ronkin": r.to_json(), "text": str(r)}
    if args.numeric:
        if point is None:
            raise UsageError("--numeric needs --point")
        val = amoeba.ronkin_numeric(amoeba.specialize(f, params), m, point)
        out["numeric"] = [round(val.real, 12) + 0.0, round(val.imag, 12) + 0.0]
    return out, 0


def cmd_normalize(args):
    if args.cycle:
        scene = _scene(args)
        c = normalize_cycle(_cycle(scene, args), scene)
        return {"cycle": c.to_json(), "toml": cycle_to_toml(c)}, 0
    f, _ = _function(args)
    grading, _ = find_grading(f, unit=f.constant_key())
    g = normalize_slab(graded(f, grading))
    return {"g": g.to_json(), "text": str(g)}, 0


def cmd_factor(args):
    f, _ = _function(args)
    grading, _ = find_grading(f)
    unit, factors = factorize_binomials(graded(f, grading))
    return {
        "unit": str(unit),
        "factors": [{"coefficient": str(b.coeff), "exponent": list(b.exponent), "t_order": b.t_order}
                    for b in factors],
    }, 0


def cmd_log(args):
    f, _ = _function(args)
    grading, _ = find_grading(f)
    r = log_series(graded(f, grading))
    return {"log": r.to_json(), "text": str(r)}, 0


def cmd_order(args):
    if not args.point:
        raise UsageError("--point is required")
    f, params = _function(args)
    m = amoeba.complement_order(amoeba.specialize(f, params), _floats(args.point))
    return {"order": list(m)}, 0


def cmd_homology(args):
    if not args.complex:
        raise UsageError("--complex is required")
    cx = load_complex(_resolve(args.complex))
    h = twisted_homology(cx)
    return {f"H{q}": {"rank": g.rank, "torsion": list(g.torsion), "text": str(g)} for q, g in h.items()}, 0


def cmd_picard(args):
    if args.pairings:
        c1, gl = load_pairings(_resolve(args.pairings))
        res = picard_sublattice(c1, gl)
    else:
        scene = _scene(args)
        names = args.cycles.split(",") if args.cycles else sorted(scene.cycles)
        res = picard_for_cycles([scene.cycles[n] for n in names], scene)
    return res.to_json(), 0


def cmd_consistency(args):
    scene = _scene(args)
    out = {"codim0": [], "codim1": []}
    ok = True
    ring = scene.chart_ring()
    for lp in scene.loops:
        walls = [w for w in scene.walls if w.cell == lp["cell"] and w.id not in (args.remove or "").split(",")]
        res = check_consistency_codim0(loop_crossings(walls, lp["points"]), ring)
        ok &= res.ok
        out["codim0"].append({"loop": lp["name"], **res.to_json()})
    for rho in sorted({s.rho for s in scene.slabs}):
        res = check_consistency_codim1([s for s in scene.slabs if s.rho == rho])
        ok &= res.ok
        out["codim1"].append({"rho": rho, **res.to_json()})
    out["ok"] = ok
    return out, 0


def cmd_amoeba_plot(args):
    f, params = _function(args)
    poly = amoeba.specialize(f, params)
    vals = _floats(args.bbox) if args.bbox else tuple(v for _ in range(f.ring.rank) for v in (-5.0, 5.0))
    bbox = [(vals[2 * i], vals[2 * i + 1]) for i in range(len(vals) // 2)]
    threads = int(os.environ.get("TROPPER_THREADS", "1") or 1)
    raster = amoeba.amoeba_raster(poly, bbox, args.resolution, workers=threads)
    if args.svg:
        Path(args.svg).write_text(raster.to_svg())
    if args.csv:
        Path(args.csv).write_text(raster.to_csv())
    return {"shape": list(raster.mask.shape), "marked": int(raster.mask.sum()),
            "svg": args.svg, "csv": args.csv}, 0


def cmd_lemmas(args):
    bound = args.max
    if args.which == "alternating":
        bad = [(m, n) for m in range(1, bound + 1) for n in range(1, bound + 1) if not alternating_roots(m, n)]
        return ("all pass" if not bad else f"failures: {bad}"), (0 if not bad else 1)
    if args.which == "gamma":
        table = {v: str(gamma_v_fraction(v)) for v in range(3, bound + 1)}
        return {"gamma_v": table}, 0
    raise UsageError(f"unknown lemma {args.which!r}")


def cmd_amoeba(args):
    sub = {"order": cmd_order, "ronkin": cmd_ronkin, "plot": cmd_amoeba_plot}
    return sub[args.action](args)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scene", help="scene TOML file (or name of a bundled scene)")
    common.add_argument("--cycle", help="cycle name inside the scene")
    common.add_argument("-k", type=int, default=None, help="truncation order (default: scene value, 4)")
    common.add_argument("--params", help="numerical parameter values, e.g. a=0.3,b=0.25")
    common.add_argument("--json-out", help="also write the JSON result to this file")
    fn = _Parser(add_help=False)
    fn.add_argument("--function", help="Laurent polynomial, e.g. '1+x+y+s*x^-1*y^-1'")
    fn.add_argument("--vars", help="comma separated lattice variables (default u)")
    fn.add_argument("--series-var", help="series variable (default t)")
    fn.add_argument("--slab", help="slab id inside the scene")
    fn.add_argument("--point", help="Log-space point, comma separated")
    fn.add_argument("--order", help="complement order m, comma separated")
    fn.add_argument("--numeric", action="store_true", help="also evaluate the Ronkin integral numerically")
    fn.add_argument("--bbox", help="xmin,xmax[,ymin,ymax] for plots")
    fn.add_argument("--resolution", type=int, default=100)
    fn.add_argument("--svg")
    fn.add_argument("--csv")

    p = _Parser(prog="tropper", description="Periods of tropical cycles on wall structures.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    simple = {
        "validate": cmd_validate,
        "period": cmd_period,
        "pair-c1": cmd_pair_c1,
        "pair-gluing": cmd_pair_gluing,
        "monodromy": cmd_monodromy,
        "report": cmd_report,
        "consistency": cmd_consistency,
    }
    for name, func in simple.items():
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--normalized", action="store_true", help="normalize slab functions first")
        sp.add_argument("--remove", help="wall ids to drop (consistency only)")
        sp.set_defaults(func=func)
    for name, func in {"ronkin": cmd_ronkin, "factor": cmd_factor, "log": cmd_log, "order": cmd_order,
                       "amoeba-plot": cmd_amoeba_plot}.items():
        sp = sub.add_parser(name, parents=[common, fn])
        sp.set_defaults(func=func)
    sp = sub.add_parser("normalize", parents=[common, fn])
    sp.set_defaults(func=cmd_normalize)
    sp = sub.add_parser("homology", parents=[common])
    sp.add_argument("--complex", help="TOML file with a complex and monodromy matrices")
    sp.set_defaults(func=cmd_homology)
    sp = sub.add_parser("picard", parents=[common])
    sp.add_argument("--pairings", help="TOML file of precomputed generator pairings")
    sp.add_argument("--cycles", help="comma separated cycle names (default: all cycles of the scene)")
    sp.set_defaults(func=cmd_picard)
    sp = sub.add_parser("lemmas", parents=[common])
    sp.add_argument("which", choices=["alternating", "gamma"])
    sp.add_argument("--max", type=int, default=40)
    sp.set_defaults(func=cmd_lemmas)
    sp = sub.add_parser("amoeba", parents=[common, fn])
    sp.add_argument("action", choices=["order", "ronkin", "plot"])
    sp.set_defaults(func=cmd_amoeba)
    return p


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    """Run the CLI on ``argv``; returns the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        result, code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (TropperError, ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = result if isinstance(result, str) else dumps(result)
    if not text.endswith("\n"):
        text += "\n"
    stdout.write(text)
    if getattr(args, "json_out", None):
        Path(args.json_out).write_text(text)
    return code


def main() -> int:
    return run()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
