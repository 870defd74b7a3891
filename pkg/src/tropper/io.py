"""TOML scene files and JSON output."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .cycles import CycleEdge, CycleVertex, TropicalCycle, TwistedComplex
from .errors import SceneError
from .exact import MultiplicativeValue
from .geometry import Carrier, Polytope, as_point
from .scene import MaximalCell, Piece, Rho, Scene, Side
from .series import SeriesRing
from .walls import Slab, Wall

DATA_DIR = Path(__file__).resolve().parent / "data"


def builtin_scene_path(name: str) -> Path:
    """Path of a bundled scene (``kp1``, ``kp2``, ``ks``, ``focus_focus``)."""
    p = DATA_DIR / f"{name}.toml"
    if not p.exists():
        raise SceneError(f"no bundled scene {name!r}")
    return p


def parse_multiplicative(text: str | int) -> MultiplicativeValue:
    """Parse ``"1"``, ``"-1"``, ``"g^2*h^-1"`` or ``"zeta(1/3)*g"``."""
    text = str(text).replace(" ", "")
    out = MultiplicativeValue.identity()
    if text in ("", "1"):
        return out
    if text.startswith("-"):
        out = out * MultiplicativeValue(Fraction(1, 2))
        text = text[1:]
        if text in ("", "1"):
            return out
    for factor in text.split("*"):
        if factor.startswith("zeta(") and factor.endswith(")"):
            out = out * MultiplicativeValue(Fraction(factor[5:-1]))
            continue
        name, _, exp = factor.partition("^")
        if not name.isidentifier():
            raise SceneError(f"cannot parse gluing value {factor!r}")
        out = out * MultiplicativeValue.generator(name) ** int(exp or 1)
    return out


def _ints(v) -> tuple[int, ...]:
    return tuple(int(x) for x in v)


def _fracs(v) -> tuple[Fraction, ...]:
    return as_point(v)


def load_scene(path: str | Path) -> Scene:
    """Read a scene description from a TOML file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SceneError(f"{path}: {exc}") from exc
    try:
        scene = scene_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"{path}: malformed scene ({exc})") from exc
    scene.source = str(path)
    return scene


def scene_from_dict(data: Mapping[str, Any]) -> Scene:
    head = data.get("scene", {})
    dim = int(head.get("dimension", 2))
    series_variable = head.get("series_variable", "t")
    rho_vars = tuple(head.get("rho_variables", ["u", "v"][: dim - 1]))
    chart_vars = tuple(head.get("chart_variables", ["x", "y", "z"][:dim]))
    k = int(head.get("k", 4))
    params = {str(a): float(Fraction(str(b))) for a, b in data.get("parameters", {}).items()}

    cells = {}
    for c in data.get("maximal_cell", []):
        cells[c["id"]] = MaximalCell(c["id"], Polytope(c["vertices"]))

    rhos = {}
    for r in data.get("rho", []):
        poly = Polytope(r["vertices"])
        sides = tuple(
            Side(s["cell"], _ints(s["origin"]), tuple(_ints(b) for b in s["basis"]), _ints(s["normal"]))
            for s in r["side"]
        )
        pieces_raw = r.get("piece") or [{"id": "0", "vertices": r["vertices"]}]
        pieces = tuple(
            Piece(str(p["id"]), Polytope(p.get("vertices", r["vertices"])),
                  _ints(p["normal_image"]) if "normal_image" in p else None)
            for p in pieces_raw
        )
        log_origin = _fracs(r.get("log_origin", [0] * (dim - 1)))
        rhos[r["id"]] = Rho(r["id"], poly, sides, pieces, log_origin, Fraction(str(r.get("log_scale", 1))),
                            bool(r.get("boundary", False)))

    def pieces_of(rho: str, piece) -> list[str]:
        if piece is not None:
            return [str(piece)]
        if rho not in rhos:
            return ["0"]
        return [p.id for p in rhos[rho].pieces]

    kinks = {}
    for kk in data.get("kink", []):
        for pid in pieces_of(kk["rho"], kk.get("piece")):
            kinks[(kk["rho"], pid)] = int(kk["kappa"])

    gluing = {}
    for g in data.get("gluing", []):
        vals = tuple(parse_multiplicative(v) for v in g["values"])
        for pid in pieces_of(g["rho"], g.get("piece")):
            gluing[(g["cell"], g["rho"], pid)] = vals

    slab_ring = SeriesRing(rho_vars, series_variable, k)
    slabs = []
    for s in data.get("slab", []):
        for pid in pieces_of(s["rho"], s.get("piece")):
            carrier = Polytope(s["carrier"]) if "carrier" in s else None
            sid = s["id"] if s.get("piece") is not None or len(pieces_of(s["rho"], None)) == 1 else f"{s['id']}/{pid}"
            slabs.append(Slab(sid, s["rho"], pid, slab_ring.parse(s["function"]), carrier))

    chart_ring = SeriesRing(chart_vars, "t", k)
    walls = []
    for w in data.get("wall", []):
        walls.append(Wall(w["id"], w["cell"], Carrier(w["carrier"]), chart_ring.parse(w["function"]), _ints(w["normal"])))

    scene = Scene(
        name=head.get("name", "scene"),
        dim=dim,
        cells=cells,
        rhos=rhos,
        kinks=kinks,
        gluing=gluing,
        slabs=slabs,
        walls=walls,
        params=params,
        series_variable=series_variable,
        rho_variables=rho_vars,
        chart_variables=chart_vars,
        k=k,
        oriented=bool(head.get("oriented", True)),
    )
    for c in data.get("cycle", []):
        scene.cycles[c["name"]] = cycle_from_dict(c)
    for lp in data.get("loop", []):
        scene.loops.append({"name": lp.get("name", "loop"), "cell": lp["cell"],
                            "points": [as_point(p) for p in lp["points"]]})
    return scene


def cycle_from_dict(data: Mapping[str, Any]) -> TropicalCycle:
    vertices = [CycleVertex(v["id"], v["host"], _fracs(v["position"])) for v in data["vertex"]]
    edges = [
        CycleEdge(e.get("id", f"e{i}"), e["tail"], e["head"], e["cell"], _ints(e["xi"]))
        for i, e in enumerate(data["edge"])
    ]
    return TropicalCycle.build(vertices, edges, name=data.get("name", "cycle"))


def cycle_to_toml(cycle: TropicalCycle) -> str:
    """Serialise a cycle as a ``[[cycle]]`` TOML block."""

    def frac(x: Fraction) -> str:
        return f'"{x}"' if x.denominator != 1 else str(x.numerator)

    lines = ["[[cycle]]", f'name = "{cycle.name}"']
    for v in cycle.vertices.values():
        pos = ", ".join(frac(x) for x in v.position)
        lines += ["  [[cycle.vertex]]", f'  id = "{v.id}"', f'  host = "{v.host}"', f"  position = [{pos}]"]
    for e in cycle.edges:
        xi = ", ".join(str(x) for x in e.xi)
        lines += ["  [[cycle.edge]]", f'  id = "{e.id}"', f'  tail = "{e.tail}"', f'  head = "{e.head}"',
                  f'  cell = "{e.cell}"', f"  xi = [{xi}]"]
    return "\n".join(lines) + "\n"


def dumps(obj: Any) -> str:
    """Deterministic JSON (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _load_toml(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SceneError(f"{path}: {exc}") from exc


def load_complex(path: str | Path) -> TwistedComplex:
    """Read a simplicial complex with monodromy matrices from TOML."""
    data = _load_toml(path)
    try:
        c = data["complex"]
        mono = {tuple(m["edge"]): tuple(tuple(int(x) for x in row) for row in m["matrix"])
                for m in data.get("monodromy", [])}
        return TwistedComplex(int(c["vertices"]), [tuple(e) for e in c["edges"]],
                              [tuple(t) for t in c.get("triangles", [])], int(c.get("rank", 2)), mono)
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"{path}: malformed complex ({exc})") from exc


def load_pairings(path: str | Path) -> tuple[list[int], list[MultiplicativeValue]]:
    """Read precomputed ``(c1, gluing)`` pairings of generators from TOML."""
    data = _load_toml(path)
    try:
        gens = data["generator"]
        return [int(g["c1"]) for g in gens], [parse_multiplicative(g.get("gluing", "1")) for g in gens]
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"{path}: malformed pairings ({exc})") from exc
