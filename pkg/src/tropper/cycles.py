"""Tropical 1-cycles with coefficients in the tangent lattice local system.

A cycle is a directed graph whose vertices sit either in the interior of a
maximal cell (``host`` is the cell id, ``position`` are chart coordinates)
or on a codimension-one cell (``host`` is the ``rho`` id, ``position`` are
its own coordinates).  Every edge is a straight segment inside one maximal
cell and carries an integral tangent vector ``xi`` in that cell's chart.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import count
from math import gcd
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import CycleError, ForbiddenStratum, OnAmoeba
from .exact import IntVector, matvec, smith_diagonal
from .geometry import Point, as_point, dot, segment_intersection_2d, sub

if TYPE_CHECKING:
    from .scene import Scene


@dataclass(frozen=True)
class CycleVertex:
    id: str
    host: str
    position: Point


@dataclass(frozen=True)
class CycleEdge:
    id: str
    tail: str
    head: str
    cell: str
    xi: IntVector


@dataclass
class TropicalCycle:
    """Directed graph with lattice-vector edge labels."""

    name: str
    vertices: dict[str, CycleVertex]
    edges: list[CycleEdge]

    @classmethod
    def build(cls, vertices: Iterable[CycleVertex], edges: Iterable[CycleEdge], name: str = "cycle") -> TropicalCycle:
        vs: dict[str, CycleVertex] = {}
        for v in vertices:
            if v.id in vs:
                raise CycleError(f"duplicate vertex id {v.id!r}")
            vs[v.id] = replace(v, position=as_point(v.position))
        es = []
        seen = set()
        for e in edges:
            if e.id in seen:
                raise CycleError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.tail not in vs or e.head not in vs:
                raise CycleError(f"edge {e.id!r} references an unknown vertex")
            if not any(e.xi):
                continue
            es.append(replace(e, xi=tuple(int(x) for x in e.xi)))
        return cls(name, vs, es)

    def incident(self, vid: str) -> list[tuple[CycleEdge, int]]:
        """Edges at ``vid`` with ``+1`` for incoming and ``-1`` for outgoing (loops give both)."""
        out = []
        for e in self.edges:
            if e.head == vid:
                out.append((e, 1))
            if e.tail == vid:
                out.append((e, -1))
        return out

    def valency(self, vid: str) -> int:
        return len(self.incident(vid))

    def negated(self) -> TropicalCycle:
        return TropicalCycle(self.name, dict(self.vertices),
                             [replace(e, xi=tuple(-x for x in e.xi)) for e in self.edges])

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vertices": [{"id": v.id, "host": v.host, "position": [str(x) for x in v.position]}
                         for v in self.vertices.values()],
            "edges": [{"id": e.id, "tail": e.tail, "head": e.head, "cell": e.cell, "xi": list(e.xi)}
                      for e in self.edges],
        }


def chart_position(scene: Scene, v: CycleVertex, cell: str) -> Point:
    """Coordinates of ``v`` in the chart of ``cell``."""
    if v.host == cell:
        return v.position
    if v.host in scene.rhos:
        return scene.rhos[v.host].side(cell).point(v.position)
    raise CycleError(f"vertex {v.id!r} in cell {v.host!r} is joined by an edge of cell {cell!r}")


def _check_hosts(cycle: TropicalCycle, scene: Scene) -> None:
    for v in cycle.vertices.values():
        if v.host not in scene.cells and v.host not in scene.rhos:
            raise CycleError(f"vertex {v.id!r}: unknown host {v.host!r}")
    for e in cycle.edges:
        if e.cell not in scene.cells:
            raise CycleError(f"edge {e.id!r}: unknown cell {e.cell!r}")
        for vid in (e.tail, e.head):
            chart_position(scene, cycle.vertices[vid], e.cell)


# ---------------------------------------------------------------------------
# balancing
# ---------------------------------------------------------------------------


@dataclass
class BalancingReport:
    ok: bool
    residuals: dict[str, IntVector] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "residuals": {k: list(v) for k, v in self.residuals.items()}}


def check_balancing(cycle: TropicalCycle, scene: Scene, mode: str = "adapted") -> BalancingReport:
    """Flow conservation at every vertex, transporting across codimension-one cells.

    At a vertex on ``rho`` all edge vectors are moved into the chart of the
    positive side by the ``mode`` transport at the vertex position.
    """
    _check_hosts(cycle, scene)
    res: dict[str, IntVector] = {}
    for vid, v in cycle.vertices.items():
        inc = cycle.incident(vid)
        if not inc:
            continue
        total = [0] * scene.dim
        if v.host in scene.cells:
            for e, s in inc:
                total = [a + s * b for a, b in zip(total, e.xi)]
        else:
            r = scene.rhos[v.host]
            ref = r.sides[0].cell
            for e, s in inc:
                xi = e.xi if e.cell == ref else scene.transport(v.host, e.cell, e.xi, v.position, mode)
                total = [a + s * b for a, b in zip(total, xi)]
        if any(total):
            res[vid] = tuple(total)
    return BalancingReport(not res, res)


# ---------------------------------------------------------------------------
# crossings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingEvent:
    """A transversal passage of a cycle through a codimension-one cell."""

    vertex: str
    rho: str
    piece: str
    slab: str | None
    point: Point
    log_point: tuple[float, ...]
    incoming: CycleEdge
    outgoing: CycleEdge
    from_cell: str
    to_cell: str
    covector: IntVector
    weight: int
    order: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "rho": self.rho,
            "piece": self.piece,
            "slab": self.slab,
            "point": [str(x) for x in self.point],
            "incoming": self.incoming.id,
            "outgoing": self.outgoing.id,
            "from_cell": self.from_cell,
            "to_cell": self.to_cell,
            "covector": list(self.covector),
            "weight": self.weight,
            "order": list(self.order),
        }


def crossings(cycle: TropicalCycle, scene: Scene) -> list[CrossingEvent]:
    """Crossing events of a cycle whose codimension-one vertices are bivalent and transversal."""
    _check_hosts(cycle, scene)
    out = []
    for vid, v in cycle.vertices.items():
        if v.host not in scene.rhos:
            continue
        r = scene.rhos[v.host]
        inc = cycle.incident(vid)
        if not inc:
            continue
        if r.boundary:
            raise CycleError(f"vertex {vid!r} lies on the boundary cell {r.id!r}")
        if r.polytope.on_boundary(v.position):
            raise ForbiddenStratum(f"vertex {vid!r} lies on a codimension-two cell")
        ins = [e for e, s in inc if s == 1]
        outs = [e for e, s in inc if s == -1]
        if len(ins) != 1 or len(outs) != 1:
            raise CycleError(f"vertex {vid!r} on {r.id!r} is not a bivalent crossing (normalize the cycle)")
        e, e2 = ins[0], outs[0]
        if e.cell == e2.cell:
            raise CycleError(f"vertex {vid!r} touches {r.id!r} without crossing it")
        try:
            m = scene.order_at(r.id, v.position)
        except OnAmoeba as exc:
            raise ForbiddenStratum(f"vertex {vid!r} lies on the amoeba: {exc}") from exc
        slab = scene.slab_at(r.id, v.position)
        d = r.covector(e.cell)
        out.append(
            CrossingEvent(
                vertex=vid,
                rho=r.id,
                piece=r.piece_at(v.position).id,
                slab=slab.id if slab else None,
                point=v.position,
                log_point=r.log_point(v.position),
                incoming=e,
                outgoing=e2,
                from_cell=e.cell,
                to_cell=e2.cell,
                covector=d,
                weight=int(dot(d, e.xi)),
                order=m,
            )
        )
    return out


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


class _Builder:
    def __init__(self, cycle: TropicalCycle, scene: Scene):
        self.scene = scene
        self.vertices = dict(cycle.vertices)
        self.edges = list(cycle.edges)
        self._ids = count(1)

    def fresh(self, base: str) -> str:
        while True:
            name = f"{base}~{next(self._ids)}"
            if name not in self.vertices and all(e.id != name for e in self.edges):
                return name

    def pos(self, vid: str, cell: str) -> Point:
        return chart_position(self.scene, self.vertices[vid], cell)

    def on_rho(self, vid: str) -> bool:
        return self.vertices[vid].host in self.scene.rhos

    def valency(self, vid: str) -> int:
        return sum((e.tail == vid) + (e.head == vid) for e in self.edges)

    def split(self, e: CycleEdge, points: Sequence[Point]) -> list[CycleEdge]:
        """Replace ``e`` by a chain through ``points`` (chart coordinates of ``e.cell``)."""
        i = self.edges.index(e)
        chain = [e.tail]
        for p in points:
            vid = self.fresh(e.id + "v")
            self.vertices[vid] = CycleVertex(vid, e.cell, tuple(p))
            chain.append(vid)
        chain.append(e.head)
        new = [CycleEdge(self.fresh(e.id), a, b, e.cell, e.xi) for a, b in zip(chain, chain[1:])]
        self.edges[i:i + 1] = new
        return new

    def midpoint(self, e: CycleEdge) -> Point:
        a, b = self.pos(e.tail, e.cell), self.pos(e.head, e.cell)
        return tuple((x + y) / 2 for x, y in zip(a, b))

    def result(self, name: str) -> TropicalCycle:
        used = {e.tail for e in self.edges} | {e.head for e in self.edges}
        return TropicalCycle(name, {k: v for k, v in self.vertices.items() if k in used}, self.edges)


def _decompose(scene: Scene, rho, cell: str, xi: IntVector) -> list[IntVector]:
    """Split ``xi`` into copies of ``+-zeta`` and of a primitive tangent vector."""
    side = rho.side(cell)
    from .scene import _inverse

    coeffs = matvec(_inverse(side.frame()), xi)
    alpha, a = coeffs[:-1], coeffs[-1]
    b = 0
    for x in alpha:
        b = gcd(b, x)
    if (b == 0 and abs(a) == 1) or (a == 0 and b == 1):
        return [tuple(xi)]
    parts: list[IntVector] = []
    if a:
        z = tuple((1 if a > 0 else -1) * c for c in side.normal)
        parts += [z] * abs(a)
    if b:
        mu = tuple(x // b for x in alpha)
        parts += [side.tangent(mu)] * b
    return parts


def normalize_cycle(cycle: TropicalCycle, scene: Scene) -> TropicalCycle:
    """Bring a cycle into normal form by subdivision and splitting of crossings.

    The result has every edge meeting at most one codimension-one cell, vertices
    inserted where edges cross codimension-zero walls, every crossing bivalent
    with edge vector ``+-zeta`` or a primitive tangent vector, and bivalent
    vertices at the far ends of the crossing edges.
    """
    _check_hosts(cycle, scene)
    bal = check_balancing(cycle, scene)
    if not bal.ok:
        raise CycleError(f"cycle is not balanced at {sorted(bal.residuals)}")
    b = _Builder(cycle, scene)

    # edges joining two codimension-one vertices get a midpoint
    for e in list(b.edges):
        if b.on_rho(e.tail) and b.on_rho(e.head):
            b.split(e, [b.midpoint(e)])

    # subdivide at codimension-zero walls
    for e in list(b.edges):
        walls = [w for w in scene.walls if w.cell == e.cell]
        if not walls:
            continue
        p, q = b.pos(e.tail, e.cell), b.pos(e.head, e.cell)
        hits = set()
        for w in walls:
            hit = w.carrier.segment_hit(p, q)
            if hit is None:
                continue
            s, point = hit
            if 0 < s < 1 and w.carrier.relative_position(point) != "outside":
                hits.add((s, point))
        if hits:
            b.split(e, [pt for _, pt in sorted(hits)])

    # orient and split crossings
    for vid in [v for v in list(b.vertices) if b.on_rho(v)]:
        v = b.vertices[vid]
        r = scene.rhos[v.host]
        inc = [(e, 1) for e in b.edges if e.head == vid] + [(e, -1) for e in b.edges if e.tail == vid]
        if not inc:
            continue
        if r.boundary:
            raise CycleError(f"vertex {vid!r} lies on the boundary cell {r.id!r}")
        if r.polytope.on_boundary(v.position):
            raise ForbiddenStratum(f"vertex {vid!r} lies on a codimension-two cell")
        if len(inc) != 2:
            raise CycleError(f"vertex {vid!r} on {r.id!r} has valency {len(inc)}; crossings must be bivalent")
        (e1, s1), (e2, s2) = inc
        if e1.cell == e2.cell:
            raise CycleError(f"vertex {vid!r} touches {r.id!r} without crossing it")
        if s1 == s2:  # reverse the second edge so the path runs through the vertex
            rev = CycleEdge(e2.id, e2.head, e2.tail, e2.cell, tuple(-x for x in e2.xi))
            b.edges[b.edges.index(e2)] = rev
            e2, s2 = rev, -s2
        e_in, e_out = (e1, e2) if s1 == 1 else (e2, e1)
        try:
            T = scene.transition(r.id, e_in.cell, v.position, "adapted")
        except OnAmoeba as exc:  # pragma: no cover - transition already wraps this
            raise ForbiddenStratum(str(exc)) from exc
        parts = _decompose(scene, r, e_in.cell, e_in.xi)
        if len(parts) == 1:
            continue
        if matvec(T, e_in.xi) != tuple(e_out.xi):
            raise CycleError(f"edge vectors at {vid!r} do not match under transport")
        i_in, i_out = b.edges.index(e_in), b.edges.index(e_out)
        new_edges = []
        for part in parts:
            nv = b.fresh(vid)
            b.vertices[nv] = CycleVertex(nv, v.host, v.position)
            new_edges.append(CycleEdge(b.fresh(e_in.id), e_in.tail, nv, e_in.cell, part))
            new_edges.append(CycleEdge(b.fresh(e_out.id), nv, e_out.head, e_out.cell, matvec(T, part)))
        b.edges = [e for j, e in enumerate(b.edges) if j not in (i_in, i_out)] + new_edges
        del b.vertices[vid]

    # far ends of crossing edges must be bivalent
    for e in list(b.edges):
        if b.on_rho(e.tail) == b.on_rho(e.head):
            continue
        far = e.head if b.on_rho(e.tail) else e.tail
        if b.valency(far) != 2:
            b.split(e, [b.midpoint(e)])

    # vertices of valency >= 3 must avoid walls
    for vid, v in b.vertices.items():
        if v.host in scene.cells and b.valency(vid) >= 3:
            for w in scene.walls:
                if w.cell == v.host and w.carrier.relative_position(v.position) != "outside":
                    raise CycleError(f"vertex {vid!r} of valency >= 3 lies on wall {w.id!r}")
    out = b.result(cycle.name)
    bal = check_balancing(out, scene)
    if not bal.ok:  # pragma: no cover - guarded by construction
        raise CycleError("normalization broke balancing")
    return out


# ---------------------------------------------------------------------------
# twisted homology
# ---------------------------------------------------------------------------


def _mat_inverse(M):
    from .scene import _inverse

    return _inverse(M)


def _mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a)))


@dataclass
class TwistedComplex:
    """Simplicial complex (dimension <= 2) with a flat ``Z^r`` local system.

    ``monodromy[(a, b)]`` is the transport from the fiber at vertex ``a`` to
    the fiber at ``b`` along the edge ``(a, b)`` (identity when absent).
    """

    n_vertices: int
    edges: list[tuple[int, int]]
    triangles: list[tuple[int, int, int]] = field(default_factory=list)
    rank: int = 2
    monodromy: dict[tuple[int, int], tuple[tuple[int, ...], ...]] = field(default_factory=dict)

    def transport(self, a: int, b: int):
        if (a, b) in self.monodromy:
            return self.monodromy[(a, b)]
        if (b, a) in self.monodromy:
            return _mat_inverse(self.monodromy[(b, a)])
        return tuple(tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank))

    def _edge_index(self, a: int, b: int) -> tuple[int, int]:
        """Index of the edge ``{a, b}`` and ``+1`` if stored as ``(a, b)``."""
        for i, e in enumerate(self.edges):
            if e == (a, b):
                return i, 1
            if e == (b, a):
                return i, -1
        raise ValueError(f"edge {(a, b)} missing from the complex")

    def boundary(self, q: int) -> list[list[int]]:
        r = self.rank
        if q == 1:
            M = [[0] * (r * len(self.edges)) for _ in range(r * self.n_vertices)]
            for i, (a, b) in enumerate(self.edges):
                T = self.transport(a, b)
                for j in range(r):
                    col = r * i + j
                    M[r * a + j][col] -= 1
                    for k in range(r):
                        M[r * b + k][col] += T[k][j]
            return M
        if q == 2:
            M = [[0] * (r * len(self.triangles)) for _ in range(r * len(self.edges))]
            for ti, (a, b, c) in enumerate(self.triangles):
                Tab = self.transport(a, b)
                ident = self.transport(a, a)
                for (x, y, base, sgn) in ((b, c, Tab, 1), (a, c, ident, -1), (a, b, ident, 1)):
                    idx, orient = self._edge_index(x, y)
                    # fiber value at x is base . v ; reversed storage moves it to y and flips the sign
                    mat = base if orient == 1 else _mat_mul(self.transport(x, y), base)
                    for j in range(r):
                        col = r * ti + j
                        for k in range(r):
                            M[r * idx + k][col] += sgn * orient * mat[k][j]
            return M
        raise ValueError("only q = 1, 2 are supported")

    def check_flat(self) -> bool:
        for a, b, c in self.triangles:
            if _mat_mul(self.transport(b, c), self.transport(a, b)) != tuple(map(tuple, self.transport(a, c))):
                return False
        return True


@dataclass(frozen=True)
class HomologyGroup:
    rank: int
    torsion: tuple[int, ...]

    def __str__(self):
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def twisted_homology(cx: TwistedComplex) -> dict[int, HomologyGroup]:
    """``H_0``, ``H_1``, ``H_2`` of the complex with local coefficients, via Smith forms."""
    if not cx.check_flat():
        raise ValueError("the local system is not flat on some triangle")
    r = cx.rank
    dims = {0: r * cx.n_vertices, 1: r * len(cx.edges), 2: r * len(cx.triangles)}

    def diag(q):
        if dims[q] == 0 or dims[q - 1] == 0:
            return []
        return [d for d in smith_diagonal(cx.boundary(q)) if d]

    d1, d2 = diag(1), diag(2)
    rank = {0: 0, 1: len(d1), 2: len(d2), 3: 0}
    tors = {0: d1, 1: d2, 2: []}
    out = {}
    for q in (0, 1, 2):
        out[q] = HomologyGroup(dims[q] - rank[q] - rank[q + 1], tuple(abs(d) for d in tors[q] if abs(d) > 1))
    return out


# ---------------------------------------------------------------------------
# intersection pairing (surfaces)
# ---------------------------------------------------------------------------

_SHIFTS = [(Fraction(1, 1000 * j + 7), Fraction(1, 1300 * j + 11)) for j in range(1, 16)]


def _shifted(cycle: TropicalCycle, scene: Scene, delta) -> TropicalCycle | None:
    vs = {}
    for vid, v in cycle.vertices.items():
        if v.host in scene.rhos:
            r = scene.rhos[v.host]
            p = (v.position[0] + delta[0],)
            if not r.polytope.interior_contains(p):
                return None
        else:
            p = tuple(x + d for x, d in zip(v.position, delta))
            if not scene.cells[v.host].polytope.interior_contains(p):
                return None
        vs[vid] = CycleVertex(vid, v.host, p)
    return TropicalCycle(cycle.name, vs, list(cycle.edges))


def _det2(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def intersection_pairing(c1: TropicalCycle, c2: TropicalCycle, scene: Scene) -> int:
    """Signed count ``sum sign(d1 ^ d2) * (xi1 ^ xi2)`` over transverse edge crossings.

    ``c2`` is moved by a small deterministic translation until all
    intersections are transverse and away from vertices.  Only surfaces
    (``dim = 2``) are supported.
    """
    if scene.dim != 2:
        raise ValueError("the intersection pairing is implemented for two-dimensional bases")
    _check_hosts(c1, scene)
    _check_hosts(c2, scene)
    rho_pts1 = {(v.host, v.position) for v in c1.vertices.values() if v.host in scene.rhos}
    for delta in _SHIFTS:
        moved = _shifted(c2, scene, delta)
        if moved is None:
            continue
        if any((v.host, v.position) in rho_pts1 for v in moved.vertices.values()):
            continue
        total = 0
        clean = True
        for e1 in c1.edges:
            p1, q1 = (chart_position(scene, c1.vertices[x], e1.cell) for x in (e1.tail, e1.head))
            for e2 in moved.edges:
                if e2.cell != e1.cell:
                    continue
                p2, q2 = (chart_position(scene, moved.vertices[x], e2.cell) for x in (e2.tail, e2.head))
                hit = segment_intersection_2d(p1, q1, p2, q2)
                if hit is None:
                    continue
                if hit[0] != "proper":
                    clean = False
                    break
                orient = _det2(sub(q1, p1), sub(q2, p2))
                total += (1 if orient > 0 else -1) * int(_det2(e1.xi, e2.xi))
            if not clean:
                break
        if clean:
            return total
    raise CycleError("could not move the cycles into general position")
