from __future__ import annotations

import random
from fractions import Fraction

import pytest

from tropper.cycles import CycleEdge, CycleVertex, TropicalCycle
from tropper.io import builtin_scene_path, load_scene

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def kp1():
    return load_scene(builtin_scene_path("kp1"))


@pytest.fixture
def kp2():
    return load_scene(builtin_scene_path("kp2"))


@pytest.fixture
def ks():
    return load_scene(builtin_scene_path("ks"))


@pytest.fixture
def focus():
    return load_scene(builtin_scene_path("focus_focus"))


def _frac(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 97) -> Fraction:
    a, b = int(lo * den) + 1, int(hi * den) - 1
    return Fraction(rng.randint(a, b), den)


def random_kp1_cycle(scene, rng: random.Random, name: str = "random") -> TropicalCycle:
    """A balanced cycle on the two-point slab scene with random geometry.

    Two loops wind around the two amoeba points; each loop carries a
    coefficient with normal component ``n`` and a random tangent component,
    and a bridge edge in the upper cell restores balancing.  Edges are
    randomly subdivided and reversed.
    """
    n = rng.choice([1, 2])
    p = rng.randint(-2, 2)
    v = (p, -n)
    out_a = _frac(rng, Fraction(-29, 10), Fraction(-13, 10))
    in_a = _frac(rng, Fraction(-11, 10), Fraction(-1, 10))
    in_b = _frac(rng, Fraction(1, 10), Fraction(13, 10))
    out_b = _frac(rng, Fraction(15, 10), Fraction(29, 10))
    ya, yb = _frac(rng, Fraction(1, 10), Fraction(29, 10)), _frac(rng, Fraction(1, 10), Fraction(29, 10))
    la, lb = _frac(rng, Fraction(-29, 10), Fraction(-1, 10)), _frac(rng, Fraction(-29, 10), Fraction(-1, 10))
    xa, xb = _frac(rng, Fraction(-29, 10), Fraction(-1, 10)), _frac(rng, Fraction(1, 10), Fraction(29, 10))

    verts = [
        CycleVertex("a1", "upper", (xa, ya)),
        CycleVertex("a4", "rho", (in_a,)),
        CycleVertex("a3", "lower", (xa, la)),
        CycleVertex("a2", "rho", (out_a,)),
        CycleVertex("b1", "upper", (xb, yb)),
        CycleVertex("b4", "rho", (in_b,)),
        CycleVertex("b3", "lower", (xb, lb)),
        CycleVertex("b2", "rho", (out_b,)),
    ]
    va = scene.transport("rho", "upper", v, (in_a,))
    wa = scene.transport("rho", "lower", va, (out_a,))
    vb = scene.transport("rho", "upper", v, (in_b,))
    wb = scene.transport("rho", "lower", vb, (out_b,))
    bridge = tuple(x - y for x, y in zip(v, wa))
    assert tuple(x - y for x, y in zip(wb, v)) == bridge
    edges = [
        CycleEdge("a14", "a1", "a4", "upper", v),
        CycleEdge("a43", "a4", "a3", "lower", va),
        CycleEdge("a32", "a3", "a2", "lower", va),
        CycleEdge("a21", "a2", "a1", "upper", wa),
        CycleEdge("b14", "b1", "b4", "upper", v),
        CycleEdge("b43", "b4", "b3", "lower", vb),
        CycleEdge("b32", "b3", "b2", "lower", vb),
        CycleEdge("b21", "b2", "b1", "upper", wb),
        CycleEdge("bridge", "b1", "a1", "upper", bridge),
    ]
    return perturb_cycle(TropicalCycle.build(verts, edges, name=name), scene, rng)


def perturb_cycle(cycle: TropicalCycle, scene, rng: random.Random) -> TropicalCycle:
    """Randomly subdivide edges inside maximal cells and reverse some edges."""
    verts = dict(cycle.vertices)
    edges = []
    for e in cycle.edges:
        pieces = [e]
        if rng.random() < 0.5:
            tail, head = verts[e.tail], verts[e.head]
            if tail.host == e.cell and head.host == e.cell:
                mid = tuple((a + b) / 2 for a, b in zip(tail.position, head.position))
            else:
                cellv = tail if tail.host == e.cell else head
                mid = tuple(c + Fraction(rng.randint(-9, 9), 100) for c in cellv.position)
                if not scene.cells[e.cell].polytope.interior_contains(mid):
                    mid = cellv.position
            vid = f"{e.id}_m"
            verts[vid] = CycleVertex(vid, e.cell, mid)
            pieces = [CycleEdge(f"{e.id}_1", e.tail, vid, e.cell, e.xi),
                      CycleEdge(f"{e.id}_2", vid, e.head, e.cell, e.xi)]
        for piece in pieces:
            if rng.random() < 0.3:
                piece = CycleEdge(piece.id, piece.head, piece.tail, piece.cell, tuple(-x for x in piece.xi))
            edges.append(piece)
    return TropicalCycle.build(list(verts.values()), edges, name=cycle.name)


def disjoint_union(a: TropicalCycle, b: TropicalCycle, name: str = "union") -> TropicalCycle:
    verts = [CycleVertex(f"A.{v.id}", v.host, v.position) for v in a.vertices.values()]
    verts += [CycleVertex(f"B.{v.id}", v.host, v.position) for v in b.vertices.values()]
    edges = [CycleEdge(f"A.{e.id}", f"A.{e.tail}", f"A.{e.head}", e.cell, e.xi) for e in a.edges]
    edges += [CycleEdge(f"B.{e.id}", f"B.{e.tail}", f"B.{e.head}", e.cell, e.xi) for e in b.edges]
    return TropicalCycle.build(verts, edges, name=name)
