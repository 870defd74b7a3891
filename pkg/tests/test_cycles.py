from __future__ import annotations

import random
from fractions import Fraction

import pytest
from conftest import perturb_cycle, random_kp1_cycle

from tropper.cycles import (
    CycleEdge,
    CycleVertex,
    TropicalCycle,
    TwistedComplex,
    check_balancing,
    crossings,
    intersection_pairing,
    normalize_cycle,
    twisted_homology,
)
from tropper.errors import CycleError, ForbiddenStratum
from tropper.io import builtin_scene_path, load_complex

F = Fraction


def test_fixture_cycles_are_balanced(kp1, kp2, focus):
    for scene in (kp1, kp2):
        for c in scene.cycles.values():
            assert check_balancing(c, scene).ok
    assert check_balancing(focus.cycles["invariant"], focus).ok
    assert not check_balancing(focus.cycles["through"], focus).ok


def test_standard_mode_sees_monodromy(focus):
    # the invariant direction balances in either convention
    assert check_balancing(focus.cycles["invariant"], focus, mode="standard").ok


def test_normalized_kp1_crossings(kp1):
    events = crossings(normalize_cycle(kp1.cycles["main"], kp1), kp1)
    got = sorted((ev.point, ev.order, ev.weight) for ev in events)
    assert got == [
        ((F(-2),), (-1,), 1),
        ((F(-1, 2),), (0,), -1),
        ((F(1, 2),), (0,), -1),
        ((F(2),), (1,), 1),
    ]


def test_normalization_is_idempotent(kp1, kp2):
    for scene in (kp1, kp2):
        for c in scene.cycles.values():
            n1 = normalize_cycle(c, scene)
            n2 = normalize_cycle(n1, scene)
            assert len(n1.edges) == len(n2.edges)
            assert sorted(ev.weight for ev in crossings(n1, scene)) == sorted(ev.weight for ev in crossings(n2, scene))


def test_non_atomic_crossing_is_split(kp1):
    seeds = (random.Random(s) for s in range(30))
    c = next(c for c in (random_kp1_cycle(kp1, r) for r in seeds) if any(abs(e.xi[1]) > 1 for e in c.edges))
    n = normalize_cycle(c, kp1)
    for ev in crossings(n, kp1):
        assert abs(ev.incoming.xi[1]) <= 1 and abs(ev.outgoing.xi[1]) <= 1


def test_crossing_on_amoeba_is_rejected(focus):
    verts = [CycleVertex("a", "upper", (0, 1)), CycleVertex("b", "rho", (F(0),)), CycleVertex("c", "lower", (0, -1))]
    edges = [CycleEdge("ab", "a", "b", "upper", (0, -1)), CycleEdge("bc", "b", "c", "lower", (0, -1)),
             CycleEdge("ca", "c", "a", "lower", (0, 1))]
    c = TropicalCycle.build(verts, edges)
    with pytest.raises((ForbiddenStratum, CycleError)):
        normalize_cycle(c, focus)


def test_unknown_host_is_rejected(kp1):
    verts = [CycleVertex("a", "nowhere", (0, 1)), CycleVertex("b", "upper", (0, 2))]
    c = TropicalCycle.build(verts, [CycleEdge("ab", "a", "b", "upper", (1, 0)), CycleEdge("ba", "b", "a", "upper", (-1, 0))])
    with pytest.raises(CycleError):
        normalize_cycle(c, kp1)


def test_perturbation_keeps_balancing(kp1):
    rng = random.Random(2)
    c = perturb_cycle(kp1.cycles["main"], kp1, rng)
    assert check_balancing(c, kp1).ok


def test_annulus_homology():
    h = twisted_homology(load_complex(builtin_scene_path("annulus")))
    assert (h[0].rank, h[0].torsion) == (1, ())
    assert (h[1].rank, h[1].torsion) == (1, ())
    assert (h[2].rank, h[2].torsion) == (0, ())


def _circle(matrix):
    return TwistedComplex(3, [(0, 1), (1, 2), (2, 0)], [], 2, {(2, 0): matrix} if matrix else {})


def test_circle_homology_against_coinvariants():
    # H_0 = coinvariants Z^2 / (T - 1), H_1 = invariants ker(T - 1)
    h = twisted_homology(_circle(None))
    assert (h[0].rank, h[1].rank) == (2, 2)
    h = twisted_homology(_circle(((-1, 0), (0, -1))))
    assert (h[0].rank, h[0].torsion, h[1].rank) == (0, (2, 2), 0)
    h = twisted_homology(_circle(((1, 2), (0, 1))))
    assert (h[0].rank, h[0].torsion, h[1].rank) == (1, (2,), 1)


def test_sphere_homology():
    tri = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    h = twisted_homology(TwistedComplex(4, edges, tri, 1, {}))
    assert [h[q].rank for q in (0, 1, 2)] == [1, 0, 1]


def test_non_flat_system_is_rejected():
    cx = TwistedComplex(3, [(0, 1), (1, 2), (0, 2)], [(0, 1, 2)], 1, {(0, 1): ((-1,),)})
    with pytest.raises(ValueError):
        twisted_homology(cx)


def test_intersection_pairing_properties(kp1):
    a = kp1.cycles["main"]
    b = random_kp1_cycle(kp1, random.Random(4))
    ab = intersection_pairing(a, b, kp1)
    assert intersection_pairing(b, a, kp1) == ab
    assert intersection_pairing(a, b.negated(), kp1) == -ab


def test_intersection_with_contractible_loop_vanishes(focus):
    loop = focus.cycles["invariant"]
    verts = [CycleVertex("p", "upper", (F(-1, 5), F(1, 2))), CycleVertex("q", "upper", (F(3, 5), F(3, 2))),
             CycleVertex("r", "upper", (F(-1, 2), F(2)))]
    edges = [CycleEdge("pq", "p", "q", "upper", (0, 1)), CycleEdge("qr", "q", "r", "upper", (0, 1)),
             CycleEdge("rp", "r", "p", "upper", (0, 1))]
    tri = TropicalCycle.build(verts, edges)
    assert intersection_pairing(loop, tri, focus) == 0
