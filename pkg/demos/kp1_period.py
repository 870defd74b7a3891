"""Walk through the period of a cycle on a slab with two focus-focus points.

The slab function is (a/u + 1)(1 + b u).  Its amoeba is two points on the
line, so the complement has three components with orders -1, 0, 1.  The
cycle winds once around each point and its period comes out as the monomial
a*b.
"""
from __future__ import annotations

from fractions import Fraction

from tropper.io import builtin_scene_path, load_scene
from tropper.period import monodromy, pair_c1, per_vertex_report, period


def main() -> None:
    scene = load_scene(builtin_scene_path("kp1"))
    print(f"scene: {scene.name}, parameters {scene.params}")
    for p in (-2, 0, 2):
        print(f"  order of the complement at Log u = {p}: {scene.order_at('rho', (Fraction(p),))}")

    cycle = scene.cycles["main"]
    print("\nper-crossing contributions:")
    for row in per_vertex_report(cycle, scene):
        ev = row.crossing
        print(f"  at u = {ev.point[0]}: order {ev.order}, weight {ev.weight:+d}, log form {row.log_form()}")

    p = period(cycle, scene, normalized_slabs=True)
    print(f"\nexponentiated period: {p.as_text()}")
    print(f"c1-pairing {pair_c1(cycle, scene)}, Dehn-twist count {monodromy(cycle, scene)}")


if __name__ == "__main__":
    main()
