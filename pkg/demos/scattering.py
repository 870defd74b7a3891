"""Consistency of a small scattering diagram.

Two walls 1 + x t and 1 + y t through the origin are inconsistent on their
own; the outgoing wall 1 + x y t^2 repairs the composite around a loop.
"""
from __future__ import annotations

from tropper.io import builtin_scene_path, load_scene
from tropper.walls import check_consistency_codim0, loop_crossings


def main() -> None:
    scene = load_scene(builtin_scene_path("ks"))
    loop = scene.loops[0]["points"]
    ring = scene.chart_ring(2)
    for label, walls in (("all walls", scene.walls), ("without the diagonal", [w for w in scene.walls if w.id != "diagonal"])):
        crossings = loop_crossings(walls, loop)
        res = check_consistency_codim0(crossings, ring)
        order = ", ".join(f"{w.id}{d:+d}" for w, d in crossings)
        print(f"{label}: crossings {order}")
        print(f"  consistent to order t^2: {res.ok}")
        for mono, diff in res.discrepancies.items():
            print(f"  {mono} -> {mono} + ({diff})")


if __name__ == "__main__":
    main()
