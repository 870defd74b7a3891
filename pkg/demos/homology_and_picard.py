"""Twisted homology of an annulus around a focus-focus point, and a Picard lattice.

The local system has monodromy (1 1; 0 1) around the hole, so only the
invariant direction survives in H_1.  The Picard computation intersects the
kernels of the c1- and gluing pairings on twenty generators.
"""
from __future__ import annotations

from tropper.cycles import twisted_homology
from tropper.io import builtin_scene_path, load_complex, load_pairings
from tropper.period import picard_sublattice


def main() -> None:
    h = twisted_homology(load_complex(builtin_scene_path("annulus")))
    for q, group in h.items():
        print(f"H_{q} = {group}")
    c1, gluing = load_pairings(builtin_scene_path("picard20"))
    res = picard_sublattice(c1, gluing)
    print(f"Picard rank on {len(c1)} generators: {res.rank}")


if __name__ == "__main__":
    main()
