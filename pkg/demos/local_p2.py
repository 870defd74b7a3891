"""Normalization of the slab function 1 + x + y + s/(xy) and the resulting periods.

Without normalization the periods pick up powers of the series
h = exp(2s - 15s^2 + 560/3 s^3 - ...), the constant term of the logarithm
of the slab function.  Adding the pure s-series g removes it.
"""
from __future__ import annotations

from tropper.io import builtin_scene_path, load_scene
from tropper.period import period
from tropper.series import SeriesRing, find_grading, graded, log_series, normalize_slab, zero_exponent_part


def main() -> None:
    ring = SeriesRing(("x", "y"), "s", 4)
    f = ring.parse("1 + x + y + s*x^-1*y^-1")
    grading, _ = find_grading(f, unit=f.constant_key())
    f = graded(f, grading)
    weights = ", ".join(str(w) for w in grading.lattice)
    print(f"grading making f weight-positive: lattice ({weights}), s-weight {grading.t}")
    print(f"log h = {zero_exponent_part(log_series(f))}")
    print(f"normalizing correction g = {normalize_slab(f)}")

    scene = load_scene(builtin_scene_path("kp2"))
    for name in ("main", "local"):
        for normalized in (False, True):
            p = period(scene.cycles[name], scene, 3, normalized_slabs=normalized)
            tag = "normalized" if normalized else "raw"
            print(f"cycle {name:5s} {tag:10s}: t^{p.t_exponent} * ({p.exponentiated()})")


if __name__ == "__main__":
    main()
