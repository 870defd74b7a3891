"""Draw the amoeba of 1 + x + y + s/(xy) and label its complement components.

Writes amoeba.svg and amoeba.csv to the current directory.
"""
from __future__ import annotations

import os

from tropper import amoeba
from tropper.errors import Inconclusive, OnAmoeba
from tropper.series import SeriesRing


def main() -> None:
    ring = SeriesRing(("x", "y"), "s", 1)
    f = amoeba.specialize(ring.parse("1 + x + y + s*x^-1*y^-1"), {"s": 0.001})
    workers = int(os.environ.get("TROPPER_THREADS", "1"))
    raster = amoeba.amoeba_raster(f, [(-6, 6), (-6, 6)], resolution=80, workers=workers)
    with open("amoeba.svg", "w") as fh:
        fh.write(raster.to_svg())
    with open("amoeba.csv", "w") as fh:
        fh.write(raster.to_csv())
    print(f"{int(raster.mask.sum())} of {raster.mask.size} grid points lie near the amoeba")
    for point in [(-4.0, -4.0), (4.0, -1.0), (-1.0, 4.0), (-1.0, -1.0), (0.0, 0.0)]:
        try:
            print(f"order at {point}: {amoeba.complement_order(f, point)}")
        except (OnAmoeba, Inconclusive) as exc:
            print(f"order at {point}: {type(exc).__name__}")


if __name__ == "__main__":
    main()
