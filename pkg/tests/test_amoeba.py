from __future__ import annotations

import math
import random

import numpy as np
import pytest

from tropper import amoeba
from tropper.errors import OnAmoeba
from tropper.series import SeriesRing


def poly(text, names=("x", "y"), params=None, k=4):
    ring = SeriesRing(names, "t", k)
    return amoeba.specialize(ring.parse(text), params or {})


def test_specialize_drops_positive_t_powers():
    f = poly("1 + x + t*y")
    assert f == {(0, 0): 1, (1, 0): 1}


def test_specialize_substitutes_other_series_variables():
    ring = SeriesRing(("x",), "s", 3)
    f = amoeba.specialize(ring.parse("1 + s*x"), {"s": 0.5})
    assert f == {(0,): 1, (1,): 0.5}


def test_orders_of_line_complement():
    f = poly("1 + x + y")
    assert amoeba.complement_order(f, (-3, -3)) == (0, 0)
    assert amoeba.complement_order(f, (2, -3)) == (1, 0)
    assert amoeba.complement_order(f, (-3, 2)) == (0, 1)
    with pytest.raises(OnAmoeba):
        amoeba.complement_order(f, (0, 0))


def test_order_away_from_lopsided_region():
    # at this point no term dominates, but the point is still off the amoeba
    f = poly("1 + x + y + 0.5*x*y")
    assert amoeba.lopsided_order(f, (1.0, -0.2)) is None
    assert amoeba.complement_order(f, (1.0, -0.2)) == (1, 0)


def test_one_dimensional_orders_count_roots():
    f = poly("(u - 2)*(u - 1/3)*u^-1", names=("u",))
    assert amoeba.complement_order(f, (-3.0,)) == (-1,)
    assert amoeba.complement_order(f, (0.0,)) == (0,)
    assert amoeba.complement_order(f, (3.0,)) == (1,)


def test_winding_number_agrees_with_order():
    f = poly("1 + x + y")
    assert round(amoeba.winding_number(f, (2, -3), axis=0)) == 1
    assert round(amoeba.winding_number(f, (2, -3), axis=1)) == 0


def test_ronkin_numeric_jensen():
    f = poly("u - 2", names=("u",))
    val = amoeba.ronkin_numeric(f, (0,), (0.0,))
    assert val.real == pytest.approx(math.log(2), abs=1e-9)
    assert abs(val.imag) == pytest.approx(math.pi, abs=1e-9)
    # outside the root the order is 1 and the Ronkin function is log|u| = x
    val = amoeba.ronkin_numeric(f, (1,), (2.0,))
    assert val.real == pytest.approx(0.0, abs=1e-9)


def test_ronkin_numeric_of_binomial_product_vanishes():
    rng = random.Random(3)
    for _ in range(5):
        f = {(0, 0): 1.0}
        for _ in range(3):
            m = (rng.randint(-2, 2), rng.randint(1, 2))
            a = rng.uniform(-0.3, 0.3)
            g = {}
            for e, c in f.items():
                g[e] = g.get(e, 0) + c
                e2 = (e[0] + m[0], e[1] + m[1])
                g[e2] = g.get(e2, 0) + a * c
            f = g
        assert abs(amoeba.ronkin_numeric(f, (0, 0), (0.0, 0.0))) < 1e-8


def test_raster_and_exports(tmp_path):
    f = poly("1 + x + y")
    r = amoeba.amoeba_raster(f, [(-3, 3), (-3, 3)], resolution=15)
    assert r.mask.shape == (15, 15)
    assert r.mask[7, 7]  # the origin lies on the amoeba
    assert not r.mask[0, 0]
    par = amoeba.amoeba_raster(f, [(-3, 3), (-3, 3)], resolution=15, workers=4)
    assert np.array_equal(par.mask, r.mask)
    svg = r.to_svg()
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    csv = r.to_csv()
    assert len(csv.strip().splitlines()) >= 15


def test_raster_of_empty_box():
    f = poly("1 + x + y")
    r = amoeba.amoeba_raster(f, [(1, 1), (-3, 3)], resolution=10)
    assert r.mask.size == 0
