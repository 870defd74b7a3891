"""Exact polyhedral helpers for small dimensions (rational arithmetic)."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exact import kernel_sublattice

Point = tuple[Fraction, ...]


def as_point(p: Sequence) -> Point:
    return tuple(Fraction(str(x)) if isinstance(x, str) else Fraction(x) for x in p)


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _integral(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
    return tuple(int(Fraction(x) * den) for x in v)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def facets(vertices: Sequence[Point]) -> list[tuple[tuple[int, ...], Fraction]]:
    """Inequalities ``<a, x> >= b`` describing the convex hull of full-dimensional ``vertices``.

    Normals are primitive integral vectors pointing inwards.
    """
    pts = [as_point(v) for v in vertices]
    d = len(pts[0])
    if d == 1:
        lo, hi = min(p[0] for p in pts), max(p[0] for p in pts)
        return [((1,), lo), ((-1,), -hi)]
    out: dict[tuple[int, ...], Fraction] = {}
    for subset in combinations(pts, d):
        diffs = [_integral(sub(q, subset[0])) for q in subset[1:]]
        ker = kernel_sublattice(diffs)
        if len(ker) != 1:
            continue
        a = ker[0]
        vals = [dot(a, p) for p in pts]
        b = dot(a, subset[0])
        if all(v >= b for v in vals):
            normal = a
        elif all(v <= b for v in vals):
            normal, b = tuple(-x for x in a), -b
        else:
            continue
        out[normal] = b
    if len(out) <= d:
        raise ValueError("vertices do not span a full-dimensional polytope")
    return sorted(out.items())


class Polytope:
    """Convex polytope given by its vertices, with exact facet inequalities."""

    def __init__(self, vertices: Sequence[Sequence]):
        self.vertices: tuple[Point, ...] = tuple(as_point(v) for v in vertices)
        self.dim = len(self.vertices[0])
        self.facets = facets(self.vertices)

    def contains(self, p: Sequence[Fraction]) -> bool:
        return all(dot(a, p) >= b for a, b in self.facets)

    def interior_contains(self, p: Sequence[Fraction]) -> bool:
        return all(dot(a, p) > b for a, b in self.facets)

    def on_boundary(self, p: Sequence[Fraction]) -> bool:
        return self.contains(p) and not self.interior_contains(p)

    def facet_of(self, points: Sequence[Point]) -> tuple[tuple[int, ...], Fraction] | None:
        """The facet containing all ``points`` (if any)."""
        for a, b in self.facets:
            if all(dot(a, p) == b for p in points):
                return a, b
        return None


class Carrier:
    """A codimension-one polyhedron inside a chart: hyperplane piece given by vertices.

    Supports ``n = 2`` (segments) and ``n = 3`` (convex polygons).
    """

    def __init__(self, vertices: Sequence[Sequence]):
        self.vertices = tuple(as_point(v) for v in vertices)
        n = len(self.vertices[0])
        if len(self.vertices) < n:
            raise ValueError("carrier needs at least n vertices")
        diffs = [_integral(sub(v, self.vertices[0])) for v in self.vertices[1:]]
        ker = kernel_sublattice(diffs)
        if len(ker) != 1:
            raise ValueError("carrier vertices do not span a hyperplane")
        self.normal: tuple[int, ...] = ker[0]
        self.offset = dot(self.normal, self.vertices[0])
        self.n = n

    def relative_position(self, p: Sequence[Fraction]) -> str:
        """``"interior"``, ``"boundary"`` or ``"outside"`` for a point on the hyperplane."""
        if dot(self.normal, p) != self.offset:
            return "outside"
        if self.n == 2:
            a, b = self.vertices[0], self.vertices[-1]
            d = sub(b, a)
            i = 0 if d[0] != 0 else 1
            s = (p[i] - a[i]) / d[i]
            if 0 < s < 1:
                return "interior"
            return "boundary" if s in (0, 1) else "outside"
        # n == 3: project to the two coordinates where the normal is not dominant
        drop = max(range(3), key=lambda j: abs(self.normal[j]))
        keep = [j for j in range(3) if j != drop]
        poly = [tuple(v[j] for j in keep) for v in self.vertices]
        q = tuple(p[j] for j in keep)
        signs = []
        for i in range(len(poly)):
            a, b = poly[i], poly[(i + 1) % len(poly)]
            cross = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
            signs.append(cross)
        if all(s > 0 for s in signs) or all(s < 0 for s in signs):
            return "interior"
        if all(s >= 0 for s in signs) or all(s <= 0 for s in signs):
            return "boundary"
        return "outside"

    def segment_hit(self, p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Fraction, Point] | None:
        """Parameter ``s`` and point where the segment ``p -> q`` meets the hyperplane, if transversal."""
        dp = dot(self.normal, p) - self.offset
        dq = dot(self.normal, q) - self.offset
        if dp == dq:
            return None
        s = dp / (dp - dq)
        if not 0 <= s <= 1:
            return None
        point = tuple(a + s * (b - a) for a, b in zip(p, q))
        return s, point


def segment_intersection_2d(p1, q1, p2, q2) -> tuple[str, Fraction, Fraction] | None:
    """Intersection of two planar segments.

    Returns ``("proper", s, u)`` for a transverse crossing at parameters strictly
    inside both, ``("degenerate", s, u)`` when the segments touch at an endpoint
    or overlap, and ``None`` when they are disjoint.
    """
    r = sub(q1, p1)
    d = sub(q2, p2)
    denom = r[0] * d[1] - r[1] * d[0]
    w = sub(p2, p1)
    if denom == 0:
        if w[0] * r[1] - w[1] * r[0] != 0:
            return None  # parallel, not collinear
        rr = dot(r, r)
        if rr == 0:
            return None
        t0 = dot(w, r) / rr
        t1 = dot(sub(q2, p1), r) / rr
        lo, hi = min(t0, t1), max(t0, t1)
        if hi < 0 or lo > 1:
            return None
        return ("degenerate", max(lo, Fraction(0)), Fraction(0))
    s = (w[0] * d[1] - w[1] * d[0]) / denom
    u = (w[0] * r[1] - w[1] * r[0]) / denom
    if not (0 <= s <= 1 and 0 <= u <= 1):
        return None
    if 0 < s < 1 and 0 < u < 1:
        return ("proper", s, u)
    return ("degenerate", s, u)
