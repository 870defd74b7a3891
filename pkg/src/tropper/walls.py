"""Walls, slabs and their consistency checks.

A wall lives in one maximal cell and carries ``f = 1 + sum a z^m t^l`` with
``m`` tangent to it and ``l > 0``.  Crossing it acts on monomials by
``z^m -> f^(<n, m>) z^m`` where ``n`` is the primitive covector of the wall,
positive on the side the path starts from.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import CycleError, SceneError
from .exact import divisibility_index
from .geometry import Carrier, Polytope, as_point, sub, dot
from .series import SeriesRing, TruncatedSeries, inverse_series


@dataclass(frozen=True)
class Wall:
    """Codimension-zero wall.

    Attributes
    ----------
    id, cell:
        Identifier and the maximal cell whose chart contains the wall.
    carrier:
        The supporting polyhedron, in chart coordinates.
    function:
        Wall function in the chart ring.
    normal:
        Primitive covector vanishing on the wall.
    """

    id: str
    cell: str
    carrier: Carrier
    function: TruncatedSeries
    normal: tuple[int, ...]

    def problems(self) -> list[str]:
        out = []
        if divisibility_index(self.normal) != 1:
            out.append(f"wall {self.id}: normal {self.normal} is not primitive")
        cn = self.carrier.normal
        nn = self.normal
        if any(nn[i] * cn[j] != nn[j] * cn[i] for i in range(len(cn)) for j in range(i)):
            out.append(f"wall {self.id}: normal {self.normal} does not vanish on the carrier")
        zero = (0,) * len(self.normal)
        if self.function.terms.get((zero, 0, ())) != 1:
            out.append(f"wall {self.id}: function has no constant term 1")
        for (lam, tdeg, _), _c in self.function.terms.items():
            if (lam, tdeg) == (zero, 0):
                continue
            if tdeg <= 0:
                out.append(f"wall {self.id}: term with exponent {lam} has t-order {tdeg} <= 0")
            if dot(self.normal, lam) != 0:
                out.append(f"wall {self.id}: exponent {lam} is not tangent to the wall")
        return out


@dataclass(frozen=True)
class Slab:
    """Codimension-one wall on a piece of a codimension-one cell."""

    id: str
    rho: str
    piece: str
    function: TruncatedSeries
    carrier: Polytope | None = None

    def covers(self, p: Sequence[Fraction]) -> bool:
        return self.carrier is None or self.carrier.contains(p)


class WallCrossing:
    """Ring automorphism attached to crossing a wall in a given direction."""

    def __init__(self, wall: Wall, direction: int = 1):
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        self.wall = wall
        self.direction = direction
        self._powers: dict[tuple[SeriesRing, int], TruncatedSeries] = {}

    def inverse(self) -> WallCrossing:
        return WallCrossing(self.wall, -self.direction)

    def _power(self, ring: SeriesRing, e: int) -> TruncatedSeries:
        key = (ring, e)
        if key not in self._powers:
            f = self.wall.function.retruncate(ring)
            if e >= 0:
                self._powers[key] = f ** e
            else:
                self._powers[key] = inverse_series(f) ** (-e)
        return self._powers[key]

    def __call__(self, s: TruncatedSeries) -> TruncatedSeries:
        ring = s.ring
        out = ring.zero()
        for (lam, tdeg, mono), c in s.terms.items():
            e = self.direction * dot(self.wall.normal, lam)
            out = out + self._power(ring, e).shift(lam, tdeg, mono, c)
        return TruncatedSeries(ring, out.terms, s.logs)

    def __repr__(self):
        return f"WallCrossing({self.wall.id}, {self.direction:+d})"


def wall_crossing(wall: Wall, direction: int = 1) -> WallCrossing:
    """The automorphism of crossing ``wall`` from its positive side (``direction=+1``)."""
    return WallCrossing(wall, direction)


@dataclass
class ConsistencyResult:
    """Outcome of a consistency check: ``ok`` plus the offending data."""

    ok: bool
    crossings: list[tuple[str, int]] = field(default_factory=list)
    discrepancies: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "crossings": [list(c) for c in self.crossings], "discrepancies": self.discrepancies}


_PERTURBATIONS = [(Fraction(0), Fraction(0))] + [
    (Fraction(1, 997 * j), Fraction(1, 1009 * j + 3)) for j in range(1, 12)
]


def loop_crossings(walls: Sequence[Wall], loop: Sequence[Sequence]) -> list[tuple[Wall, int]]:
    """Ordered wall crossings of a closed polygonal loop in a single chart.

    A crossing from the positive side of ``wall.normal`` to the negative side
    gets direction ``+1``.  Loops meeting a wall non-transversally, or passing
    through the boundary of a carrier, are shifted by a small deterministic
    rational vector and retried.
    """
    pts = [as_point(p) for p in loop]
    if len(pts) < 3 or pts[0] != pts[-1]:
        raise CycleError("the loop must be closed (first point equal to last point)")
    for delta in _PERTURBATIONS:
        shift = tuple(delta[j % 2] for j in range(len(pts[0])))
        moved = [tuple(a + b for a, b in zip(p, shift)) for p in pts]
        result = _crossings_of(walls, moved)
        if result is not None:
            return result
    raise CycleError("could not perturb the loop into general position")


def _crossings_of(walls: Sequence[Wall], pts: list) -> list[tuple[Wall, int]] | None:
    out: list[tuple[Fraction, int, Wall, int]] = []
    for i in range(len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        for w in walls:
            car = w.carrier
            dp = dot(car.normal, p) - car.offset
            dq = dot(car.normal, q) - car.offset
            if dp == 0 or dq == 0:
                if car.relative_position(p if dp == 0 else q) != "outside":
                    return None
                continue
            if (dp > 0) == (dq > 0):
                continue
            hit = car.segment_hit(p, q)
            assert hit is not None
            s, point = hit
            where = car.relative_position(point)
            if where == "boundary":
                return None
            if where == "outside":
                continue
            step = dot(w.normal, sub(q, p))
            out.append((Fraction(i) + s, i, w, -1 if step > 0 else 1))
    out.sort(key=lambda r: r[0])
    for a, b in zip(out, out[1:]):
        if a[0] == b[0]:
            return None
    return [(w, d) for _, _, w, d in out]


def compose_crossings(crossings: Sequence[tuple[Wall, int]], s: TruncatedSeries) -> TruncatedSeries:
    """Apply the crossings in order: the first crossing acts first."""
    for wall, d in crossings:
        s = WallCrossing(wall, d)(s)
    return s


def check_consistency_codim0(
    crossings: Sequence[tuple[Wall, int]],
    ring: SeriesRing,
) -> ConsistencyResult:
    """Whether the composite of ``crossings`` is the identity modulo ``t^(k+1)``.

    The composite is evaluated on each coordinate monomial ``z_i`` and its
    inverse.
    """
    disc: dict[str, str] = {}
    n = ring.rank
    for i in range(n):
        for sign in (1, -1):
            lam = tuple(sign if j == i else 0 for j in range(n))
            z = ring.monomial(lam)
            image = compose_crossings(crossings, z)
            if image != z:
                disc[str(z)] = str(image - z)
    return ConsistencyResult(not disc, [(w.id, d) for w, d in crossings], disc)


def reduce_mod_t(f: TruncatedSeries, degeneration: str = "t") -> TruncatedSeries:
    """Reduction modulo the degeneration parameter.

    When the series variable is a different symbol the series is returned
    unchanged (it does not involve the degeneration parameter).
    """
    if f.ring.t_name != degeneration:
        return f
    if any(k[1] < 0 for k in f.terms):
        raise SceneError("slab function has negative powers of the degeneration parameter")
    return TruncatedSeries(f.ring, {k: c for k, c in f.terms.items() if k[1] == 0})


def check_consistency_codim1(slabs: Sequence[Slab], degeneration: str = "t") -> ConsistencyResult:
    """Reductions modulo ``t`` of slabs on one codimension-one cell.

    Slabs on the same piece must reduce to the same polynomial; slabs on
    different pieces must reduce to polynomials differing by a monomial
    factor ``z^m``.
    """
    disc: dict[str, str] = {}
    reductions = [(s, reduce_mod_t(s.function, degeneration)) for s in slabs]
    for i, (s1, r1) in enumerate(reductions):
        for s2, r2 in reductions[i + 1:]:
            if s1.rho != s2.rho:
                raise ValueError("slabs must lie on the same codimension-one cell")
            if s1.piece == s2.piece:
                if r1 != r2:
                    disc[f"{s1.id}/{s2.id}"] = f"{r1} != {r2}"
            elif _monomial_ratio(r1, r2) is None:
                disc[f"{s1.id}/{s2.id}"] = f"{r2} is not z^m * ({r1})"
    return ConsistencyResult(not disc, [], disc)


def _monomial_ratio(a: TruncatedSeries, b: TruncatedSeries) -> tuple[int, ...] | None:
    if not a.terms or not b.terms or len(a.terms) != len(b.terms):
        return None
    ka = min(a.terms)
    for kb in b.terms:
        if kb[1:] != ka[1:]:
            continue
        m = tuple(y - x for x, y in zip(ka[0], kb[0]))
        if a.shift(m) == b:
            return m
    return None
