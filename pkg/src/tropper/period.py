"""Periods of tropical 1-cycles.

The exponentiated period of a cycle is the product of three pairings:

* a gluing factor, the product over crossings of
  ``s_{sigma' rho}(xi_out) / s_{sigma rho}(xi_in)``;
* a power of ``t`` whose exponent is ``sum <d_e, xi_e> * kappa`` over crossings;
* ``exp`` of the weighted sum of Ronkin series
  ``sum <d_e, xi_e> * R(z^(-m_v) f_b)`` where ``R`` keeps the lattice-constant part
  of the logarithm (formal logarithms of units included).

All quantities are computed exactly.  The numeric Ronkin integral of
:mod:`tropper.amoeba` serves as an independent oracle in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .cycles import CrossingEvent, TropicalCycle, crossings, normalize_cycle, _check_hosts
from .errors import CycleError
from .exact import MultiplicativeValue, hermite_rows, kernel_sublattice
from .geometry import dot
from .scene import Scene
from .series import (
    SeriesRing,
    TruncatedSeries,
    exp_series,
    find_grading,
    graded,
    log_series,
    zero_exponent_part,
)


def ronkin_series(f: TruncatedSeries, m: Sequence[int], point: Sequence[float] | None = None,
                  params: Mapping[str, float] | None = None, grading=None) -> TruncatedSeries:
    """Lattice-constant part of ``log(z^(-m) f)``.

    The grading making ``z^(-m) f`` weight-positive is searched among units
    ranked by their numerical modulus at the Log point ``point`` (largest
    first) when ``point`` and ``params`` are given.  The result lives in the
    graded ring used for the logarithm.
    """
    g = f.shift(tuple(-x for x in m))
    if grading is None:
        pref = None
        if point is not None and params is not None:
            values = dict(params)

            def pref(key):
                lam, tdeg, mono = key
                c = abs(complex(g.terms[key]))
                if tdeg and g.ring.t_name in values:
                    c *= abs(values[g.ring.t_name]) ** tdeg
                for name, e in mono:
                    c *= abs(values.get(name, 1.0)) ** e
                return -c

        grading, _ = find_grading(g, preference=pref)
    return zero_exponent_part(log_series(graded(g, grading)))


def _pure_ring(scene: Scene, k: int) -> SeriesRing:
    return SeriesRing(scene.rho_variables, scene.series_variable, k)


def _flatten(series: TruncatedSeries, ring: SeriesRing) -> TruncatedSeries:
    return TruncatedSeries(ring, series.terms, series.logs)


@dataclass
class VertexContribution:
    """Contribution of one crossing to the period."""

    crossing: CrossingEvent
    kappa: int
    t_power: int
    gluing_ratio: MultiplicativeValue
    ronkin: TruncatedSeries

    @property
    def weight(self) -> int:
        return self.crossing.weight

    def log_form(self) -> str:
        """Unexponentiated contribution as a formal sum."""
        parts = [f"{self.t_power}*log(t)"]
        if not self.gluing_ratio.is_identity():
            parts.append(f"log({self.gluing_ratio})")
        if self.weight and (self.ronkin.terms or self.ronkin.logs):
            parts.append(f"{self.weight}*({self.ronkin})")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "crossing": self.crossing.to_json(),
            "kappa": self.kappa,
            "t_power": self.t_power,
            "gluing_ratio": self.gluing_ratio.to_json(),
            "ronkin": self.ronkin.to_json(),
            "log_form": self.log_form(),
        }


@dataclass
class PeriodExpression:
    """``gluing * t^t_exponent * exp(ronkin)``, defined modulo ``2 pi i`` in the exponent."""

    gluing: MultiplicativeValue
    t_exponent: int
    ronkin: TruncatedSeries
    contributions: list[VertexContribution] = field(default_factory=list)

    def exponentiated(self) -> TruncatedSeries:
        """``exp(ronkin)`` as an exact series (units restored from formal logarithms)."""
        r = self.ronkin
        if all(k[1] > 0 for k in r.terms):
            return exp_series(r)
        h = TruncatedSeries(r.ring, r.terms) + 1
        grading, _ = find_grading(h, unit=h.constant_key())
        return exp_series(TruncatedSeries(graded(h, grading).ring, r.terms, r.logs))

    def __add__(self, other: PeriodExpression) -> PeriodExpression:
        return PeriodExpression(
            self.gluing * other.gluing,
            self.t_exponent + other.t_exponent,
            self.ronkin + other.ronkin.retruncate(self.ronkin.ring),
            self.contributions + other.contributions,
        )

    def as_text(self) -> str:
        factors = []
        if not self.gluing.is_identity():
            factors.append(f"({self.gluing})")
        if self.t_exponent:
            factors.append(f"t^{self.t_exponent}")
        factors.append(f"({self.exponentiated()})")
        return " * ".join(factors)

    def to_json(self) -> dict:
        return {
            "gluing": self.gluing.to_json(),
            "gluing_text": str(self.gluing),
            "t_exponent": self.t_exponent,
            "ronkin": self.ronkin.to_json(),
            "ronkin_text": str(self.ronkin),
            "exponentiated": str(self.exponentiated()),
            "report": [c.to_json() for c in self.contributions],
        }


def _prepare(cycle: TropicalCycle, scene: Scene) -> list[CrossingEvent]:
    return crossings(normalize_cycle(cycle, scene), scene)


def _gluing_ratio(scene: Scene, ev: CrossingEvent) -> MultiplicativeValue:
    out = scene.gluing_value(ev.to_cell, ev.rho, ev.piece, ev.outgoing.xi)
    return out / scene.gluing_value(ev.from_cell, ev.rho, ev.piece, ev.incoming.xi)


def pair_c1(cycle: TropicalCycle, scene: Scene) -> int:
    """``sum <d_e, xi_e> * kappa`` over the crossings of the normalized cycle."""
    return sum(ev.weight * scene.kink(ev.rho, ev.piece) for ev in _prepare(cycle, scene))


def pair_gluing(cycle: TropicalCycle, scene: Scene) -> MultiplicativeValue:
    """Product over crossings of the gluing ratios."""
    out = MultiplicativeValue.identity()
    for ev in _prepare(cycle, scene):
        out = out * _gluing_ratio(scene, ev)
    return out


def per_vertex_report(cycle: TropicalCycle, scene: Scene, k: int | None = None,
                      normalized_slabs: bool = False) -> list[VertexContribution]:
    """One :class:`VertexContribution` per crossing of the normalized cycle."""
    k = scene.k if k is None else k
    ring = _pure_ring(scene, k)
    rows = []
    cache: dict = {}
    for ev in _prepare(cycle, scene):
        kappa = scene.kink(ev.rho, ev.piece)
        if ev.slab is None:
            r = ring.zero()
        else:
            key = (ev.slab, ev.order)
            if key not in cache:
                f = scene.slab_function(scene.slab(ev.slab), k, normalized=normalized_slabs)
                cache[key] = _flatten(ronkin_series(f, ev.order, ev.log_point, scene.params), ring)
            r = cache[key]
        rows.append(VertexContribution(ev, kappa, ev.weight * kappa, _gluing_ratio(scene, ev), r))
    return rows


def period(cycle: TropicalCycle, scene: Scene, k: int | None = None,
           normalized_slabs: bool = False) -> PeriodExpression:
    """Exponentiated period of ``cycle`` to order ``k`` in the series variable."""
    k = scene.k if k is None else k
    rows = per_vertex_report(cycle, scene, k, normalized_slabs)
    ring = _pure_ring(scene, k)
    gl = MultiplicativeValue.identity()
    texp = 0
    total = ring.zero()
    for row in rows:
        gl = gl * row.gluing_ratio
        texp += row.t_power
        if row.weight:
            total = total + row.ronkin.scale(row.weight)
    return PeriodExpression(gl, texp, total, rows)


def monodromy(cycle: TropicalCycle, scene: Scene) -> int:
    """Dehn-twist count of the cycle, read from its raw edge data.

    Every edge ending on a codimension-one cell contributes half of
    ``+-kappa * <d, xi>`` with ``d`` the covector pointing into the edge's
    cell (``+`` for incoming edges).  No normalization or crossing
    detection is involved, so this is an independent route to the
    c1-pairing.
    """
    _check_hosts(cycle, scene)
    twice = 0
    for vid, v in cycle.vertices.items():
        if v.host not in scene.rhos:
            continue
        r = scene.rhos[v.host]
        kappa = scene.kink(r.id, r.piece_at(v.position).id)
        for e, s in cycle.incident(vid):
            twice += s * kappa * dot(r.covector(e.cell), e.xi)
    if twice % 2:
        raise CycleError("odd total: the cycle does not cross its codimension-one cells cleanly")
    return twice // 2


# ---------------------------------------------------------------------------
# Picard sublattice
# ---------------------------------------------------------------------------


@dataclass
class PicardResult:
    basis: list[tuple[int, ...]]
    rank: int

    def to_json(self) -> dict:
        return {"rank": self.rank, "basis": [list(b) for b in self.basis]}


def picard_sublattice(c1: Sequence[int], gluing: Sequence[MultiplicativeValue]) -> PicardResult:
    """Basis of ``{n : sum n_i c1_i = 0 and prod gluing_i^n_i = 1}``.

    The angle condition ``sum n_i angle_i in Z`` is linearised with one extra
    integer unknown after clearing denominators.
    """
    r = len(c1)
    if len(gluing) != r:
        raise ValueError("need one gluing value per generator")
    names = sorted({name for g in gluing for name in g.exponents})
    rows = [list(c1) + [0]]
    for name in names:
        rows.append([g.exponents.get(name, 0) for g in gluing] + [0])
    D = 1
    for g in gluing:
        D = D * g.angle.denominator // math.gcd(D, g.angle.denominator)
    if D > 1:
        rows.append([int(g.angle * D) for g in gluing] + [-D])
    ker = kernel_sublattice(rows, r + 1)
    proj = [v[:r] for v in ker]
    basis = hermite_rows(proj, r)
    return PicardResult(basis, len(basis))


def picard_for_cycles(cycles: Sequence[TropicalCycle], scene: Scene) -> PicardResult:
    return picard_sublattice([pair_c1(c, scene) for c in cycles], [pair_gluing(c, scene) for c in cycles])


def brute_force_picard(c1: Sequence[int], gluing: Sequence[MultiplicativeValue], bound: int = 5) -> list[tuple[int, ...]]:
    """All coefficient vectors in ``[-bound, bound]^r`` satisfying the Picard conditions."""
    out = []
    for n in product(range(-bound, bound + 1), repeat=len(c1)):
        if sum(a * b for a, b in zip(n, c1)):
            continue
        acc = MultiplicativeValue.identity()
        for g, e in zip(gluing, n):
            if e:
                acc = acc * g ** e
        if acc.is_identity():
            out.append(n)
    return out


# ---------------------------------------------------------------------------
# lemma harnesses
# ---------------------------------------------------------------------------


def gamma_v_fraction(valency: int) -> Fraction:
    """Normalized integral over the vertex chain of a ``valency``-valent vertex, modulo 1."""
    if valency < 3:
        raise ValueError("valency must be at least 3")
    return Fraction(0) if valency % 2 == 0 else Fraction(1, 2)


def alternating_roots(m: int, n: int) -> bool:
    """Whether ``mu_m u mu_n`` and ``mu_(m+n)`` minus it alternate around the circle."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    A = {Fraction(j, m) for j in range(m)} | {Fraction(j, n) for j in range(n)}
    B = {Fraction(j, m + n) for j in range(m + n)} - A
    if len(A) != len(B):
        return False
    merged = sorted([(a, 0) for a in A] + [(b, 1) for b in B])
    labels = [lab for _, lab in merged]
    return all(labels[i] != labels[(i + 1) % len(labels)] for i in range(len(labels)))
